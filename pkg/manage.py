#!/usr/bin/env python
"""
Utilitário de linha de comando do QIM Lab (Django).

    python manage.py migrate
    python manage.py test
    python manage.py qim_run experiments/plans/am_levels.ini

Os comandos qim_* também estão em `python qim.py <sub>`.
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the requirements "
            "(pip install -r requirements.txt) inside the project virtualenv."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
