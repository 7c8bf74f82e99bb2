#!/usr/bin/env python
"""
CLI do harness QIM: `python qim.py <sub> ...` roda o comando `qim_<sub>`.

    python qim.py run experiments/plans/am_levels.ini --out results/am
    python qim.py spectrum experiments/plans/fm_spectrum.ini
    python qim.py embed-file --host host.f32 --message msg.hex --levels 8 --out composite.f32
    python qim.py decode-file --received composite.f32 --bits 64 --step 0.25
"""
import os
import sys

SUBCOMMANDS = ("run", "spectrum", "embed-file", "decode-file")


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc

    if len(sys.argv) < 2 or sys.argv[1] not in SUBCOMMANDS:
        print(f"usage: qim.py {{{','.join(SUBCOMMANDS)}}} ...", file=sys.stderr)
        sys.exit(2)

    command = "qim_" + sys.argv[1].replace("-", "_")
    execute_from_command_line([sys.argv[0], command, *sys.argv[2:]])


if __name__ == '__main__':
    main()
