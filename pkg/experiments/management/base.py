# experiments/management/base.py
from __future__ import annotations

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.exceptions import QimError
from embedding.types import DecisionRule, DitherSign, Variant


class QimCommand(BaseCommand):
    """
    Base dos comandos qim_*: subclasses implementam run().
    Qualquer QimError/OSError vira CommandError com código de saída 2.
    """

    def run(self, *args, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            return self.run(*args, **options)
        except (QimError, OSError) as exc:
            raise CommandError(f"❌ Error: {exc}", returncode=2) from exc

    def ok(self, message: str) -> None:
        self.stdout.write(self.style.SUCCESS(f"✅ {message}"))


def add_qim_arguments(parser, *, step_required: bool = False) -> None:
    """Opções do transmissor/receptor compartilhadas por embed-file e decode-file."""
    parser.add_argument("--levels", type=int, default=2 if step_required else None, required=not step_required,
                        help="Quantization levels N (step = 2*max|s|/N)")
    parser.add_argument("--step", type=float, required=step_required,
                        help="Quantizer step; the receiver needs the value printed by embed-file")
    parser.add_argument("--variant", choices=Variant.values, default=Variant.SCALAR)
    parser.add_argument("--alpha", type=float, default=None,
                        help="Distortion compensation (DC variants); default from QIM_DEFAULT_ALPHA")
    parser.add_argument("--dither-sign", choices=DitherSign.values, default=None)
    parser.add_argument("--samples-per-bit", type=int, default=1)
    parser.add_argument("--format", dest="fmt", choices=["f32", "wav"], default=None,
                        help="Capture format (default: from the file extension)")


def qim_options(options) -> dict:
    alpha = options.get("alpha")
    sign = options.get("dither_sign")
    return {
        "variant": Variant(options["variant"]),
        "alpha": float(settings.QIM_DEFAULT_ALPHA) if alpha is None else alpha,
        "dither_sign": DitherSign(sign or settings.QIM_DEFAULT_DITHER_SIGN),
        "samples_per_bit": options["samples_per_bit"],
    }


RULE_CHOICES = DecisionRule.values
