#experiments/management/commands/qim_spectrum.py
from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from django.conf import settings

from channel.awgn import ChannelConfig
from embedding.codec import embed_message, samples_per_bit_for
from embedding.quantizers import step_from_signal
from embedding.types import BitMessage, QimConfig
from experiments.management.base import QimCommand
from experiments.services.export import Figure, emit_plot, emit_series
from experiments.services.plans import load_plan
from experiments.services.runner import cell_alpha
from hosts.services.synthesis import synthesize_host
from metrics.spectrum import PULSE_TAPS, out_of_band_rejection, psd, pulse_shape_for_host, transition_width


class Command(QimCommand):
    help = "PSD do host e do composto QIM com formatação de pulso, e rejeição fora da banda."

    def add_arguments(self, parser):
        parser.add_argument("plan", help="Plan file (.ini); uses the first variant, N and bit rate of the grid")
        parser.add_argument("--out", help="Output directory (default: QIM_RESULTS_DIR/<plan name>)")
        parser.add_argument("--seed", type=int, help="Override the plan seed")
        parser.add_argument("--nfft", type=int, default=1024)
        parser.add_argument("--taps", type=int, default=PULSE_TAPS, help="Pulse-shaping FIR length")
        parser.add_argument("--guard", type=float, help="Guard band (Hz) around the channel; default: filter transition width")
        parser.add_argument("--no-plots", action="store_true")

    def run(self, *args, **options):
        plan = load_plan(options["plan"])
        if options.get("seed") is not None:
            plan = plan.with_seed(options["seed"])
        spec = plan.host
        spec.validate()
        out_dir = Path(options.get("out") or Path(settings.QIM_RESULTS_DIR) / plan.name)

        variant = plan.variants[0]
        levels = plan.levels_grid[0]
        snr = next((s for s in plan.snr_grid_db if math.isfinite(s)), math.inf)

        host = synthesize_host(spec, plan.duration, plan.seed)
        k = samples_per_bit_for(host.sample_rate, plan.bit_rate_grid[0])
        step = step_from_signal(host, levels)
        config = QimConfig(
            levels=levels,
            step=step,
            alpha=cell_alpha(plan, variant, step, host, ChannelConfig(snr)),
            variant=variant,
            dither_sign=plan.dither_sign,
            samples_per_bit=k,
        )
        # a mensagem ocupa o host inteiro (ou o que couber)
        length = max(1, min(plan.message_length, len(host) // k))
        message = BitMessage.random(length, np.random.default_rng(plan.seed))
        composite = embed_message(host, message, config)

        taps = options["taps"]
        shaped_host = pulse_shape_for_host(host, spec, taps)
        shaped_composite = pulse_shape_for_host(composite, spec, taps)

        curves = {
            "host": psd(shaped_host, options["nfft"]),
            f"{variant.value}_N{levels}": psd(shaped_composite, options["nfft"]),
        }
        guard = options.get("guard")
        guard = transition_width(spec.sample_rate, taps) if guard is None else guard
        band = spec.channel_band()

        self.stdout.write(
            f"{spec.kind.label}: canal {band[0]:g}–{band[1]:g} Hz, guarda {guard:g} Hz, {variant.label} N={levels}, K={k}"
        )
        for name, spectrum in curves.items():
            self.stdout.write(f"  {name}: fora da banda {out_of_band_rejection(spectrum, band, guard):.1f} dB abaixo do pico")

        paths = emit_series(curves, Figure.SPECTRUM, out_dir)
        if not options.get("no_plots"):
            paths.append(emit_plot(curves, Figure.SPECTRUM, out_dir / "spectrum.svg"))
        self.ok(f"{len(paths)} arquivos em {out_dir}")
