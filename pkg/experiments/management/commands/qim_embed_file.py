#experiments/management/commands/qim_embed_file.py
from __future__ import annotations

from pathlib import Path

from embedding.codec import configure, embed_message
from embedding.types import BitMessage, QimConfig
from experiments.management.base import QimCommand, add_qim_arguments, qim_options
from hosts.services.captures import load_capture, save_capture


class Command(QimCommand):
    help = "Embute uma mensagem (arquivo hex) numa captura e grava o composto."

    def add_arguments(self, parser):
        parser.add_argument("--host", required=True, help="Host capture (.f32 + .json sidecar, or .wav)")
        parser.add_argument("--message", required=True, help="Text file with the message in hex (MSB first)")
        parser.add_argument("--out", required=True, help="Composite capture to write")
        add_qim_arguments(parser)

    def run(self, *args, **options):
        host = load_capture(options["host"], options.get("fmt"))
        message = BitMessage.from_hex(Path(options["message"]).read_text(encoding="utf-8"))
        qim = qim_options(options)

        config = configure(host, options["levels"], **qim)
        if options.get("step"):
            config = QimConfig(
                levels=config.levels,
                step=options["step"],
                alpha=config.alpha,
                variant=config.variant,
                dither_sign=config.dither_sign,
                samples_per_bit=config.samples_per_bit,
            )

        composite = embed_message(host, message, config)
        out = save_capture(composite, options["out"], options.get("fmt"))

        self.stdout.write(f"{len(message)} bits, {config.variant.label}, N={config.levels}, K={config.samples_per_bit}")
        self.stdout.write(f"step={config.step!r}")
        self.ok(f"Composto gravado em {out}")
