#experiments/management/commands/qim_decode_file.py
from __future__ import annotations

from pathlib import Path

from embedding.codec import decode_message
from embedding.types import DecisionRule, QimConfig
from experiments.management.base import RULE_CHOICES, QimCommand, add_qim_arguments, qim_options
from hosts.services.captures import load_capture


class Command(QimCommand):
    help = "Decodifica L bits de uma captura recebida (precisa do step usado no embedding)."

    def add_arguments(self, parser):
        parser.add_argument("--received", required=True, help="Received capture")
        parser.add_argument("--bits", type=int, required=True, help="Message length L in bits")
        parser.add_argument("--rule", choices=RULE_CHOICES, default=DecisionRule.SOFT)
        parser.add_argument("--out", help="Write the decoded message as hex to this file")
        add_qim_arguments(parser, step_required=True)

    def run(self, *args, **options):
        received = load_capture(options["received"], options.get("fmt"))
        qim = qim_options(options)
        config = QimConfig(levels=options["levels"], step=options["step"], **qim)

        message = decode_message(received, options["bits"], config, rule=options["rule"])
        text = message.to_hex()

        if options.get("out"):
            Path(options["out"]).write_text(text + "\n", encoding="utf-8")
            self.ok(f"{len(message)} bits gravados em {options['out']}")
        else:
            self.stdout.write(text)
