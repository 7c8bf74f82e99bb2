#experiments/management/commands/qim_run.py
from __future__ import annotations

import math
from pathlib import Path

from django.conf import settings

from experiments.management.base import QimCommand
from experiments.services.analysis import ber_curves, max_throughput, snr_at_ber, usable
from experiments.services.export import Figure, emit_csv, emit_plot, emit_series
from experiments.services.plans import load_plan
from experiments.services.runner import run_plan
from experiments.services.storage import try_store_run

SERIES = (Figure.BER, Figure.THROUGHPUT, Figure.DISTORTION)


class Command(QimCommand):
    help = "Executa um plano de experimento (.ini) e grava CSV, séries .dat e SVGs."

    def add_arguments(self, parser):
        parser.add_argument("plan", help="Plan file (.ini)")
        parser.add_argument("--out", help="Output directory (default: QIM_RESULTS_DIR/<plan name>)")
        parser.add_argument("--seed", type=int, help="Override the plan seed")
        parser.add_argument("--workers", type=int, help="Worker processes (default: plan / QIM_WORKERS)")
        parser.add_argument("--no-store", action="store_true", help="Do not save the run in the database")
        parser.add_argument("--no-plots", action="store_true", help="Skip the SVG figures")

    def run(self, *args, **options):
        plan = load_plan(options["plan"])
        if options.get("seed") is not None:
            plan = plan.with_seed(options["seed"])
        out_dir = Path(options.get("out") or Path(settings.QIM_RESULTS_DIR) / plan.name)

        total = plan.row_count
        self.stdout.write(f"Plano {plan.name}: {total} células ({plan.host.kind.label}, seed={plan.seed})...")

        done = 0
        step = max(1, total // 10)

        def progress(_row):
            nonlocal done
            done += 1
            if done % step == 0 or done == total:
                self.stdout.write(f"[{done}/{total}]")

        results = run_plan(plan, workers=options.get("workers"), on_row=progress)

        csv_path = emit_csv(results, out_dir / "results.csv")
        self.stdout.write(f"CSV: {csv_path}")

        if usable(results):
            for figure in SERIES:
                paths = emit_series(results, figure, out_dir)
                self.stdout.write(f"{figure.label}: {len(paths)} séries")
                if not options.get("no_plots"):
                    emit_plot(results, figure, out_dir / f"{figure.value}.svg")
            self._summary(results)
        else:
            self.stdout.write(self.style.WARNING("Todas as células foram marcadas como inviáveis; sem séries."))

        if not options.get("no_store") and settings.QIM_STORE_RESULTS:
            run = try_store_run(plan, results, out_dir)
            if run is not None:
                self.stdout.write(f"Run salvo no banco (id={run.pk}).")

        self.ok(f"Concluído: {len(results)} linhas em {out_dir}")

    def _summary(self, results):
        for (variant, levels, rate), curve in sorted(ber_curves(results).items()):
            at = snr_at_ber(curve)
            text = f"{at:.2f} dB" if math.isfinite(at) else "fora do grid"
            self.stdout.write(f"  {variant.label} N={levels} @ {rate:g} bps: BER=1e-2 em {text}")

        best: dict[tuple, tuple[float, float]] = {}
        for (variant, levels, snr), value in max_throughput(results).items():
            if math.isfinite(snr) and value > best.get((variant, levels), (-1.0, 0.0))[0]:
                best[(variant, levels)] = (value, snr)
        for (variant, levels), (value, snr) in sorted(best.items()):
            self.stdout.write(f"  {variant.label} N={levels}: máximo {value:g} bps (SNR {snr:g} dB)")
