# experiments/tests.py
from __future__ import annotations

import io
import math
import re
import tempfile
from dataclasses import fields
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings

from core.exceptions import EmptyResultsError, InvalidConfigError, MalformedResultsError
from embedding.types import Variant
from experiments.models import ExperimentRun, SweepRow
from experiments.services.analysis import (
    Curve,
    ber_curves,
    db_gap,
    inversions,
    max_throughput,
    snr_at_ber,
)
from experiments.services.export import Figure, emit_csv, emit_plot, emit_series, read_csv
from experiments.services.plans import OPTIMAL, load_plan, parse_plan
from experiments.services.results import SweepResult
from experiments.services.runner import run_plan
from experiments.services.storage import store_run
from hosts.buffers import SignalBuffer
from hosts.services.captures import save_capture
from hosts.services.synthesis import synthesize_host
from hosts.specs import HostKind, HostSpec
from metrics.spectrum import psd

PLANS_DIR = Path(__file__).resolve().parent / "plans"


def plan_text(grid: str, *, host: str = "kind = am", plan: str = "") -> str:
    return f"[plan]\nname = t\nseed = 1\nworkers = 1\n{plan}\n\n[host]\n{host}\n\n[grid]\n{grid}\n"


AM_SMALL = plan_text(
    "variants = scalar, scalar_dc\nlevels = 4, 8\nsnr_db = inf, 10\nbit_rate = 200",
    plan="trials = 2\nmessage_length = 100\nduration = 0.5\nalpha = 0.7",
)

PAM8_SMALL = plan_text(
    "variants = scalar, scalar_dc, lattice, lattice_dc\nlevels = 8, 22\nsnr_db = inf\nbit_rate = 25000",
    host="kind = pam8\nsample_rate = 625000",
    plan="trials = 1\nmessage_length = 100\nduration = 0.004\nalpha = optimal",
)


def result(**overrides) -> SweepResult:
    base = dict(
        variant=Variant.SCALAR, levels=8, alpha=1.0, snr_db=10.0, bit_rate=200.0, trial=0,
        samples_per_bit=40, step=0.375, bits_tested=100, ber=0.1, d_s=0.01, d_norm=1.0,
        psnr_db=30.0, throughput_bps=180.0, info_rate_bps=100.0, capacity_bits_per_sample=0.1,
        audio_snr_db=20.0, host_ser=math.nan,
    )
    base.update(overrides)
    return SweepResult(**base)


def same_row(a: SweepResult, b: SweepResult) -> bool:
    for f in fields(SweepResult):
        x, y = getattr(a, f.name), getattr(b, f.name)
        if isinstance(x, float) and math.isnan(x):
            if not (isinstance(y, float) and math.isnan(y)):
                return False
        elif x != y:
            return False
    return True


# ============================================================
# Planos
# ============================================================

class PlanParsingTests(SimpleTestCase):
    def test_parse(self):
        plan = parse_plan(AM_SMALL)
        self.assertEqual(plan.host.kind, HostKind.AM)
        self.assertEqual(plan.variants, (Variant.SCALAR, Variant.SCALAR_DC))
        self.assertEqual(plan.levels_grid, (4, 8))
        self.assertEqual(plan.snr_grid_db, (math.inf, 10.0))
        self.assertEqual(plan.alpha, 0.7)
        self.assertEqual(plan.trials, 2)
        self.assertEqual(plan.row_count, 16)
        self.assertEqual(plan.source_text, AM_SMALL)

    def test_optimal_alpha_and_normalized_rate(self):
        plan = parse_plan(plan_text(
            "variants = scalar_dc\nlevels = 8\nsnr_db = 5 ; comentário\nbit_rate = normalized:1e-4, 40",
            host="kind = fm", plan="alpha = optimal",
        ))
        self.assertEqual(plan.alpha, OPTIMAL)
        self.assertTrue(plan.optimal_alpha)
        self.assertEqual(plan.snr_grid_db, (5.0,))
        self.assertAlmostEqual(plan.bit_rate_grid[0], 20.0)
        self.assertEqual(plan.bit_rate_grid[1], 40.0)

    def test_cell_order(self):
        cells = parse_plan(AM_SMALL).cells()
        self.assertEqual([c.index for c in cells], list(range(16)))
        first = [(c.variant, c.levels, c.snr_db, c.trial) for c in cells[:5]]
        self.assertEqual(first, [
            (Variant.SCALAR, 4, math.inf, 0),
            (Variant.SCALAR, 4, math.inf, 1),
            (Variant.SCALAR, 4, 10.0, 0),
            (Variant.SCALAR, 4, 10.0, 1),
            (Variant.SCALAR, 8, math.inf, 0),
        ])

    def test_invalid_plans(self):
        bad = {
            "no grid": "[host]\nkind = am\n",
            "empty levels": plan_text("variants = scalar\nlevels =\nsnr_db = 5\nbit_rate = 200"),
            "unknown variant": plan_text("variants = qam\nlevels = 8\nsnr_db = 5\nbit_rate = 200"),
            "lattice on am": plan_text("variants = lattice\nlevels = 8\nsnr_db = 5\nbit_rate = 200"),
            "bad alpha": plan_text("variants = scalar\nlevels = 8\nsnr_db = 5\nbit_rate = 200", plan="alpha = 1.5"),
            "aliasing": plan_text(
                "variants = scalar\nlevels = 8\nsnr_db = 5\nbit_rate = 200", host="kind = am\ncarrier_freq = 3000"
            ),
            "not a number": plan_text("variants = scalar\nlevels = eight\nsnr_db = 5\nbit_rate = 200"),
        }
        for label, text in bad.items():
            with self.subTest(label), self.assertRaises(InvalidConfigError):
                parse_plan(text)

    def test_missing_file(self):
        with self.assertRaises(InvalidConfigError):
            load_plan(PLANS_DIR / "nope.ini")

    def test_bundled_plans_load(self):
        paths = sorted(PLANS_DIR.glob("*.ini"))
        self.assertTrue(paths)
        for path in paths:
            with self.subTest(plan=path.name):
                self.assertGreater(load_plan(path).row_count, 0)


# ============================================================
# Runner
# ============================================================

class RunnerTests(SimpleTestCase):
    def test_noiseless_rows_decode_exactly(self):
        for text in (AM_SMALL, PAM8_SMALL):
            results = run_plan(parse_plan(text))
            for r in results:
                if r.noiseless:
                    with self.subTest(variant=r.variant, levels=r.levels):
                        self.assertFalse(r.flagged)
                        self.assertEqual(r.ber, 0.0)
                        self.assertEqual(r.capacity_bits_per_sample, math.inf)
                        self.assertEqual(r.throughput_bps, r.bit_rate)

    def test_row_layout(self):
        plan = parse_plan(AM_SMALL)
        results = run_plan(plan)
        self.assertEqual(len(results), plan.row_count)
        for cell, r in zip(plan.cells(), results):
            self.assertEqual((r.variant, r.levels, r.snr_db, r.trial), (cell.variant, cell.levels, cell.snr_db, cell.trial))
            self.assertEqual(r.samples_per_bit, 40)
            self.assertEqual(r.alpha, 0.7 if r.variant == Variant.SCALAR_DC else 1.0)
            self.assertTrue(math.isfinite(r.audio_snr_db))
            self.assertTrue(math.isnan(r.host_ser))

    def test_trial_shares_host_across_cells(self):
        steps = {}
        for r in run_plan(parse_plan(AM_SMALL)):
            steps.setdefault((r.levels, r.trial), set()).add(r.step)
        self.assertTrue(all(len(s) == 1 for s in steps.values()))

    def test_optimal_alpha_on_noiseless_cells_is_one(self):
        for r in run_plan(parse_plan(PAM8_SMALL)):
            self.assertEqual(r.alpha, 1.0)
            self.assertTrue(math.isnan(r.audio_snr_db))

    def test_infeasible_cells_are_flagged(self):
        plan = parse_plan(plan_text(
            "variants = scalar\nlevels = 8\nsnr_db = 10\nbit_rate = 200, 4000, 9000",
            plan="trials = 1\nmessage_length = 1000\nduration = 0.5",
        ))
        by_rate = {r.bit_rate: r for r in run_plan(plan)}
        self.assertFalse(by_rate[4000.0].flagged)
        for rate in (200.0, 9000.0):
            with self.subTest(rate=rate):
                self.assertTrue(by_rate[rate].flagged)
                self.assertTrue(math.isnan(by_rate[rate].ber))
                self.assertEqual(by_rate[rate].bits_tested, 0)

    def test_reproducible_and_worker_independent(self):
        plan = parse_plan(AM_SMALL)
        with tempfile.TemporaryDirectory() as tmp:
            a = emit_csv(run_plan(plan), Path(tmp) / "a.csv").read_bytes()
            b = emit_csv(run_plan(plan), Path(tmp) / "b.csv").read_bytes()
            c = emit_csv(run_plan(plan, workers=2), Path(tmp) / "c.csv").read_bytes()
            d = emit_csv(run_plan(plan.with_seed(2)), Path(tmp) / "d.csv").read_bytes()
        self.assertEqual(a, b)
        self.assertEqual(a, c)
        self.assertNotEqual(a, d)

    def test_information_rate_below_capacity(self):
        plan = parse_plan(plan_text(
            "variants = scalar, scalar_dc\nlevels = 4, 8, 16\nsnr_db = 0, 5, 10, 20, 30\nbit_rate = 8000",
            plan="trials = 1\nmessage_length = 4000\nduration = 0.5\nhost_quality = false",
        ))
        for r in run_plan(plan):
            with self.subTest(variant=r.variant, levels=r.levels, snr=r.snr_db):
                self.assertLessEqual(r.info_rate_bps / plan.host.sample_rate, r.capacity_bits_per_sample + 0.01)

    def test_each_two_level_step_costs_one_to_three_db(self):
        snrs = ", ".join(f"{s:g}" for s in np.arange(20.0, 40.5, 0.5))
        plan = parse_plan(plan_text(
            f"variants = scalar_dc\nlevels = 8, 10, 12, 14, 16\nsnr_db = {snrs}\nbit_rate = 8000",
            host="kind = am\nsource = noise",
            plan="trials = 1\nmessage_length = 400000\nduration = 51\nalpha = 0.7\nhost_quality = false",
        ))
        curves = ber_curves(run_plan(plan))
        for levels in (16, 14, 12, 10):
            gap = db_gap(curves[(Variant.SCALAR_DC, levels, 8000.0)], curves[(Variant.SCALAR_DC, levels - 2, 8000.0)])
            with self.subTest(step=f"{levels}->{levels - 2}"):
                self.assertLessEqual(abs(gap - 2.0), 1.0, gap)

    def test_distortion_compensation_gains_about_two_db(self):
        snrs = ", ".join(str(s) for s in range(0, 50))
        plan = parse_plan(plan_text(
            f"variants = scalar, scalar_dc\nlevels = 8, 16\nsnr_db = {snrs}\nbit_rate = 200",
            plan="trials = 1\nmessage_length = 3000\nduration = 16\nalpha = 0.7\nhost_quality = false",
        ))
        curves = ber_curves(run_plan(plan))
        for levels in (8, 16):
            gap = db_gap(curves[(Variant.SCALAR, levels, 200.0)], curves[(Variant.SCALAR_DC, levels, 200.0)])
            with self.subTest(levels=levels):
                self.assertLessEqual(abs(gap - 2.0), 1.5, gap)

    def test_lattice_beats_scalar_on_pam8(self):
        snrs = ", ".join(str(s) for s in range(10, 41))
        plan = parse_plan(plan_text(
            f"variants = scalar_dc, lattice_dc\nlevels = 22\nsnr_db = {snrs}\nbit_rate = 25000",
            host="kind = pam8\nsample_rate = 625000",
            plan="trials = 1\nmessage_length = 20000\nduration = 0.8\nalpha = 0.7\nhost_quality = false",
        ))
        results = run_plan(plan)
        self.assertTrue(all(r.samples_per_bit == 25 for r in results))
        curves = ber_curves(results)
        gap = db_gap(curves[(Variant.SCALAR_DC, 22, 25000.0)], curves[(Variant.LATTICE_DC, 22, 25000.0)])
        self.assertLessEqual(abs(gap - 2.0), 1.5, gap)

    def test_one_bit_per_sample_on_am_at_20_db(self):
        # 8 kbps com N = 8 fica bem acima de BER 1e-2 neste modelo de canal
        plan = parse_plan(plan_text(
            "variants = scalar_dc\nlevels = 8\nsnr_db = 20\nbit_rate = 8000",
            plan="trials = 1\nmessage_length = 20000\nduration = 2.5\nalpha = optimal\nhost_quality = false",
        ))
        (row,) = run_plan(plan)
        self.assertEqual(row.samples_per_bit, 1)
        self.assertAlmostEqual(row.alpha, 0.67, delta=0.02)
        self.assertAlmostEqual(row.ber, 0.13, delta=0.03)

    def test_all_zero_capture_flags_every_cell(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "silence.f32"
            save_capture(SignalBuffer(np.zeros(4000), 8000), path)
            plan = parse_plan(plan_text(
                "variants = scalar, scalar_dc\nlevels = 8\nsnr_db = 10, inf\nbit_rate = 200",
                host=f"kind = am\nsource = file\npath = {path}",
                plan="trials = 1\nmessage_length = 10\nduration = 0.5",
            ))
            results = run_plan(plan)
        self.assertEqual(len(results), 4)
        for r in results:
            self.assertTrue(r.flagged)
            self.assertTrue(math.isnan(r.step))
            self.assertTrue(math.isnan(r.ber))


# ============================================================
# Análise
# ============================================================

class AnalysisTests(SimpleTestCase):
    def test_snr_at_ber_interpolates_in_log(self):
        curve = Curve(np.array([0.0, 10.0]), np.array([1e-1, 1e-3]), np.array([10_000, 10_000]))
        self.assertAlmostEqual(snr_at_ber(curve), 5.0)
        self.assertAlmostEqual(snr_at_ber(curve, 1e-1), 0.0)

    def test_snr_at_ber_outside_grid(self):
        starts_low = Curve(np.array([0.0, 10.0]), np.array([1e-3, 0.0]), np.array([100, 100]))
        never = Curve(np.array([0.0, 10.0]), np.array([0.4, 0.2]), np.array([100, 100]))
        single = Curve(np.array([0.0]), np.array([0.4]), np.array([100]))
        for curve in (starts_low, never, single):
            self.assertTrue(math.isnan(snr_at_ber(curve)))

    def test_zero_ber_uses_half_error_floor(self):
        curve = Curve(np.array([0.0, 10.0]), np.array([0.1, 0.0]), np.array([50, 50]))
        # piso 0.5/50 = 1e-2: a curva chega ao alvo exatamente no segundo ponto
        self.assertAlmostEqual(snr_at_ber(curve), 10.0)

    def test_db_gap_and_inversions(self):
        ref = Curve(np.array([0.0, 10.0]), np.array([1e-1, 1e-3]), np.array([1e4, 1e4]))
        better = Curve(np.array([0.0, 10.0]), np.array([1e-2 * 10 ** 0.5, 1e-4 * 10 ** 0.5]), np.array([1e4, 1e4]))
        self.assertAlmostEqual(db_gap(ref, better), 2.5)
        bumpy = Curve(np.arange(5.0), np.array([0.3, 0.1, 0.2, 1e-4, 2e-4]), np.ones(5) * 1e4)
        self.assertEqual(inversions(bumpy), 1)

    def test_ber_curves_average_trials_and_skip_noiseless(self):
        rows = [
            result(snr_db=10.0, trial=0, ber=0.1),
            result(snr_db=10.0, trial=1, ber=0.3),
            result(snr_db=math.inf, ber=0.0),
            result(snr_db=5.0, error="did not fit", ber=math.nan),
        ]
        curve = ber_curves(rows)[(Variant.SCALAR, 8, 200.0)]
        self.assertEqual(curve.snr_db.tolist(), [10.0])
        self.assertAlmostEqual(curve.ber[0], 0.2)
        self.assertEqual(curve.bits[0], 200)

    def test_max_throughput(self):
        rows = [
            result(bit_rate=200.0, ber=0.0, throughput_bps=200.0),
            result(bit_rate=2000.0, ber=0.001, throughput_bps=1998.0),
            result(bit_rate=8000.0, ber=0.2, throughput_bps=6400.0),
            result(snr_db=0.0, bit_rate=200.0, ber=0.4, throughput_bps=120.0),
        ]
        best = max_throughput(rows)
        self.assertEqual(best[(Variant.SCALAR, 8, 10.0)], 1998.0)
        self.assertEqual(best[(Variant.SCALAR, 8, 0.0)], 0.0)


# ============================================================
# Exportação
# ============================================================

class ExportTests(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)
        self.rows = [
            result(levels=8, snr_db=0.0, ber=0.3),
            result(levels=8, snr_db=10.0, ber=0.01, psnr_db=math.inf),
            result(levels=8, snr_db=10.0, bit_rate=2000.0, ber=0.2),
            result(variant=Variant.SCALAR_DC, levels=16, snr_db=10.0, alpha=0.7, ber=0.25),
            result(levels=22, snr_db=math.inf, ber=0.0, capacity_bits_per_sample=math.inf),
            result(levels=8, snr_db=5.0, error="message of 100 bits does not fit", ber=math.nan),
        ]

    def tearDown(self):
        self._tmp.cleanup()

    def test_csv_round_trip(self):
        path = emit_csv(self.rows, self.dir / "r.csv")
        header = path.read_text(encoding="utf-8").splitlines()[0]
        self.assertTrue(header.startswith("variant,levels,alpha,snr_db,bit_rate,trial"))
        back = read_csv(path)
        self.assertEqual(len(back), len(self.rows))
        for a, b in zip(self.rows, back):
            self.assertTrue(same_row(a, b), (a, b))
        self.assertEqual(emit_csv(back, self.dir / "again.csv").read_bytes(), path.read_bytes())

    def test_csv_errors(self):
        with self.assertRaises(EmptyResultsError):
            emit_csv([], self.dir / "empty.csv")
        bad = self.dir / "bad.csv"
        bad.write_text("a,b\n1,2\n", encoding="utf-8")
        with self.assertRaises(MalformedResultsError):
            read_csv(bad)

    def test_ber_series_one_file_per_curve(self):
        paths = emit_series(self.rows, Figure.BER, self.dir)
        # N=22 só tem a linha sem ruído: não vira curva
        self.assertEqual(sorted(p.name for p in paths), ["ber_scalar_N8.dat", "ber_scalar_dc_N16.dat"])
        text = (self.dir / "ber_scalar_N8.dat").read_text(encoding="utf-8")
        self.assertIn("# bit_rate=200", text)
        self.assertIn("# bit_rate=2000", text)
        self.assertIn("\n\n\n# bit_rate=", text)

    def test_other_series(self):
        dist = emit_series(self.rows, Figure.DISTORTION, self.dir)
        self.assertEqual(sorted(p.name for p in dist), ["distortion_scalar.dat", "distortion_scalar_dc.dat"])
        lines = (self.dir / "distortion_scalar.dat").read_text(encoding="utf-8").splitlines()
        self.assertEqual([ln.split()[0] for ln in lines if not ln.startswith("#")], ["8", "22"])

        thr = emit_series(self.rows, Figure.THROUGHPUT, self.dir)
        self.assertIn("throughput_scalar_N8.dat", [p.name for p in thr])

    def test_all_flagged(self):
        with self.assertRaises(EmptyResultsError):
            emit_series([self.rows[-1]], Figure.BER, self.dir)

    def test_spectrum_needs_mapping(self):
        with self.assertRaises(InvalidConfigError):
            emit_series(self.rows, Figure.SPECTRUM, self.dir)
        host = synthesize_host(HostSpec.default("am"), 0.5)
        paths = emit_series({"host": psd(host)}, Figure.SPECTRUM, self.dir)
        self.assertEqual([p.name for p in paths], ["spectrum_host.dat"])

    def test_svg(self):
        for figure in (Figure.BER, Figure.THROUGHPUT, Figure.DISTORTION):
            path = emit_plot(self.rows, figure, self.dir / f"{figure.value}.svg")
            with self.subTest(figure=figure):
                self.assertIn("<svg", path.read_text(encoding="utf-8"))


# ============================================================
# Banco
# ============================================================

class StorageTests(TestCase):
    def test_store_run(self):
        plan = parse_plan(AM_SMALL)
        rows = [
            result(snr_db=math.inf, capacity_bits_per_sample=math.inf, psnr_db=math.inf),
            result(snr_db=10.0),
            result(snr_db=5.0, error="does not fit", ber=math.nan),
        ]
        run = store_run(plan, rows, "/tmp/out")

        run.refresh_from_db()
        self.assertEqual(run.status, ExperimentRun.Status.DONE)
        self.assertEqual((run.rows_total, run.rows_flagged), (3, 1))
        self.assertEqual(run.host_kind, HostKind.AM)
        self.assertEqual(run.plan_text, AM_SMALL)
        self.assertIsNotNone(run.finished_at)

        stored = list(run.rows.all())
        self.assertEqual([r.position for r in stored], [0, 1, 2])
        self.assertIsNone(stored[0].snr_db)
        self.assertIsNone(stored[0].capacity_bits_per_sample)
        self.assertEqual(stored[1].snr_db, 10.0)
        self.assertTrue(stored[2].flagged)
        self.assertIsNone(stored[2].ber)


# ============================================================
# Comandos
# ============================================================

class CommandTests(TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def _plan(self, text: str, name: str = "small.ini") -> Path:
        path = self.dir / name
        path.write_text(text, encoding="utf-8")
        return path

    def _call(self, *args, **kwargs) -> str:
        out = io.StringIO()
        call_command(*args, stdout=out, **kwargs)
        return out.getvalue()

    @override_settings(QIM_STORE_RESULTS=True)
    def test_run_writes_outputs_and_stores(self):
        out_dir = self.dir / "out"
        text = self._call("qim_run", str(self._plan(AM_SMALL)), out=str(out_dir))
        self.assertIn("✅", text)
        self.assertTrue((out_dir / "results.csv").exists())
        self.assertTrue((out_dir / "ber_scalar_N4.dat").exists())
        self.assertTrue((out_dir / "ber.svg").exists())
        self.assertEqual(len(read_csv(out_dir / "results.csv")), 16)

        run = ExperimentRun.objects.get()
        self.assertEqual(run.rows.count(), 16)
        self.assertEqual(SweepRow.objects.filter(error="").count(), 16)

    @override_settings(QIM_STORE_RESULTS=True)
    def test_run_without_store_or_plots(self):
        with override_settings(QIM_RESULTS_DIR=self.dir / "results"):
            self._call("qim_run", str(self._plan(AM_SMALL)), no_store=True, no_plots=True, seed=3)
        out_dir = self.dir / "results" / "t"
        self.assertTrue((out_dir / "results.csv").exists())
        self.assertFalse((out_dir / "ber.svg").exists())
        self.assertEqual(ExperimentRun.objects.count(), 0)

    def test_errors_exit_with_code_two(self):
        with self.assertRaises(CommandError) as ctx:
            self._call("qim_run", str(self.dir / "missing.ini"))
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn("❌ Error", str(ctx.exception))

    def test_spectrum(self):
        plan = self._plan(plan_text(
            "variants = scalar_dc\nlevels = 22\nsnr_db = inf\nbit_rate = 200000",
            host="kind = fm\nsource = noise",
            plan="trials = 1\nmessage_length = 20000\nduration = 0.1\nalpha = 0.7",
        ))
        out_dir = self.dir / "spec"
        text = self._call("qim_spectrum", str(plan), out=str(out_dir))
        rejections = [float(x) for x in re.findall(r"fora da banda (-?[\d.]+) dB", text)]
        self.assertEqual(len(rejections), 2)
        self.assertGreaterEqual(rejections[1], 33.0)
        self.assertTrue((out_dir / "spectrum_host.dat").exists())
        self.assertTrue((out_dir / "spectrum_scalar_dc_N22.dat").exists())
        self.assertTrue((out_dir / "spectrum.svg").exists())

    def test_embed_and_decode_file(self):
        for kind, variant, host_name in (
            ("am", "scalar_dc", "host.f32"),
            ("am", "scalar", "host.wav"),
            ("pam8", "lattice", "iq.f32"),
            ("pam8", "scalar", "iq2.f32"),
        ):
            spec = HostSpec.default(kind, sample_rate=8000 if kind == "am" else 625_000)
            host = synthesize_host(spec, 0.05, seed=4)
            if host_name.endswith(".wav"):
                host = host.with_samples(host.samples / 1.6)
            host_path = save_capture(host, self.dir / host_name)
            msg_path = self.dir / "msg.hex"
            msg_path.write_text("deadbeef\n", encoding="utf-8")
            composite = self.dir / f"x_{host_name}"

            text = self._call(
                "qim_embed_file", host=str(host_path), message=str(msg_path), out=str(composite),
                levels=16, variant=variant, alpha=0.8, samples_per_bit=3,
            )
            step = float(re.search(r"step=([0-9.eE+-]+)", text).group(1))

            decoded = self._call(
                "qim_decode_file", received=str(composite), bits=32, step=step, levels=16,
                variant=variant, alpha=0.8, samples_per_bit=3,
            )
            with self.subTest(kind=kind, variant=variant, file=host_name):
                self.assertEqual(decoded.strip(), "deadbeef")

    def test_decode_file_writes_hex(self):
        host = synthesize_host(HostSpec.default("am"), 0.05, seed=5)
        host_path = save_capture(host, self.dir / "h.f32")
        (self.dir / "m.hex").write_text("a5", encoding="utf-8")
        text = self._call(
            "qim_embed_file", host=str(host_path), message=str(self.dir / "m.hex"),
            out=str(self.dir / "x.f32"), levels=8,
        )
        step = float(re.search(r"step=([0-9.eE+-]+)", text).group(1))
        self._call("qim_decode_file", received=str(self.dir / "x.f32"), bits=8, step=step, levels=8,
                   rule="majority", out=str(self.dir / "got.hex"))
        self.assertEqual((self.dir / "got.hex").read_text(encoding="utf-8").strip(), "a5")
