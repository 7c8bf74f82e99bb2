# embedding/tests.py
from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_array_equal

from core.exceptions import (
    CapacityExceededError,
    DegenerateSignalError,
    InvalidConfigError,
    InvalidSampleError,
    KindMismatchError,
    TruncatedMessageError,
    UndefinedAlphaError,
)
from embedding.codec import (
    ALPHA_FLOOR,
    configure,
    decode_message,
    embed_message,
    embed_sample,
    optimal_alpha,
    samples_per_bit_for,
)
from embedding.quantizers import make_dither, quantize, step_from_signal
from embedding.types import BitMessage, DecisionRule, DitherSign, QimConfig, Variant
from hosts.buffers import SignalBuffer
from hosts.services.synthesis import synthesize_host
from hosts.specs import HostKind, HostSpec

LEVEL_GRID = (2, 4, 8, 16, 22, 48)


def _uniform_host(n: int, levels: int, step: float = 1.0, seed: int = 0, complex_: bool = False) -> SignalBuffer:
    rng = np.random.default_rng(seed)
    half = levels * step / 2
    s = rng.uniform(-half, half, n)
    if complex_:
        s = s + 1j * rng.uniform(-half, half, n)
    return SignalBuffer(s, 8000.0)


# ============================================================
# Quantizador
# ============================================================

class QuantizeTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(quantize(0.0, 1.0), 0.0)
        self.assertEqual(quantize(3.1, 2.0), 4.0)
        self.assertAlmostEqual(quantize(-1.05 * 0.3, 0.3), -0.3)

    def test_half_integers_round_away_from_zero(self):
        self.assertEqual(quantize(0.5, 1.0), 1.0)
        self.assertEqual(quantize(-0.5, 1.0), -1.0)
        self.assertEqual(quantize(2.5, 1.0), 3.0)

    def test_error_bounded_and_idempotent(self):
        s = np.random.default_rng(1).normal(0, 10, 5000)
        q = quantize(s, 0.7)
        self.assertTrue(np.all(np.abs(q - s) <= 0.35 + 1e-12))
        assert_array_equal(quantize(q, 0.7), q)

    def test_complex_quantized_per_component(self):
        self.assertEqual(quantize(0.9 + 2.6j, 1.0), 1.0 + 3.0j)

    def test_non_finite_sample(self):
        with self.assertRaises(InvalidSampleError):
            quantize(float("nan"), 1.0)
        with self.assertRaises(InvalidSampleError):
            quantize(np.array([1.0, np.inf]), 1.0)

    def test_bad_step(self):
        with self.assertRaises(InvalidConfigError):
            quantize(1.0, 0.0)


class StepFromSignalTests(SimpleTestCase):
    def test_examples(self):
        host = SignalBuffer(np.array([0.2, -1.0, 0.5]), 8000)
        self.assertAlmostEqual(step_from_signal(host, 4), 0.5)
        host = SignalBuffer(np.array([2.2, -0.1]), 8000)
        self.assertAlmostEqual(step_from_signal(host, 22), 0.2)

    def test_homogeneous(self):
        host = _uniform_host(100, 8, seed=3)
        scaled = host.with_samples(host.samples * 3.5)
        self.assertAlmostEqual(step_from_signal(scaled, 8), 3.5 * step_from_signal(host, 8))

    def test_complex_uses_largest_component(self):
        host = SignalBuffer(np.array([0.5 + 1.0j, -2.0 + 0.1j]), 8000)
        self.assertAlmostEqual(step_from_signal(host, 4), 1.0)

    def test_all_zero_host(self):
        with self.assertRaises(DegenerateSignalError):
            step_from_signal(SignalBuffer(np.zeros(10), 8000), 4)


class ConfigTests(SimpleTestCase):
    def test_validation(self):
        for kwargs in (
            {"levels": 1, "step": 1.0},
            {"levels": 4, "step": 0.0},
            {"levels": 4, "step": 1.0, "alpha": 0.0},
            {"levels": 4, "step": 1.0, "alpha": 1.2},
            {"levels": 4, "step": 1.0, "samples_per_bit": 0},
        ):
            with self.subTest(**kwargs), self.assertRaises(InvalidConfigError):
                QimConfig(**kwargs)

    def test_effective_alpha_only_for_dc(self):
        self.assertEqual(QimConfig(4, 1.0, alpha=0.7).effective_alpha, 1.0)
        self.assertEqual(QimConfig(4, 1.0, alpha=0.7, variant=Variant.SCALAR_DC).effective_alpha, 0.7)

    def test_samples_per_bit(self):
        self.assertEqual(samples_per_bit_for(8000, 200), 40)
        self.assertEqual(samples_per_bit_for(8000, 8000), 1)
        self.assertEqual(samples_per_bit_for(8000, 3000), 2)
        with self.assertRaises(InvalidConfigError):
            samples_per_bit_for(8000, 9000)


# ============================================================
# Dither
# ============================================================

class DitherTests(SimpleTestCase):
    def test_scalar(self):
        d = make_dither(QimConfig(4, 1.0))
        self.assertEqual((d.d1, d.d0), (0.25, -0.25))
        d = make_dither(QimConfig(4, 1.0, dither_sign=DitherSign.NEGATIVE_D1))
        self.assertEqual((d.d1, d.d0), (-0.25, 0.25))

    def test_lattice(self):
        d = make_dither(QimConfig(4, 1.0, variant=Variant.LATTICE))
        self.assertEqual(d.d1, 0.25 + 0.25j)
        self.assertEqual(d.d0, -0.25 - 0.25j)
        self.assertAlmostEqual(abs(d.d1 - d.d0), 1 / math.sqrt(2))

    def test_minimum_coset_distance(self):
        for variant, expected in ((Variant.SCALAR, 0.5), (Variant.LATTICE, 1 / math.sqrt(2))):
            d = make_dither(QimConfig(4, 1.0, variant=variant))
            grid = np.arange(-2, 3)
            if variant == Variant.LATTICE:
                base = (grid[:, None] + 1j * grid[None, :]).ravel()
            else:
                base = grid.astype(float)
            ones, zeros = base + d.d1, base + d.d0
            closest = np.min(np.abs(ones[:, None] - zeros[None, :]))
            with self.subTest(variant=variant):
                self.assertAlmostEqual(closest, expected)


# ============================================================
# Embedding de amostra
# ============================================================

class EmbedSampleTests(SimpleTestCase):
    def setUp(self):
        self.cfg = QimConfig(4, 1.0)

    def test_walkthrough(self):
        self.assertAlmostEqual(embed_sample(-1.3, 0, self.cfg), -1.25)
        self.assertAlmostEqual(embed_sample(1.2, 1, self.cfg), 1.25)

    def test_lattice(self):
        cfg = QimConfig(4, 1.0, variant=Variant.LATTICE)
        out = embed_sample(0.9 + 0.9j, 1, cfg)
        self.assertAlmostEqual(out.real, 1.25)
        self.assertAlmostEqual(out.imag, 1.25)

    def test_lands_on_coset_and_bounded(self):
        d = make_dither(self.cfg)
        for s in np.random.default_rng(2).uniform(-3, 3, 200):
            for bit in (0, 1):
                x = embed_sample(float(s), bit, self.cfg)
                k = (x - d.for_bit(bit)) / self.cfg.step
                self.assertAlmostEqual(k, round(k), delta=1e-9)
                self.assertLessEqual(abs(x - s), 0.5 + 0.25 + 1e-12)

    def test_dc_with_alpha_one_matches_plain(self):
        dc = QimConfig(4, 1.0, alpha=1.0, variant=Variant.SCALAR_DC)
        for s in (-1.3, 0.1, 0.77, 1.9):
            for bit in (0, 1):
                self.assertEqual(embed_sample(s, bit, dc), embed_sample(s, bit, self.cfg))

    def test_scalar_on_complex_sample_marks_in_phase_only(self):
        x = embed_sample(-1.3 + 0.4j, 0, self.cfg)
        self.assertAlmostEqual(x.real, -1.25)
        self.assertEqual(x.imag, 0.4)

    def test_domain_checks(self):
        with self.assertRaises(KindMismatchError):
            embed_sample(1.0, 1, QimConfig(4, 1.0, variant=Variant.LATTICE))
        with self.assertRaises(InvalidSampleError):
            embed_sample(float("inf"), 0, self.cfg)


# ============================================================
# Mensagem
# ============================================================

class BitMessageTests(SimpleTestCase):
    def test_hex_msb_first(self):
        msg = BitMessage.from_hex("a5")
        assert_array_equal(msg.bits, [1, 0, 1, 0, 0, 1, 0, 1])
        self.assertEqual(msg.to_hex(), "a5")

    def test_invalid(self):
        with self.assertRaises(InvalidConfigError):
            BitMessage([])
        with self.assertRaises(InvalidConfigError):
            BitMessage([0, 2])
        with self.assertRaises(InvalidConfigError):
            BitMessage.from_hex("zz")


class EmbedMessageTests(SimpleTestCase):
    def test_spreading_and_pass_through(self):
        host = _uniform_host(100, 8, seed=4)
        cfg = configure(host, 8, samples_per_bit=5)
        msg = BitMessage([1, 0, 1])
        out = embed_message(host, msg, cfg)
        self.assertEqual(len(out), len(host))
        assert_array_equal(out.samples[15:], host.samples[15:])
        for i, bit in enumerate(msg):
            for j in range(i * 5, (i + 1) * 5):
                self.assertEqual(out.samples[j], embed_sample(float(host.samples[j]), bit, cfg))

    def test_capacity_exceeded(self):
        host = _uniform_host(10, 8)
        cfg = configure(host, 8, samples_per_bit=4)
        with self.assertRaises(CapacityExceededError):
            embed_message(host, BitMessage([1, 0, 1]), cfg)

    def test_mean_distortion_is_step_squared_over_twelve(self):
        host = _uniform_host(100_000, 16, step=1.0, seed=5)
        cfg = QimConfig(16, 1.0)
        msg = BitMessage.random(len(host), np.random.default_rng(6))
        x = embed_message(host, msg, cfg)
        d = float(np.mean((x.samples - host.samples) ** 2))
        self.assertAlmostEqual(d / (1 / 12), 1.0, delta=0.05)

    def test_dc_distortion_bounds(self):
        host = _uniform_host(100_000, 16, step=1.0, seed=7)
        msg = BitMessage.random(len(host), np.random.default_rng(8))
        alpha = 0.7
        x = embed_message(host, msg, QimConfig(16, 1.0, alpha=alpha, variant=Variant.SCALAR_DC))
        d = float(np.mean((x.samples - host.samples) ** 2))
        self.assertGreater(d, alpha ** 2 / 12)
        self.assertLess(d, 1 / (12 * alpha ** 2))

    def test_lattice_needs_complex_host(self):
        host = _uniform_host(20, 8)
        with self.assertRaises(KindMismatchError):
            embed_message(host, BitMessage([1]), QimConfig(8, 1.0, variant=Variant.LATTICE))

    def test_scalar_on_complex_host_leaves_quadrature(self):
        host = _uniform_host(600, 8, seed=30, complex_=True)
        msg = BitMessage.random(200, np.random.default_rng(31))
        for variant in (Variant.SCALAR, Variant.SCALAR_DC):
            cfg = configure(host, 8, variant=variant, alpha=0.8, samples_per_bit=3)
            out = embed_message(host, msg, cfg)
            with self.subTest(variant=variant):
                self.assertTrue(out.is_complex)
                assert_array_equal(out.samples.imag, host.samples.imag)
                self.assertFalse(np.allclose(out.samples.real, host.samples.real))
                self.assertEqual(decode_message(out, len(msg), cfg), msg)


# ============================================================
# Decoder
# ============================================================

class DecodeTests(SimpleTestCase):
    def _round_trip(self, host: SignalBuffer, variant: Variant, levels: int, k: int = 1, alpha: float = 0.7):
        cfg = configure(host, levels, variant=variant, alpha=alpha, samples_per_bit=k)
        msg = BitMessage.random(len(host) // k, np.random.default_rng(levels))
        decoded = decode_message(embed_message(host, msg, cfg), len(msg), cfg)
        return msg, decoded

    def test_noiseless_round_trip_every_variant_and_level(self):
        # 10⁴ bits por caso (K = 1)
        am = synthesize_host(HostSpec.default(HostKind.AM), 1.25, seed=1)
        fm = synthesize_host(HostSpec.default(HostKind.FM), 0.05, seed=1)
        pam8 = synthesize_host(HostSpec.default(HostKind.PAM8, sample_rate=625_000), 0.016, seed=1)
        cases = [
            (am, Variant.SCALAR), (am, Variant.SCALAR_DC),
            (fm, Variant.SCALAR), (fm, Variant.SCALAR_DC),
            (pam8, Variant.SCALAR), (pam8, Variant.SCALAR_DC),
            (pam8, Variant.LATTICE), (pam8, Variant.LATTICE_DC),
        ]
        for host, variant in cases:
            for levels in LEVEL_GRID:
                with self.subTest(variant=variant, levels=levels, n=len(host)):
                    msg, decoded = self._round_trip(host, variant, levels)
                    self.assertEqual(decoded, msg)

    def test_round_trip_with_spreading(self):
        host = _uniform_host(4000, 8, seed=9)
        for k in (1, 3, 40):
            msg, decoded = self._round_trip(host, Variant.SCALAR_DC, 8, k=k)
            self.assertEqual(decoded, msg)

    def test_dc_alpha_one_identical_to_plain(self):
        host = _uniform_host(3000, 16, seed=10, complex_=True)
        noise = np.random.default_rng(11).normal(0, 0.05, len(host)) * (1 + 1j)
        for plain, dc in ((Variant.SCALAR, Variant.SCALAR_DC), (Variant.LATTICE, Variant.LATTICE_DC)):
            cfg_p = configure(host, 16, variant=plain, samples_per_bit=3)
            cfg_dc = configure(host, 16, variant=dc, alpha=1.0, samples_per_bit=3)
            msg = BitMessage.random(len(host) // 3, np.random.default_rng(12))
            x_p, x_dc = embed_message(host, msg, cfg_p), embed_message(host, msg, cfg_dc)
            assert_array_equal(x_p.samples, x_dc.samples)

            y = x_p.with_samples(x_p.samples + noise)
            self.assertEqual(decode_message(y, len(msg), cfg_p), decode_message(y, len(msg), cfg_dc))

    def test_bounded_noise_recovered(self):
        host = _uniform_host(5000, 8, seed=14)
        cfg = configure(host, 8)
        msg = BitMessage.random(len(host), np.random.default_rng(15))
        x = embed_message(host, msg, cfg)
        eps = np.random.default_rng(16).uniform(-0.24, 0.24, len(host)) * cfg.step
        self.assertEqual(decode_message(x.with_samples(x.samples + eps), len(msg), cfg), msg)

    def test_tie_breaks_to_zero(self):
        received = SignalBuffer(np.zeros(1), 8000)
        self.assertEqual(decode_message(received, 1, QimConfig(2, 1.0)), BitMessage([0]))

    def test_scale_invariance(self):
        host = _uniform_host(2000, 8, seed=17)
        cfg = configure(host, 8, samples_per_bit=4)
        msg = BitMessage.random(500, np.random.default_rng(18))
        x = embed_message(host, msg, cfg)
        y = x.with_samples(x.samples + np.random.default_rng(19).normal(0, 0.3 * cfg.step, len(x)))
        scaled_cfg = QimConfig(8, cfg.step * 2.5, samples_per_bit=4)
        self.assertEqual(
            decode_message(y, 500, cfg),
            decode_message(y.with_samples(y.samples * 2.5), 500, scaled_cfg),
        )

    def test_majority_rule(self):
        host = _uniform_host(3000, 8, seed=20)
        cfg = configure(host, 8, samples_per_bit=5)
        msg = BitMessage.random(600, np.random.default_rng(21))
        x = embed_message(host, msg, cfg)
        self.assertEqual(decode_message(x, 600, cfg, rule=DecisionRule.MAJORITY), msg)

    def test_truncated(self):
        with self.assertRaises(TruncatedMessageError):
            decode_message(SignalBuffer(np.zeros(5), 8000), 3, QimConfig(2, 1.0, samples_per_bit=2))


# ============================================================
# α*
# ============================================================

class OptimalAlphaTests(SimpleTestCase):
    def test_examples(self):
        self.assertAlmostEqual(optimal_alpha(1.0, 1.0), 0.5)
        self.assertAlmostEqual(optimal_alpha(7.0, 3.0), 0.7)
        self.assertEqual(optimal_alpha(2.0, 0.0), 1.0)
        self.assertEqual(optimal_alpha(1.0, math.inf), ALPHA_FLOOR)
        self.assertLess(optimal_alpha(1.0, 1e9), 1e-6 + 1e-9)

    def test_undefined(self):
        with self.assertRaises(UndefinedAlphaError):
            optimal_alpha(0.0, 0.0)
        with self.assertRaises(UndefinedAlphaError):
            optimal_alpha(-1.0, 1.0)

    def test_empirical_peak_near_formula(self):
        step, levels = 1.0, 32
        d_s = step ** 2 / 12
        noise = d_s * 3 / 7  # α* = 0.7
        host = _uniform_host(200_000, levels, step=step, seed=22)
        msg = BitMessage.random(len(host), np.random.default_rng(23))
        n = np.random.default_rng(24).normal(0, math.sqrt(noise), len(host))

        alphas = np.round(np.arange(0.1, 1.0001, 0.05), 2)
        errors = []
        for a in alphas:
            cfg = QimConfig(levels, step, alpha=float(a), variant=Variant.SCALAR_DC)
            x = embed_message(host, msg, cfg)
            decoded = decode_message(x.with_samples(x.samples + n), len(msg), cfg)
            errors.append(np.count_nonzero(decoded.bits != msg.bits))

        best = float(alphas[int(np.argmin(errors))])
        self.assertLessEqual(abs(best - optimal_alpha(d_s, noise)), 0.1)
