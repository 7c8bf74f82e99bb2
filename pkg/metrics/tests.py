# metrics/tests.py
from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import (
    InvalidConfigError,
    KindMismatchError,
    LengthMismatchError,
    SignalTooShortError,
    ZeroPowerError,
)
from embedding.codec import configure, embed_message
from embedding.types import BitMessage, Variant
from hosts.buffers import SignalBuffer
from hosts.services.synthesis import synthesize_host
from hosts.specs import HostSpec, SourceKind
from metrics.measures import (
    audio_snr,
    ber,
    binary_entropy,
    distortion,
    distortion_report,
    goodput,
    host_capacity,
    info_rate,
    link_report,
    normalized_distortion,
    psnr,
    qim_capacity,
    symbol_error_rate,
)
from metrics.spectrum import (
    out_of_band_mask,
    out_of_band_rejection,
    psd,
    pulse_shape,
    pulse_shape_for_host,
    transition_width,
)


# ============================================================
# Distorção
# ============================================================

class DistortionTests(SimpleTestCase):
    def test_values(self):
        s = np.array([1.0, -1.0, 2.0, 0.0])
        x = np.array([1.5, -1.0, 1.5, 0.0])
        self.assertAlmostEqual(distortion(s, x), 0.125)
        self.assertAlmostEqual(normalized_distortion(s, x), 100 * 0.5 / 6)
        self.assertAlmostEqual(psnr(s, 0.125), 10 * math.log10(4 / 0.125))
        self.assertEqual(psnr(s, 0.0), math.inf)

    def test_normalized_is_scale_free(self):
        rng = np.random.default_rng(0)
        s = rng.normal(size=500)
        x = s + rng.normal(0, 0.1, 500)
        self.assertAlmostEqual(normalized_distortion(s, x), normalized_distortion(7 * s, 7 * x))

    def test_report_accepts_buffers(self):
        s = SignalBuffer(np.array([1 + 1j, 2j]), 10)
        report = distortion_report(s, s.with_samples(s.samples + 0.1))
        self.assertAlmostEqual(report.d_s, 0.01)
        self.assertGreater(report.psnr_db, 0)

    def test_errors(self):
        with self.assertRaises(LengthMismatchError):
            distortion(np.ones(3), np.ones(4))
        with self.assertRaises(KindMismatchError):
            distortion(np.ones(2), np.ones(2) * 1j)
        with self.assertRaises(ZeroPowerError):
            normalized_distortion(np.zeros(3), np.ones(3))
        with self.assertRaises(InvalidConfigError):
            psnr(np.ones(3), -1.0)
        with self.assertRaises(ZeroPowerError):
            psnr(np.zeros(3), 0.5)

    def test_fm_less_distorted_than_am_and_falls_with_levels(self):
        hosts = {
            "am": synthesize_host(HostSpec.default("am", source=SourceKind.NOISE), 1.0, seed=1),
            "fm": synthesize_host(HostSpec.default("fm", source=SourceKind.NOISE), 0.1, seed=1),
        }
        d_norm = {}
        for name, host in hosts.items():
            msg = BitMessage.random(len(host), np.random.default_rng(2))
            d_norm[name] = [
                normalized_distortion(host, embed_message(host, msg, configure(host, n)))
                for n in (2, 4, 8, 16, 22, 32, 45)
            ]
            with self.subTest(host=name):
                self.assertTrue(all(a > b for a, b in zip(d_norm[name], d_norm[name][1:])))
        self.assertLess(d_norm["fm"][4], d_norm["am"][4])


# ============================================================
# Capacidade e enlace
# ============================================================

class CapacityTests(SimpleTestCase):
    def test_values(self):
        self.assertAlmostEqual(qim_capacity(1.0, 1.0), 0.5)
        self.assertAlmostEqual(qim_capacity(3.0, 1.0), 1.0)
        self.assertAlmostEqual(host_capacity(15.0, 1.0), 2.0)
        self.assertEqual(qim_capacity(0.0, 1.0), 0.0)

    def test_invalid(self):
        with self.assertRaises(InvalidConfigError):
            qim_capacity(1.0, 0.0)
        with self.assertRaises(InvalidConfigError):
            host_capacity(-1.0, 1.0)

    def test_qim_below_host(self):
        for d_s in (1e-4, 1e-2, 0.1):
            self.assertLess(qim_capacity(d_s, 0.05), host_capacity(0.5, 0.05))


class LinkTests(SimpleTestCase):
    def test_ber_and_rates(self):
        sent = BitMessage([1, 0, 1, 1])
        got = BitMessage([1, 1, 1, 0])
        self.assertEqual(ber(sent, got), 0.5)
        self.assertEqual(goodput(200, 0.25), 150)
        self.assertEqual(info_rate(200, 0.0), 200)
        self.assertAlmostEqual(info_rate(200, 0.5), 0.0)
        self.assertAlmostEqual(binary_entropy(0.11), 0.4999, places=3)
        with self.assertRaises(LengthMismatchError):
            ber(sent, BitMessage([1]))

    def test_link_report(self):
        sent = BitMessage([0, 1] * 50)
        report = link_report(sent, sent, bit_rate=100, d_s=0.01, noise_power=0.0)
        self.assertEqual(report.ber, 0.0)
        self.assertEqual(report.bits_tested, 100)
        self.assertEqual(report.throughput_bps, 100)
        self.assertEqual(report.capacity_bps_per_hz, math.inf)


class HostOutputTests(SimpleTestCase):
    def test_symbol_error_rate(self):
        sent = np.array([1, -1, 3, 5]) / 7 + 0j
        decided = sent.copy()
        decided[2] = 1 / 7
        self.assertEqual(symbol_error_rate(sent, decided), 0.25)
        with self.assertRaises(LengthMismatchError):
            symbol_error_rate(sent, decided[:2])

    def test_audio_snr(self):
        t = np.arange(4000) / 8000
        ref = np.sin(2 * np.pi * 400 * t)
        self.assertEqual(audio_snr(ref, ref), math.inf)
        self.assertGreater(audio_snr(ref, 0.3 * ref), 200.0)
        noise = np.random.default_rng(3).normal(0, 0.1, ref.size)
        snr = audio_snr(ref, 2.0 * (ref + noise))
        self.assertAlmostEqual(snr, 10 * math.log10(0.5 / 0.01), delta=0.5)
        with self.assertRaises(ZeroPowerError):
            audio_snr(np.zeros(100), ref[:100])


# ============================================================
# Espectro
# ============================================================

class SpectrumTests(SimpleTestCase):
    def test_tone_peaks(self):
        t = np.arange(8192) / 8000
        real = psd(SignalBuffer(np.cos(2 * np.pi * 1000 * t), 8000))
        self.assertGreaterEqual(real.freqs.min(), 0)
        self.assertAlmostEqual(real.freqs[np.argmax(real.psd_db)], 1000, delta=8000 / 1024)
        self.assertEqual(real.psd_db.max(), 0.0)

        cplx = psd(SignalBuffer(np.exp(-2j * np.pi * 1000 * t), 8000))
        self.assertLess(cplx.freqs.min(), 0)
        self.assertTrue(np.all(np.diff(cplx.freqs) > 0))
        self.assertAlmostEqual(cplx.freqs[np.argmax(cplx.psd_db)], -1000, delta=8000 / 1024)

    def test_white_noise_is_flat(self):
        rng = np.random.default_rng(40)
        n, nfft = 200_000, 1024
        self.assertGreaterEqual((n - nfft) // (nfft // 2) + 1, 100)
        noise = SignalBuffer(rng.normal(size=n) + 1j * rng.normal(size=n), 8000)
        spectrum = psd(noise, nfft)
        self.assertEqual(spectrum.psd_db.size, nfft)
        self.assertLessEqual(float(np.max(np.abs(spectrum.psd_db - np.median(spectrum.psd_db)))), 3.0)

    def test_psd_errors(self):
        with self.assertRaises(InvalidConfigError):
            psd(SignalBuffer(np.ones(2000), 8000), nfft=1000)
        with self.assertRaises(SignalTooShortError):
            psd(SignalBuffer(np.ones(100), 8000), nfft=256)

    def test_pulse_shape_band(self):
        buf = SignalBuffer(np.ones(500), 8000)
        with self.assertRaises(InvalidConfigError):
            pulse_shape(buf, (1000, 5000))
        self.assertEqual(len(pulse_shape(buf, (0, 1000))), 500)

    def test_out_of_band_mask(self):
        freqs = np.array([-300.0, -50.0, 0.0, 90.0, 120.0])
        self.assertEqual(out_of_band_mask(freqs, (0, 100), 10).tolist(), [True, False, False, False, True])
        self.assertEqual(out_of_band_mask(freqs, (100, 200), 10).tolist(), [True, True, True, False, False])

    def test_shaped_fm_composite_meets_mask(self):
        spec = HostSpec.default("fm", source=SourceKind.NOISE)
        host = synthesize_host(spec, 0.2, seed=5)
        cfg = configure(host, 22, variant=Variant.SCALAR_DC, alpha=0.7)
        composite = embed_message(host, BitMessage.random(len(host), np.random.default_rng(6)), cfg)

        band, guard = spec.channel_band(), transition_width(spec.sample_rate)
        raw = out_of_band_rejection(psd(composite), band, guard)
        shaped = out_of_band_rejection(psd(pulse_shape_for_host(composite, spec)), band, guard)
        self.assertGreaterEqual(shaped, 33.0)
        self.assertGreater(shaped, raw)
