# hosts/tests.py
from __future__ import annotations

import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal
from scipy.signal import hilbert

from channel.awgn import ChannelConfig, apply_awgn
from core.exceptions import (
    AliasingError,
    InvalidConfigError,
    InvalidSampleError,
    KindMismatchError,
    MalformedCaptureError,
    MissingSidecarError,
    SignalTooShortError,
    UnsupportedFormatError,
)
from embedding.codec import configure, embed_message
from embedding.types import BitMessage
from hosts.buffers import Domain, SignalBuffer
from hosts.services.captures import PCM16_FULL_SCALE, load_capture, save_capture, sidecar_path
from hosts.services.demod import demodulate
from hosts.services.synthesis import (
    PAM8_LEVELS,
    pam8_symbols,
    root_raised_cosine,
    synthesize_audio,
    synthesize_host,
)
from hosts.specs import HostKind, HostSpec, SourceKind, normalized_bit_rate
from metrics.measures import audio_snr, symbol_error_rate

PAM8_FS = 625_000.0


class SignalBufferTests(SimpleTestCase):
    def test_domain_inferred_and_read_only(self):
        real = SignalBuffer([1.0, -2.0], 8000)
        cplx = SignalBuffer(np.array([1 + 1j]), 8000)
        self.assertEqual(real.domain, Domain.REAL)
        self.assertEqual(cplx.domain, Domain.COMPLEX)
        with self.assertRaises(ValueError):
            real.samples[0] = 5.0

    def test_invalid(self):
        with self.assertRaises(InvalidSampleError):
            SignalBuffer([1.0, np.nan], 8000)
        with self.assertRaises(InvalidSampleError):
            SignalBuffer(np.zeros((2, 2)), 8000)
        with self.assertRaises(InvalidSampleError):
            SignalBuffer([1.0], 0)
        with self.assertRaises(KindMismatchError):
            SignalBuffer(np.array([1j]), 8000, Domain.REAL)

    def test_power_and_peak(self):
        buf = SignalBuffer(np.array([3 + 4j, 0j]), 10)
        self.assertAlmostEqual(buf.power(), 12.5)
        self.assertAlmostEqual(buf.peak(), 5.0)
        self.assertAlmostEqual(buf.duration, 0.2)

    def test_interleaved_stream(self):
        buf = SignalBuffer(np.array([1 + 2j, 3 - 4j]), 100)
        stream = buf.as_real_stream()
        assert_array_equal(stream.samples, [1, 2, 3, -4])
        self.assertEqual(stream.sample_rate, 200)
        real = SignalBuffer([1.0, 2.0], 100)
        self.assertIs(real.as_real_stream(), real)


class HostSpecTests(SimpleTestCase):
    def test_defaults(self):
        self.assertEqual(HostSpec.default("am").sample_rate, 8_000)
        self.assertEqual(HostSpec.default("fm").sample_rate, 200_000)
        pam8 = HostSpec.default("pam8")
        self.assertEqual(pam8.sample_rate, 6_250_000)
        self.assertEqual(pam8.samples_per_symbol, 4)
        self.assertTrue(pam8.is_complex)

    def test_channel_band(self):
        self.assertEqual(HostSpec.default("am").channel_band(), (1600.0, 2400.0))
        lo, hi = HostSpec.default("fm").channel_band()
        self.assertEqual((lo, hi), (50_000 - 15_400, 50_000 + 15_400))
        _, edge = HostSpec.default("pam8", sample_rate=PAM8_FS).channel_band()
        self.assertAlmostEqual(edge, PAM8_FS / 4 * 1.2 / 2)

    def test_normalized_bit_rate(self):
        self.assertAlmostEqual(normalized_bit_rate(HostSpec.default("am"), 1e-4), 1.0)
        self.assertAlmostEqual(normalized_bit_rate(HostSpec.default("fm"), 1e-4), 20.0)
        self.assertAlmostEqual(normalized_bit_rate(HostSpec.default("pam8"), 1e-4), 625.0)
        with self.assertRaises(InvalidConfigError):
            normalized_bit_rate(HostSpec.default("am"), 0)

    def test_validation(self):
        with self.assertRaises(AliasingError):
            HostSpec.default("am", carrier_freq=2_500)
        with self.assertRaises(AliasingError):
            HostSpec.default("fm", deviation=60_000)
        with self.assertRaises(InvalidConfigError):
            HostSpec.default("am", modulation_index=1.5)
        with self.assertRaises(InvalidConfigError):
            HostSpec.default("pam8", sample_rate=1_000_000, symbol_rate=300_000)
        with self.assertRaises(InvalidConfigError):
            HostSpec.default("am", source=SourceKind.FILE)


class SynthesisTests(SimpleTestCase):
    def test_deterministic(self):
        for kind in ("am", "fm"):
            spec = HostSpec.default(kind, source=SourceKind.NOISE)
            a = synthesize_host(spec, 0.05, seed=3)
            b = synthesize_host(spec, 0.05, seed=3)
            c = synthesize_host(spec, 0.05, seed=4)
            assert_array_equal(a.samples, b.samples)
            self.assertFalse(np.array_equal(a.samples, c.samples))

    def test_shapes_and_levels(self):
        am = synthesize_host(HostSpec.default("am"), 0.5)
        self.assertEqual(len(am), 4000)
        self.assertFalse(am.is_complex)
        self.assertLessEqual(am.peak(), 1.5 + 1e-12)

        fm = synthesize_host(HostSpec.default("fm"), 0.05)
        self.assertLessEqual(fm.peak(), 1.0 + 1e-12)
        self.assertAlmostEqual(fm.power(), 0.5, delta=0.01)

        pam8 = synthesize_host(HostSpec.default("pam8", sample_rate=PAM8_FS), 0.004, seed=1)
        self.assertTrue(pam8.is_complex)
        self.assertEqual(len(pam8), 2500)

    def test_am_without_modulation_has_unit_envelope(self):
        spec = HostSpec.default("am", modulation_index=0.0, source=SourceKind.NOISE)
        host = synthesize_host(spec, 0.5, seed=11)
        # 1000 ciclos inteiros da portadora: a transformada de Hilbert é exata
        envelope = np.abs(hilbert(host.samples))
        assert_allclose(envelope, 1.0, atol=1e-6)
        assert_array_equal(host.samples, synthesize_host(spec, 0.5, seed=12).samples)

    def test_pam8_levels_uniform(self):
        spec = HostSpec.default("pam8", sample_rate=PAM8_FS)
        symbols = pam8_symbols(spec, 0.65, seed=13)[:100_000]
        self.assertEqual(symbols.size, 100_000)
        values = np.concatenate([symbols.real, symbols.imag])
        counts = np.array([np.sum(np.isclose(values, level)) for level in PAM8_LEVELS])
        self.assertEqual(counts.sum(), values.size)

        expected = values.size / 8
        sigma = np.sqrt(values.size * (1 / 8) * (7 / 8))
        self.assertTrue(np.all(np.abs(counts - expected) <= 3 * sigma), counts)

    def test_rrc_unit_energy(self):
        h = root_raised_cosine(0.2, 4)
        self.assertEqual(h.size, 41)
        self.assertAlmostEqual(float(np.sum(h ** 2)), 1.0)
        assert_allclose(h, h[::-1], atol=1e-12)

    def test_bad_duration(self):
        with self.assertRaises(InvalidConfigError):
            synthesize_host(HostSpec.default("am"), 0)

    def test_file_source(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "am.f32"
            save_capture(synthesize_host(HostSpec.default("am"), 0.5, seed=2), path)
            spec = HostSpec.default("am", source=SourceKind.FILE, path=str(path))
            host = synthesize_host(spec, 0.25)
            self.assertEqual(len(host), 2000)
            # pedir mais que o arquivo tem devolve o arquivo inteiro
            self.assertEqual(len(synthesize_host(spec, 5.0)), 4000)

            pam8 = HostSpec.default("pam8", source=SourceKind.FILE, path=str(path))
            with self.assertRaises(KindMismatchError):
                synthesize_host(pam8, 0.1)


class DemodulateTests(SimpleTestCase):
    def test_am_and_fm_recover_audio(self):
        for kind, duration in (("am", 0.5), ("fm", 0.05)):
            spec = HostSpec.default(kind)
            host = synthesize_host(spec, duration, seed=5)
            audio = demodulate(host, spec)
            with self.subTest(kind=kind):
                self.assertGreater(audio_snr(synthesize_audio(spec, duration, seed=5), audio), 20.0)

    def test_pam8_clean_decisions(self):
        spec = HostSpec.default("pam8", sample_rate=PAM8_FS)
        host = synthesize_host(spec, 0.004, seed=6)
        decided = demodulate(host, spec)
        sent = pam8_symbols(spec, 0.004, seed=6)
        self.assertEqual(len(decided), len(sent))
        self.assertTrue(np.all(np.isin(decided.samples.real, PAM8_LEVELS)))
        self.assertLess(symbol_error_rate(sent, decided), 0.01)

        noisy = apply_awgn(host, host.power(), ChannelConfig(5.0, seed=7))
        self.assertGreater(symbol_error_rate(sent, demodulate(noisy, spec)), symbol_error_rate(sent, decided))

    def test_embedding_degrades_audio_less_with_more_levels(self):
        spec = HostSpec.default("am")
        host = synthesize_host(spec, 0.5, seed=8)
        reference = synthesize_audio(spec, 0.5, seed=8)
        msg = BitMessage.random(len(host), np.random.default_rng(9))

        snrs = []
        for levels in (4, 8, 16):
            x = embed_message(host, msg, configure(host, levels))
            snrs.append(audio_snr(reference, demodulate(x, spec)))
        self.assertEqual(snrs, sorted(snrs))
        self.assertLess(snrs[0], snrs[-1])

    def test_too_short_for_receiver(self):
        for kind, n in (("fm", 1), ("fm", 10), ("am", 10)):
            spec = HostSpec.default(kind)
            with self.subTest(kind=kind, n=n), self.assertRaises(SignalTooShortError):
                demodulate(SignalBuffer(np.ones(n), spec.sample_rate), spec)

    def test_mismatches(self):
        am = HostSpec.default("am")
        pam8 = HostSpec.default("pam8", sample_rate=PAM8_FS)
        with self.assertRaises(KindMismatchError):
            demodulate(synthesize_host(am, 0.1), pam8)
        with self.assertRaises(KindMismatchError):
            demodulate(SignalBuffer(np.ones(100), 16_000), am)


class CaptureTests(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def test_raw_round_trip(self):
        rng = np.random.default_rng(10)
        for name, samples in (
            ("real.f32", rng.uniform(-1, 1, 300)),
            ("iq.f32", rng.uniform(-1, 1, 300) + 1j * rng.uniform(-1, 1, 300)),
        ):
            buf = SignalBuffer(samples, 625_000)
            loaded = load_capture(save_capture(buf, self.dir / name))
            with self.subTest(name=name):
                self.assertEqual(loaded.domain, buf.domain)
                self.assertEqual(loaded.sample_rate, buf.sample_rate)
                assert_allclose(loaded.samples, buf.samples, rtol=1e-6, atol=1e-7)

    def test_wav_round_trip(self):
        buf = SignalBuffer(np.linspace(-1, 1, 101), 8000)
        loaded = load_capture(save_capture(buf, self.dir / "a.wav"))
        self.assertEqual(loaded.sample_rate, 8000)
        assert_allclose(loaded.samples, buf.samples, atol=1 / PCM16_FULL_SCALE)

    def test_errors(self):
        with self.assertRaises(UnsupportedFormatError):
            save_capture(SignalBuffer(np.array([1j]), 8000), self.dir / "c.wav")
        with self.assertRaises(UnsupportedFormatError):
            save_capture(SignalBuffer([1.0], 8000), self.dir / "c.bin")

        lonely = self.dir / "lonely.f32"
        lonely.write_bytes(np.ones(4, dtype="<f4").tobytes())
        with self.assertRaises(MissingSidecarError):
            load_capture(lonely)

        empty = self.dir / "empty.f32"
        save_capture(SignalBuffer([1.0], 8000), empty)
        empty.write_bytes(b"")
        with self.assertRaises(MalformedCaptureError):
            load_capture(empty)

        broken = self.dir / "broken.f32"
        save_capture(SignalBuffer([1.0], 8000), broken)
        sidecar_path(broken).write_text("{not json", encoding="utf-8")
        with self.assertRaises(MalformedCaptureError):
            load_capture(broken)

        with self.assertRaises(MalformedCaptureError):
            load_capture(self.dir / "missing.wav")
