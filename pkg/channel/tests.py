# channel/tests.py
from __future__ import annotations

import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_array_equal

from channel.awgn import NO_NOISE, ChannelConfig, apply_awgn
from core.exceptions import InvalidConfigError, ZeroPowerError
from hosts.buffers import SignalBuffer


class ChannelConfigTests(SimpleTestCase):
    def test_noise_power(self):
        self.assertAlmostEqual(ChannelConfig(10.0).noise_power(2.0), 0.2)
        self.assertAlmostEqual(ChannelConfig(-3.0).noise_power(1.0), 10 ** 0.3)
        self.assertEqual(ChannelConfig(NO_NOISE).noise_power(1.0), 0.0)

    def test_invalid(self):
        with self.assertRaises(InvalidConfigError):
            ChannelConfig(math.nan)
        with self.assertRaises(InvalidConfigError):
            ChannelConfig(-math.inf)
        with self.assertRaises(ZeroPowerError):
            ChannelConfig(10.0).noise_power(0.0)


class ApplyAwgnTests(SimpleTestCase):
    def test_noiseless_returns_input(self):
        buf = SignalBuffer(np.ones(10), 8000)
        self.assertIs(apply_awgn(buf, 1.0, ChannelConfig(NO_NOISE)), buf)

    def test_calibrated_to_host_power(self):
        n = 200_000
        for snr in (0.0, 10.0, 25.0):
            for complex_ in (False, True):
                zeros = np.zeros(n, dtype=np.complex128 if complex_ else np.float64)
                buf = SignalBuffer(zeros, 8000)
                out = apply_awgn(buf, 2.0, ChannelConfig(snr, seed=1))
                expected = 2.0 / 10 ** (snr / 10)
                with self.subTest(snr=snr, complex_=complex_):
                    self.assertAlmostEqual(out.power() / expected, 1.0, delta=0.02)
                    self.assertLess(abs(np.mean(out.samples)), 0.01)
                    if complex_:
                        i_power = float(np.mean(out.samples.real ** 2))
                        self.assertAlmostEqual(i_power / (expected / 2), 1.0, delta=0.02)

    def test_seeded(self):
        buf = SignalBuffer(np.zeros(100), 8000)
        a = apply_awgn(buf, 1.0, ChannelConfig(5.0, seed=3))
        b = apply_awgn(buf, 1.0, ChannelConfig(5.0, seed=3))
        c = apply_awgn(buf, 1.0, ChannelConfig(5.0, seed=4))
        assert_array_equal(a.samples, b.samples)
        self.assertFalse(np.array_equal(a.samples, c.samples))

    def test_keeps_buffer_shape(self):
        buf = SignalBuffer(np.ones(50) * (1 + 1j), 625_000)
        out = apply_awgn(buf, buf.power(), ChannelConfig(20.0))
        self.assertEqual(len(out), 50)
        self.assertEqual(out.sample_rate, 625_000)
        self.assertTrue(out.is_complex)
