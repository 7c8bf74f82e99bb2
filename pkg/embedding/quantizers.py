# embedding/quantizers.py
from __future__ import annotations

import numpy as np

from core.exceptions import DegenerateSignalError, InvalidConfigError, InvalidSampleError
from embedding.types import DitherPair, DitherSign, QimConfig
from hosts.buffers import SignalBuffer


# =========================
# Quantizador uniforme
# =========================

def _round_half_away(u: np.ndarray) -> np.ndarray:
    # meio-inteiros se afastam do zero: simétrico em torno de 0
    return np.sign(u) * np.floor(np.abs(u) + 0.5)


def quantize(s, step: float):
    """
    Q(s) = Δ·round(s/Δ).

    Aceita escalar ou array, real ou complexo (complexo: parte real e
    imaginária quantizadas separadamente, mesmo Δ nos dois eixos).
    """
    if not (np.isfinite(step) and step > 0):
        raise InvalidConfigError(f"Quantizer step must be positive (got {step!r}).")

    arr = np.asarray(s)
    if not np.all(np.isfinite(arr)):
        raise InvalidSampleError("Cannot quantize a non-finite sample.")

    if np.iscomplexobj(arr):
        out = step * (_round_half_away(arr.real / step) + 1j * _round_half_away(arr.imag / step))
    else:
        out = step * _round_half_away(arr.astype(np.float64) / step)

    if np.ndim(s) == 0:
        return out.item()
    return out


def step_from_signal(host: SignalBuffer, levels: int) -> float:
    """
    Δ = 2·max|s| / N.

    Para hosts complexos usa max(max|Re|, max|Im|): os dois eixos da
    grade do lattice compartilham o mesmo Δ.
    """
    if int(levels) != levels or levels < 2:
        raise InvalidConfigError(f"levels must be an integer >= 2 (got {levels!r}).")
    if len(host) == 0:
        raise DegenerateSignalError("Cannot derive a step from an empty host.")

    s = host.samples
    if host.is_complex:
        peak = max(float(np.max(np.abs(s.real))), float(np.max(np.abs(s.imag))))
    else:
        peak = float(np.max(np.abs(s)))

    if peak == 0.0:
        raise DegenerateSignalError("Host is all zeros; the quantizer step would be 0.")
    return 2.0 * peak / int(levels)


# =========================
# Dither
# =========================

def make_dither(config: QimConfig) -> DitherPair:
    """
    d1 = ±Δ/4 e d0 = d1 ∓ Δ/2 (regra de sinal: d1 ≤ 0 → d0 = d1 + Δ/2).
    No lattice a mesma regra vale nos dois eixos: d1 = ±(Δ/4)(1+j).
    """
    delta = config.step
    unit = (1 + 1j) if config.is_lattice else 1.0

    d1 = delta / 4 if config.dither_sign == DitherSign.POSITIVE_D1 else -delta / 4
    d0 = d1 + delta / 2 if d1 <= 0 else d1 - delta / 2

    return DitherPair(d1=d1 * unit, d0=d0 * unit)
