# metrics/measures.py
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import (
    InvalidConfigError,
    KindMismatchError,
    LengthMismatchError,
    ZeroPowerError,
)
from embedding.types import BitMessage
from hosts.buffers import SignalBuffer


# ============================================================
# Relatórios
# ============================================================

@dataclass(frozen=True)
class DistortionReport:
    d_s: float       # MSE (unidades do host²)
    d_norm: float    # %
    psnr_db: float   # dB (inf quando d_s = 0)


@dataclass(frozen=True)
class LinkReport:
    ber: float
    bits_tested: int
    throughput_bps: float
    capacity_bps_per_hz: float


# ============================================================
# Helpers
# ============================================================

def _samples(x) -> np.ndarray:
    return x.samples if isinstance(x, SignalBuffer) else np.asarray(x)


def _pair(host, composite) -> tuple[np.ndarray, np.ndarray]:
    s, x = _samples(host), _samples(composite)
    if s.shape != x.shape:
        raise LengthMismatchError(f"Host has {s.size} samples, composite has {x.size}.")
    if np.iscomplexobj(s) != np.iscomplexobj(x):
        raise KindMismatchError("Host and composite must be both real or both complex.")
    return s, x


# ============================================================
# Distorção
# ============================================================

def distortion(host, composite) -> float:
    """D_s = (1/K) Σ |s_i − x_i|²."""
    s, x = _pair(host, composite)
    if s.size == 0:
        raise LengthMismatchError("Cannot measure distortion on empty buffers.")
    return float(np.mean(np.abs(s - x) ** 2))


def normalized_distortion(host, composite) -> float:
    """100 · Σ|s−x|² / Σ|s|², independente da escala do host."""
    s, x = _pair(host, composite)
    power = float(np.sum(np.abs(s) ** 2))
    if power == 0.0:
        raise ZeroPowerError("Host has zero power; normalized distortion is undefined.")
    return 100.0 * float(np.sum(np.abs(s - x) ** 2)) / power


def psnr(host, d_s: float) -> float:
    """10·log10(max|s|² / D_s); D_s = 0 → +inf."""
    if d_s < 0:
        raise InvalidConfigError(f"Distortion cannot be negative (got {d_s!r}).")
    if d_s == 0:
        return math.inf
    s = _samples(host)
    peak = float(np.max(np.abs(s))) if s.size else 0.0
    if peak == 0:
        raise ZeroPowerError("PSNR is undefined for an all-zero host.")
    return 10.0 * math.log10(peak ** 2 / d_s)


def distortion_report(host, composite) -> DistortionReport:
    d_s = distortion(host, composite)
    return DistortionReport(
        d_s=d_s,
        d_norm=normalized_distortion(host, composite),
        psnr_db=psnr(host, d_s),
    )


# ============================================================
# Capacidade
# ============================================================

def _half_log(ratio: float) -> float:
    return 0.5 * math.log2(1.0 + ratio)


def qim_capacity(d_s: float, noise_power: float) -> float:
    """C_qim = ½·log2(1 + D_s/σ_n²) bits por amostra."""
    if noise_power <= 0:
        raise InvalidConfigError(f"Noise power must be positive (got {noise_power!r}).")
    if d_s < 0:
        raise InvalidConfigError(f"Distortion cannot be negative (got {d_s!r}).")
    return _half_log(d_s / noise_power)


def host_capacity(host_power: float, noise_power: float) -> float:
    """C_host = ½·log2(1 + σ_s²/σ_n²) bits por amostra."""
    if noise_power <= 0:
        raise InvalidConfigError(f"Noise power must be positive (got {noise_power!r}).")
    if host_power < 0:
        raise InvalidConfigError(f"Host power cannot be negative (got {host_power!r}).")
    return _half_log(host_power / noise_power)


# ============================================================
# Enlace da mensagem
# ============================================================

def ber(sent: BitMessage, received: BitMessage) -> float:
    """Distância de Hamming / comprimento."""
    if len(sent) != len(received):
        raise LengthMismatchError(f"Sent {len(sent)} bits but received {len(received)}.")
    return int(np.count_nonzero(sent.bits != received.bits)) / len(sent)


def goodput(bit_rate: float, ber_value: float) -> float:
    """Bits corretos por segundo: bit_rate·(1 − BER)."""
    return bit_rate * (1.0 - ber_value)


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def info_rate(bit_rate: float, ber_value: float) -> float:
    """
    bit_rate·(1 − h2(BER)): taxa de um canal binário simétrico com esse BER.
    Ao contrário do goodput, vai a 0 quando o receptor está chutando (BER = ½).
    """
    return bit_rate * (1.0 - binary_entropy(ber_value))


def link_report(
    sent: BitMessage,
    received: BitMessage,
    *,
    bit_rate: float,
    d_s: float,
    noise_power: float,
) -> LinkReport:
    ber_value = ber(sent, received)
    capacity = qim_capacity(d_s, noise_power) if noise_power > 0 else math.inf
    return LinkReport(
        ber=ber_value,
        bits_tested=len(sent),
        throughput_bps=goodput(bit_rate, ber_value),
        capacity_bps_per_hz=capacity,
    )


# ============================================================
# Saída do receptor do host
# ============================================================

def symbol_error_rate(sent: np.ndarray, decided) -> float:
    sent = np.asarray(sent)
    decided = _samples(decided)
    if sent.shape != decided.shape:
        raise LengthMismatchError(f"Sent {sent.size} symbols but decided {decided.size}.")
    if sent.size == 0:
        raise LengthMismatchError("No symbols to compare.")
    return int(np.count_nonzero(~np.isclose(sent, decided))) / sent.size


def audio_snr(reference, degraded, *, trim: float = 0.05) -> float:
    """
    SNR (dB) da saída demodulada contra a referência, após alinhar o
    ganho por mínimos quadrados. `trim` descarta a fração inicial e final
    (transientes dos filtros).
    """
    ref, deg = _pair(reference, degraded)
    cut = int(len(ref) * trim)
    if cut:
        ref, deg = ref[cut:-cut], deg[cut:-cut]

    ref_power = float(np.sum(np.abs(ref) ** 2))
    if ref_power == 0.0:
        raise ZeroPowerError("Reference audio has zero power.")
    deg_power = float(np.sum(np.abs(deg) ** 2))
    gain = float(np.real(np.vdot(deg, ref))) / deg_power if deg_power > 0 else 0.0

    err = float(np.sum(np.abs(ref - gain * deg) ** 2))
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(ref_power / err)
