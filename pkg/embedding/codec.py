# embedding/codec.py
from __future__ import annotations

import logging
import math

import numpy as np

from core.exceptions import (
    CapacityExceededError,
    InvalidConfigError,
    InvalidSampleError,
    KindMismatchError,
    TruncatedMessageError,
    UndefinedAlphaError,
)
from embedding.quantizers import make_dither, quantize, step_from_signal
from embedding.types import BitMessage, DecisionRule, DitherPair, DitherSign, QimConfig, Variant
from hosts.buffers import SignalBuffer

log = logging.getLogger(__name__)

# piso do clamp de α* (α = 0 não embute nada)
ALPHA_FLOOR = 1e-6


# ============================================================
# Helpers de configuração
# ============================================================

def configure(
    host: SignalBuffer,
    levels: int,
    *,
    variant: Variant | str = Variant.SCALAR,
    alpha: float = 1.0,
    dither_sign: DitherSign | str = DitherSign.POSITIVE_D1,
    samples_per_bit: int = 1,
) -> QimConfig:
    """Monta um QimConfig com Δ derivado do próprio host (Δ = 2·max|s|/N)."""
    return QimConfig(
        levels=levels,
        step=step_from_signal(host, levels),
        alpha=alpha,
        variant=variant,
        dither_sign=dither_sign,
        samples_per_bit=samples_per_bit,
    )


def samples_per_bit_for(sample_rate: float, bit_rate: float) -> int:
    """K = ⌊fs / bit_rate⌋: cada bit ocupa K amostras consecutivas."""
    if bit_rate <= 0:
        raise InvalidConfigError(f"bit_rate must be positive (got {bit_rate!r}).")
    k = int(math.floor(sample_rate / bit_rate))
    if k < 1:
        raise InvalidConfigError(
            f"bit_rate {bit_rate} exceeds the sample rate {sample_rate}; at most one bit per sample."
        )
    return k


def _check_domain(buffer: SignalBuffer, config: QimConfig) -> None:
    if config.is_lattice and not buffer.is_complex:
        raise KindMismatchError(f"{config.variant.label} needs a complex host; got a real buffer.")


def _carrier(samples: np.ndarray, config: QimConfig) -> np.ndarray:
    """Componente que carrega a marca: variantes escalares usam só I nos hosts complexos."""
    if not config.is_lattice and np.iscomplexobj(samples):
        return samples.real
    return samples


# ============================================================
# Embedding
# ============================================================

def _embed_array(s: np.ndarray, d, config: QimConfig) -> np.ndarray:
    alpha = config.effective_alpha
    delta = config.step
    if alpha == 1.0:
        # α = 1: forma simples, idêntica bit a bit à variante sem compensação
        return quantize(s - d, delta) + d
    return quantize(alpha * s - d, delta) + (1 - alpha) * s + d


def embed_sample(s, bit: int, config: QimConfig, dither: DitherPair | None = None):
    """
    Embute um bit numa amostra.

    Scalar/Lattice:      Q(s − d_m) + d_m
    ScalarDC/LatticeDC:  Q(αs − d_m) + (1−α)s + d_m

    Variantes escalares numa amostra complexa marcam a parte real e
    mantêm a imaginária.
    """
    if bit not in (0, 1):
        raise InvalidConfigError(f"bit must be 0 or 1 (got {bit!r}).")
    if not np.isfinite(s):
        raise InvalidSampleError("Cannot embed into a non-finite sample.")
    is_complex = isinstance(s, complex) or np.iscomplexobj(s)
    if config.is_lattice and not is_complex:
        raise KindMismatchError(f"{config.variant.label} needs a complex sample.")

    dither = dither or make_dither(config)
    arr = np.asarray(s)
    out = _embed_array(_carrier(arr, config), dither.for_bit(bit), config)
    if is_complex and not config.is_lattice:
        out = out + 1j * arr.imag
    return out.item() if hasattr(out, "item") else out


def embed_message(host: SignalBuffer, msg: BitMessage, config: QimConfig) -> SignalBuffer:
    """
    Bit i vai nas amostras [iK, (i+1)K); o restante do buffer passa intacto.
    O comprimento de saída é o mesmo da entrada. Num host complexo as
    variantes escalares marcam só a componente I; Q passa intacta.
    """
    _check_domain(host, config)
    k = config.samples_per_bit
    n = len(msg) * k
    if n > len(host):
        raise CapacityExceededError(
            f"Message of {len(msg)} bits x {k} samples/bit needs {n} samples; host has {len(host)}."
        )

    dither = make_dither(config)
    spread = np.repeat(msg.bits, k)
    d = np.where(spread == 1, dither.d1, dither.d0)

    out = np.array(host.samples, copy=True)
    marked = _embed_array(_carrier(host.samples[:n], config), d, config)
    if host.is_complex and not config.is_lattice:
        out.real[:n] = marked
    else:
        out[:n] = marked
    return host.with_samples(out)


# ============================================================
# Decoder de distância mínima
# ============================================================

def _coset_distances(y: np.ndarray, config: QimConfig) -> tuple[np.ndarray, np.ndarray]:
    """|y − q_m|² por amostra para m = 0 e m = 1."""
    dither = make_dither(config)
    q0 = quantize(y - dither.d0, config.step) + dither.d0
    q1 = quantize(y - dither.d1, config.step) + dither.d1
    return np.abs(y - q0) ** 2, np.abs(y - q1) ** 2


def decode_message(
    received: SignalBuffer,
    msg_len: int,
    config: QimConfig,
    *,
    rule: DecisionRule | str = DecisionRule.SOFT,
) -> BitMessage:
    """
    Re-quantiza cada janela de K amostras com os dois quantizadores
    com dither e escolhe o bit de menor distância (empate → 0).

    Nas variantes DC o composto fica perto da grade de passo Δ/α, então
    o receptor aplica os quantizadores simples a αy. Com α = 1 isso é o
    decoder simples, bit a bit.
    """
    _check_domain(received, config)
    if msg_len < 1:
        raise InvalidConfigError("msg_len must be at least 1.")

    k = config.samples_per_bit
    n = msg_len * k
    if len(received) < n:
        raise TruncatedMessageError(
            f"Need {n} samples to decode {msg_len} bits at K={k}; buffer has {len(received)}."
        )

    alpha = config.effective_alpha
    y = _carrier(received.samples[:n], config)
    if alpha != 1.0:
        y = alpha * y

    dist0, dist1 = _coset_distances(y, config)
    dist0 = dist0.reshape(msg_len, k)
    dist1 = dist1.reshape(msg_len, k)

    if DecisionRule(rule) == DecisionRule.MAJORITY:
        votes = np.sum(dist1 < dist0, axis=1)
        bits = (2 * votes > k).astype(np.uint8)
    else:
        bits = (dist1.sum(axis=1) < dist0.sum(axis=1)).astype(np.uint8)

    return BitMessage(bits)


# ============================================================
# α ótimo
# ============================================================

def optimal_alpha(distortion: float, noise_power: float) -> float:
    """
    α* = D_s / (D_s + σ_n²), limitado a (0, 1].

    Sem ruído (σ_n² = 0) devolve 1: não há o que compensar.
    """
    if distortion < 0 or noise_power < 0:
        raise UndefinedAlphaError(
            f"distortion and noise_power must be non-negative (got {distortion!r}, {noise_power!r})."
        )
    if distortion == 0 and noise_power == 0:
        raise UndefinedAlphaError("alpha* is undefined when both distortion and noise power are zero.")
    if math.isinf(noise_power):
        return ALPHA_FLOOR

    alpha = distortion / (distortion + noise_power)
    return float(min(1.0, max(ALPHA_FLOOR, alpha)))
