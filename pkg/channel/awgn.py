# channel/awgn.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import InvalidConfigError, ZeroPowerError
from hosts.buffers import SignalBuffer

log = logging.getLogger(__name__)

# snr_db = +inf é o modo sem ruído
NO_NOISE = math.inf


@dataclass(frozen=True)
class ChannelConfig:
    """SNR do host (σ_s² / σ_n², em dB) + semente do gerador de ruído."""

    snr_db: float
    seed: int = 0

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise InvalidConfigError(f"snr_db must be finite or +inf (got {self.snr_db!r}).")

    @property
    def noiseless(self) -> bool:
        return self.snr_db == NO_NOISE

    def noise_power(self, host_power: float) -> float:
        """σ_n² = σ_s² / 10^(snr_db/10)."""
        if not host_power > 0:
            raise ZeroPowerError(f"host_power must be positive (got {host_power!r}).")
        if self.noiseless:
            return 0.0
        return host_power / 10 ** (self.snr_db / 10)


def apply_awgn(
    signal: SignalBuffer,
    host_power: float,
    config: ChannelConfig,
    rng: np.random.Generator | None = None,
) -> SignalBuffer:
    """
    Soma ruído gaussiano branco de média zero calibrado pela potência do
    host ORIGINAL (a distorção do embedding não entra na potência do sinal).

    Complexo: σ_n²/2 em I e σ_n²/2 em Q. Sem ruído (snr = +inf) devolve o
    próprio buffer.
    """
    sigma2 = config.noise_power(host_power)
    if sigma2 == 0.0:
        return signal

    rng = rng if rng is not None else np.random.default_rng(config.seed)
    n = len(signal)
    if signal.is_complex:
        scale = math.sqrt(sigma2 / 2)
        noise = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    else:
        noise = math.sqrt(sigma2) * rng.standard_normal(n)

    log.debug("AWGN: snr=%.2f dB σ_n²=%.3e (n=%d)", config.snr_db, sigma2, n)
    return signal.with_samples(signal.samples + noise)
