# hosts/buffers.py
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from django.db import models

from core.exceptions import InvalidSampleError, KindMismatchError


class Domain(models.TextChoices):
    REAL = "real", "Real"
    COMPLEX = "complex", "Complex"


@dataclass(frozen=True, eq=False)
class SignalBuffer:
    """
    Amostras uniformes (reais ou complexas) + taxa de amostragem.

    É o tipo que circula entre host, embedding, canal e receptor:
    host s, composto x e recebido y. O array interno é somente-leitura,
    então o buffer pode ser passado entre workers sem cópia defensiva.
    """

    samples: np.ndarray
    sample_rate: float
    domain: Domain | None = None  # inferido do dtype quando None

    def __post_init__(self):
        arr = np.asarray(self.samples)
        inferred = Domain.COMPLEX if np.iscomplexobj(arr) else Domain.REAL
        domain = Domain(self.domain) if self.domain else inferred

        if domain == Domain.REAL and inferred == Domain.COMPLEX:
            raise KindMismatchError("Complex samples cannot be stored in a real buffer.")
        arr = arr.astype(np.complex128 if domain == Domain.COMPLEX else np.float64, copy=True)
        if arr.ndim != 1:
            raise InvalidSampleError(f"Signal buffers are one-dimensional (got shape {arr.shape}).")
        if not np.all(np.isfinite(arr)):
            raise InvalidSampleError("Signal buffer contains non-finite samples.")
        if not (self.sample_rate > 0 and np.isfinite(self.sample_rate)):
            raise InvalidSampleError(f"sample_rate must be positive (got {self.sample_rate!r}).")

        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "domain", domain)

    # -------------------------
    # Propriedades
    # -------------------------

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def is_complex(self) -> bool:
        return self.domain == Domain.COMPLEX

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def power(self) -> float:
        """Potência média σ_s² = mean(|s|²)."""
        if len(self) == 0:
            return 0.0
        return float(np.mean(np.abs(self.samples) ** 2))

    def peak(self) -> float:
        """max|s| (módulo complexo para buffers complexos)."""
        if len(self) == 0:
            return 0.0
        return float(np.max(np.abs(self.samples)))

    # -------------------------
    # Derivados
    # -------------------------

    def with_samples(self, samples: np.ndarray) -> "SignalBuffer":
        """Mesmo sample_rate/domínio, amostras novas."""
        return SignalBuffer(samples, self.sample_rate, self.domain)

    def as_real_stream(self) -> "SignalBuffer":
        """
        Intercala I/Q num stream real [I0, Q0, I1, Q1, ...] à taxa 2·fs.
        Buffers reais voltam inalterados.
        """
        if not self.is_complex:
            return self
        stream = np.empty(2 * len(self), dtype=np.float64)
        stream[0::2] = self.samples.real
        stream[1::2] = self.samples.imag
        return SignalBuffer(stream, 2 * self.sample_rate, Domain.REAL)

