# embedding/types.py
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from django.db import models

from core.exceptions import InvalidConfigError


# ============================================================
# Enums (mesmo padrão TextChoices usado nos models)
# ============================================================

class Variant(models.TextChoices):
    SCALAR = "scalar", "Scalar QIM"
    SCALAR_DC = "scalar_dc", "Scalar DC-QIM"
    LATTICE = "lattice", "Lattice QIM"
    LATTICE_DC = "lattice_dc", "Lattice DC-QIM"


class DitherSign(models.TextChoices):
    POSITIVE_D1 = "positive", "d1 = +Δ/4"
    NEGATIVE_D1 = "negative", "d1 = −Δ/4"


class DecisionRule(models.TextChoices):
    SOFT = "soft", "Summed squared distance"
    MAJORITY = "majority", "Per-sample majority vote"


# ============================================================
# QimConfig
# ============================================================

@dataclass(frozen=True)
class QimConfig:
    """
    Parâmetros do transmissor/receptor QIM.

    - levels: N níveis base do quantizador
    - step: Δ (mesma unidade das amostras do host)
    - alpha: fator de compensação de distorção, 0 < α ≤ 1
    - samples_per_bit: K amostras consecutivas por bit
    """

    levels: int
    step: float
    alpha: float = 1.0
    variant: Variant = Variant.SCALAR
    dither_sign: DitherSign = DitherSign.POSITIVE_D1
    samples_per_bit: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "dither_sign", DitherSign(self.dither_sign))

        if int(self.levels) != self.levels or self.levels < 2:
            raise InvalidConfigError(f"levels must be an integer >= 2 (got {self.levels!r}).")
        if not (math.isfinite(self.step) and self.step > 0):
            raise InvalidConfigError(f"step must be a positive finite number (got {self.step!r}).")
        if not (0 < self.alpha <= 1):
            raise InvalidConfigError(f"alpha must be in (0, 1] (got {self.alpha!r}).")
        if int(self.samples_per_bit) != self.samples_per_bit or self.samples_per_bit < 1:
            raise InvalidConfigError(f"samples_per_bit must be an integer >= 1 (got {self.samples_per_bit!r}).")

        object.__setattr__(self, "levels", int(self.levels))
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "samples_per_bit", int(self.samples_per_bit))

    @property
    def is_lattice(self) -> bool:
        return self.variant in (Variant.LATTICE, Variant.LATTICE_DC)

    @property
    def is_compensated(self) -> bool:
        return self.variant in (Variant.SCALAR_DC, Variant.LATTICE_DC)

    @property
    def effective_alpha(self) -> float:
        """α usado de fato: variantes sem compensação sempre usam 1."""
        return self.alpha if self.is_compensated else 1.0


# ============================================================
# DitherPair
# ============================================================

@dataclass(frozen=True)
class DitherPair:
    d1: complex | float
    d0: complex | float

    def for_bit(self, bit: int) -> complex | float:
        return self.d1 if bit else self.d0


# ============================================================
# BitMessage
# ============================================================

class BitMessage:
    """Sequência ordenada de bits {0,1} (a mensagem m)."""

    __slots__ = ("bits",)

    def __init__(self, bits: Iterable[int] | np.ndarray):
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidConfigError("A message needs at least one bit.")
        if not np.all((arr == 0) | (arr == 1)):
            raise InvalidConfigError("Message bits must be 0 or 1.")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        self.bits = arr

    def __len__(self) -> int:
        return int(self.bits.size)

    def __iter__(self):
        return iter(int(b) for b in self.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMessage):
            return NotImplemented
        return bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __repr__(self) -> str:
        head = "".join(str(b) for b in self.bits[:16])
        more = "…" if len(self) > 16 else ""
        return f"BitMessage(L={len(self)}, bits={head}{more})"

    # -------------------------
    # Construtores / conversões
    # -------------------------

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "BitMessage":
        """Bits pseudo-aleatórios (a mensagem de teste dos experimentos)."""
        return cls(rng.integers(0, 2, size=int(length), dtype=np.uint8))

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitMessage":
        """MSB primeiro em cada byte."""
        return cls(np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8)))

    @classmethod
    def from_hex(cls, text: str) -> "BitMessage":
        cleaned = "".join(text.split())
        try:
            return cls.from_bytes(bytes.fromhex(cleaned))
        except ValueError as exc:
            raise InvalidConfigError(f"Invalid hex message: {exc}") from exc

    def to_bytes(self) -> bytes:
        """Completa com zeros até múltiplo de 8."""
        return np.packbits(self.bits).tobytes()

    def to_hex(self) -> str:
        return self.to_bytes().hex()
