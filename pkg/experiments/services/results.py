# experiments/services/results.py
from __future__ import annotations

import math
from dataclasses import dataclass, fields

from embedding.types import Variant

SIGNIFICANT_DIGITS = 9


def sig(value: float) -> float:
    """Arredonda para 9 algarismos significativos (o mesmo que o CSV grava)."""
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def fmt(value: float) -> str:
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


@dataclass(frozen=True)
class SweepResult:
    """
    Uma linha do grid. Os campos de entrada ecoam a célula do plano;
    os de saída já vêm arredondados a 9 algarismos significativos, então
    emit_csv → read_csv devolve exatamente os mesmos valores.

    Linhas marcadas (célula inviável) têm `error` preenchido e métricas NaN.
    """

    variant: Variant
    levels: int
    alpha: float
    snr_db: float
    bit_rate: float
    trial: int
    samples_per_bit: int
    step: float
    bits_tested: int
    ber: float
    d_s: float
    d_norm: float
    psnr_db: float
    throughput_bps: float
    info_rate_bps: float
    capacity_bits_per_sample: float
    audio_snr_db: float
    host_ser: float
    error: str = ""

    @property
    def flagged(self) -> bool:
        return bool(self.error)

    @property
    def noiseless(self) -> bool:
        return self.snr_db == math.inf


COLUMNS: tuple[str, ...] = tuple(f.name for f in fields(SweepResult))
INT_COLUMNS = frozenset({"levels", "trial", "samples_per_bit", "bits_tested"})
TEXT_COLUMNS = frozenset({"variant", "error"})
