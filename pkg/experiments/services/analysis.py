# experiments/services/analysis.py
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from embedding.types import Variant
from experiments.services.results import SweepResult

BER_TARGET = 1e-2

CurveKey = tuple[Variant, int, float]  # (variant, N, bit_rate)


@dataclass(frozen=True)
class Curve:
    """BER médio (sobre os trials) por SNR finito, em ordem crescente de SNR."""

    snr_db: np.ndarray
    ber: np.ndarray
    bits: np.ndarray  # bits testados por ponto (soma dos trials)


def usable(results: Iterable[SweepResult]) -> list[SweepResult]:
    return [r for r in results if not r.flagged]


def ber_curves(results: Iterable[SweepResult]) -> dict[CurveKey, Curve]:
    grouped: dict[CurveKey, dict[float, list[SweepResult]]] = defaultdict(lambda: defaultdict(list))
    for r in usable(results):
        if math.isfinite(r.snr_db):
            grouped[(Variant(r.variant), r.levels, r.bit_rate)][r.snr_db].append(r)

    curves = {}
    for key, by_snr in grouped.items():
        snrs = sorted(by_snr)
        curves[key] = Curve(
            snr_db=np.array(snrs),
            ber=np.array([np.mean([r.ber for r in by_snr[s]]) for s in snrs]),
            bits=np.array([sum(r.bits_tested for r in by_snr[s]) for s in snrs]),
        )
    return curves


def snr_at_ber(curve: Curve, target: float = BER_TARGET) -> float:
    """
    SNR (dB) em que a curva cruza `target`, interpolando linearmente o SNR
    contra log10(BER). BER = 0 vira meio erro sobre os bits testados.
    NaN quando a curva não cruza o alvo dentro do grid.
    """
    if len(curve.snr_db) < 2 or curve.ber[0] < target:
        return math.nan

    floor = 0.5 / np.maximum(curve.bits, 1)
    log_ber = np.log10(np.maximum(curve.ber, floor))
    log_target = math.log10(target)

    for i in range(len(curve.snr_db) - 1):
        if curve.ber[i] >= target > curve.ber[i + 1]:
            y0, y1 = log_ber[i], log_ber[i + 1]
            x0, x1 = curve.snr_db[i], curve.snr_db[i + 1]
            if y0 == y1:
                return float(x0)
            return float(x0 + (log_target - y0) * (x1 - x0) / (y1 - y0))
    return math.nan


def db_gap(reference: Curve, improved: Curve, target: float = BER_TARGET) -> float:
    """Quantos dB a menos `improved` precisa para atingir o mesmo BER (positivo = melhor)."""
    return snr_at_ber(reference, target) - snr_at_ber(improved, target)


def inversions(curve: Curve, floor: float = 1e-3) -> int:
    """Subidas do BER com o SNR crescente, contando só pontos acima de `floor`."""
    count = 0
    for a, b in zip(curve.ber[:-1], curve.ber[1:]):
        if b > a and a >= floor:
            count += 1
    return count


def max_throughput(results: Iterable[SweepResult], ber_limit: float = BER_TARGET) -> dict[tuple[Variant, int, float], float]:
    """
    Para cada (variant, N, snr): maior goodput médio entre as taxas cujo BER
    médio fica abaixo de `ber_limit` (0 se nenhuma taxa atende).
    """
    grouped: dict[tuple, dict[float, list[SweepResult]]] = defaultdict(lambda: defaultdict(list))
    for r in usable(results):
        grouped[(Variant(r.variant), r.levels, r.snr_db)][r.bit_rate].append(r)

    out = {}
    for key, by_rate in grouped.items():
        best = 0.0
        for rows in by_rate.values():
            if np.mean([r.ber for r in rows]) < ber_limit:
                best = max(best, float(np.mean([r.throughput_bps for r in rows])))
        out[key] = best
    return out


def distortion_curve(results: Iterable[SweepResult], variant: Variant | str) -> tuple[np.ndarray, np.ndarray]:
    """(N, d_norm médio) de uma variante, N crescente."""
    by_levels: dict[int, list[float]] = defaultdict(list)
    for r in usable(results):
        if Variant(r.variant) == Variant(variant):
            by_levels[r.levels].append(r.d_norm)
    levels = sorted(by_levels)
    return np.array(levels), np.array([np.mean(by_levels[n]) for n in levels])
