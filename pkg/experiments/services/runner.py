# experiments/services/runner.py
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache, partial
from typing import Callable, Optional

import numpy as np

from channel.awgn import ChannelConfig, apply_awgn
from core.exceptions import (
    CapacityExceededError,
    DegenerateSignalError,
    InfeasibleCellError,
    InvalidConfigError,
)
from embedding.codec import decode_message, embed_message, optimal_alpha, samples_per_bit_for
from embedding.quantizers import step_from_signal
from embedding.types import BitMessage, QimConfig, Variant
from experiments.services.plans import Cell, ExperimentPlan
from experiments.services.results import SweepResult, sig
from hosts.buffers import SignalBuffer
from hosts.services.demod import demodulate
from hosts.services.synthesis import synthesize_host
from hosts.specs import HostKind, HostSpec
from metrics.measures import (
    audio_snr,
    ber,
    distortion_report,
    goodput,
    info_rate,
    qim_capacity,
    symbol_error_rate,
)

log = logging.getLogger(__name__)

# rótulo do stream de sementes compartilhado por todas as células do mesmo trial
TRIAL_STREAM = 0x51A1

NAN = math.nan


# ============================================================
# Sementes
# ============================================================

def cell_seeds(plan: ExperimentPlan, cell: Cell) -> tuple[int, np.random.Generator, np.random.Generator]:
    """
    (semente do host, rng da mensagem, rng do ruído).

    Host e mensagem dependem só de (plan.seed, trial): as curvas de um mesmo
    trial comparam variantes/N sobre o mesmo host e os mesmos bits. O ruído
    depende de (plan.seed, índice da célula). Nada depende da ordem de execução.
    """
    trial_ss = np.random.SeedSequence([plan.seed, TRIAL_STREAM, cell.trial])
    host_ss, msg_ss = trial_ss.spawn(2)
    noise_ss = np.random.SeedSequence([plan.seed, cell.index])
    host_seed = int(host_ss.generate_state(1)[0])
    return host_seed, np.random.default_rng(msg_ss), np.random.default_rng(noise_ss)


# ============================================================
# Caches por processo (o mesmo host serve a muitas células)
# ============================================================

@lru_cache(maxsize=8)
def _host(spec: HostSpec, duration: float, seed: int) -> SignalBuffer:
    return synthesize_host(spec, duration, seed)


@lru_cache(maxsize=8)
def _host_reference(spec: HostSpec, duration: float, seed: int) -> SignalBuffer:
    """Saída do receptor legado para o host limpo."""
    return demodulate(_host(spec, duration, seed), spec)


# ============================================================
# Uma célula
# ============================================================

def cell_alpha(plan: ExperimentPlan, variant: Variant, step: float, host: SignalBuffer, channel: ChannelConfig) -> float:
    if variant not in (Variant.SCALAR_DC, Variant.LATTICE_DC):
        return 1.0
    if not plan.optimal_alpha:
        return float(plan.alpha)
    # por dimensão real: D_s = Δ²/12 e σ_n² dividido entre I e Q nos hosts complexos
    dims = 2 if host.is_complex else 1
    noise = channel.noise_power(host.power()) / dims
    return optimal_alpha(step ** 2 / 12.0, noise)


def marked_capacity(d_s: float, noise_power: float, is_complex: bool, is_lattice: bool) -> float:
    """
    Bits por amostra do host somando as dimensões reais marcadas.

    Num host complexo o ruído se divide entre I e Q; lattice marca as duas
    (D_s/2 em cada), as variantes escalares só I.
    """
    if noise_power <= 0:
        return math.inf
    if not is_complex:
        return qim_capacity(d_s, noise_power)
    if is_lattice:
        return 2 * qim_capacity(d_s / 2, noise_power / 2)
    return qim_capacity(d_s, noise_power / 2)


def _flagged(cell: Cell, message: str, *, samples_per_bit: int = 0, step: float = NAN, alpha: float = NAN) -> SweepResult:
    return SweepResult(
        variant=cell.variant,
        levels=cell.levels,
        alpha=sig(alpha) if math.isfinite(alpha) else alpha,
        snr_db=cell.snr_db,
        bit_rate=cell.bit_rate,
        trial=cell.trial,
        samples_per_bit=samples_per_bit,
        step=sig(step) if math.isfinite(step) else step,
        bits_tested=0,
        ber=NAN,
        d_s=NAN,
        d_norm=NAN,
        psnr_db=NAN,
        throughput_bps=NAN,
        info_rate_bps=NAN,
        capacity_bits_per_sample=NAN,
        audio_snr_db=NAN,
        host_ser=NAN,
        error=message,
    )


def _host_quality(plan: ExperimentPlan, host_seed: int, received: SignalBuffer) -> tuple[float, float]:
    """(audio_snr_db, host_ser) do receptor legado do host."""
    reference = _host_reference(plan.host, plan.duration, host_seed)
    heard = demodulate(received, plan.host)
    if plan.host.kind == HostKind.PAM8:
        return NAN, sig(symbol_error_rate(reference.samples, heard))
    value = audio_snr(reference, heard)
    return (sig(value) if math.isfinite(value) else value), NAN


def run_cell(plan: ExperimentPlan, cell: Cell) -> SweepResult:
    """
    host → Δ → α → embed → AWGN → decode + receptor do host → métricas.

    Variantes escalares num host complexo marcam só a componente I, com
    o mesmo K = ⌊fs/bit_rate⌋ das variantes lattice; o ruído é sempre
    somado ao composto complexo.
    """
    host_seed, msg_rng, noise_rng = cell_seeds(plan, cell)
    host = _host(plan.host, plan.duration, host_seed)
    channel = ChannelConfig(cell.snr_db, seed=plan.seed)
    step = alpha = NAN

    try:
        step = step_from_signal(host, cell.levels)
        alpha = cell_alpha(plan, cell.variant, step, host, channel)
        try:
            k = samples_per_bit_for(host.sample_rate, cell.bit_rate)
        except InvalidConfigError as exc:
            raise InfeasibleCellError(str(exc)) from exc

        config = QimConfig(
            levels=cell.levels,
            step=step,
            alpha=alpha,
            variant=cell.variant,
            dither_sign=plan.dither_sign,
            samples_per_bit=k,
        )
        message = BitMessage.random(plan.message_length, msg_rng)
        composite = embed_message(host, message, config)
    except (CapacityExceededError, InfeasibleCellError, DegenerateSignalError) as exc:
        log.warning("Célula %s marcada como inviável: %s", cell.index, exc)
        return _flagged(cell, str(exc), step=step, alpha=alpha)

    host_power = host.power()
    received = apply_awgn(composite, host_power, channel, rng=noise_rng)
    decoded = decode_message(received, len(message), config)

    # distorção medida só no trecho que carrega a mensagem
    span = len(message) * k
    report = distortion_report(host.samples[:span], composite.samples[:span])

    noise_power = channel.noise_power(host_power)
    capacity = marked_capacity(report.d_s, noise_power, host.is_complex, config.is_lattice)

    ber_value = ber(message, decoded)
    audio_db, host_ser = _host_quality(plan, host_seed, received) if plan.host_quality else (NAN, NAN)

    return SweepResult(
        variant=cell.variant,
        levels=cell.levels,
        alpha=sig(config.effective_alpha),
        snr_db=cell.snr_db,
        bit_rate=cell.bit_rate,
        trial=cell.trial,
        samples_per_bit=k,
        step=sig(step),
        bits_tested=len(message),
        ber=sig(ber_value),
        d_s=sig(report.d_s),
        d_norm=sig(report.d_norm),
        psnr_db=sig(report.psnr_db) if math.isfinite(report.psnr_db) else report.psnr_db,
        throughput_bps=sig(goodput(cell.bit_rate, ber_value)),
        info_rate_bps=sig(info_rate(cell.bit_rate, ber_value)),
        capacity_bits_per_sample=sig(capacity) if math.isfinite(capacity) else capacity,
        audio_snr_db=audio_db,
        host_ser=host_ser,
    )


# ============================================================
# Plano inteiro
# ============================================================

def run_plan(
    plan: ExperimentPlan,
    *,
    workers: Optional[int] = None,
    on_row: Optional[Callable[[SweepResult], None]] = None,
) -> list[SweepResult]:
    """
    Executa todas as células do plano, na ordem de plan.cells().
    Com workers > 1 as células rodam em processos separados; a saída é a mesma.
    """
    plan.host.validate()
    workers = plan.workers if workers is None else workers
    cells = plan.cells()
    log.info(
        "Plano %s: %d células (%s, seed=%s, workers=%s)",
        plan.name, len(cells), plan.host.kind.label, plan.seed, workers,
    )

    work = partial(run_cell, plan)
    if workers and workers > 1:
        chunk = max(1, len(cells) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows_iter = pool.map(work, cells, chunksize=chunk)
            results = _collect(rows_iter, on_row)
    else:
        results = _collect(map(work, cells), on_row)

    flagged = sum(1 for r in results if r.flagged)
    if flagged:
        log.warning("Plano %s: %d de %d células marcadas como inviáveis.", plan.name, flagged, len(results))
    log.info("Plano %s concluído (%d linhas).", plan.name, len(results))
    return results


def _collect(rows, on_row) -> list[SweepResult]:
    out = []
    for row in rows:
        out.append(row)
        if on_row is not None:
            on_row(row)
    return out
