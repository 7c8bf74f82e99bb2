# experiments/services/storage.py
from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Optional, Sequence

from django.db import DatabaseError, transaction
from django.utils import timezone

from experiments.models import ExperimentRun, SweepRow
from experiments.services.plans import ExperimentPlan
from experiments.services.results import SweepResult

log = logging.getLogger(__name__)


def _nullable(value: float) -> Optional[float]:
    """inf/NaN não vão para o banco: viram NULL."""
    return float(value) if math.isfinite(value) else None


def _row(run: ExperimentRun, position: int, r: SweepResult) -> SweepRow:
    return SweepRow(
        run=run,
        position=position,
        variant=str(r.variant),
        levels=r.levels,
        alpha=_nullable(r.alpha),
        snr_db=_nullable(r.snr_db),
        bit_rate=r.bit_rate,
        trial=r.trial,
        samples_per_bit=r.samples_per_bit,
        step=_nullable(r.step),
        bits_tested=r.bits_tested,
        ber=_nullable(r.ber),
        d_s=_nullable(r.d_s),
        d_norm=_nullable(r.d_norm),
        psnr_db=_nullable(r.psnr_db),
        throughput_bps=_nullable(r.throughput_bps),
        info_rate_bps=_nullable(r.info_rate_bps),
        capacity_bits_per_sample=_nullable(r.capacity_bits_per_sample),
        audio_snr_db=_nullable(r.audio_snr_db),
        host_ser=_nullable(r.host_ser),
        error=r.error,
    )


def store_run(plan: ExperimentPlan, results: Sequence[SweepResult], out_dir: str | Path = "") -> ExperimentRun:
    """
    Grava o run e todas as linhas numa transação só.
    Ou o run inteiro entra no banco, ou nada entra.
    """
    with transaction.atomic():
        run = ExperimentRun.objects.create(
            name=plan.name,
            seed=plan.seed,
            host_kind=plan.host.kind,
            plan_text=plan.source_text,
            out_dir=str(out_dir),
            status=ExperimentRun.Status.RUNNING,
        )
        SweepRow.objects.bulk_create(
            [_row(run, i, r) for i, r in enumerate(results)],
            batch_size=500,
        )
        run.rows_total = len(results)
        run.rows_flagged = sum(1 for r in results if r.flagged)
        run.status = ExperimentRun.Status.DONE
        run.finished_at = timezone.now()
        run.save(update_fields=["rows_total", "rows_flagged", "status", "finished_at"])

    log.info("Run %s salvo (id=%s, %d linhas).", run.name, run.pk, run.rows_total)
    return run


def try_store_run(plan: ExperimentPlan, results: Sequence[SweepResult], out_dir: str | Path = "") -> Optional[ExperimentRun]:
    """store_run que não derruba o comando quando o banco não está migrado/acessível."""
    try:
        return store_run(plan, results, out_dir)
    except DatabaseError as exc:
        log.warning("Não foi possível salvar o run %s no banco: %s", plan.name, exc)
        return None
