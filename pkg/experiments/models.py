#experiments/models.py
from __future__ import annotations

from django.db import models

from embedding.types import Variant
from hosts.specs import HostKind


class ExperimentRun(models.Model):
    class Status(models.TextChoices):
        RUNNING = "running", "Running"
        DONE = "done", "Done"
        FAILED = "failed", "Failed"

    name = models.CharField(max_length=120, db_index=True)
    seed = models.BigIntegerField(default=0)
    host_kind = models.CharField(max_length=8, choices=HostKind.choices)
    plan_text = models.TextField(blank=True, help_text="Plan file exactly as it was read")
    out_dir = models.CharField(max_length=500, blank=True)
    status = models.CharField(max_length=12, choices=Status.choices, default=Status.RUNNING, db_index=True)
    rows_total = models.PositiveIntegerField(default=0)
    rows_flagged = models.PositiveIntegerField(default=0, help_text="Infeasible cells (message did not fit the host)")
    created_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ["-created_at", "-id"]

    def __str__(self):
        return f"{self.name} (seed={self.seed}, {self.status})"


class SweepRow(models.Model):
    """Uma linha do CSV. Valores infinitos/NaN ficam como NULL."""

    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name="rows")
    position = models.PositiveIntegerField(help_text="Index of the cell in the plan grid")

    variant = models.CharField(max_length=12, choices=Variant.choices, db_index=True)
    levels = models.PositiveIntegerField()
    alpha = models.FloatField(null=True, blank=True)
    snr_db = models.FloatField(null=True, blank=True, help_text="Empty = noiseless channel")
    bit_rate = models.FloatField()
    trial = models.PositiveIntegerField(default=0)
    samples_per_bit = models.PositiveIntegerField(default=0)
    step = models.FloatField(null=True, blank=True)

    bits_tested = models.PositiveIntegerField(default=0)
    ber = models.FloatField(null=True, blank=True)
    d_s = models.FloatField(null=True, blank=True)
    d_norm = models.FloatField(null=True, blank=True, help_text="Normalized distortion (%)")
    psnr_db = models.FloatField(null=True, blank=True, help_text="Empty = infinite (no distortion)")
    throughput_bps = models.FloatField(null=True, blank=True)
    info_rate_bps = models.FloatField(null=True, blank=True)
    capacity_bits_per_sample = models.FloatField(null=True, blank=True)
    audio_snr_db = models.FloatField(null=True, blank=True)
    host_ser = models.FloatField(null=True, blank=True)
    error = models.TextField(blank=True)

    class Meta:
        ordering = ["run", "position"]
        unique_together = (("run", "position"),)

    def __str__(self):
        return f"{self.variant} N={self.levels} snr={self.snr_db} rate={self.bit_rate}"

    @property
    def flagged(self) -> bool:
        return bool(self.error)
