# experiments/services/plans.py
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path

from django.conf import settings

from core.exceptions import InvalidConfigError
from embedding.types import DitherSign, Variant
from hosts.specs import HostKind, HostSpec, SourceKind, normalized_bit_rate

OPTIMAL = "optimal"
NORMALIZED_PREFIX = "normalized:"


# ============================================================
# Parsing helpers (valores em texto do .ini)
# ============================================================

def _split(value: str) -> list[str]:
    return [p.strip() for p in value.replace("\n", ",").split(",") if p.strip()]


def _float(value: str) -> float:
    v = value.strip().lower()
    if v in ("inf", "+inf", "infinity", "none", "noiseless"):
        return math.inf
    try:
        return float(v)
    except ValueError as exc:
        raise InvalidConfigError(f"Expected a number, got '{value}'.") from exc


def _int(value: str) -> int:
    try:
        return int(value.strip())
    except ValueError as exc:
        raise InvalidConfigError(f"Expected an integer, got '{value}'.") from exc


def _default_alpha() -> float:
    return float(getattr(settings, "QIM_DEFAULT_ALPHA", 0.7))


# ============================================================
# ExperimentPlan
# ============================================================

@dataclass(frozen=True)
class Cell:
    """Uma célula do grid (variant, N, bit_rate, snr, trial)."""

    index: int
    variant: Variant
    levels: int
    bit_rate: float
    snr_db: float
    trial: int


@dataclass(frozen=True)
class ExperimentPlan:
    host: HostSpec
    variants: tuple[Variant, ...]
    levels_grid: tuple[int, ...]
    snr_grid_db: tuple[float, ...]
    bit_rate_grid: tuple[float, ...]
    alpha: float | str = field(default_factory=_default_alpha)
    message_length: int = 10_000
    trials: int = 10
    seed: int = 0
    duration: float = 1.0
    dither_sign: DitherSign = DitherSign.POSITIVE_D1
    name: str = "plan"
    workers: int = 1
    host_quality: bool = True
    source_text: str = ""

    def __post_init__(self):
        for label, grid in (
            ("variants", self.variants),
            ("levels", self.levels_grid),
            ("snr_db", self.snr_grid_db),
            ("bit_rate", self.bit_rate_grid),
        ):
            if not grid:
                raise InvalidConfigError(f"Plan grid '{label}' is empty.")
        if self.trials < 1:
            raise InvalidConfigError("trials must be >= 1.")
        if self.message_length < 1:
            raise InvalidConfigError("message_length must be >= 1.")
        if any(n < 2 for n in self.levels_grid):
            raise InvalidConfigError("Every level count must be >= 2.")
        if any(r <= 0 for r in self.bit_rate_grid):
            raise InvalidConfigError("Every bit rate must be positive.")
        if self.duration <= 0:
            raise InvalidConfigError("duration must be positive.")
        if self.alpha != OPTIMAL and not (0 < float(self.alpha) <= 1):
            raise InvalidConfigError(f"alpha must be '{OPTIMAL}' or in (0, 1] (got {self.alpha!r}).")
        for v in self.variants:
            if Variant(v) in (Variant.LATTICE, Variant.LATTICE_DC) and not self.host.is_complex:
                raise InvalidConfigError(f"{Variant(v).label} needs a complex (pam8) host.")

    @property
    def optimal_alpha(self) -> bool:
        return self.alpha == OPTIMAL

    def with_seed(self, seed: int) -> "ExperimentPlan":
        return replace(self, seed=int(seed))

    def cells(self) -> list[Cell]:
        """Ordem estável: variant → N → bit_rate → snr → trial."""
        grid = product(self.variants, self.levels_grid, self.bit_rate_grid, self.snr_grid_db, range(self.trials))
        return [
            Cell(index=i, variant=Variant(v), levels=n, bit_rate=r, snr_db=snr, trial=t)
            for i, (v, n, r, snr, t) in enumerate(grid)
        ]

    @property
    def row_count(self) -> int:
        return (
            len(self.variants) * len(self.levels_grid) * len(self.bit_rate_grid)
            * len(self.snr_grid_db) * self.trials
        )


# ============================================================
# Leitura do arquivo .ini
# ============================================================

def _host_from_section(sec: configparser.SectionProxy) -> HostSpec:
    kind = HostKind(sec.get("kind", "am").strip().lower())
    kwargs: dict = {}
    if "sample_rate" in sec:
        kwargs["sample_rate"] = _float(sec["sample_rate"])
    if "source" in sec:
        kwargs["source"] = SourceKind(sec["source"].strip().lower())

    floats = {
        "modulation_index": "modulation_index",
        "deviation": "deviation",
        "carrier_freq": "carrier_freq",
        "tone_freq": "tone_freq",
        "noise_bandwidth": "noise_bandwidth",
        "symbol_rate": "symbol_rate",
        "rolloff": "rolloff",
    }
    for key, attr in floats.items():
        if key in sec:
            kwargs[attr] = _float(sec[key])
    if "path" in sec:
        kwargs["path"] = sec["path"].strip()

    return HostSpec.default(kind, **kwargs)


def _bit_rates(values: list[str], host: HostSpec) -> tuple[float, ...]:
    rates = []
    for v in values:
        if v.lower().startswith(NORMALIZED_PREFIX):
            rates.append(normalized_bit_rate(host, _float(v[len(NORMALIZED_PREFIX):])))
        else:
            rates.append(_float(v))
    return tuple(rates)


def parse_plan(text: str, *, name: str = "plan") -> ExperimentPlan:
    """Monta um ExperimentPlan a partir do texto INI (seções [plan], [host], [grid])."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise InvalidConfigError(f"Cannot parse plan: {exc}") from exc

    for section in ("host", "grid"):
        if not cp.has_section(section):
            raise InvalidConfigError(f"Plan is missing the [{section}] section.")

    try:
        host = _host_from_section(cp["host"])
    except InvalidConfigError:
        raise
    except ValueError as exc:
        raise InvalidConfigError(f"Invalid [host] section: {exc}") from exc
    grid = cp["grid"]
    plan_sec = cp["plan"] if cp.has_section("plan") else {}

    def required(key: str) -> list[str]:
        if key not in grid:
            raise InvalidConfigError(f"[grid] needs '{key}'.")
        return _split(grid[key])

    alpha_raw = str(plan_sec.get("alpha", "")).strip().lower()
    alpha: float | str = _default_alpha() if not alpha_raw else (OPTIMAL if alpha_raw == OPTIMAL else _float(alpha_raw))

    try:
        variants = tuple(Variant(v.lower()) for v in required("variants"))
        dither_sign = DitherSign(str(plan_sec.get("dither_sign", getattr(settings, "QIM_DEFAULT_DITHER_SIGN", "positive"))).strip().lower())
    except ValueError as exc:
        raise InvalidConfigError(str(exc)) from exc

    return ExperimentPlan(
        host=host,
        variants=variants,
        levels_grid=tuple(_int(v) for v in required("levels")),
        snr_grid_db=tuple(_float(v) for v in required("snr_db")),
        bit_rate_grid=_bit_rates(required("bit_rate"), host),
        alpha=alpha,
        message_length=_int(str(plan_sec.get("message_length", "10000"))),
        trials=_int(str(plan_sec.get("trials", "10"))),
        seed=_int(str(plan_sec.get("seed", "0"))),
        duration=_float(str(plan_sec.get("duration", "1.0"))),
        dither_sign=dither_sign,
        name=str(plan_sec.get("name", name)).strip() or name,
        workers=_int(str(plan_sec.get("workers", getattr(settings, "QIM_WORKERS", 1)))),
        host_quality=cp.getboolean("plan", "host_quality", fallback=True) if cp.has_section("plan") else True,
        source_text=text,
    )


def load_plan(path: str | Path) -> ExperimentPlan:
    path = Path(path)
    if not path.is_file():
        raise InvalidConfigError(f"Plan file {path} not found.")
    return parse_plan(path.read_text(encoding="utf-8"), name=path.stem)
