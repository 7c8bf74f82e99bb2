# experiments/services/export.py
from __future__ import annotations

import csv
import logging
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from django.db import models  # noqa: E402

from core.exceptions import EmptyResultsError, InvalidConfigError, MalformedResultsError  # noqa: E402
from embedding.types import Variant  # noqa: E402
from experiments.services.analysis import ber_curves, distortion_curve, max_throughput, usable  # noqa: E402
from experiments.services.results import COLUMNS, INT_COLUMNS, TEXT_COLUMNS, SweepResult, fmt  # noqa: E402
from metrics.spectrum import Spectrum  # noqa: E402

log = logging.getLogger(__name__)


class Figure(models.TextChoices):
    DISTORTION = "distortion", "Normalized distortion vs N"
    BER = "ber", "BER vs SNR"
    THROUGHPUT = "throughput", "Throughput vs SNR"
    SPECTRUM = "spectrum", "Power spectral density"


def _require(results: Sequence) -> None:
    if not results:
        raise EmptyResultsError("No results to write.")


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return fmt(float(value))


# ============================================================
# CSV
# ============================================================

def emit_csv(results: Sequence[SweepResult], path: str | Path) -> Path:
    """Cabeçalho + uma linha por SweepResult, colunas em ordem fixa."""
    _require(results)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in results:
            writer.writerow([_cell(getattr(r, c)) for c in COLUMNS])

    log.info("CSV gravado em %s (%d linhas).", path, len(results))
    return path


def read_csv(path: str | Path) -> list[SweepResult]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise MalformedResultsError(f"{path} does not have the sweep CSV header.")
        rows = []
        for raw in reader:
            values = {}
            for col in COLUMNS:
                text = raw[col]
                if col in TEXT_COLUMNS:
                    values[col] = Variant(text) if col == "variant" else text
                elif col in INT_COLUMNS:
                    values[col] = int(text)
                else:
                    values[col] = float(text)
            rows.append(SweepResult(**values))
    return rows


# ============================================================
# Séries .dat (gnuplot)
# ============================================================

def _write_dat(path: Path, header: str, blocks: Iterable[tuple[str, Iterable[tuple[float, float]]]]) -> Path:
    lines = [f"# {header}"]
    first = True
    for label, points in blocks:
        if not first:
            lines += ["", ""]
        first = False
        lines.append(f"# {label}")
        lines += [f"{fmt(x)} {fmt(y)}" for x, y in points]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _ber_series(results: Sequence[SweepResult], out_dir: Path) -> list[Path]:
    per_curve: dict[tuple[Variant, int], list] = {}
    for (variant, levels, rate), curve in sorted(ber_curves(results).items()):
        per_curve.setdefault((variant, levels), []).append(
            (f"bit_rate={fmt(rate)}", list(zip(curve.snr_db, curve.ber)))
        )
    return [
        _write_dat(out_dir / f"ber_{v.value}_N{n}.dat", f"ber vs snr_db, {v.label}, N={n}", blocks)
        for (v, n), blocks in per_curve.items()
    ]


def _throughput_series(results: Sequence[SweepResult], out_dir: Path) -> list[Path]:
    per_curve: dict[tuple[Variant, int], list[tuple[float, float]]] = {}
    for (variant, levels, snr), best in sorted(max_throughput(results).items()):
        if math.isfinite(snr):
            per_curve.setdefault((variant, levels), []).append((snr, best))
    return [
        _write_dat(
            out_dir / f"throughput_{v.value}_N{n}.dat",
            f"max goodput (bps, BER < 1e-2) vs snr_db, {v.label}, N={n}",
            [("goodput", points)],
        )
        for (v, n), points in per_curve.items()
    ]


def _distortion_series(results: Sequence[SweepResult], out_dir: Path) -> list[Path]:
    variants = sorted({Variant(r.variant) for r in usable(results)})
    paths = []
    for v in variants:
        levels, d_norm = distortion_curve(results, v)
        paths.append(
            _write_dat(out_dir / f"distortion_{v.value}.dat", f"d_norm (%) vs N, {v.label}", [("d_norm", zip(levels, d_norm))])
        )
    return paths


def _spectrum_series(curves: Mapping[str, Spectrum], out_dir: Path) -> list[Path]:
    return [
        _write_dat(out_dir / f"spectrum_{name}.dat", f"psd (dB) vs frequency (Hz), {name}", [("psd", zip(s.freqs, s.psd_db))])
        for name, s in curves.items()
    ]


def emit_series(results, figure: Figure | str, out_dir: str | Path) -> list[Path]:
    """
    Um .dat por curva. BER: um bloco por bit_rate (separados por linha em
    branco). Spectrum recebe {nome: Spectrum} em vez de linhas do sweep.
    """
    figure = Figure(figure)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if figure == Figure.SPECTRUM:
        if not isinstance(results, Mapping):
            raise InvalidConfigError("The spectrum figure takes a mapping of name -> Spectrum.")
        _require(list(results))
        return _spectrum_series(results, out_dir)

    _require(results)
    if not usable(results):
        raise EmptyResultsError("Every row is flagged; nothing to plot.")
    writer = {
        Figure.BER: _ber_series,
        Figure.THROUGHPUT: _throughput_series,
        Figure.DISTORTION: _distortion_series,
    }[figure]
    paths = writer(results, out_dir)
    log.info("%s: %d séries em %s", figure.label, len(paths), out_dir)
    return paths


# ============================================================
# SVG
# ============================================================

def emit_plot(results, figure: Figure | str, path: str | Path) -> Path:
    """Renderiza a figura como SVG (matplotlib, backend Agg)."""
    figure = Figure(figure)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    try:
        if figure == Figure.SPECTRUM:
            if not isinstance(results, Mapping) or not results:
                raise EmptyResultsError("No spectra to plot.")
            for name, s in results.items():
                ax.plot(s.freqs, s.psd_db, label=name, linewidth=0.8)
            ax.set_xlabel("frequency (Hz)")
            ax.set_ylabel("PSD (dB rel. peak)")
        else:
            _require(results)
            if figure == Figure.BER:
                for (v, n, rate), curve in sorted(ber_curves(results).items()):
                    ax.semilogy(curve.snr_db, curve.ber, marker="o", label=f"{v.label} N={n} @ {fmt(rate)} bps")
                ax.set_xlabel("SNR (dB)")
                ax.set_ylabel("BER")
            elif figure == Figure.THROUGHPUT:
                curves: dict[tuple, list] = {}
                for (v, n, snr), best in sorted(max_throughput(results).items()):
                    if math.isfinite(snr):
                        curves.setdefault((v, n), []).append((snr, best))
                for (v, n), pts in curves.items():
                    xs, ys = zip(*pts)
                    ax.plot(xs, ys, marker="o", label=f"{v.label} N={n}")
                ax.set_xlabel("SNR (dB)")
                ax.set_ylabel("throughput (bps)")
            else:
                for v in sorted({Variant(r.variant) for r in usable(results)}):
                    levels, d_norm = distortion_curve(results, v)
                    ax.plot(levels, d_norm, marker="o", label=v.label)
                ax.set_xlabel("levels N")
                ax.set_ylabel("normalized distortion (%)")

        ax.set_title(figure.label)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize="small")
        fig.savefig(path, format="svg", bbox_inches="tight")
    finally:
        plt.close(fig)
    return path
