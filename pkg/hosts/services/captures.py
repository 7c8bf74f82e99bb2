# hosts/services/captures.py
from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
from django.db import models
from scipy.io import wavfile

from core.exceptions import (
    MalformedCaptureError,
    MissingSidecarError,
    UnsupportedFormatError,
)
from hosts.buffers import Domain, SignalBuffer

log = logging.getLogger(__name__)

PCM16_FULL_SCALE = 32767.0


class CaptureFormat(models.TextChoices):
    RAW_F32 = "f32", "Raw float32 LE (interleaved I/Q) + JSON sidecar"
    WAV = "wav", "16-bit PCM WAV (mono, real)"


def _resolve_format(path: Path, fmt: CaptureFormat | str | None) -> CaptureFormat:
    if fmt:
        try:
            return CaptureFormat(str(fmt).lower().lstrip("."))
        except ValueError as exc:
            raise UnsupportedFormatError(f"Unknown capture format '{fmt}'.") from exc
    suffix = path.suffix.lower().lstrip(".")
    try:
        return CaptureFormat(suffix)
    except ValueError as exc:
        raise UnsupportedFormatError(
            f"Cannot infer capture format from '{path.name}' (use .f32 or .wav)."
        ) from exc


def sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json")


# =========================
# Raw float32 + sidecar
# =========================

def _save_raw(buffer: SignalBuffer, path: Path) -> None:
    buffer.as_real_stream().samples.astype("<f4").tofile(path)

    meta = {"sample_rate": buffer.sample_rate, "domain": str(buffer.domain)}
    sidecar_path(path).write_text(json.dumps(meta, indent=2), encoding="utf-8")


def _load_raw(path: Path) -> SignalBuffer:
    side = sidecar_path(path)
    if not side.exists():
        raise MissingSidecarError(f"Sidecar {side.name} not found next to {path.name}.")
    try:
        meta = json.loads(side.read_text(encoding="utf-8"))
        sample_rate = float(meta["sample_rate"])
        domain = Domain(meta.get("domain", Domain.REAL))
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedCaptureError(f"Invalid sidecar {side.name}: {exc}") from exc

    raw = path.read_bytes()
    if not raw:
        raise MalformedCaptureError(f"Capture {path.name} is empty.")
    if len(raw) % 4:
        raise MalformedCaptureError(f"Capture {path.name} is not a whole number of float32 samples.")

    data = np.frombuffer(raw, dtype="<f4")
    if domain == Domain.COMPLEX:
        if data.size % 2:
            raise MalformedCaptureError(f"Complex capture {path.name} has an odd number of floats.")
        samples = data[0::2].astype(np.float64) + 1j * data[1::2].astype(np.float64)
    else:
        samples = data.astype(np.float64)

    if not np.all(np.isfinite(samples)):
        raise MalformedCaptureError(f"Capture {path.name} contains non-finite samples.")
    return SignalBuffer(samples, sample_rate, domain)


# =========================
# WAV PCM16
# =========================

def _save_wav(buffer: SignalBuffer, path: Path) -> None:
    if buffer.is_complex:
        raise UnsupportedFormatError("WAV captures hold real audio-rate signals only; use .f32 for complex.")
    if int(buffer.sample_rate) != buffer.sample_rate:
        raise UnsupportedFormatError(f"WAV needs an integer sample rate (got {buffer.sample_rate}).")

    samples = buffer.samples
    if len(buffer) and np.max(np.abs(samples)) > 1.0:
        log.warning("Amostras fora de [-1, 1] em %s; o WAV PCM16 vai saturar.", path.name)
    pcm = np.round(np.clip(samples, -1.0, 1.0) * PCM16_FULL_SCALE).astype("<i2")
    wavfile.write(path, int(buffer.sample_rate), pcm)


def _load_wav(path: Path) -> SignalBuffer:
    if path.stat().st_size == 0:
        raise MalformedCaptureError(f"Capture {path.name} is empty.")
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise MalformedCaptureError(f"Cannot parse WAV {path.name}: {exc}") from exc

    if data.ndim != 1:
        raise MalformedCaptureError(f"WAV {path.name} has {data.shape[1]} channels; only mono is supported.")
    if data.dtype != np.int16:
        raise UnsupportedFormatError(f"WAV {path.name} is {data.dtype}; only 16-bit PCM is supported.")
    if data.size == 0:
        raise MalformedCaptureError(f"WAV {path.name} has no samples.")
    return SignalBuffer(data.astype(np.float64) / PCM16_FULL_SCALE, float(rate), Domain.REAL)


# =========================
# API
# =========================

def save_capture(buffer: SignalBuffer, path: str | Path, fmt: CaptureFormat | str | None = None) -> Path:
    path = Path(path)
    fmt = _resolve_format(path, fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == CaptureFormat.WAV:
        _save_wav(buffer, path)
    else:
        _save_raw(buffer, path)
    log.debug("Captura salva: %s (%s, %d amostras)", path, fmt, len(buffer))
    return path


def load_capture(path: str | Path, fmt: CaptureFormat | str | None = None) -> SignalBuffer:
    path = Path(path)
    fmt = _resolve_format(path, fmt)
    if not path.exists():
        raise MalformedCaptureError(f"Capture {path} does not exist.")
    if fmt == CaptureFormat.WAV:
        return _load_wav(path)
    return _load_raw(path)
