# hosts/services/synthesis.py
from __future__ import annotations

import logging

import numpy as np
from scipy import signal

from core.exceptions import InvalidConfigError, KindMismatchError
from hosts.buffers import Domain, SignalBuffer
from hosts.services.captures import load_capture
from hosts.specs import HostKind, HostSpec, SourceKind

log = logging.getLogger(__name__)

PAM8_LEVELS = np.array([-7, -5, -3, -1, 1, 3, 5, 7], dtype=np.float64) / 7.0
RRC_SPAN_SYMBOLS = 10


# =========================
# Fontes de áudio a(t), |a| ≤ 1
# =========================

def _audio(spec: HostSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(n) / spec.sample_rate
    if spec.source == SourceKind.TONE:
        return np.sin(2 * np.pi * spec.tone_freq * t)

    # ruído gaussiano limitado em banda (Butterworth), normalizado para pico 1
    white = rng.standard_normal(n)
    sos = signal.butter(6, spec.noise_bandwidth, btype="lowpass", fs=spec.sample_rate, output="sos")
    band = signal.sosfiltfilt(sos, white)
    peak = np.max(np.abs(band))
    return band / peak if peak > 0 else band


# =========================
# Pulso RRC
# =========================

def root_raised_cosine(beta: float, sps: int, span: int = RRC_SPAN_SYMBOLS) -> np.ndarray:
    """Taps RRC com energia unitária (span símbolos, sps amostras por símbolo)."""
    n = span * sps
    t = np.arange(-n / 2, n / 2 + 1) / sps
    h = np.empty_like(t)

    for i, ti in enumerate(t):
        four_bt = 4 * beta * ti
        if abs(ti) < 1e-12:
            h[i] = 1.0 + beta * (4 / np.pi - 1)
        elif abs(abs(four_bt) - 1.0) < 1e-12:
            h[i] = beta / np.sqrt(2) * (
                (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta))
                + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
            )
        else:
            num = np.sin(np.pi * ti * (1 - beta)) + four_bt * np.cos(np.pi * ti * (1 + beta))
            h[i] = num / (np.pi * ti * (1 - four_bt ** 2))

    return h / np.sqrt(np.sum(h ** 2))


def pam8_symbol_count(spec: HostSpec, n_samples: int) -> int:
    return int(np.ceil(n_samples / spec.samples_per_symbol))


def _pam8(spec: HostSpec, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Devolve (baseband complexo, símbolos complexos enviados)."""
    sps = spec.samples_per_symbol
    n_sym = pam8_symbol_count(spec, n)
    symbols = rng.choice(PAM8_LEVELS, size=n_sym) + 1j * rng.choice(PAM8_LEVELS, size=n_sym)

    upsampled = np.zeros(n_sym * sps, dtype=np.complex128)
    upsampled[::sps] = symbols
    h = root_raised_cosine(spec.rolloff, sps)
    # mode="same" centraliza o pulso: o símbolo k fica na amostra k·sps
    shaped = np.convolve(upsampled, h, mode="same")
    return shaped[:n], symbols


def pam8_valid_range(spec: HostSpec, n_samples: int) -> range:
    """
    Índices de símbolo cuja janela do filtro casado cabe inteira no buffer.
    Nas bordas o pulso RRC fica truncado e a decisão não é confiável.
    """
    sps = spec.samples_per_symbol
    guard = RRC_SPAN_SYMBOLS // 2
    last = (n_samples - 1) // sps - guard
    return range(guard, max(guard, last + 1))


def pam8_symbols(spec: HostSpec, duration: float, seed: int) -> np.ndarray:
    """Os símbolos transmitidos por synthesize_host(spec, duration, seed) que o receptor decide."""
    n = int(round(duration * spec.sample_rate))
    rng = np.random.default_rng(seed)
    window = pam8_valid_range(spec, n)
    return _pam8(spec, n, rng)[1][window.start:window.stop]


# =========================
# API
# =========================

def synthesize_host(spec: HostSpec, duration: float, seed: int = 0) -> SignalBuffer:
    """
    Gera o host s descrito por spec. Determinístico para (spec, duration, seed).
    Hosts de arquivo são carregados e truncados em `duration`.
    """
    if duration <= 0:
        raise InvalidConfigError(f"duration must be positive (got {duration!r}).")

    if spec.source == SourceKind.FILE:
        return _from_capture(spec, duration)

    n = int(round(duration * spec.sample_rate))
    if n < 1:
        raise InvalidConfigError(f"duration {duration}s is shorter than one sample at {spec.sample_rate} Hz.")

    rng = np.random.default_rng(seed)
    t = np.arange(n) / spec.sample_rate

    if spec.kind == HostKind.PAM8:
        shaped, _ = _pam8(spec, n, rng)
        return SignalBuffer(shaped, spec.sample_rate, Domain.COMPLEX)

    a = _audio(spec, n, rng)
    if spec.kind == HostKind.AM:
        s = (1.0 + spec.modulation_index * a) * np.cos(2 * np.pi * spec.carrier * t)
    else:
        phase = 2 * np.pi * spec.deviation * np.cumsum(a) / spec.sample_rate
        s = np.cos(2 * np.pi * spec.carrier * t + phase)

    return SignalBuffer(s, spec.sample_rate, Domain.REAL)


def synthesize_audio(spec: HostSpec, duration: float, seed: int = 0) -> np.ndarray:
    """O a(t) usado por synthesize_host com a mesma semente (referência do demodulador)."""
    n = int(round(duration * spec.sample_rate))
    return _audio(spec, n, np.random.default_rng(seed))


def _from_capture(spec: HostSpec, duration: float) -> SignalBuffer:
    buffer = load_capture(spec.capture_path)
    if buffer.is_complex != spec.is_complex:
        raise KindMismatchError(
            f"Capture {spec.path} is {buffer.domain} but a {spec.kind.label} host is {('complex' if spec.is_complex else 'real')}."
        )
    if buffer.sample_rate != spec.sample_rate:
        raise InvalidConfigError(
            f"Capture {spec.path} is sampled at {buffer.sample_rate} Hz; the host spec says {spec.sample_rate} Hz."
        )

    n = int(round(duration * spec.sample_rate))
    if n > len(buffer):
        log.warning("Captura %s tem %.3fs; usando o arquivo inteiro.", spec.path, buffer.duration)
        return buffer
    return buffer.with_samples(buffer.samples[:n])
