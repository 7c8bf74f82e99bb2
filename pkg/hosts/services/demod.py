# hosts/services/demod.py
from __future__ import annotations

import numpy as np
from scipy import signal

from core.exceptions import KindMismatchError, SignalTooShortError
from hosts.buffers import Domain, SignalBuffer
from hosts.services.synthesis import PAM8_LEVELS, pam8_valid_range, root_raised_cosine
from hosts.specs import HostKind, HostSpec


def _audio_lowpass(x: np.ndarray, spec: HostSpec) -> np.ndarray:
    cutoff = min(1.25 * spec.audio_bandwidth, 0.45 * spec.sample_rate)
    sos = signal.butter(5, cutoff, btype="lowpass", fs=spec.sample_rate, output="sos")
    # limite superior do padding padrão do sosfiltfilt
    padlen = 3 * (2 * len(sos) + 1)
    if x.size <= padlen:
        raise SignalTooShortError(
            f"{spec.kind.label} receiver needs more than {padlen} samples (got {x.size})."
        )
    return signal.sosfiltfilt(sos, x)


def _slice_pam8(values: np.ndarray) -> np.ndarray:
    idx = np.argmin(np.abs(values[:, None] - PAM8_LEVELS[None, :]), axis=1)
    return PAM8_LEVELS[idx]


def demodulate_am(received: SignalBuffer, spec: HostSpec) -> SignalBuffer:
    """Detector de envelope: |hilbert(x)| menos o nível DC."""
    envelope = np.abs(signal.hilbert(received.samples))
    audio = _audio_lowpass(envelope - np.mean(envelope), spec)
    return received.with_samples(audio)


def demodulate_fm(received: SignalBuffer, spec: HostSpec) -> SignalBuffer:
    """
    Discriminador em quadratura sobre o sinal analítico:
    angle(z[n]·conj(z[n-1])) é o incremento de fase por amostra.
    """
    if len(received) < 2:
        raise SignalTooShortError("FM discriminator needs at least two samples.")
    z = signal.hilbert(received.samples)
    dphi = np.angle(z[1:] * np.conj(z[:-1]))
    dphi = np.append(dphi, dphi[-1])
    inst_freq = dphi * spec.sample_rate / (2 * np.pi) - spec.carrier
    audio = _audio_lowpass(inst_freq / spec.deviation, spec)
    return received.with_samples(audio)


def demodulate_pam8(received: SignalBuffer, spec: HostSpec) -> SignalBuffer:
    """
    Filtro casado RRC, amostragem na taxa de símbolo e decisão pelo nível
    mais próximo (I e Q). Só devolve os símbolos de pam8_valid_range.
    """
    sps = spec.samples_per_symbol
    h = root_raised_cosine(spec.rolloff, sps)
    matched = np.convolve(received.samples, h, mode="same")
    window = pam8_valid_range(spec, len(received))
    at_symbols = matched[window.start * sps : window.stop * sps : sps]
    decided = _slice_pam8(at_symbols.real) + 1j * _slice_pam8(at_symbols.imag)
    return SignalBuffer(decided, spec.symbols_per_second, Domain.COMPLEX)


def demodulate(received: SignalBuffer, spec: HostSpec) -> SignalBuffer:
    """
    Receptor legado do host (o que um rádio/TV comum faria com o composto).
    AM/FM → áudio em banda base; Pam8 → símbolos decididos.
    """
    if received.is_complex != spec.is_complex:
        raise KindMismatchError(
            f"A {spec.kind.label} receiver expects a {'complex' if spec.is_complex else 'real'} buffer, "
            f"got {received.domain}."
        )
    if received.sample_rate != spec.sample_rate:
        raise KindMismatchError(
            f"Buffer sampled at {received.sample_rate} Hz, receiver configured for {spec.sample_rate} Hz."
        )

    if spec.kind == HostKind.AM:
        return demodulate_am(received, spec)
    if spec.kind == HostKind.FM:
        return demodulate_fm(received, spec)
    return demodulate_pam8(received, spec)
