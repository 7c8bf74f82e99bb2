# metrics/spectrum.py
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from core.exceptions import InvalidConfigError, SignalTooShortError
from hosts.buffers import SignalBuffer
from hosts.specs import HostSpec

PULSE_TAPS = 127
# largura de transição aproximada da janela Hamming usada pelo firwin
HAMMING_TRANSITION = 3.3
DB_FLOOR = 1e-30


@dataclass(frozen=True)
class Spectrum:
    freqs: np.ndarray    # Hz (bilateral e centrado em 0 para sinais complexos)
    psd_db: np.ndarray   # dB relativos ao pico


def psd(buffer: SignalBuffer, nfft: int = 1024, window: str = "hann") -> Spectrum:
    """
    Welch: segmentos de nfft amostras, 50% de sobreposição, janela Hann.
    Real → unilateral; complexo → bilateral. Normalizado ao pico (0 dB).
    """
    if nfft < 2 or nfft & (nfft - 1):
        raise InvalidConfigError(f"nfft must be a power of two (got {nfft}).")
    if len(buffer) < nfft:
        raise SignalTooShortError(f"Signal has {len(buffer)} samples, fewer than nfft={nfft}.")

    freqs, pxx = sps.welch(
        buffer.samples,
        fs=buffer.sample_rate,
        window=window,
        nperseg=nfft,
        noverlap=nfft // 2,
        detrend=False,
        return_onesided=not buffer.is_complex,
    )
    if buffer.is_complex:
        freqs, pxx = np.fft.fftshift(freqs), np.fft.fftshift(pxx)

    pxx = np.maximum(pxx, DB_FLOOR)
    return Spectrum(freqs=freqs, psd_db=10.0 * np.log10(pxx / np.max(pxx)))


# =========================
# Formatação de pulso
# =========================

def transition_width(sample_rate: float, numtaps: int = PULSE_TAPS) -> float:
    return HAMMING_TRANSITION * sample_rate / numtaps


def pulse_shape(buffer: SignalBuffer, band: tuple[float, float], numtaps: int = PULSE_TAPS) -> SignalBuffer:
    """
    FIR windowed-sinc (Hamming) de fase linear; o atraso de grupo é
    compensado. band = (0, f_c) → passa-baixas; (f_lo, f_hi) → passa-faixa.
    """
    lo, hi = band
    fs = buffer.sample_rate
    if not (0 <= lo < hi < fs / 2):
        raise InvalidConfigError(f"Pulse-shaping band {band} must lie inside (0, {fs / 2}) Hz.")

    if lo == 0:
        taps = sps.firwin(numtaps, hi, fs=fs)
    else:
        taps = sps.firwin(numtaps, [lo, hi], pass_zero=False, fs=fs)
    return buffer.with_samples(np.convolve(buffer.samples, taps, mode="same"))


def pulse_shape_for_host(buffer: SignalBuffer, spec: HostSpec, numtaps: int = PULSE_TAPS) -> SignalBuffer:
    """Filtro de máscara espectral na borda do canal do host."""
    return pulse_shape(buffer, spec.channel_band(), numtaps)


def out_of_band_mask(freqs: np.ndarray, band: tuple[float, float], guard: float) -> np.ndarray:
    """Bins fora de [lo − guard, hi + guard] (|f| para espectros bilaterais)."""
    lo, hi = band
    f = np.abs(freqs)
    mask = f > hi + guard
    if lo > 0:
        mask |= f < lo - guard
    return mask


def out_of_band_rejection(spectrum: Spectrum, band: tuple[float, float], guard: float) -> float:
    """Quantos dB o bin fora de banda mais forte fica abaixo do pico."""
    mask = out_of_band_mask(spectrum.freqs, band, guard)
    if not np.any(mask):
        raise InvalidConfigError("No out-of-band bins: the band covers the whole spectrum.")
    return float(-np.max(spectrum.psd_db[mask]))
