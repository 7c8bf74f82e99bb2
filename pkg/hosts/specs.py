# hosts/specs.py
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from django.db import models

from core.exceptions import AliasingError, InvalidConfigError


class HostKind(models.TextChoices):
    AM = "am", "AM audio"
    FM = "fm", "FM audio"
    PAM8 = "pam8", "8-PAM complex baseband (TV-like)"


class SourceKind(models.TextChoices):
    TONE = "tone", "Synthetic tone"
    NOISE = "noise", "Synthetic noise band"
    FILE = "file", "Recorded capture"


# Largura nominal do canal de broadcast de cada host (Hz).
# Usada para normalizar a taxa de bits pela banda do host.
NOMINAL_CHANNEL_HZ = {
    HostKind.AM: 10_000.0,
    HostKind.FM: 200_000.0,
    HostKind.PAM8: 6_250_000.0,
}

DEFAULT_SAMPLE_RATES = {
    HostKind.AM: 8_000.0,
    HostKind.FM: 200_000.0,
    HostKind.PAM8: 6_250_000.0,
}


@dataclass(frozen=True)
class HostSpec:
    """
    Descrição de um host sintetizável (ou gravado).

    AM:   (1 + μ·a(t))·cos(2πf₀t)
    FM:   cos(2πf₀t + 2πk_f∫a)
    Pam8: 8-PAM independente em I e Q, formatado com RRC de roll-off β
    """

    kind: HostKind
    sample_rate: float
    source: SourceKind = SourceKind.TONE
    modulation_index: float = 0.5      # μ (AM)
    deviation: float = 15_000.0        # k_f em Hz (FM)
    carrier_freq: float | None = None  # f₀; default fs/4 (AM/FM)
    tone_freq: float = 400.0
    noise_bandwidth: float = 1_500.0
    symbol_rate: float | None = None   # Pam8; default fs/4
    rolloff: float = 0.2               # β (Pam8)
    path: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", HostKind(self.kind))
        object.__setattr__(self, "source", SourceKind(self.source))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        self.validate()

    # -------------------------
    # Construtores
    # -------------------------

    @classmethod
    def default(cls, kind: HostKind | str, **overrides) -> "HostSpec":
        """Taxas realistas: AM 8 kHz, FM 200 kHz, Pam8 6.25 MHz."""
        kind = HostKind(kind)
        overrides.setdefault("sample_rate", DEFAULT_SAMPLE_RATES[kind])
        return cls(kind=kind, **overrides)

    # -------------------------
    # Derivados
    # -------------------------

    @property
    def carrier(self) -> float:
        return float(self.carrier_freq) if self.carrier_freq else self.sample_rate / 4

    @property
    def symbols_per_second(self) -> float:
        return float(self.symbol_rate) if self.symbol_rate else self.sample_rate / 4

    @property
    def samples_per_symbol(self) -> int:
        return int(round(self.sample_rate / self.symbols_per_second))

    @property
    def audio_bandwidth(self) -> float:
        if self.source == SourceKind.TONE:
            return float(self.tone_freq)
        return float(self.noise_bandwidth)

    @property
    def is_complex(self) -> bool:
        return self.kind == HostKind.PAM8

    def channel_band(self) -> tuple[float, float]:
        """
        (f_lo, f_hi) ocupados pelo host em Hz.
        f_lo = 0 significa banda base (filtro passa-baixas).
        """
        if self.kind == HostKind.AM:
            bw = self.audio_bandwidth
            return self.carrier - bw, self.carrier + bw
        if self.kind == HostKind.FM:
            half = self.deviation + self.audio_bandwidth  # Carson
            return self.carrier - half, self.carrier + half
        return 0.0, self.symbols_per_second * (1 + self.rolloff) / 2

    @property
    def channel_bandwidth(self) -> float:
        return NOMINAL_CHANNEL_HZ[self.kind]

    # -------------------------
    # Validação
    # -------------------------

    def validate(self) -> None:
        fs = self.sample_rate
        nyquist = fs / 2
        if fs <= 0:
            raise InvalidConfigError("sample_rate must be positive.")

        if self.source == SourceKind.FILE:
            if not self.path:
                raise InvalidConfigError("A file-sourced host needs a capture path.")
        elif self.audio_bandwidth <= 0:
            raise InvalidConfigError("Tone frequency / noise bandwidth must be positive.")

        if self.kind == HostKind.AM:
            if not (0 <= self.modulation_index <= 1):
                raise InvalidConfigError(f"AM modulation index must be in [0, 1] (got {self.modulation_index}).")
        if self.kind == HostKind.FM and self.deviation <= 0:
            raise InvalidConfigError(f"FM deviation must be positive (got {self.deviation}).")

        if self.kind in (HostKind.AM, HostKind.FM):
            if self.carrier > fs / 4:
                raise AliasingError(f"Carrier {self.carrier} Hz exceeds fs/4 = {fs / 4} Hz.")
            if self.source != SourceKind.FILE:
                lo, hi = self.channel_band()
                if lo <= 0 or hi >= nyquist:
                    raise AliasingError(
                        f"{self.kind.label} occupies {lo:.0f}..{hi:.0f} Hz, outside (0, {nyquist:.0f}) Hz."
                    )

        if self.kind == HostKind.PAM8:
            if not (0 < self.rolloff <= 1):
                raise InvalidConfigError(f"Roll-off must be in (0, 1] (got {self.rolloff}).")
            rs = self.symbols_per_second
            if rs <= 0 or rs > nyquist:
                raise AliasingError(f"Symbol rate {rs} exceeds fs/2 = {nyquist}.")
            sps = fs / rs
            if abs(sps - round(sps)) > 1e-9:
                raise InvalidConfigError(f"sample_rate / symbol_rate must be an integer (got {sps}).")

    @property
    def capture_path(self) -> Path:
        return Path(self.path)


def normalized_bit_rate(spec: HostSpec, bps_per_hz: float) -> float:
    """
    Taxa de bits proporcional à banda nominal do host
    (1e-4 bps/Hz → 1 bps no AM, 20 bps no FM, 625 bps no TV).
    """
    if bps_per_hz <= 0:
        raise InvalidConfigError("bps_per_hz must be positive.")
    return bps_per_hz * spec.channel_bandwidth
