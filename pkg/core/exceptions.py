# core/exceptions.py
from __future__ import annotations


class QimError(RuntimeError):
    """Base de todos os erros do pipeline QIM (embedding, hosts, canal, métricas, harness)."""


# =========================
# embedding
# =========================

class InvalidConfigError(QimError, ValueError):
    pass


class InvalidSampleError(QimError, ValueError):
    pass


class DegenerateSignalError(QimError, ValueError):
    pass


class CapacityExceededError(QimError):
    pass


class TruncatedMessageError(QimError):
    pass


class UndefinedAlphaError(QimError, ValueError):
    pass


# =========================
# hosts
# =========================

class AliasingError(QimError, ValueError):
    pass


class KindMismatchError(QimError, TypeError):
    pass


class MalformedCaptureError(QimError):
    pass


class UnsupportedFormatError(QimError):
    pass


class MissingSidecarError(QimError):
    pass


# =========================
# métricas / canal
# =========================

class LengthMismatchError(QimError, ValueError):
    pass


class ZeroPowerError(QimError, ValueError):
    pass


class SignalTooShortError(QimError, ValueError):
    pass


# =========================
# harness
# =========================

class EmptyResultsError(QimError):
    pass


class InfeasibleCellError(QimError):
    """Célula do grid cuja mensagem não cabe no host (vira linha marcada, não aborta o sweep)."""


class MalformedResultsError(QimError):
    pass
