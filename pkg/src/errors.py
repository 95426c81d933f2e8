from __future__ import annotations

from typing import Optional


class GmeError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(GmeError, ValueError):
    """An input broke an invariant (Hermiticity, trace, PSD, ranges, labels)."""


class DimensionError(ValidationError):
    """Shapes, local dimensions or criterion/dimension pairing do not fit."""


class ConfigError(GmeError, RuntimeError):
    """An environment variable holds a value the config cannot use."""


class ConvergenceError(GmeError, RuntimeError):
    def __init__(self, message: str, *, residual: float, sweeps: int):
        super().__init__(f"{message} (residual={residual:.3e} after {sweeps} sweeps)")
        self.residual = residual
        self.sweeps = sweeps


class NoCrossingError(GmeError):
    """value - threshold keeps one sign over the whole bracket."""

    def __init__(
        self,
        message: str,
        *,
        lo: float,
        hi: float,
        margin_lo: float,
        margin_hi: float,
        note: Optional[str] = None,
    ):
        super().__init__(message)
        self.lo = lo
        self.hi = hi
        self.margin_lo = margin_lo
        self.margin_hi = margin_hi
        self.note = note
