"""Exception hierarchy shared across the package."""

from __future__ import annotations


class LindradError(Exception):
    """Base class for all package-specific failures."""


class DomainError(LindradError, ValueError):
    """Input outside the documented domain of an operation."""


class IntegrationError(LindradError):
    """A density-matrix step violated an invariant; reduce the step size."""


class BlowUpError(LindradError):
    """A classical trajectory left the physical region (non-finite state)."""


class RecoilOutOfRangeError(DomainError):
    """Photon recoil kinematically unreachable (pi0' <= m)."""


class QuadratureError(LindradError):
    """The emission-kernel quadrature failed to converge."""


class StepSizeError(LindradError):
    """CFL condition violated; carries a suggested stable step."""

    def __init__(self, message: str, suggested_dt: float):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class ResolutionError(LindradError):
    """Grid support touches the domain edge (aliasing risk)."""


class ConfigError(LindradError):
    """Configuration text rejected; carries line number and key when known."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"key '{key}': "
        super().__init__(prefix + message)
        self.line = line
        self.key = key
