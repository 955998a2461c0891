"""Relativistic unit system (hbar = c = 1) and model constants.

All quantities in the package are expressed in energy units of the electron
mass scale: lengths and times carry units of 1/energy.  The electromagnetic
coupling enters as e^2 = alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

FINE_STRUCTURE = 1.0 / 137.036


@dataclass(frozen=True)
class ModelConstants:
    """Coupling constants of the dissipative electron model.

    tau0        characteristic radiation-reaction time, 2*alpha/(3*m)
    sigma       weight of the radiation-reaction Lindblad channel, 2*pi*alpha/3
    sigma_minus weight of the vacuum-fluctuation channel, 2*alpha*m/3
    E_cr        critical (Schwinger) field m^2/e
    """

    alpha: float
    m: float
    lambda_bar: float
    tau0: float
    sigma: float
    sigma_minus: float
    E_cr: float

    def __post_init__(self) -> None:
        for name in ("alpha", "m", "lambda_bar", "tau0", "sigma", "sigma_minus", "E_cr"):
            value = getattr(self, name)
            if not (value > 0.0) or not math.isfinite(value):
                raise ValueError(f"ModelConstants.{name} must be positive, got {value!r}")

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "m": self.m,
            "lambda_bar": self.lambda_bar,
            "tau0": self.tau0,
            "sigma": self.sigma,
            "sigma_minus": self.sigma_minus,
            "E_cr": self.E_cr,
        }


def derived_constants(alpha: float = FINE_STRUCTURE, m: float = 1.0) -> ModelConstants:
    """Build the full constant set from the coupling alpha and the mass m."""
    if not (alpha > 0.0):
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if not (m > 0.0):
        raise ValueError(f"m must be positive, got {m!r}")
    e2 = alpha
    return ModelConstants(
        alpha=alpha,
        m=m,
        lambda_bar=1.0 / m,
        tau0=2.0 * e2 / (3.0 * m),
        sigma=2.0 * math.pi * e2 / 3.0,
        sigma_minus=2.0 * e2 * m / 3.0,
        E_cr=m * m / math.sqrt(e2),
    )
