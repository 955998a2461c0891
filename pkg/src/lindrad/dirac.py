"""Gamma-matrix algebra in the standard Dirac representation.

Conventions: metric signature (+,-,-,-); gamma5 = gamma0 gamma1 gamma2 gamma3
taken literally (no factor i), hence gamma5^2 = -1 and gamma5 is
anti-Hermitian.  Jump operators built from this gamma5 differ from the
Hermitian-gamma5 choice by a global phase, which drops out of every
dissipator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)


def _block(a, b, c, d) -> np.ndarray:
    return np.block([[a, b], [c, d]])


GAMMA0 = _block(_I2, _Z2, _Z2, -_I2)
GAMMAS = np.array([_block(_Z2, s, -s, _Z2) for s in _SIGMA])  # gamma^1..gamma^3
GAMMA5 = GAMMA0 @ GAMMAS[0] @ GAMMAS[1] @ GAMMAS[2]
ALPHAS = np.array([GAMMA0 @ g for g in GAMMAS])  # alpha_i = gamma^0 gamma^i
SIGMAS = np.array([-1j * GAMMA5 @ GAMMAS[j] @ GAMMA0 for j in range(3)])  # spin
IDENTITY4 = np.eye(4, dtype=complex)

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def gamma_basis() -> dict:
    """All fixed matrices of the representation keyed by symbol name."""
    basis = {"gamma0": GAMMA0, "gamma5": GAMMA5, "identity": IDENTITY4}
    for i in range(3):
        basis[f"gamma{i + 1}"] = GAMMAS[i]
        basis[f"alpha{i + 1}"] = ALPHAS[i]
        basis[f"Sigma{i + 1}"] = SIGMAS[i]
    return basis


def gamma_mu(mu: int) -> np.ndarray:
    """gamma^mu for mu in 0..3."""
    return GAMMA0 if mu == 0 else GAMMAS[mu - 1]


@dataclass(frozen=True)
class Momentum3:
    """Kinetic momentum with on-shell derived quantities."""

    pi: np.ndarray
    m: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "pi", np.asarray(self.pi, dtype=float))
        if self.pi.shape != (3,):
            raise ValueError("momentum must be a 3-vector")
        if not (self.m > 0.0):
            raise ValueError("mass must be positive")

    @property
    def pi0(self) -> float:
        return float(np.sqrt(self.pi @ self.pi + self.m * self.m))

    @property
    def gamma_factor(self) -> float:
        return self.pi0 / self.m

    @property
    def v(self) -> np.ndarray:
        return self.pi / self.pi0


def free_hamiltonian(p: Momentum3 | np.ndarray, m: float | None = None) -> np.ndarray:
    """H0 = alpha.p + gamma0 m (Hermitian, eigenvalues +-sqrt(p^2+m^2))."""
    pvec, mass = _unpack(p, m)
    return np.einsum("i,ijk->jk", pvec, ALPHAS) + mass * GAMMA0


def fw_unitary(p: Momentum3 | np.ndarray, m: float | None = None) -> np.ndarray:
    """Free-particle Foldy-Wouthuysen unitary U with U H0 U^dag = gamma0 pi0.

    U = (pi0 + m + gamma.pi) / sqrt(2 pi0 (pi0 + m)); at p = 0 it reduces to
    the identity.
    """
    pvec, mass = _unpack(p, m)
    pi0 = np.sqrt(pvec @ pvec + mass * mass)
    gdotp = np.einsum("i,ijk->jk", pvec, GAMMAS)
    return ((mass + pi0) * IDENTITY4 + gdotp) / np.sqrt(2.0 * pi0 * (pi0 + mass))


def free_spinor(phi: np.ndarray, p: Momentum3 | np.ndarray, m: float | None = None) -> np.ndarray:
    """u_p / sqrt(2 pi0): the standard positive-energy spinor for 2-spinor phi."""
    pvec, mass = _unpack(p, m)
    phi = np.asarray(phi, dtype=complex).reshape(2)
    pi0 = np.sqrt(pvec @ pvec + mass * mass)
    sdotp = np.einsum("i,ijk->jk", pvec, _SIGMA)
    upper = phi
    lower = (sdotp @ phi) / (pi0 + mass)
    return np.sqrt((pi0 + mass) / (2.0 * pi0)) * np.concatenate([upper, lower])


def energy_projectors(p: Momentum3 | np.ndarray, m: float | None = None):
    """(P+, P-) onto positive/negative energy subspaces of H0."""
    pvec, mass = _unpack(p, m)
    pi0 = np.sqrt(pvec @ pvec + mass * mass)
    lam = free_hamiltonian(pvec, mass) / pi0
    return 0.5 * (IDENTITY4 + lam), 0.5 * (IDENTITY4 - lam)


def _unpack(p, m):
    if isinstance(p, Momentum3):
        return p.pi, p.m
    if m is None:
        raise TypeError("mass required when momentum is a bare array")
    return np.asarray(p, dtype=float), float(m)
