"""Finite-dimensional Lindblad evolution with vacuum-fluctuation dissipators.

The basis is a finite list of momentum modes; the Hamiltonian and all jump
operators are block diagonal over modes (4 spinor components each), so the
quantum evolution is exactly solvable mode by mode.  Momentum transfer from
photon emission is treated semiclassically elsewhere (rr_kernel, kinetics).

Normalization convention: Tr rho = 1 and <O> = Tr[rho O].  An alternative
convention evaluates expectations as a quarter spin-trace against a
gamma0-weighted density operator; the two differ by that weight and an
overall factor 4, see `gamma0_weighted_expectation`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import GAMMA0, GAMMA5, IDENTITY4, Momentum3, energy_projectors, free_hamiltonian
from .errors import DomainError, IntegrationError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8


@dataclass
class DensityMatrix:
    """Unit-trace Hermitian positive operator on (momentum mode) x (spinor)."""

    basis: tuple
    blocks: np.ndarray

    def __post_init__(self) -> None:
        self.blocks = np.asarray(self.blocks, dtype=complex)
        n = 4 * len(self.basis)
        if self.blocks.shape != (n, n):
            raise DomainError(f"density matrix must be {n}x{n} for {len(self.basis)} modes")

    @classmethod
    def pure(cls, psi: np.ndarray, basis) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(tuple(basis), np.outer(psi, psi.conj()))

    @property
    def trace(self) -> float:
        return float(np.trace(self.blocks).real)

    @property
    def purity(self) -> float:
        return float(np.trace(self.blocks @ self.blocks).real)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.blocks)[0])

    def validate(self) -> None:
        if np.abs(self.blocks - self.blocks.conj().T).max() > HERMITICITY_TOL:
            raise IntegrationError("density matrix lost Hermiticity")
        if abs(self.trace - 1.0) > TRACE_TOL:
            raise IntegrationError(f"trace drifted to {self.trace!r}")
        if self.min_eigenvalue < -POSITIVITY_TOL:
            raise IntegrationError(f"negative eigenvalue {self.min_eigenvalue!r}")

    def expectation(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.blocks @ op))

    def gamma0_weighted_expectation(self, op: np.ndarray) -> complex:
        """Quarter spin-trace with gamma0 weight.

        For a state normalized to psi^dag psi = 4, the quarter-trace
        gamma0-weighted expectation maps onto Tr[rho gamma0 O] here.
        """
        g0 = _blkdiag([GAMMA0] * len(self.basis))
        return complex(np.trace(self.blocks @ g0 @ op))


@dataclass(frozen=True)
class JumpOperator:
    matrix: np.ndarray
    weight: float

    def __post_init__(self) -> None:
        if self.weight < 0.0:
            raise DomainError("jump weight must be non-negative")


def vf_factor(p: Momentum3) -> float:
    """f(p) = sqrt(2) sqrt(p^2 + m^2) / m, the VF transition amplitude."""
    return np.sqrt(2.0) * p.pi0 / p.m


def vf_operator(s: int, p: Momentum3, m: float | None = None) -> np.ndarray:
    """Single-mode jump operator V_s = s i f(p) gamma5 gamma0 P_{-s}.

    V_+ raises negative-energy amplitudes into the positive-energy subspace
    (upper-right 2x2 block after FW conjugation) and V_- does the reverse.
    The overall phase follows the literal anti-Hermitian gamma5 convention.
    """
    if s not in (+1, -1):
        raise DomainError("sign must be +1 or -1")
    if not isinstance(p, Momentum3):
        p = Momentum3(np.asarray(p, dtype=float), float(m))
    proj_plus, proj_minus = energy_projectors(p)
    proj = proj_minus if s == +1 else proj_plus
    return s * 1j * vf_factor(p) * GAMMA5 @ GAMMA0 @ proj


def _blkdiag(mats) -> np.ndarray:
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for m in mats:
        out[k : k + m.shape[0], k : k + m.shape[0]] = m
        k += m.shape[0]
    return out


def mode_hamiltonian(basis) -> np.ndarray:
    """Block-diagonal free Dirac Hamiltonian over the mode list."""
    return _blkdiag([free_hamiltonian(p) for p in basis])


def vf_jumps(basis, sigma_plus: float, sigma_minus: float):
    """The two VF jump channels embedded over all modes."""
    vp = _blkdiag([vf_operator(+1, p) for p in basis])
    vm = _blkdiag([vf_operator(-1, p) for p in basis])
    return [JumpOperator(vp, sigma_plus), JumpOperator(vm, sigma_minus)]


def pes_projector(basis) -> np.ndarray:
    return _blkdiag([energy_projectors(p)[0] for p in basis])


def lindblad_step(rho: DensityMatrix, H: np.ndarray, jumps, dt: float) -> DensityMatrix:
    """One completely-positive step of d(rho)/dt = -i[H,rho] + sum_s w_s D[V_s].

    Kraus form: M0 = 1 - (iH + K) dt with K = (1/2) sum_s w_s V_s^dag V_s and
    M_s = sqrt(w_s dt) V_s, renormalized to unit trace.  Complete positivity
    is exact; the trace defect is O(dt^2) and is monitored before
    renormalization.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    H = np.asarray(H, dtype=complex)
    if np.abs(H - H.conj().T).max() > 1e-10:
        raise DomainError("Hamiltonian must be Hermitian")
    K = np.zeros_like(rho.blocks)
    for j in jumps:
        K += 0.5 * j.weight * (j.matrix.conj().T @ j.matrix)
    m0 = np.eye(rho.blocks.shape[0], dtype=complex) - (1j * H + K) * dt
    new = m0 @ rho.blocks @ m0.conj().T
    for j in jumps:
        new += (j.weight * dt) * (j.matrix @ rho.blocks @ j.matrix.conj().T)
    raw_trace = float(np.trace(new).real)
    if not np.isfinite(raw_trace) or raw_trace <= 0.0:
        raise IntegrationError("trace collapsed; reduce dt")
    new /= raw_trace
    new = 0.5 * (new + new.conj().T)
    out = DensityMatrix(rho.basis, new)
    if abs(raw_trace - 1.0) > max(1e-8, 10.0 * dt * dt * _defect_scale(H, jumps)):
        raise IntegrationError(
            f"pre-normalization trace drift {raw_trace - 1.0:.3e} exceeds bound; reduce dt"
        )
    if out.min_eigenvalue < -1e-6:
        raise IntegrationError("positivity violated; reduce dt")
    return out


def _defect_scale(H, jumps) -> float:
    a = np.abs(H).max()
    for j in jumps:
        a += 0.5 * j.weight * float(np.abs(j.matrix.conj().T @ j.matrix).max())
    return a * a + 1.0


def double_commutator_dissipator(rho: np.ndarray | DensityMatrix, V: np.ndarray, gamma_c: float) -> np.ndarray:
    """Renormalization-type dissipator -(gamma_c/2)[V,[V,rho]] for Hermitian V.

    Traceless and Hermitian; drives monotone purity loss
    d/dt Tr rho^2 = 2 gamma_c Tr[(rho V)^2 - rho^2 V^2] <= 0.
    """
    blocks = rho.blocks if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if np.abs(V - V.conj().T).max() > 1e-10:
        raise DomainError("V must be Hermitian")
    if gamma_c < 0.0:
        raise DomainError("gamma_c must be non-negative")
    inner = V @ blocks - blocks @ V
    return -0.5 * gamma_c * (V @ inner - inner @ V)


def purity_loss_rate(rho: np.ndarray, V: np.ndarray, gamma_c: float) -> float:
    """Closed form for d/dt Tr rho^2 under the double-commutator dissipator."""
    rv = rho @ V
    return float(2.0 * gamma_c * (np.trace(rv @ rv) - np.trace(rho @ rho @ V @ V)).real)


def central_difference(func, x: np.ndarray, k: int, h: float, order: int = 4) -> np.ndarray:
    """Central-difference partial derivative of a matrix-valued function."""
    if order not in (2, 4):
        raise DomainError("stencil order must be 2 or 4")
    e = np.zeros_like(x)
    e[k] = 1.0
    if order == 2:
        return (func(x + h * e) - func(x - h * e)) / (2.0 * h)
    return (
        -func(x + 2 * h * e) + 8.0 * func(x + h * e) - 8.0 * func(x - h * e) + func(x - 2 * h * e)
    ) / (12.0 * h)


def vf_position_drift(
    p: Momentum3,
    m: float | None = None,
    weights: tuple = (1.0, 1.0),
    step: float | None = None,
    order: int = 4,
) -> np.ndarray:
    """Adjoint VF dissipator applied to the position operator, per component.

    Uses [x_k, V(p)] = i dV/dp_k, so
    L_VF^dag(x_k) = (1/2) sum_s sigma_s (V_s^dag i d_k V_s - i d_k V_s^dag V_s),
    with the momentum derivative taken by central differences (order 2 or 4).
    At p = 0 the exact value is i (sigma_+ + sigma_-)/(2m) gamma^k; under the
    gamma0 expectation weight this maps to a matrix proportional to alpha_k
    (see tests).
    """
    if not isinstance(p, Momentum3):
        p = Momentum3(np.asarray(p, dtype=float), float(m))
    h = 1e-4 * p.m if step is None else float(step)
    sigma_plus, sigma_minus = weights
    out = np.zeros((3, 4, 4), dtype=complex)
    for s, w in ((+1, sigma_plus), (-1, sigma_minus)):
        if w == 0.0:
            continue

        def V(q):
            return vf_operator(s, Momentum3(q, p.m))

        v0 = V(p.pi)
        for k in range(3):
            dV = central_difference(V, p.pi, k, h, order)
            out[k] += 0.5 * w * 1j * (v0.conj().T @ dV - dV.conj().T @ v0)
    return out


def vf_position_drift_exact(p: Momentum3, weights: tuple = (1.0, 1.0)) -> np.ndarray:
    """Closed form of the VF position drift, used as the derivative oracle.

    Since V_s^dag(p) V_s(q) = f(p) f(q) P_{-s}(p) P_{-s}(q), the projector
    commutator is exactly linear in q - p and f/pi0 = sqrt(2)/m is constant,
    so the difference quotient has no truncation error and evaluates to

        L_VF^dag(x_k) = i (sigma_+ + sigma_-) / (4 m^2)
                        ([alpha.p, alpha_k] + 2 m gamma^k).

    Central differencing is consequently exact at any step, which the tests
    exploit.
    """
    from .dirac import ALPHAS, GAMMAS

    ap = np.einsum("i,ijk->jk", p.pi, ALPHAS)
    total = sum(weights)
    out = np.zeros((3, 4, 4), dtype=complex)
    for k in range(3):
        out[k] = 1j * total / (4.0 * p.m**2) * (ap @ ALPHAS[k] - ALPHAS[k] @ ap + 2.0 * p.m * GAMMAS[k])
    return out
