"""Radiation-reaction emission kernel.

Three layers of the same physics, used to cross-validate each other:

* `emission_amplitude_R`: the positive-energy-projected photon emission
  amplitude between Foldy-Wouthuysen spinors, R = (e.A) 1 + i sigma.B.
* `rr_force_lcfa`: closed-form low-recoil friction force along the velocity.
* `rr_kernel_numeric`: direct quadrature of the low-recoil formation-time
  integral along a classical trajectory.

Normalization: the friction force is fixed by requiring that the energy loss
rate reproduces the relativistic Larmor power, f = -(sigma/pi) gamma^4
|xddot|^2 xdot, equal to tau0 gamma^2 F^2 v / m for circular motion in a
magnetic field.  The formation-time integral carries the same normalization.

Regularization of the formation-time integral: the integrand has a simple
pole at tau = 0; the contour is displaced below the real axis,
tau -> tau - i*delta with delta = reg_eps * tau_f and tau_f the formation
scale sqrt(12)/(gamma |xddot|).  The limit delta -> 0 picks up +i pi times
the pole residue, which is exactly the closed-form friction force; a naive
symmetric rotation tau -> tau (1 - i eps) integrates to zero by oddness and
is therefore not used.  Trajectories must be real-analytic: `displacement`
is evaluated at complex times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dirac import Momentum3
from .errors import DomainError, QuadratureError, RecoilOutOfRangeError
from .units import ModelConstants

_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def polarization_basis(k: np.ndarray):
    """Orthonormal pair (e1, e2) perpendicular to k, deterministic in k."""
    k = np.asarray(k, dtype=float)
    n = k / np.linalg.norm(k)
    trial = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = trial - (trial @ n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


@dataclass(frozen=True)
class EmissionChannel:
    """One photon mode: emission/absorption sign, wave vector, polarization."""

    eta: int
    k: np.ndarray
    lambda_pol: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", np.asarray(self.k, dtype=float))
        if self.eta not in (+1, -1):
            raise DomainError("eta must be +1 (emission) or -1 (absorption)")
        if self.lambda_pol not in (1, 2):
            raise DomainError("polarization index must be 1 or 2")
        if not (np.linalg.norm(self.k) > 0.0):
            raise DomainError("photon momentum must be nonzero")

    @property
    def omega(self) -> float:
        return float(np.linalg.norm(self.k))

    @property
    def e_lambda(self) -> np.ndarray:
        return polarization_basis(self.k)[self.lambda_pol - 1]


def emission_amplitude_vectors(channel: EmissionChannel, p: Momentum3):
    """The scalar amplitude e.A and vector amplitude B entering R.

    pi' = pi - eta k / 2 and pi0' = pi0 - eta omega / 2 (half-recoil
    midpoint kinematics).
    """
    eta, k = channel.eta, channel.k
    pi = p.pi
    pi0 = p.pi0
    m = p.m
    pi0p = pi0 - eta * channel.omega / 2.0
    if pi0p <= m:
        raise RecoilOutOfRangeError(
            f"pi0' = {pi0p!r} <= m = {m!r}: recoil kinematically out of range"
        )
    pip = pi - eta * k / 2.0
    up = math.sqrt((pi0p + m) / (pi0 + m))
    dn = math.sqrt((pi0 + m) / (pi0p + m))
    norm = 1.0 / (2.0 * math.sqrt(pi0 * pi0p))
    avec = norm * (pi * up + pip * dn)
    e = channel.e_lambda
    a_scalar = complex(e @ avec)
    bvec = norm * np.cross(e, pi * up - pip * dn).astype(complex)
    return a_scalar, bvec


def emission_amplitude_R(channel: EmissionChannel, p: Momentum3, m: float | None = None) -> np.ndarray:
    """2x2 spin-space emission amplitude R = (e.A) 1 + i sigma.B."""
    if not isinstance(p, Momentum3):
        p = Momentum3(np.asarray(p, dtype=float), float(m))
    a_scalar, bvec = emission_amplitude_vectors(channel, p)
    return a_scalar * np.eye(2, dtype=complex) + 1j * np.einsum("i,ijk->jk", bvec, _PAULI)


@dataclass(frozen=True)
class TrajectoryPoint:
    """Instantaneous kinematics (velocity, acceleration, Lorentz factor)."""

    xdot: np.ndarray
    xddot: np.ndarray
    gamma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "xdot", np.asarray(self.xdot, dtype=float))
        object.__setattr__(self, "xddot", np.asarray(self.xddot, dtype=float))
        v2 = float(self.xdot @ self.xdot)
        if v2 >= 1.0:
            raise DomainError("|xdot| must be < 1")
        if abs(self.gamma - 1.0 / math.sqrt(1.0 - v2)) > 1e-10 * self.gamma:
            raise DomainError("gamma inconsistent with |xdot|")

    @classmethod
    def from_velocity(cls, xdot, xddot) -> "TrajectoryPoint":
        xdot = np.asarray(xdot, dtype=float)
        return cls(xdot, np.asarray(xddot, dtype=float), 1.0 / math.sqrt(1.0 - xdot @ xdot))


def rr_force_lcfa(tp: TrajectoryPoint, consts: ModelConstants) -> np.ndarray:
    """Closed-form low-recoil friction force -(sigma/pi) gamma^4 |xddot|^2 xdot.

    For v perpendicular to xddot the power -f.v equals the relativistic
    Larmor power (2 alpha/3) gamma^4 |xddot|^2 times v^2, and the magnitude
    equals tau0 gamma^2 F^2 |v| / m when xddot = F/(m gamma).
    """
    a2 = float(tp.xddot @ tp.xddot)
    return -(consts.sigma / math.pi) * tp.gamma**4 * a2 * tp.xdot


class CircularTrajectory:
    """Circular motion in a plane, centered so x(0) = 0, velocity along +y.

    `displacement` accepts complex time offsets (entire function), as
    required by the kernel's contour displacement.
    """

    def __init__(self, gamma: float, omega_orbit: float):
        if gamma <= 1.0:
            raise DomainError("gamma must exceed 1")
        self.gamma = float(gamma)
        self.omega = float(omega_orbit)
        self.speed = math.sqrt(1.0 - 1.0 / gamma**2)
        self.radius = self.speed / self.omega
        self.xdot0 = np.array([0.0, self.speed, 0.0])
        self.xddot0 = np.array([-self.speed * self.omega, 0.0, 0.0])

    @classmethod
    def from_field(cls, gamma: float, omega_c: float) -> "CircularTrajectory":
        """omega_c = e B / m; the orbital frequency is omega_c / gamma."""
        return cls(gamma, omega_c / gamma)

    def position(self, t):
        return np.array(
            [self.radius * (np.cos(self.omega * t) - 1.0), self.radius * np.sin(self.omega * t), 0.0 * t]
        )

    def displacement(self, tau):
        """x(tau/2) - x(-tau/2), valid for complex tau."""
        s = 2.0 * self.radius * np.sin(self.omega * tau / 2.0)
        zero = 0.0 * s
        return np.array([zero, s, zero])


class StraightLineTrajectory:
    """Uniform motion: zero acceleration, zero radiated force."""

    def __init__(self, xdot):
        self.xdot0 = np.asarray(xdot, dtype=float)
        self.xddot0 = np.zeros(3)
        self.gamma = 1.0 / math.sqrt(1.0 - self.xdot0 @ self.xdot0)

    def displacement(self, tau):
        return np.array([self.xdot0[0] * tau, self.xdot0[1] * tau, self.xdot0[2] * tau])


def rr_kernel_numeric(
    traj,
    p: Momentum3,
    consts: ModelConstants,
    reg_eps: float = 1e-3,
    tau_max: float | None = None,
    rel_tol: float = 1e-3,
    max_doublings: int = 10,
) -> np.ndarray:
    """Low-recoil formation-time integral of the radiated force.

    force = Re Int dtau  sigma |xddot|^2 tau^2 i r(tau) / (pi^2 (tau^2 - r.r)^2)

    evaluated on the displaced contour tau = s - i delta (see module
    docstring).  The truncation tau_max is doubled until the result changes
    by less than rel_tol; failure to converge raises QuadratureError.
    """
    if not (0.0 < reg_eps < 1.0):
        raise DomainError("reg_eps must lie in (0, 1)")
    a2 = float(np.asarray(traj.xddot0) @ np.asarray(traj.xddot0))
    if a2 == 0.0:
        return np.zeros(3)
    gamma = getattr(traj, "gamma", p.gamma_factor)
    tau_f = math.sqrt(12.0) / (gamma * math.sqrt(a2))
    delta = reg_eps * tau_f
    pref = consts.sigma * a2 / math.pi**2

    def integrand(s: float) -> np.ndarray:
        tau = s - 1j * delta
        r = traj.displacement(tau)
        r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2]
        den = (tau * tau - r2) ** 2
        return (1j * pref * tau * tau / den) * r

    if tau_max is None:
        tau_max = 8.0 * tau_f

    def integrate_to(tmax: float) -> np.ndarray:
        edges = [0.0, delta]
        while edges[-1] < tmax:
            edges.append(min(4.0 * edges[-1], tmax))
        total = np.zeros(3, dtype=complex)
        for sign in (+1.0, -1.0):
            for a, b in zip(edges[:-1], edges[1:]):
                lo, hi = (a, b) if sign > 0 else (-b, -a)
                for i in range(3):
                    re = quad(lambda s: integrand(s)[i].real, lo, hi, limit=200)[0]
                    im = quad(lambda s: integrand(s)[i].imag, lo, hi, limit=200)[0]
                    total[i] += re + 1j * im
        return total

    prev = integrate_to(tau_max)
    for _ in range(max_doublings):
        tau_max *= 2.0
        cur = integrate_to(tau_max)
        scale = max(np.abs(cur).max(), 1e-300)
        if np.abs(cur - prev).max() < rel_tol * scale:
            return cur.real
        prev = cur
    raise QuadratureError(
        f"kernel integral did not converge within {max_doublings} tau_max doublings"
    )
