"""Classical equations of motion: Lorentz, Landau-Lifshitz, and the
vacuum-fluctuation-corrected Ehrenfest pair.

Models (state variables x, pi; v = pi/pi0 recomputed every evaluation so the
mass shell is exact):

* Lorentz          dx/dt = v,           dpi/dt = e v x B(x)
* LandauLifshitz   dx/dt = v,           dpi/dt = F + e tau0 [F x B / m
                   + gamma v x (v.grad)B] - (tau0 gamma^2 F^2 / m) v
* VfEhrenfest      dx/dt = v + dv_vac,  dpi/dt = e (v + dv_vac) x B
                   + e (dv_vac x B) + e [v x (dr_vac.grad)B] - f_rad
* SokolovVariant   VfEhrenfest without the (dr_vac.grad)B term.

with dv_vac = (tau0/2m) F and dr_vac = (tau0/2) gamma v.  In the corrected
Ehrenfest model the Lorentz force is evaluated at the transport velocity
dx/dt = v + dv_vac, so the dv_vac x B correction enters twice: once inside
the Lorentz force and once as the explicit vacuum term.  This double
counting is what makes the model agree with Landau-Lifshitz through first
order in tau0 (single counting leaves an uncancelled e tau0 (F x B)/(2m)
term and only O(tau0) agreement).

Fields are uniform plus an optional constant gradient, B(x) = B0 +
gradB^T (x - x0), divergence-free by construction check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from enum import Enum

import numpy as np

from .errors import BlowUpError, DomainError
from .units import ModelConstants

ELEMENTARY_CHARGE = 1.0  # |e| in units where e^2 = alpha is carried by consts


@dataclass(frozen=True)
class ParticleState:
    """Classical state (t, x, pi) with on-shell derived quantities."""

    t: float
    x: np.ndarray
    pi: np.ndarray
    m: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "pi", np.asarray(self.pi, dtype=float))
        if self.x.shape != (3,) or self.pi.shape != (3,):
            raise DomainError("x and pi must be 3-vectors")

    @property
    def pi0(self) -> float:
        return math.sqrt(self.m * self.m + float(self.pi @ self.pi))

    @property
    def gamma(self) -> float:
        return self.pi0 / self.m

    @property
    def v(self) -> np.ndarray:
        return self.pi / self.pi0


@dataclass(frozen=True)
class FieldConfig:
    """Uniform magnetic field plus constant gradient tensor d_i B_j."""

    B0: np.ndarray
    gradB: np.ndarray = dc_field(default_factory=lambda: np.zeros((3, 3)))
    E0: np.ndarray = dc_field(default_factory=lambda: np.zeros(3))
    x0: np.ndarray = dc_field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        object.__setattr__(self, "B0", np.asarray(self.B0, dtype=float))
        object.__setattr__(self, "gradB", np.asarray(self.gradB, dtype=float))
        object.__setattr__(self, "E0", np.asarray(self.E0, dtype=float))
        object.__setattr__(self, "x0", np.asarray(self.x0, dtype=float))
        if self.B0.shape != (3,) or self.gradB.shape != (3, 3):
            raise DomainError("B0 must be a 3-vector, gradB a 3x3 tensor")
        if abs(np.trace(self.gradB)) > 1e-12 * max(1.0, np.abs(self.gradB).max()):
            raise DomainError("divergence-free violation: trace(gradB) != 0")
        if np.any(self.E0 != 0.0):
            raise DomainError("electric fields are not supported in this release")

    def B_at(self, x: np.ndarray) -> np.ndarray:
        return self.B0 + (x - self.x0) @ self.gradB


class ModelKind(Enum):
    Lorentz = "lorentz"
    LandauLifshitz = "landau-lifshitz"
    VfEhrenfest = "vf-ehrenfest"
    SokolovVariant = "sokolov-variant"


def rhs(model: ModelKind, state: ParticleState, field: FieldConfig, consts: ModelConstants):
    """(dx/dt, dpi/dt) for the requested model at the given state."""
    fp = _field_floats(field, consts, state.m)
    out = _rhs_floats(
        model,
        state.x[0], state.x[1], state.x[2],
        state.pi[0], state.pi[1], state.pi[2],
        fp,
    )
    return np.array(out[:3]), np.array(out[3:])


def rhs_batch(model: ModelKind, x: np.ndarray, pi: np.ndarray, field: FieldConfig, consts: ModelConstants):
    """Vectorized (dx/dt, dpi/dt) over particle arrays of shape (N, 3)."""
    x = np.asarray(x, dtype=float)
    pi = np.asarray(pi, dtype=float)
    m = consts.m
    tau0 = consts.tau0
    e = ELEMENTARY_CHARGE
    pi0 = np.sqrt(m * m + np.einsum("ni,ni->n", pi, pi))[:, None]
    v = pi / pi0
    B = field.B0[None, :] + (x - field.x0[None, :]) @ field.gradB
    F = e * np.cross(v, B)
    if model is ModelKind.Lorentz:
        return v, F
    gamma = pi0 / m
    F2 = np.einsum("ni,ni->n", F, F)[:, None]
    fric = tau0 * gamma**2 * F2 / m * v
    if model is ModelKind.LandauLifshitz:
        conv = v @ field.gradB  # (v.grad)B
        extra = e * tau0 * (np.cross(F, B) / m + gamma * np.cross(v, conv))
        return v, F + extra - fric
    dv = (tau0 / (2.0 * m)) * F
    dpi = F + 2.0 * e * np.cross(dv, B) - fric
    if model is ModelKind.VfEhrenfest:
        dr = (tau0 / 2.0) * gamma * v
        dpi = dpi + e * np.cross(v, dr @ field.gradB)
    elif model is not ModelKind.SokolovVariant:
        raise DomainError(f"unknown model {model!r}")
    return v + dv, dpi


def _field_floats(field: FieldConfig, consts: ModelConstants, m: float) -> tuple:
    """Hoist every array element the scalar core touches into plain floats."""
    g = field.gradB
    return (
        float(field.B0[0]), float(field.B0[1]), float(field.B0[2]),
        float(g[0, 0]), float(g[0, 1]), float(g[0, 2]),
        float(g[1, 0]), float(g[1, 1]), float(g[1, 2]),
        float(g[2, 0]), float(g[2, 1]), float(g[2, 2]),
        float(field.x0[0]), float(field.x0[1]), float(field.x0[2]),
        float(consts.tau0), float(m),
    )


def _rhs_floats(model, x1, x2, x3, p1, p2, p3, fp: tuple):
    """Scalar-core right-hand side; plain floats keep the integrator fast."""
    (B01, B02, B03,
     g11, g12, g13, g21, g22, g23, g31, g32, g33,
     ox1, ox2, ox3, tau0, m) = fp
    e = ELEMENTARY_CHARGE
    pi0 = math.sqrt(m * m + p1 * p1 + p2 * p2 + p3 * p3)
    v1, v2, v3 = p1 / pi0, p2 / pi0, p3 / pi0
    dx1, dx2, dx3 = x1 - ox1, x2 - ox2, x3 - ox3
    B1 = B01 + g11 * dx1 + g21 * dx2 + g31 * dx3
    B2 = B02 + g12 * dx1 + g22 * dx2 + g32 * dx3
    B3 = B03 + g13 * dx1 + g23 * dx2 + g33 * dx3
    F1 = e * (v2 * B3 - v3 * B2)
    F2 = e * (v3 * B1 - v1 * B3)
    F3 = e * (v1 * B2 - v2 * B1)
    if model is ModelKind.Lorentz:
        return v1, v2, v3, F1, F2, F3
    gamma = pi0 / m
    fr = tau0 * gamma * gamma * (F1 * F1 + F2 * F2 + F3 * F3) / m
    if model is ModelKind.LandauLifshitz:
        c1 = v1 * g11 + v2 * g21 + v3 * g31
        c2 = v1 * g12 + v2 * g22 + v3 * g32
        c3 = v1 * g13 + v2 * g23 + v3 * g33
        k = e * tau0
        q1 = k * ((F2 * B3 - F3 * B2) / m + gamma * (v2 * c3 - v3 * c2))
        q2 = k * ((F3 * B1 - F1 * B3) / m + gamma * (v3 * c1 - v1 * c3))
        q3 = k * ((F1 * B2 - F2 * B1) / m + gamma * (v1 * c2 - v2 * c1))
        return v1, v2, v3, F1 + q1 - fr * v1, F2 + q2 - fr * v2, F3 + q3 - fr * v3
    # corrected Ehrenfest family
    a = tau0 / (2.0 * m)
    dv1, dv2, dv3 = a * F1, a * F2, a * F3
    w1 = 2.0 * e * (dv2 * B3 - dv3 * B2)
    w2 = 2.0 * e * (dv3 * B1 - dv1 * B3)
    w3 = 2.0 * e * (dv1 * B2 - dv2 * B1)
    if model is ModelKind.VfEhrenfest:
        b = tau0 / 2.0 * gamma
        r1, r2, r3 = b * v1, b * v2, b * v3
        c1 = r1 * g11 + r2 * g21 + r3 * g31
        c2 = r1 * g12 + r2 * g22 + r3 * g32
        c3 = r1 * g13 + r2 * g23 + r3 * g33
        w1 += e * (v2 * c3 - v3 * c2)
        w2 += e * (v3 * c1 - v1 * c3)
        w3 += e * (v1 * c2 - v2 * c1)
    elif model is not ModelKind.SokolovVariant:
        raise DomainError(f"unknown model {model!r}")
    return (
        v1 + dv1, v2 + dv2, v3 + dv3,
        F1 + w1 - fr * v1, F2 + w2 - fr * v2, F3 + w3 - fr * v3,
    )


def integrate(
    model: ModelKind,
    state0: ParticleState,
    field: FieldConfig,
    consts: ModelConstants,
    dt: float,
    steps: int,
    record_every: int = 1,
) -> list:
    """Classic fixed-step RK4 trajectory; returns recorded ParticleState list.

    Guidance: dt <= 0.01 gamma m / (e B) keeps the per-step error far below
    the cyclotron scale.  Non-finite states raise BlowUpError.
    """
    if dt <= 0.0 or steps < 1:
        raise DomainError("dt must be positive and steps >= 1")
    if record_every < 1:
        raise DomainError("record_every must be >= 1")
    m = state0.m
    x1, x2, x3 = map(float, state0.x)
    p1, p2, p3 = map(float, state0.pi)
    t = float(state0.t)
    out = [state0]
    f = _rhs_floats
    fp = _field_floats(field, consts, m)
    h = 0.5 * dt
    for n in range(1, steps + 1):
        a1 = f(model, x1, x2, x3, p1, p2, p3, fp)
        a2 = f(model, x1 + h * a1[0], x2 + h * a1[1], x3 + h * a1[2],
               p1 + h * a1[3], p2 + h * a1[4], p3 + h * a1[5], fp)
        a3 = f(model, x1 + h * a2[0], x2 + h * a2[1], x3 + h * a2[2],
               p1 + h * a2[3], p2 + h * a2[4], p3 + h * a2[5], fp)
        a4 = f(model, x1 + dt * a3[0], x2 + dt * a3[1], x3 + dt * a3[2],
               p1 + dt * a3[3], p2 + dt * a3[4], p3 + dt * a3[5], fp)
        w = dt / 6.0
        x1 += w * (a1[0] + 2.0 * (a2[0] + a3[0]) + a4[0])
        x2 += w * (a1[1] + 2.0 * (a2[1] + a3[1]) + a4[1])
        x3 += w * (a1[2] + 2.0 * (a2[2] + a3[2]) + a4[2])
        p1 += w * (a1[3] + 2.0 * (a2[3] + a3[3]) + a4[3])
        p2 += w * (a1[4] + 2.0 * (a2[4] + a3[4]) + a4[4])
        p3 += w * (a1[5] + 2.0 * (a2[5] + a3[5]) + a4[5])
        t = state0.t + n * dt
        if n % record_every == 0 or n == steps:
            if not all(map(math.isfinite, (x1, x2, x3, p1, p2, p3))):
                raise BlowUpError(f"non-finite state at t = {t!r}")
            out.append(ParticleState(t, np.array([x1, x2, x3]), np.array([p1, p2, p3]), m))
    return out


def cyclotron_period(gamma: float, omega_c: float) -> float:
    """2 pi gamma / omega_c with omega_c = e B / m."""
    return 2.0 * math.pi * gamma / omega_c


def matched_momentum_for_ll(pi: np.ndarray, x: np.ndarray, field: FieldConfig, consts: ModelConstants, m: float) -> np.ndarray:
    """Momentum giving Landau-Lifshitz the same initial dx/dt as VfEhrenfest.

    The corrected Ehrenfest transport velocity is v + dv_vac; comparing
    trajectories as solutions of the same second-order equation for x(t)
    requires matching initial velocities, not initial momenta.
    """
    pi = np.asarray(pi, dtype=float)
    pi0 = math.sqrt(m * m + pi @ pi)
    v = pi / pi0
    B = field.B_at(np.asarray(x, dtype=float))
    F = ELEMENTARY_CHARGE * np.cross(v, B)
    w = v + consts.tau0 / (2.0 * m) * F
    w2 = float(w @ w)
    if w2 >= 1.0:
        raise DomainError("matched velocity exceeds light speed")
    return m * w / math.sqrt(1.0 - w2)
