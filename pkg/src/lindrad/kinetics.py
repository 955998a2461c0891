"""Vacuum-fluctuation diffusion kinetics: Fokker-Planck and Langevin pair.

The kinetic equation evolved here is

    df0/dt + (v + dv_vac).grad_x f0 + div_pi[(F + f_vac - f_rad) f0]
        = (gamma tau0 / 2) (F.grad_pi + v.grad_x)^2 f0,

a transport equation with a rank-one diffusion generator along the
phase-space direction (v, F).  The sign of f_rad inside the momentum
divergence is chosen so that first moments reproduce the corrected
Ehrenfest drift (F + f_vac - f_rad).

The grid is rectangular over (x, pi) with equal numbers of spatial and
momentum dimensions (1, 2 or 3 each); grid components embed into the first
d components of the 3-vectors, the remaining components are zero.

Discretization: donor-cell upwind advection and centered second differences
for the diffusion, both in conservative face-flux form with zero boundary
fluxes, so the total mass is conserved to round-off.  Negative cells
produced by the centered stencils are clipped to zero and the distribution
renormalized; the clipped mass is accumulated on the field (acceptance
requires < 1e-6 per run).

The Langevin sampler is the exact particle dual: Euler-Maruyama with the
corrected-Ehrenfest drift and a single shared Wiener increment per particle
per step entering as dx += sqrt(gamma tau0) v dW, dpi += sqrt(gamma tau0)
F dW (Ito; coefficients at step start).  Noise is generated from a
counter-based Philox stream keyed by (seed, step), so runs are bitwise
reproducible regardless of batching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .dynamics import ELEMENTARY_CHARGE, FieldConfig, ModelKind, ParticleState, rhs_batch
from .errors import BlowUpError, DomainError, StepSizeError
from .units import ModelConstants

MASS_TOL = 1e-8


@dataclass(frozen=True)
class FrozenCoefficients:
    """Constant-coefficient override for the exactly solvable Gaussian test."""

    F: np.ndarray
    v: np.ndarray
    gamma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "F", np.asarray(self.F, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))


@dataclass
class PhaseSpaceScalarField:
    """Non-negative scalar distribution f0 on a rectangular (x, pi) grid."""

    x_axes: tuple
    pi_axes: tuple
    values: np.ndarray
    clipped_mass: float = 0.0

    def __post_init__(self) -> None:
        self.x_axes = tuple(np.asarray(a, dtype=float) for a in self.x_axes)
        self.pi_axes = tuple(np.asarray(a, dtype=float) for a in self.pi_axes)
        if len(self.x_axes) != len(self.pi_axes):
            raise DomainError("need equal numbers of spatial and momentum axes")
        if len(self.x_axes) not in (1, 2, 3):
            raise DomainError("1, 2 or 3 dimensions per sector supported")
        self.values = np.asarray(self.values, dtype=float)
        shape = tuple(len(a) for a in self.x_axes) + tuple(len(a) for a in self.pi_axes)
        if self.values.shape != shape:
            raise DomainError(f"values shape {self.values.shape} != grid shape {shape}")

    @property
    def dim(self) -> int:
        return len(self.x_axes)

    @property
    def spacings(self) -> np.ndarray:
        return np.array([a[1] - a[0] for a in self.x_axes + self.pi_axes])

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.cell_volume)

    def validate(self) -> None:
        if abs(self.mass - 1.0) > MASS_TOL:
            raise DomainError(f"total mass {self.mass!r} != 1")
        if self.values.min() < 0.0:
            raise DomainError("negative cells present")

    @classmethod
    def gaussian(cls, x_axes, pi_axes, mean_x, mean_pi, sigma_x, sigma_pi) -> "PhaseSpaceScalarField":
        x_axes = tuple(np.asarray(a, dtype=float) for a in x_axes)
        pi_axes = tuple(np.asarray(a, dtype=float) for a in pi_axes)
        d = len(x_axes)
        mean_x = np.broadcast_to(np.asarray(mean_x, dtype=float), (d,))
        mean_pi = np.broadcast_to(np.asarray(mean_pi, dtype=float), (d,))
        sigma_x = np.broadcast_to(np.asarray(sigma_x, dtype=float), (d,))
        sigma_pi = np.broadcast_to(np.asarray(sigma_pi, dtype=float), (d,))
        mesh = np.meshgrid(*x_axes, *pi_axes, indexing="ij", sparse=True)
        logf = 0.0
        for i in range(d):
            logf = logf - 0.5 * ((mesh[i] - mean_x[i]) / sigma_x[i]) ** 2
            logf = logf - 0.5 * ((mesh[d + i] - mean_pi[i]) / sigma_pi[i]) ** 2
        values = np.exp(logf)
        out = cls(x_axes, pi_axes, values)
        out.values /= out.mass
        return out

    def grid_points(self):
        """Embedded (x, pi) 3-vectors for every cell, shapes (N, 3)."""
        d = self.dim
        mesh = np.meshgrid(*self.x_axes, *self.pi_axes, indexing="ij")
        n = mesh[0].size
        x = np.zeros((n, 3))
        pi = np.zeros((n, 3))
        for i in range(d):
            x[:, i] = mesh[i].ravel()
            pi[:, i] = mesh[d + i].ravel()
        return x, pi


def _coefficients(f: PhaseSpaceScalarField, field: FieldConfig, consts: ModelConstants, frozen):
    """Cell-centered drift, diffusion direction and coefficient arrays.

    Returns (drift[axis], a[axis], c) with axis running over the 2d grid
    axes (spatial first) and c = gamma tau0 / 2 pointwise.
    """
    d = f.dim
    shape = f.values.shape
    if frozen is not None:
        drift = [np.full(shape, frozen.v[i]) for i in range(d)]
        drift += [np.full(shape, frozen.F[i]) for i in range(d)]
        a = [np.full(shape, frozen.v[i]) for i in range(d)]
        a += [np.full(shape, frozen.F[i]) for i in range(d)]
        c = np.full(shape, frozen.gamma * consts.tau0 / 2.0)
        return drift, a, c
    x, pi = f.grid_points()
    dx, dpi = rhs_batch(ModelKind.VfEhrenfest, x, pi, field, consts)
    m = consts.m
    pi0 = np.sqrt(m * m + np.einsum("ni,ni->n", pi, pi))
    v = pi / pi0[:, None]
    B = field.B0[None, :] + (x - field.x0[None, :]) @ field.gradB
    F = ELEMENTARY_CHARGE * np.cross(v, B)
    gamma = pi0 / m
    drift = [dx[:, i].reshape(shape) for i in range(d)]
    drift += [dpi[:, i].reshape(shape) for i in range(d)]
    a = [v[:, i].reshape(shape) for i in range(d)]
    a += [F[:, i].reshape(shape) for i in range(d)]
    c = (gamma * consts.tau0 / 2.0).reshape(shape)
    return drift, a, c


def _check_cfl(f: PhaseSpaceScalarField, drift, a, c, dt: float) -> None:
    h = f.spacings
    adv_bound = math.inf
    for ax, u in enumerate(drift):
        umax = float(np.abs(u).max())
        if umax > 0.0:
            adv_bound = min(adv_bound, 0.5 * h[ax] / umax)
    amax2 = max(float((ar * ar).max()) for ar in a)
    cmax = float(c.max())
    diff_bound = math.inf
    if cmax * amax2 > 0.0:
        diff_bound = 0.25 * float((h * h).min()) / (2.0 * cmax * amax2)
    bound = min(adv_bound, diff_bound)
    if dt > bound:
        raise StepSizeError(f"dt = {dt!r} violates CFL bound {bound!r}", suggested_dt=0.5 * bound)


def _face_avg(arr: np.ndarray, axis: int) -> np.ndarray:
    lo = [slice(None)] * arr.ndim
    hi = [slice(None)] * arr.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    return 0.5 * (arr[tuple(lo)] + arr[tuple(hi)])


def _face_diff(arr: np.ndarray, axis: int, h: float) -> np.ndarray:
    lo = [slice(None)] * arr.ndim
    hi = [slice(None)] * arr.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    return (arr[tuple(hi)] - arr[tuple(lo)]) / h


def _div_from_faces(flux: np.ndarray, axis: int, h: float, out: np.ndarray) -> None:
    """out -= div(flux) along axis; boundary faces carry zero flux.

    `flux` holds the n-1 interior face values; cell i loses flux through its
    right face (index i) and gains through its left face (index i-1).
    """
    diff = np.zeros_like(out)
    sl = [slice(None)] * out.ndim
    sl[axis] = slice(0, out.shape[axis] - 1)
    diff[tuple(sl)] += flux
    sl[axis] = slice(1, out.shape[axis])
    diff[tuple(sl)] -= flux
    out -= diff / h


def fp_step(
    f: PhaseSpaceScalarField,
    field: FieldConfig,
    consts: ModelConstants,
    dt: float,
    frozen: FrozenCoefficients | None = None,
) -> PhaseSpaceScalarField:
    """Advance f0 one explicit step; raises StepSizeError on CFL violation."""
    drift, a, c = _coefficients(f, field, consts, frozen)
    return _fp_step_prepared(f, drift, a, c, dt)


def _fp_step_prepared(f, drift, a, c, dt) -> PhaseSpaceScalarField:
    _check_cfl(f, drift, a, c, dt)
    vals = f.values
    h = f.spacings
    naxes = 2 * f.dim
    rate = np.zeros_like(vals)

    # upwind advection, conservative donor-cell fluxes
    for ax in range(naxes):
        u_face = _face_avg(drift[ax], ax)
        lo = [slice(None)] * vals.ndim
        hi = [slice(None)] * vals.ndim
        lo[ax] = slice(None, -1)
        hi[ax] = slice(1, None)
        donor = np.where(u_face > 0.0, vals[tuple(lo)], vals[tuple(hi)])
        _div_from_faces(u_face * donor, ax, h[ax], rate)

    # rank-one diffusion: flux_j = c a_j (a . grad f) on faces
    grads = [np.gradient(vals, h[ax], axis=ax, edge_order=1) for ax in range(naxes)]
    for ax in range(naxes):
        along = _face_avg(a[ax], ax) * _face_diff(vals, ax, h[ax])
        cross = np.zeros_like(along)
        for k in range(naxes):
            if k != ax:
                cross += _face_avg(a[k] * grads[k], ax)
        flux = _face_avg(c, ax) * _face_avg(a[ax], ax) * (along + cross)
        _div_from_faces(-flux, ax, h[ax], rate)

    new_vals = vals + dt * rate
    clipped = 0.0
    neg = new_vals < 0.0
    if np.any(neg):
        clipped = float(-new_vals[neg].sum() * f.cell_volume)
        new_vals = np.where(neg, 0.0, new_vals)
    target = float(vals.sum())
    total = float(new_vals.sum())
    if total <= 0.0:
        raise BlowUpError("distribution collapsed to zero mass")
    new_vals *= target / total
    return PhaseSpaceScalarField(
        f.x_axes, f.pi_axes, new_vals, clipped_mass=f.clipped_mass + clipped
    )


def fp_run(
    f: PhaseSpaceScalarField,
    field: FieldConfig,
    consts: ModelConstants,
    dt: float,
    steps: int,
    frozen: FrozenCoefficients | None = None,
    record_every: int | None = None,
):
    """Evolve `steps` steps reusing the coefficient arrays (static fields).

    Returns (final field, history) where history is a list of
    (t, moments dict) sampled every `record_every` steps (always including
    the initial and final states) when record_every is set, else empty.
    """
    drift, a, c = _coefficients(f, field, consts, frozen)
    history = []
    if record_every:
        history.append((0.0, moments(f)))
    cur = f
    for n in range(1, steps + 1):
        cur = _fp_step_prepared(cur, drift, a, c, dt)
        if record_every and (n % record_every == 0 or n == steps):
            history.append((n * dt, moments(cur)))
    return cur, history


@dataclass
class Ensemble:
    """Uniform-weight particle ensemble with deterministic noise stream."""

    x: np.ndarray
    pi: np.ndarray
    seed: int
    m: float = 1.0
    t: float = 0.0

    def __post_init__(self) -> None:
        self.x = np.atleast_2d(np.asarray(self.x, dtype=float))
        self.pi = np.atleast_2d(np.asarray(self.pi, dtype=float))
        if self.x.shape != self.pi.shape or self.x.shape[1] != 3:
            raise DomainError("x and pi must both have shape (N, 3)")

    @property
    def size(self) -> int:
        return self.x.shape[0]

    @classmethod
    def from_states(cls, states, seed: int) -> "Ensemble":
        if not states:
            raise DomainError("empty ensemble")
        return cls(
            np.array([s.x for s in states]),
            np.array([s.pi for s in states]),
            seed=seed,
            m=states[0].m,
            t=states[0].t,
        )

    @classmethod
    def gaussian(cls, n: int, mean_x, mean_pi, sigma_x, sigma_pi, seed: int, m: float = 1.0) -> "Ensemble":
        rng = np.random.default_rng(np.random.Philox(key=seed))
        x = np.asarray(mean_x, dtype=float) + rng.standard_normal((n, 3)) * np.asarray(sigma_x, dtype=float)
        pi = np.asarray(mean_pi, dtype=float) + rng.standard_normal((n, 3)) * np.asarray(sigma_pi, dtype=float)
        return cls(x, pi, seed=seed, m=m)

    def states(self):
        return [ParticleState(self.t, self.x[i], self.pi[i], self.m) for i in range(self.size)]


def _noise(seed: int, step: int, n: int) -> np.ndarray:
    """Standard normals for one step, keyed by (seed, step): batch-invariant."""
    bits = np.random.Philox(key=seed, counter=[0, 0, step, 0])
    return np.random.Generator(bits).standard_normal(n)


def langevin_ensemble(
    ens: Ensemble,
    field: FieldConfig,
    consts: ModelConstants,
    dt: float,
    steps: int,
    frozen: FrozenCoefficients | None = None,
    record_every: int | None = None,
):
    """Euler-Maruyama evolution of the ensemble; returns (Ensemble, history)."""
    if dt <= 0.0 or steps < 1:
        raise DomainError("dt must be positive and steps >= 1")
    x = ens.x.copy()
    pi = ens.pi.copy()
    m = ens.m
    tau0 = consts.tau0
    history = []
    if record_every:
        history.append((ens.t, moments(Ensemble(x, pi, ens.seed, m, ens.t))))
    for n in range(1, steps + 1):
        if frozen is not None:
            drift_x = np.broadcast_to(frozen.v, x.shape)
            drift_pi = np.broadcast_to(frozen.F, x.shape)
            v = drift_x
            F = drift_pi
            gamma = frozen.gamma
            amp = math.sqrt(gamma * tau0)
        else:
            drift_x, drift_pi = rhs_batch(ModelKind.VfEhrenfest, x, pi, field, consts)
            pi0 = np.sqrt(m * m + np.einsum("ni,ni->n", pi, pi))
            v = pi / pi0[:, None]
            B = field.B0[None, :] + (x - field.x0[None, :]) @ field.gradB
            F = ELEMENTARY_CHARGE * np.cross(v, B)
            amp = np.sqrt(pi0 / m * tau0)[:, None]
        dw = (_noise(ens.seed, n, ens.size) * math.sqrt(dt))[:, None]
        x = x + drift_x * dt + amp * v * dw
        pi = pi + drift_pi * dt + amp * F * dw
        if not np.all(np.isfinite(pi)) or not np.all(np.isfinite(x)):
            bad = int(np.argwhere(~np.isfinite(pi).all(axis=1))[0, 0])
            raise BlowUpError(f"particle {bad} left the physical region at step {n}")
        if record_every and (n % record_every == 0 or n == steps):
            history.append((ens.t + n * dt, moments(Ensemble(x, pi, ens.seed, m))))
    out = Ensemble(x, pi, seed=ens.seed, m=m, t=ens.t + steps * dt)
    return out, history


def moments(obj) -> dict:
    """First and second central moments over embedded (x, pi) in R^6."""
    if isinstance(obj, Ensemble):
        if obj.size == 0:
            raise DomainError("empty ensemble")
        z = np.hstack([obj.x, obj.pi])
        mean = z.mean(axis=0)
        zc = z - mean
        cov = zc.T @ zc / obj.size
    elif isinstance(obj, PhaseSpaceScalarField):
        d = obj.dim
        x, pi = obj.grid_points()
        w = obj.values.ravel() * obj.cell_volume
        wsum = w.sum()
        z = np.hstack([x, pi])
        mean = (w[:, None] * z).sum(axis=0) / wsum
        zc = z - mean
        cov = (w[:, None] * zc).T @ zc / wsum
    else:
        raise DomainError(f"cannot take moments of {type(obj)!r}")
    return {"mean_x": mean[:3], "mean_pi": mean[3:], "cov": cov}


def estimate_ratios(
    E_over_Ecr: float, gamma: float, delta_p_over_m: float, consts: ModelConstants
) -> dict:
    """Order-of-magnitude diffusion/friction ratios, no hidden O(1) factors.

    Dq_over_Dc  = gamma^3 E/E_cr     (quantum vs classical momentum diffusion)
    frad_over_F = alpha gamma^2 E/E_cr   (friction vs background force)
    RR_over_Diff = m / (gamma delta_p)   (friction term vs diffusion term)
    """
    if E_over_Ecr <= 0.0 or gamma <= 0.0 or delta_p_over_m <= 0.0:
        raise DomainError("all ratio-estimate inputs must be positive")
    return {
        "Dq_over_Dc": gamma**3 * E_over_Ecr,
        "frad_over_F": consts.alpha * gamma**2 * E_over_Ecr,
        "RR_over_Diff": 1.0 / (gamma * delta_p_over_m),
    }
