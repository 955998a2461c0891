import math

import numpy as np
import pytest

from lindrad import dynamics as dyn
from lindrad import kinetics as kin
from lindrad.dynamics import FieldConfig, ModelKind, ParticleState
from lindrad.errors import DomainError, StepSizeError
from lindrad.units import derived_constants

FIELD_FREE = FieldConfig(np.zeros(3))


def frozen_setup(tau0=2.0, F=0.6, gamma_f=2.0):
    consts = derived_constants(alpha=1.5 * tau0, m=1.0)
    v = math.sqrt(1.0 - 1.0 / gamma_f**2)
    frozen = kin.FrozenCoefficients(F=[F, 0, 0], v=[v, 0, 0], gamma=gamma_f)
    return consts, frozen, v, F


def small_gaussian():
    x_ax = np.linspace(-2.0, 2.0, 81)
    pi_ax = np.linspace(-1.5, 1.5, 61)
    return kin.PhaseSpaceScalarField.gaussian([x_ax], [pi_ax], [0.0], [0.0], [0.3], [0.2])


def test_gaussian_field_normalized():
    f = small_gaussian()
    assert f.mass == pytest.approx(1.0, abs=1e-12)
    f.validate()


def test_field_shape_checks():
    with pytest.raises(DomainError):
        kin.PhaseSpaceScalarField((np.linspace(0, 1, 8),), (), np.zeros(8))
    with pytest.raises(DomainError):
        kin.PhaseSpaceScalarField(
            (np.linspace(0, 1, 8),), (np.linspace(0, 1, 4),), np.zeros((8, 5))
        )


def test_cfl_rejection_with_suggestion():
    consts, frozen, _, _ = frozen_setup()
    f = small_gaussian()
    with pytest.raises(StepSizeError) as exc:
        kin.fp_step(f, FIELD_FREE, consts, dt=1.0, frozen=frozen)
    assert 0.0 < exc.value.suggested_dt < 1.0


def test_fp_mass_conserved_and_positive():
    consts, frozen, _, _ = frozen_setup()
    f = small_gaussian()
    dt = 0.5 * kin_suggested_dt(f, consts, frozen)
    for _ in range(50):
        f = kin.fp_step(f, FIELD_FREE, consts, dt, frozen=frozen)
        assert abs(f.mass - 1.0) < 1e-10
        assert f.values.min() >= 0.0
    assert f.clipped_mass < 1e-6


def kin_suggested_dt(f, consts, frozen):
    try:
        kin.fp_step(f, FIELD_FREE, consts, dt=1e9, frozen=frozen)
    except StepSizeError as exc:
        return exc.suggested_dt
    raise AssertionError("expected CFL rejection")


def test_frozen_variance_growth():
    consts, frozen, v, F = frozen_setup()
    gamma_f, tau0 = frozen.gamma, consts.tau0
    x_ax = np.arange(-3.0, 3.0 + 1e-12, 0.035)
    pi_ax = np.arange(-2.0, 2.0 + 1e-12, 0.024)
    f0 = kin.PhaseSpaceScalarField.gaussian([x_ax], [pi_ax], [0.0], [0.0], [0.35], [0.22])
    D = gamma_f * tau0 / 2.0
    dt = 0.9 * 0.25 * 0.024**2 / (2.0 * D * max(F * F, v * v))
    steps = int(0.1 / dt)
    _, hist = kin.fp_run(f0, FIELD_FREE, consts, dt, steps, frozen=frozen, record_every=steps)
    m0, m1 = hist[0][1], hist[-1][1]
    T = hist[-1][0]
    assert (m1["cov"][3, 3] - m0["cov"][3, 3]) / T == pytest.approx(gamma_f * tau0 * F * F, rel=0.02)
    assert (m1["cov"][0, 3] - m0["cov"][0, 3]) / T == pytest.approx(gamma_f * tau0 * v * F, rel=0.02)
    assert (m1["mean_pi"][0] - m0["mean_pi"][0]) / T == pytest.approx(F, rel=1e-3)


def test_rank_one_diffusion_annihilates_transverse_ramp():
    # an affine profile with gradient perpendicular to (v, F) produces zero
    # diffusion flux to round-off; drift is zeroed to isolate the diffusion
    consts, frozen, v, F = frozen_setup()
    x_ax = np.linspace(-2.0, 2.0, 41)
    pi_ax = np.linspace(-1.5, 1.5, 31)
    X, P = np.meshgrid(x_ax, pi_ax, indexing="ij")
    base = 10.0 - F * X + v * P  # gradient (-F, v) perpendicular to (v, F)
    f = kin.PhaseSpaceScalarField((x_ax,), (pi_ax,), base)
    f.values /= f.mass
    drift, a, c = kin._coefficients(f, FIELD_FREE, consts, frozen)
    drift = [np.zeros_like(d) for d in drift]
    out = kin._fp_step_prepared(f, drift, a, c, 1e-4)
    assert np.abs(out.values - f.values).max() < 1e-13 * np.abs(f.values).max()


def test_advection_tracks_lorentz_characteristics_2d():
    # 2x+2pi grid, uniform B_z: the packet mean follows the cyclotron ODE
    consts = derived_constants(alpha=1e-12, m=1.0)  # tau0 negligible
    field = FieldConfig(np.array([0.0, 0.0, 3.0]))
    x1 = np.arange(-0.55, 0.80, 0.05)
    x2 = np.arange(-0.45, 0.70, 0.05)
    p1 = np.arange(0.4, 3.45, 0.15)
    p2 = np.arange(-1.4, 2.05, 0.15)
    f = kin.PhaseSpaceScalarField.gaussian(
        [x1, x2], [p1, p2], [0.0, 0.0], [2.0, 0.0], [0.1, 0.1], [0.25, 0.25]
    )
    t_end = 0.3
    dt = 0.012
    f1, hist = kin.fp_run(f, field, consts, dt, int(t_end / dt), record_every=int(t_end / dt))
    mom = hist[-1][1]
    s0 = ParticleState(0.0, np.zeros(3), np.array([2.0, 0.0, 0.0]), 1.0)
    states = dyn.integrate(ModelKind.Lorentz, s0, field, consts, t_end / 400, 400)
    ref = states[-1]
    assert np.abs(mom["mean_x"][:2] - ref.x[:2]).max() < 1.5 * 0.05
    assert np.abs(mom["mean_pi"][:2] - ref.pi[:2]).max() < 1.5 * 0.15


def test_langevin_zero_noise_matches_euler_lorentz():
    consts = derived_constants(alpha=1e-300, m=1.0)
    field = FieldConfig(np.array([0.0, 0.0, 2.0]))
    ens = kin.Ensemble(np.zeros((3, 3)), np.tile([1.5, 0.0, 0.3], (3, 1)), seed=5)
    dt, steps = 0.01, 200
    out, _ = kin.langevin_ensemble(ens, field, consts, dt, steps)
    x = ens.x.copy()
    pi = ens.pi.copy()
    for _ in range(steps):
        dx, dpi = dyn.rhs_batch(ModelKind.VfEhrenfest, x, pi, field, consts)
        x = x + dx * dt
        pi = pi + dpi * dt
    assert np.abs(out.x - x).max() < 1e-12
    assert np.abs(out.pi - pi).max() < 1e-12


def test_langevin_determinism_and_seed_sensitivity():
    consts, frozen, _, _ = frozen_setup()
    ens = kin.Ensemble.gaussian(500, [0, 0, 0], [0, 0, 0], [0.3, 0, 0], [0.2, 0, 0], seed=11)
    a, _ = kin.langevin_ensemble(ens, FIELD_FREE, consts, 1e-3, 50, frozen=frozen)
    b, _ = kin.langevin_ensemble(ens, FIELD_FREE, consts, 1e-3, 50, frozen=frozen)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.pi, b.pi)
    ens2 = kin.Ensemble(ens.x, ens.pi, seed=12)
    c, _ = kin.langevin_ensemble(ens2, FIELD_FREE, consts, 1e-3, 50, frozen=frozen)
    assert not np.array_equal(a.pi, c.pi)


def test_langevin_variance_matches_frozen_law():
    consts, frozen, v, F = frozen_setup()
    gamma_f, tau0 = frozen.gamma, consts.tau0
    n = 100_000
    ens = kin.Ensemble.gaussian(n, [0, 0, 0], [0, 0, 0], [0.35, 0, 0], [0.22, 0, 0], seed=42)
    t_end = 0.12
    steps = 60
    _, hist = kin.langevin_ensemble(
        ens, FIELD_FREE, consts, t_end / steps, steps, frozen=frozen, record_every=steps
    )
    m0, m1 = hist[0][1], hist[-1][1]
    T = hist[-1][0]
    slope = (m1["cov"][3, 3] - m0["cov"][3, 3]) / T
    se = m1["cov"][3, 3] * math.sqrt(2.0 / n) / T
    assert abs(slope - gamma_f * tau0 * F * F) < 3.0 * se


def test_moments_basics():
    f = small_gaussian()
    mom = kin.moments(f)
    assert np.abs(mom["mean_x"]).max() < 1e-10
    assert mom["cov"][0, 0] == pytest.approx(0.3**2, rel=0.01)
    assert mom["cov"][3, 3] == pytest.approx(0.2**2, rel=0.01)
    assert abs(mom["cov"][0, 3]) < 1e-6
    with pytest.raises(DomainError):
        kin.moments(42)
    with pytest.raises(DomainError):
        kin.Ensemble.from_states([], seed=0)


def test_estimate_ratios():
    consts = derived_constants()
    r = kin.estimate_ratios(1e-3, 10.0, 1.0, consts)
    assert r["Dq_over_Dc"] == pytest.approx(1.0, abs=1e-15)
    assert r["frad_over_F"] == pytest.approx(consts.alpha * 0.1, rel=1e-15)
    assert r["RR_over_Diff"] == pytest.approx(0.1, rel=1e-15)
    with pytest.raises(DomainError):
        kin.estimate_ratios(-1.0, 10.0, 1.0, consts)


def test_three_plus_three_dimensional_smoke():
    # 3x+3pi supported for tiny grids: mass conserved, moments sane
    consts = derived_constants(alpha=0.15, m=1.0)
    axes_x = [np.linspace(-1.0, 1.0, 7)] * 3
    axes_pi = [np.linspace(-0.8, 0.8, 7)] * 3
    f = kin.PhaseSpaceScalarField.gaussian(axes_x, axes_pi, [0.0] * 3, [0.0] * 3, [0.3] * 3, [0.25] * 3)
    field = FieldConfig(np.array([0.0, 0.0, 0.5]))
    f2 = kin.fp_step(f, field, consts, dt=5e-3)
    assert abs(f2.mass - 1.0) < 1e-10
    mom = kin.moments(f2)
    assert mom["cov"].shape == (6, 6)
    assert np.abs(mom["mean_x"]).max() < 0.05
