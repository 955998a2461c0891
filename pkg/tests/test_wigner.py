import math

import numpy as np
import pytest

from lindrad import wigner as wg
from lindrad.dirac import GAMMA0, Momentum3
from lindrad.dynamics import FieldConfig
from lindrad.errors import DomainError, ResolutionError


def gaussian_packet(x, x0=0.7, p0=1.3, s=1.0):
    dx = x[1] - x[0]
    psi = np.exp(-((x - x0) ** 2) / (4.0 * s**2) + 1j * p0 * x)
    return psi / math.sqrt(float((np.abs(psi) ** 2).sum() * dx))


def momentum_density(psi, x, pi_axis):
    dx = x[1] - x[0]
    psit = dx / math.sqrt(2.0 * math.pi) * (
        psi[None, :] * np.exp(-1j * pi_axis[:, None] * x[None, :])
    ).sum(axis=1)
    return np.abs(psit) ** 2


def test_gaussian_marginals_and_exact_oracle():
    x = np.linspace(-12.0, 12.0, 256)
    psi = gaussian_packet(x)
    W = wg.wigner_transform(psi, x)
    assert W.normalization() == pytest.approx(1.0, abs=1e-10)
    assert W.hermiticity_defect() < 1e-12
    assert np.abs(W.marginal_x() - np.abs(psi) ** 2).max() < 1e-8
    assert np.abs(W.marginal_pi() - momentum_density(psi, x, W.pi_axis)).max() < 1e-8
    Xg, Pg = np.meshgrid(x, W.pi_axis, indexing="ij")
    exact = 1.0 / math.pi * np.exp(-((Xg - 0.7) ** 2) / 2.0 - 2.0 * (Pg - 1.3) ** 2)
    assert np.abs(W.w0 - exact).max() < 1e-10


def test_two_gaussian_marginals():
    x = np.linspace(-14.0, 14.0, 300)
    dx = x[1] - x[0]
    psi = np.exp(-((x - 3.0) ** 2) / (4.0 * 0.8**2)) + np.exp(
        -((x + 3.0) ** 2) / (4.0 * 0.8**2) + 2.0j * x
    )
    psi = psi / math.sqrt(float((np.abs(psi) ** 2).sum() * dx))
    W = wg.wigner_transform(psi, x)
    assert np.abs(W.marginal_x() - np.abs(psi) ** 2).max() < 1e-6
    assert np.abs(W.marginal_pi() - momentum_density(psi, x, W.pi_axis)).max() < 1e-6


def test_constant_gauge_shift_cancels_wilson_line():
    x = np.linspace(-12.0, 12.0, 256)
    psi = gaussian_packet(x)
    W0 = wg.wigner_transform(psi, x)
    A0 = 0.8
    psi_gauge = psi * np.exp(1j * A0 * x)  # e = 1: psi -> e^{+ie chi} psi, chi = A0 x
    WA = wg.wigner_transform(psi_gauge, x, A=lambda z: A0 * np.ones_like(z))
    assert np.abs(WA.w0 - W0.w0).max() < 1e-10


def test_spinor_product_state_spin_trace():
    # psi(x) = phi(x) chi with unit spinor chi: w0 equals the scalar Wigner
    x = np.linspace(-12.0, 12.0, 256)
    phi = gaussian_packet(x)
    chi = np.array([0.5, 0.5j, -0.5, 0.5], dtype=complex)
    spinor = phi[:, None] * chi[None, :]
    W_spinor = wg.wigner_transform(spinor, x)
    W_scalar = wg.wigner_transform(phi, x)
    assert np.abs(W_spinor.w0 - W_scalar.w0).max() < 1e-12


def test_edge_support_raises():
    x = np.linspace(-3.0, 3.0, 64)
    psi = gaussian_packet(x, x0=2.8, s=1.0)
    with pytest.raises(ResolutionError):
        wg.wigner_transform(psi, x)


def test_canonical_pair_commutator():
    xs = wg.coordinate_symbol(1)
    ps = wg.momentum_symbol(1)
    for hbar in (1.0, 0.3):
        br = wg.moyal_bracket(xs, ps, None, hbar=hbar)
        assert br.value(np.array([1.0, 2.0, 3.0]), np.array([0.1, 0.2, 0.3])) == pytest.approx(1.0)
    mismatched = wg.moyal_bracket(wg.coordinate_symbol(0), wg.momentum_symbol(2), None)
    assert mismatched.value(np.zeros(3), np.zeros(3)) == 0.0


def test_magnetic_momentum_commutator():
    B = FieldConfig(np.array([0.4, -0.7, 1.1]))
    for (a, b, r) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        br = wg.moyal_bracket(wg.momentum_symbol(a), wg.momentum_symbol(b), B, hbar=0.9)
        assert br.value(np.zeros(3), np.zeros(3)) == pytest.approx(B.B0[r], abs=1e-14)
        rev = wg.moyal_bracket(wg.momentum_symbol(b), wg.momentum_symbol(a), B, hbar=0.9)
        assert rev.value(np.zeros(3), np.zeros(3)) == pytest.approx(-B.B0[r], abs=1e-14)


def cubic_symbols():
    f3 = wg.PhaseSpaceSymbol(
        lambda x, pi: x[0] ** 3,
        tuple((lambda x, pi, j=j: 3.0 * x[0] ** 2 if j == 0 else 0.0) for j in range(3)),
        tuple((lambda x, pi: 0.0) for _ in range(3)),
    )
    g3 = wg.PhaseSpaceSymbol(
        lambda x, pi: pi[0] ** 3,
        tuple((lambda x, pi: 0.0) for _ in range(3)),
        tuple((lambda x, pi, j=j: 3.0 * pi[0] ** 2 if j == 0 else 0.0) for j in range(3)),
    )
    return f3, g3


def test_poisson_limit_richardson():
    # full bracket of (x^3, pi^3) is 9 x^2 pi^2 - (3/2) hbar^2, so the
    # first-order truncation error is exactly (3/2) hbar^2: ratio 4 on halving
    f3, g3 = cubic_symbols()
    pt = (np.array([1.2, 0.0, 0.0]), np.array([0.7, 0.0, 0.0]))
    errs = []
    for hb in (0.5, 0.25):
        got = wg.moyal_bracket(f3, g3, None, hbar=hb).value(*pt)
        exact = 9.0 * pt[0][0] ** 2 * pt[1][0] ** 2 - 1.5 * hb**2
        errs.append(abs(got.real - exact))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    # and the bracket converges to the Poisson bracket as hbar -> 0
    got = wg.moyal_bracket(f3, g3, None, hbar=1e-6).value(*pt)
    assert got.real == pytest.approx(9.0 * pt[0][0] ** 2 * pt[1][0] ** 2, rel=1e-10)


def test_star_product_conjugation_and_bilinearity():
    f3, g3 = cubic_symbols()
    B = FieldConfig(np.array([0.0, 0.0, 0.6]))
    pt = (np.array([0.4, 0.1, -0.2]), np.array([0.9, -0.3, 0.5]))
    fg = wg.moyal_star(f3, g3, B, hbar=0.8).value(*pt)
    gf = wg.moyal_star(g3, f3, B, hbar=0.8).value(*pt)
    # real scalar symbols: (f*g)^* = g*f
    assert np.conj(fg) == pytest.approx(gf, abs=1e-14)
    # bilinearity in the first argument
    two_f = wg.PhaseSpaceSymbol(
        lambda x, pi: 2.0 * f3.value(x, pi),
        tuple((lambda x, pi, j=j: 2.0 * f3.grad_x[j](x, pi)) for j in range(3)),
        tuple((lambda x, pi, j=j: 2.0 * f3.grad_pi[j](x, pi)) for j in range(3)),
    )
    assert wg.moyal_star(two_f, g3, B, hbar=0.8).value(*pt) == pytest.approx(2.0 * fg)


def test_order_zero_star_and_missing_derivatives():
    f3, g3 = cubic_symbols()
    pt = (np.array([1.1, 0.0, 0.0]), np.array([0.5, 0.0, 0.0]))
    prod = wg.moyal_star(f3, g3, None, hbar=1.0, order=0).value(*pt)
    assert prod == pytest.approx(1.1**3 * 0.5**3)
    bare = wg.PhaseSpaceSymbol(lambda x, pi: x[0])
    with pytest.raises(DomainError):
        wg.moyal_star(bare, g3, None, hbar=1.0, order=1)
    with pytest.raises(DomainError):
        wg.moyal_star(f3, g3, None, hbar=1.0, order=2)


def test_symbol_derivative_spot_check():
    f3, _ = cubic_symbols()
    pt = (np.array([0.9, 0.0, 0.0]), np.array([0.2, 0.0, 0.0]))
    h = 1e-6
    xp = pt[0].copy()
    xp[0] += h
    xm = pt[0].copy()
    xm[0] -= h
    fd = (f3.value(xp, pt[1]) - f3.value(xm, pt[1])) / (2.0 * h)
    assert f3.grad_x[0](*pt) == pytest.approx(fd, rel=1e-8)


def test_ps_fw_hamiltonian():
    B = FieldConfig(np.array([0.0, 0.0, 2e-3]))
    m = 1.0
    H = wg.ps_fw_hamiltonian(np.zeros(3), np.zeros(3), B, m, hbar=1.0)
    ev = np.sort(np.linalg.eigvalsh(H))
    mu = 1.0 * 2e-3 / (2.0 * m)
    assert np.allclose(ev, [-(m + mu), -(m - mu), m - mu, m + mu], atol=1e-14)
    H0 = wg.ps_fw_hamiltonian(np.array([0.3, 0.1, -0.2]), np.zeros(3), FieldConfig(np.zeros(3)), m)
    pi0 = math.sqrt(1.0 + 0.3**2 + 0.1**2 + 0.2**2)
    assert np.abs(H0 - pi0 * GAMMA0).max() < 1e-14
    assert np.abs(H @ GAMMA0 - GAMMA0 @ H).max() < 1e-16


def test_ps_projectors():
    rng = np.random.default_rng(14)
    m = 1.0
    for _ in range(1000):
        p = rng.normal(size=3) * 2.0
        plus, minus, h_a = wg.ps_projectors(p, m)
        pi0 = math.sqrt(p @ p + m * m)
        assert np.abs(plus + minus - np.eye(4)).max() < 1e-14
        assert np.abs(plus @ plus - plus).max() < 1e-12
        assert np.abs(h_a @ plus - pi0 * plus).max() < 1e-12
        ev = np.sort(np.linalg.eigvalsh(h_a))
        assert np.allclose(ev, [-pi0, -pi0, pi0, pi0], atol=1e-12)
    plus, _, _ = wg.ps_projectors(np.zeros(3), m)
    assert np.abs(plus - np.diag([1.0, 1.0, 0.0, 0.0])).max() < 1e-15
    plus_m3 = wg.ps_projectors(Momentum3(np.zeros(3), m))[0]
    assert np.abs(plus_m3 - plus).max() == 0.0
