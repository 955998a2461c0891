import math

import numpy as np
import pytest

from lindrad.units import ModelConstants, derived_constants


def test_tau0_sigma_reference_values():
    c = derived_constants(alpha=1.0 / 137.036, m=1.0)
    assert c.tau0 == pytest.approx(4.8649e-3, rel=1e-4)
    assert c.sigma == pytest.approx(1.52836e-2, rel=1e-4)


def test_definitional_values():
    c = derived_constants(alpha=1.0, m=2.0)
    assert c.lambda_bar == 0.5
    assert c.sigma_minus == pytest.approx(4.0 / 3.0, rel=1e-15)
    assert c.E_cr == pytest.approx(4.0, rel=1e-15)


def test_sigma_ratio_identity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        alpha = rng.uniform(1e-4, 2.0)
        m = rng.uniform(0.1, 10.0)
        c = derived_constants(alpha, m)
        assert c.sigma / c.sigma_minus == pytest.approx(math.pi * c.lambda_bar, rel=1e-12)


def test_mass_scaling():
    a = derived_constants(0.3, 1.0)
    b = derived_constants(0.3, 5.0)
    assert b.tau0 == pytest.approx(a.tau0 / 5.0, rel=1e-14)
    assert b.sigma_minus == pytest.approx(5.0 * a.sigma_minus, rel=1e-14)
    assert b.sigma == a.sigma


@pytest.mark.parametrize("alpha,m", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_rejects_nonpositive(alpha, m):
    with pytest.raises(ValueError):
        derived_constants(alpha, m)


def test_type_invariant_enforced():
    with pytest.raises(ValueError):
        ModelConstants(alpha=0.1, m=1.0, lambda_bar=1.0, tau0=-1.0, sigma=0.1, sigma_minus=0.1, E_cr=1.0)
