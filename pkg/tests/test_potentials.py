import json

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from gplimit import potentials as P


def mass_by_quadrature(pot):
    val, _ = quad(lambda r: P.evaluate(pot, r)[()] * r * r, 0.0, pot.R0, limit=200)
    return 4.0 * np.pi * val


def test_square_well_eval():
    w = P.square_well(2.0, 1.0)
    assert P.evaluate(w, 0.5) == 2.0
    assert P.evaluate(w, 1.5) == 0.0


def test_smooth_bump_peak_and_continuity():
    b = P.smooth_bump(1.0, 1.0)
    assert_allclose(P.evaluate(b, 0.0), 1.0)  # exp(1 - 1) at the center
    r = np.linspace(0.9, 1.1, 2001)
    vals = P.evaluate(b, r)
    assert np.all(np.diff(r) > 0)
    assert np.max(np.abs(np.diff(vals))) < 5e-3  # continuous across r = R0
    assert np.all(vals[r >= 1.0] == 0.0)


def test_eval_rejects_hard_core():
    hc = P.hard_core(1.0)
    with pytest.raises(P.HardCoreError):
        P.evaluate(hc, 0.5)


def test_scale_gp_identity_and_example():
    w = P.square_well(2.0, 1.0)
    same = P.scale_gp(w, 1)
    assert same.w0 == w.w0 and same.R0 == w.R0
    scaled = P.scale_gp(w, 10)
    assert_allclose(scaled.w0, 200.0)
    assert_allclose(scaled.R0, 0.1)


def test_scale_gp_mass_law():
    w = P.smooth_bump(1.5, 0.8)
    m = mass_by_quadrature(w)
    m5 = mass_by_quadrature(P.scale_gp(w, 5))
    assert_allclose(m5, m / 5.0, rtol=1e-8)


def test_scale_beta_consistency():
    w = P.square_well(2.0, 1.0)
    b1 = P.scale_beta(w, 10, 1.0)
    g = P.scale_gp(w, 10)
    assert b1.w0 == g.w0 and b1.R0 == g.R0
    b0 = P.scale_beta(w, 4, 0.0)
    assert_allclose(b0.w0, 0.5)
    assert_allclose(b0.R0, 1.0)


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0])
def test_mass_law_every_beta(beta):
    w = P.smooth_bump(2.0, 1.0)
    m = mass_by_quadrature(w)
    mN = mass_by_quadrature(P.scale_beta(w, 8, beta))
    assert_allclose(mN, m / 8.0, atol=1e-8 * m)


def test_scaling_semigroup():
    w = P.square_well(3.0, 1.2)
    twice = P.scale_gp(P.scale_gp(w, 3), 5)
    assert_allclose(twice.R0, 1.2 / 15.0)
    assert_allclose(twice.w0, 3.0 * 15.0**2)


def test_potentials_nonnegative_and_compact():
    pots = [P.square_well(2.0, 1.0), P.smooth_bump(1.0, 0.7),
            P.custom_samples([(0.0, 1.0), (0.5, 0.3), (1.0, 0.0)])]
    r = np.linspace(0.0, 3.0, 400)
    for pot in pots:
        vals = P.evaluate(pot, r)
        assert np.all(vals >= 0.0)
        assert np.all(vals[r > pot.R0] == 0.0)


def test_custom_samples_interpolation():
    pot = P.custom_samples([(0.0, 1.0), (1.0, 0.5), (2.0, 0.0)])
    assert_allclose(P.evaluate(pot, 0.5), 0.75)
    assert P.evaluate(pot, 2.5) == 0.0
    assert pot.R0 == 2.0


def test_theta_plateaus():
    th = P.make_theta(0.4)
    assert th(0.2) == 0.0   # |x| = R/2
    assert th(1.2) == 1.0   # |x| = 3R
    mid = th(np.linspace(0.4, 0.8, 101))
    assert np.all(mid >= 0.0) and np.all(mid <= 1.0)
    assert np.all(np.diff(mid) >= 0.0)


def test_annulus_mass_and_support():
    U = P.make_U(0.1, 0.7)
    val, _ = quad(lambda r: U(r)[()] * r * r, 0.05, 0.1, limit=200)
    assert_allclose(4.0 * np.pi * val, 4.0 * np.pi * 0.7, rtol=1e-8)
    assert U(0.025) == 0.0  # |x| = R/4
    assert U(0.2) == 0.0    # |x| = 2R
    # sup U_R <= c a R^-3 with a profile constant c
    c = U.sup_value * 0.1**3 / 0.7
    assert 0.0 < c < 100.0


def test_make_rejects_bad_scales():
    with pytest.raises(ValueError):
        P.make_theta(0.0)
    with pytest.raises(ValueError):
        P.make_U(0.1, -1.0)


def test_json_round_trip():
    pots = [P.square_well(2.0, 1.0), P.hard_core(0.5),
            P.custom_samples([(0.0, 1.0), (1.0, 0.0)])]
    for pot in pots:
        back = P.RadialPotential.from_json(pot.to_json())
        assert back == pot
        json.loads(pot.to_json())  # valid JSON document
