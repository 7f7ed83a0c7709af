import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from isochrone import closed_forms as cf
from isochrone import orbits
from isochrone.errors import BranchError, EnergySign, GaugeDomain, NoPRO, OrderError
from isochrone.potentials import bounded, finite_harmonic, harmonic, henon, kepler


def test_tau_examples():
    assert cf.tau_r_analytic(kepler(1), -0.5) == pytest.approx(2 * math.pi)
    assert cf.tau_r_analytic(henon(1, 1, 0.25), -0.25) == pytest.approx(2 * math.pi)
    assert cf.tau_r_analytic(harmonic(4), 123.0) == pytest.approx(math.pi / 4)
    with pytest.raises(EnergySign):
        cf.tau_r_analytic(kepler(1), 0.2)
    with pytest.raises(EnergySign):
        cf.tau_r_analytic(bounded(1, 1), -0.2)


def test_n_phi_examples():
    assert cf.n_phi_analytic(bounded(1, 1), 2.0) == pytest.approx(0.5 - 1 / (2 * math.sqrt(2)))
    assert cf.n_phi_analytic(bounded(1, 1), 2.0) == pytest.approx(0.146447, abs=1e-6)
    assert cf.n_phi_analytic(harmonic(1, lam=1.0), 1.0) == pytest.approx(0.353553, abs=1e-6)
    assert cf.n_phi_analytic(kepler(3), 0.7) == 1.0
    with pytest.raises(GaugeDomain):
        cf.n_phi_analytic(kepler(1, lam=-1.0), 0.5)


def test_action_examples():
    assert cf.radial_action_analytic(kepler(1), -0.5, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert cf.radial_action_analytic(harmonic(1), 2.0, 1.0) == pytest.approx(0.5)
    he = cf.radial_action_analytic(henon(1, 1), -0.25, 0.5)
    assert he == pytest.approx(0.13343715, abs=1e-8)
    assert he == pytest.approx(orbits.radial_action_quad(henon(1, 1), -0.25, 0.5), rel=1e-8)
    with pytest.raises(NoPRO):
        cf.radial_action_analytic(kepler(1), -0.5, 1.5)


@pytest.mark.parametrize("psi,xi,L", [
    (kepler(1), -0.4, 0.6), (harmonic(1.3), 2.0, 0.7), (henon(1, 1), -0.25, 0.5),
    (bounded(1, 1), 0.75, 0.2), (henon(0.7, 2.0, 0.3, 0.4), None, 0.6),
])
def test_action_derivatives(psi, xi, L):
    if xi is None:
        xi = _above_circular(psi, L, 0.4)
    h = 1e-6
    dxi = (cf.radial_action_analytic(psi, xi + h, L) - cf.radial_action_analytic(psi, xi - h, L)) / (2 * h)
    dL = (cf.radial_action_analytic(psi, xi, L + h) - cf.radial_action_analytic(psi, xi, L - h)) / (2 * h)
    assert dxi == pytest.approx(cf.tau_r_analytic(psi, xi) / (2 * math.pi), abs=1e-7)
    assert -dL == pytest.approx(cf.n_phi_analytic(psi, L), abs=1e-7)


def _above_circular(psi, L, frac):
    xi_c = orbits.circular_orbit(psi, L)[1]
    return xi_c + frac * (psi.psi_inf - xi_c)


def _quad(u1, u2, f):
    return integrate.quad(f, u1, u2, weight="alg", wvar=(0.5, 0.5), epsabs=1e-14, epsrel=1e-13)[0]


def test_I1():
    assert cf.integral_I1(1, 1) == 0
    assert cf.integral_I1(1, 4) == pytest.approx(math.pi / 2)
    assert cf.integral_I1(0.3, 2.7) == pytest.approx(_quad(0.3, 2.7, lambda u: 1 / u), abs=1e-10)
    with pytest.raises(OrderError):
        cf.integral_I1(2, 1)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 10), st.floats(0.0, 10), st.floats(0.1, 10))
def test_I1_homogeneous(u1, du, t):
    u2 = u1 + du
    assert cf.integral_I1(t * u1, t * u2) == pytest.approx(t * cf.integral_I1(u1, u2), rel=1e-12, abs=1e-12)


def test_I2():
    f = lambda u: (u - 1) / (u * (u - 2))
    assert cf.integral_I2(3, 6) == pytest.approx(0.5 * math.pi * (9 - math.sqrt(18) - 2 - 2))
    assert cf.integral_I2(3, 6) == pytest.approx(1.18965, abs=1e-5)
    assert cf.integral_I2(3, 6) == pytest.approx(_quad(3, 6, f), abs=1e-9)
    assert cf.integral_I2(2.5, 2.5) == pytest.approx(0.0, abs=1e-15)
    lo = cf.integral_I2(0.5, 1.5)
    assert lo == pytest.approx(0.5 * math.pi * (2 - math.sqrt(0.75) + math.sqrt(1.5 * 0.5) - 2))
    assert lo == pytest.approx(_quad(0.5, 1.5, f), abs=1e-9)
    with pytest.raises(BranchError):
        cf.integral_I2(1.0, 3.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(2.001, 20), st.floats(0.0, 20))
def test_I2_relation(u1, du):
    u2 = u1 + du
    lhs = 2 * cf.integral_I2(u1, u2)
    rhs = cf.integral_I1(u1, u2) + cf.integral_I1(u1 - 2, u2 - 2)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_sma():
    assert cf.isochrone_sma(kepler(1), 0.5, 1.5) == 1.0
    assert cf.isochrone_sma(henon(1, 1), 1e-9, 1e-9) == pytest.approx(1.0)
    assert cf.isochrone_sma(finite_harmonic(1, 2), 0.1, 0.2) == pytest.approx(0.5 ** (2 / 3) * 2)
    assert cf.isochrone_sma(finite_harmonic(1, 2), 0.1, 0.2) == pytest.approx(1.2599, abs=1e-4)
    with pytest.raises(OrderError):
        cf.isochrone_sma(kepler(1), 2.0, 1.0)


def test_kepler3():
    rep = cf.kepler3_check(kepler(1), -0.5, 0.5)
    assert rep.kepler3_residual < 1e-8 and rep.energy_form_residual < 1e-8
    for xi in np.linspace(-0.35, -0.1, 5):
        rep = cf.kepler3_check(henon(1, 1), xi, 0.3)
        assert rep.kepler3_residual < 1e-8 and rep.energy_form_residual < 1e-8
    ball = cf.kepler3_check(finite_harmonic(1, 1), -1.3, 0.1)
    assert ball.tau_r == pytest.approx(math.pi) and ball.kepler3_residual < 1e-12
    assert set(rep.to_dict()) == {"tau_r", "sma", "kepler3_residual", "energy_form_residual"}


def test_energy_form_under_affine_maps():
    rng = np.random.default_rng(3)
    for make in (kepler, henon):
        for _ in range(5):
            eps, lam = rng.uniform(-1, 1), rng.uniform(0.0, 0.5)
            psi = make(1, epsilon=eps, lam=lam) if make is kepler else make(1, 1, eps, lam)
            L = rng.uniform(0.3, 0.8)
            xi = _above_circular(psi, L, rng.uniform(0.2, 0.7))
            assert cf.kepler3_check(psi, xi, L).energy_form_residual < 1e-8


def test_bertrand():
    def grid(psi, xis):
        xs, Ls = orbits.orbit_grid(psi, xis, n_L=3)
        return [(x, L) for x in xs for L in Ls]

    assert cf.bertrand_scan(kepler(1), grid(kepler(1), [-0.8, -0.5, -0.2])).all_closed
    h = cf.bertrand_scan(harmonic(1), grid(harmonic(1), [0.5, 1.5, 2.5]))
    assert h.all_closed and h.fraction == (1, 2)
    assert not cf.bertrand_scan(henon(1, 1), grid(henon(1, 1), [-0.4, -0.1])).all_closed
    for lam in (0.5, -0.5, 1.0):
        psi = harmonic(1, lam=lam)
        assert not cf.bertrand_scan(psi, grid(psi, [1.5, 2.5])).all_closed


def test_best_rational():
    assert cf.best_rational(0.5)[:2] == (1, 2)
    p, q, err = cf.best_rational(math.sqrt(2) - 1)
    assert err > 1e-9
