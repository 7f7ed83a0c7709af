import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from isochrone import orbits
from isochrone.errors import BelowCircular, GaugeDomain, InsufficientEvents, Unbound, ZeroMomentum
from isochrone.potentials import bounded, finite_harmonic, harmonic, henon, kepler
from isochrone.verification import control_potential


def test_effective_potential():
    assert orbits.effective_potential(kepler(1), 1.0, 1.0) == pytest.approx(-0.5)
    assert orbits.effective_potential(henon(1, 1), 0.0, 1e-12) == pytest.approx(-0.5)
    g = henon(1, 1, 0.3, 0.6)
    base = henon(1, 1)
    r = np.linspace(0.2, 3, 7)
    L = 0.8
    expect = orbits.effective_potential(base, math.sqrt(L * L + 0.6), r) + 0.3
    assert np.allclose(orbits.effective_potential(g, L, r), expect, rtol=1e-14)


def test_circular_orbits():
    assert orbits.circular_orbit(kepler(1), 1.0) == (pytest.approx(1.0), pytest.approx(-0.5))
    assert orbits.circular_orbit(harmonic(1), 1.0) == (pytest.approx(1.0), pytest.approx(1.0))
    rc, xc = orbits.circular_orbit(henon(1, 1), 0.5)
    res = minimize_scalar(lambda r: orbits.effective_potential(henon(1, 1), 0.5, r),
                          bounds=(0.05, 5.0), method="bounded", options={"xatol": 1e-10})
    assert rc == pytest.approx(res.x, rel=1e-6)
    assert xc == pytest.approx(res.fun, abs=1e-10)
    with pytest.raises(GaugeDomain):
        orbits.circular_orbit(harmonic(1, lam=-2.0), 1.0)


def test_apsides():
    ap = orbits.find_apsides(kepler(1), -0.5, math.sqrt(0.75))
    assert (ap.r_p, ap.r_a) == (pytest.approx(0.5, rel=1e-12), pytest.approx(1.5, rel=1e-12))
    rc, xc = orbits.circular_orbit(henon(1, 1), 0.5)
    ap = orbits.find_apsides(henon(1, 1), xc, 0.5)
    assert ap.r_p == ap.r_a == pytest.approx(rc)
    psi = henon(1, 1)
    ap = orbits.find_apsides(psi, -0.25, 0.5)
    d = 1e-6
    f = lambda r: orbits.effective_potential(psi, 0.5, r) + 0.25
    assert f(ap.r_p - d) > 0 > f(ap.r_p + d)
    assert f(ap.r_a + d) > 0 > f(ap.r_a - d)


def test_apsides_errors():
    with pytest.raises(Unbound):
        orbits.find_apsides(kepler(1), 0.1, 1.0)
    with pytest.raises(BelowCircular):
        orbits.find_apsides(kepler(1), -0.6, 1.0)


def test_bounded_with_negative_gauge_is_bound():
    # the wall sits at psi(b) + L^2/(2b^2), not psi(b)
    psi = bounded(1, 1, lam=-0.5)
    ap = orbits.find_apsides(psi, 0.75, math.sqrt(0.5 + 0.04))
    assert ap.r_a < 1.0


def test_periods_examples():
    L = 0.5
    assert orbits.radial_period_quad(kepler(1), -0.5, L) == pytest.approx(2 * math.pi, rel=1e-10)
    assert orbits.radial_period_quad(harmonic(2), 3.0, 1.0) == pytest.approx(math.pi / 2, rel=1e-10)
    # 2 pi |1.5|^(-3/2) = 3.42013...
    tau = orbits.radial_period_quad(bounded(1, 1), 0.75, 0.1)
    assert tau == pytest.approx(2 * math.pi * 1.5**-1.5, rel=1e-10)
    assert tau == pytest.approx(3.4201328804316, rel=1e-12)
    assert orbits.azimuthal_increment_quad(kepler(1), -0.5, L) == pytest.approx(1.0, abs=1e-10)
    assert orbits.azimuthal_increment_quad(harmonic(1), 2.0, L) == pytest.approx(0.5, abs=1e-10)
    n = orbits.azimuthal_increment_quad(henon(1, 1), -0.05, 2.0)
    assert n == pytest.approx(0.5 + 2 / (2 * math.sqrt(8)), abs=1e-8)
    with pytest.raises(ZeroMomentum):
        orbits.azimuthal_increment_quad(kepler(1), -0.5, 0.0)


def test_actions():
    assert orbits.radial_action_quad(kepler(1), -0.5, 0.5) == pytest.approx(0.5, rel=1e-10)
    a = orbits.radial_action_quad(henon(1, 1), -0.25, 0.5)
    assert a == pytest.approx(1 / math.sqrt(0.5) - 0.5 * (0.5 + math.sqrt(4.25)), rel=1e-8)
    rc, xc = orbits.circular_orbit(bounded(1, 1), 0.3)
    assert orbits.radial_action_quad(bounded(1, 1), xc, 0.3) == 0.0


def test_circular_limit_period():
    psi = henon(1, 1)
    rc, xc = orbits.circular_orbit(psi, 0.7)
    tau_c = orbits.radial_period_quad(psi, xc, 0.7)
    assert tau_c == pytest.approx(2 * math.pi * (2 * abs(xc)) ** -1.5, rel=1e-8)


@pytest.mark.parametrize("psi,xis", [
    (henon(1, 1), np.linspace(-0.4, -0.1, 4)),
    (harmonic(1, lam=1.0), np.linspace(2.0, 3.0, 4)),
    (bounded(1, 1, 0.2, 0.1), np.linspace(0.95, 1.1, 4)),
    (kepler(2, -0.3, 0.4), np.linspace(-1.5, -0.6, 4)),
])
def test_isochrony_verdict(psi, xis):
    xs, Ls = orbits.orbit_grid(psi, xis, n_L=4)
    rep = orbits.isochrony_test(psi, xs, Ls)
    assert rep.is_isochrone and not rep.skipped


def test_gauged_harmonic_precession():
    psi = harmonic(1, lam=1.0)
    for xi in (2.0, 3.0):
        n = orbits.azimuthal_increment_quad(psi, xi, 1.0)
        assert n == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-9)


def test_control_is_not_isochrone():
    ctl = control_potential()
    xs, Ls = orbits.orbit_grid(ctl, np.linspace(-0.6, 0.2, 4), n_L=4)
    rep = orbits.isochrony_test(ctl, xs, Ls, rel_tol=1e-9)
    assert not rep.is_isochrone and rep.tau_variation > 1e-3


def test_isochrony_skips_invalid_points():
    rep = orbits.isochrony_test(kepler(1), [-0.5, 0.1], [0.5, 0.6])
    assert len(rep.skipped) == 2


def test_integrate_kepler():
    traj = orbits.integrate_orbit(kepler(1), -0.5, math.sqrt(0.75), n_radial_periods=4)
    tp, php = traj.periastra()
    assert np.allclose(np.diff(tp), 2 * math.pi, rtol=1e-8)
    assert np.allclose(np.diff(php), 2 * math.pi, rtol=1e-8)
    assert np.all(np.diff(traj.t) > 0) and np.all(np.diff(traj.phi) > 0)
    st = orbits.rosette_stats(traj)
    assert st.n_phi_measured == pytest.approx(1.0, abs=1e-6)


def test_integrate_harmonic_is_centred_ellipse():
    traj = orbits.integrate_orbit(harmonic(1), 2.0, 1.0, n_radial_periods=3)
    st = orbits.rosette_stats(traj)
    assert st.tau_measured == pytest.approx(math.pi, rel=1e-8)
    # x^2/A^2 + y^2/B^2 = 1 with semi-axes from the apsides
    ap = orbits.find_apsides(harmonic(1), 2.0, 1.0)
    assert np.allclose((traj.x / ap.r_p) ** 2 + (traj.y / ap.r_a) ** 2, 1.0, atol=1e-8)


def test_integrate_henon_matches_quadrature():
    psi = henon(1, 1)
    traj = orbits.integrate_orbit(psi, -0.25, 0.5, n_radial_periods=10)
    st = orbits.rosette_stats(traj)
    assert st.n_phi_measured == pytest.approx(orbits.azimuthal_increment_quad(psi, -0.25, 0.5), abs=1e-6)
    assert st.tau_measured == pytest.approx(orbits.radial_period_quad(psi, -0.25, 0.5), rel=1e-6)
    assert traj.energy_drift < 1e-8
    assert st.turns_center


def test_rosette_bounded_does_not_turn():
    st = orbits.rosette_stats(orbits.integrate_orbit(bounded(1, 1), 0.75, 0.2))
    assert st.n_phi_measured < 0.5 and not st.turns_center


def test_rosette_needs_events():
    traj = orbits.integrate_orbit(kepler(1), -0.5, 0.5, n_radial_periods=0.7)
    with pytest.raises(InsufficientEvents):
        orbits.rosette_stats(traj)


def test_finite_harmonic_interior_orbit():
    psi = finite_harmonic(1, 1)
    assert orbits.radial_period_quad(psi, -1.3, 0.1) == pytest.approx(math.pi, rel=1e-10)


def test_threads_do_not_change_results(monkeypatch):
    psi = henon(1, 1)
    xs, Ls = orbits.orbit_grid(psi, np.linspace(-0.4, -0.1, 4), n_L=4)
    monkeypatch.setenv("ISOCHRONE_THREADS", "1")
    a = orbits.isochrony_test(psi, xs, Ls)
    monkeypatch.setenv("ISOCHRONE_THREADS", "4")
    b = orbits.isochrony_test(psi, xs, Ls)
    assert np.array_equal(a.tau, b.tau) and np.array_equal(a.action, b.action)
