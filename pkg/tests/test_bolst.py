import math

import numpy as np
import pytest

from isochrone import orbits
from isochrone.bolst import (Bolst, Ibolst, KeplerEllipse, back_to_kepler, bohlin_image,
                             bolst_image_parabola, chi_parameter, delta_phi1, frame_vectors,
                             ibolst_compose, ibolst_potential_image, map_kepler_orbit,
                             minkowski, momentum_construction, momentum_map, phi1_of_phi0)
from isochrone.errors import (CausalityViolation, ImaginaryMomentum, InconsistentEllipse,
                              NotIsochrone, SignError, SingularBolst, ZeroImageEnergy)
from isochrone.geometry import Parabola, apply_linear, reduce, tangent_and_axis, to_henon_curve
from isochrone.potentials import Family, henon, kepler


def interval(w):
    return w[0] - w[1]


def test_apply_example():
    w = Bolst(1.5, 0.6).apply([2.0, -1.0])
    assert w == pytest.approx([2.4, -0.6], abs=1e-15)
    assert interval(w) == pytest.approx(3.0, abs=1e-15)
    assert np.array_equal(Bolst(1.0, 0.0).apply([0.3, -0.7]), [0.3, -0.7])


def test_singular():
    with pytest.raises(SingularBolst):
        Bolst(0.4, -0.4)
    with pytest.raises(SingularBolst):
        Ibolst(0.0)


def test_interval_conservation():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a, b = rng.normal(size=2)
        B = Bolst(a, b)
        w = rng.normal(size=2) * 10
        out = B.apply(w)
        assert abs(interval(out) - interval(w)) <= 1e-14 * max(1.0, abs(interval(w)), *np.abs(out))
    # the radial cone is preserved
    assert interval(Bolst(2.0, -0.3).apply([1.7, 1.7])) == pytest.approx(0.0, abs=1e-15)


def test_symmetric_relation():
    rng = np.random.default_rng(5)
    for _ in range(100):
        g = rng.uniform(0.1, 5) * rng.choice([-1, 1])
        w = rng.normal(size=2)
        out = Ibolst(g).apply(w)
        assert abs(out.sum() - g * w.sum()) <= 1e-14 * max(1.0, abs(out.sum()))
    B = Bolst(1.5, 0.6)
    w = np.array([2.0, -1.0])
    out = B.apply(w)
    assert not B.is_symmetric
    assert abs(out.sum() - B.det * w.sum()) > 1e-3


def test_compose():
    g = Ibolst(2.0)
    ident = ibolst_compose(g, g.inverse())
    assert ident.gamma == 1.0
    assert np.allclose(ident.matrix, np.eye(2), atol=1e-15)
    six = ibolst_compose(Ibolst(2.0), Ibolst(3.0))
    assert six.gamma == 6.0
    assert np.abs(Ibolst(2.0).matrix @ Ibolst(3.0).matrix - six.matrix).max() < 1e-14
    assert ibolst_compose(Ibolst(3.0), Ibolst(2.0)) == six
    assert Ibolst(0.7).as_bolst().is_symmetric


def test_frame():
    f1 = frame_vectors(Ibolst(1.0))
    assert np.array_equal(f1.u, [1, 0]) and np.array_equal(f1.v, [0, 1])
    assert f1.delta == pytest.approx(math.pi / 2)
    f = frame_vectors(Ibolst(3.0))
    assert f.u @ f.u == pytest.approx(5.0) and f.v @ f.v == pytest.approx(5.0)
    assert f.norm_u_m == pytest.approx(3.0) and f.norm_v_m == pytest.approx(-3.0)
    assert minkowski(f.u, f.v) == pytest.approx(0.0, abs=1e-14)
    assert math.tan(f.delta) == pytest.approx(2.0)
    rng = np.random.default_rng(2)
    for g in (0.3, 2.0, -1.5):
        for w in rng.normal(size=(10, 2)):
            wp = Ibolst(g).apply(w)
            assert minkowski(wp, wp) == pytest.approx(g * minkowski(w, w), rel=1e-12, abs=1e-14)


def test_momentum_map():
    assert momentum_map(Ibolst(1.0), 0.7, True) == 0.7
    assert momentum_map(Ibolst(4.0), 0.7, True) == pytest.approx(1.4)
    assert momentum_map(Ibolst(4.0), 0.7, False) == 0.7
    with pytest.raises(ImaginaryMomentum):
        momentum_map(Ibolst(-2.0), 0.7, True)


@pytest.mark.parametrize("g", [0.25, 0.5, 2.0, 4.0, 9.0])
@pytest.mark.parametrize("same", [True, False])
def test_momentum_construction(g, same):
    L = 0.8
    assert momentum_construction(Ibolst(g), L, same) == pytest.approx(
        momentum_map(Ibolst(g), L, same), rel=1e-12)


def test_ellipse():
    ell = KeplerEllipse.from_energy(1.0, -0.5, 0.6)
    assert ell.p == pytest.approx(0.36)
    assert ell.e == pytest.approx(math.sqrt(1 - 0.36), rel=1e-12)
    assert ell.xi0 == pytest.approx(-0.5, rel=1e-12) and ell.L == pytest.approx(0.6, rel=1e-12)
    shaped = KeplerEllipse.from_shape(0.35, 0.7, -1.0)
    assert shaped.mu == pytest.approx(0.7 / 0.51)
    with pytest.raises(InconsistentEllipse):
        KeplerEllipse.from_shape(0.35, 0.7, -1.0, mu=1.0)


def test_reference_case_literal_numbers():
    chi = chi_parameter(1.5, 0.6, 0.35, -1.0, 1.0)
    assert chi == pytest.approx(0.875, rel=1e-14)
    dphi = delta_phi1(chi, 0.7)
    assert dphi == pytest.approx(math.pi * (1 + 0.875 / math.sqrt(3.515625 - 0.49)), rel=1e-14)
    assert dphi / math.pi == pytest.approx(1.50304, abs=1e-5)


def test_reference_case_against_quadrature():
    ell = KeplerEllipse.from_shape(0.35, 0.7, -1.0)
    m = map_kepler_orbit(Bolst(1.5, 0.6), ell, -1.0)
    assert m.physical and m.image.physical
    psi = m.image.potential()
    assert psi.family is Family.HENON
    n_phi = orbits.azimuthal_increment_quad(psi, m.xi1, m.L1)
    assert n_phi == pytest.approx(m.delta_phi1 / (2 * math.pi), abs=1e-6)
    # r1 from the closed form lies on the image orbit's apsides
    ap = orbits.find_apsides(psi, m.xi1, m.L1)
    r1 = m.r1_of_phi0(np.array([0.0, math.pi]))
    assert sorted(r1) == pytest.approx([ap.r_p, ap.r_a], rel=1e-9)


def test_phi1_monotone_and_continuous():
    phi0 = np.linspace(0, 6 * np.pi, 2001)
    phi1 = phi1_of_phi0(phi0, 0.875, 0.7)
    assert np.all(np.diff(phi1) > 0)
    assert phi1_of_phi0(np.array([2 * np.pi]), 0.875, 0.7)[0] == pytest.approx(delta_phi1(0.875, 0.7))


def test_phi1_limits():
    phi0 = np.linspace(0, 2 * np.pi, 50)
    assert np.allclose(phi1_of_phi0(phi0, 1e-8, 0.6), phi0 / 2, atol=1e-6)
    assert np.allclose(phi1_of_phi0(phi0, 1e8, 0.6), phi0, atol=1e-6)


def test_circular_primary_is_linear():
    phi0 = np.linspace(0, 4 * np.pi, 101)
    phi1 = phi1_of_phi0(phi0, 0.8, 0.0)
    slope = delta_phi1(0.8, 0.0) / (2 * np.pi)
    assert np.allclose(phi1, slope * phi0, atol=1e-13)


def test_delta_phi1_independent_of_xi1():
    ell = KeplerEllipse.from_energy(1.0, -0.5, 0.6)
    vals = [map_kepler_orbit(Bolst(1.5, 0.6), ell, x, classify=False).delta_phi1
            for x in np.linspace(-2.0, -0.3, 7)]
    assert max(vals) - min(vals) < 1e-9


def test_bohlin_and_scaling():
    ell = KeplerEllipse.from_energy(1.0, -0.5, 0.6)
    m = map_kepler_orbit(Bolst(0.0, 0.6), ell, -1.0)
    phi0 = np.linspace(0, 2 * np.pi, 9)
    assert np.allclose(m.phi1_of_phi0(phi0), phi0 / 2)
    om, off = bohlin_image(ell, 0.6, -1.0)
    assert om**2 == pytest.approx(2 * 0.5 * 1.0 / (0.36), rel=1e-14)
    assert m.image.physical and m.image.potential().family is Family.HARMONIC
    s = map_kepler_orbit(Bolst(1.0, 0.0), ell, -0.25)
    assert np.allclose(s.phi1_of_phi0(phi0), phi0)
    assert s.delta_phi1 == 2 * math.pi
    # confocal scaled ellipse: r1 / r0 constant
    ratio = s.r1 / s.r0
    assert np.ptp(ratio) < 1e-12
    with pytest.raises(Exception):
        bohlin_image(ell, 0.6, 1.0)


def test_map_errors():
    ell = KeplerEllipse.from_energy(1.0, -0.5, 0.6)
    with pytest.raises(ZeroImageEnergy):
        map_kepler_orbit(Bolst(1.5, 0.6), ell, 0.0)
    with pytest.raises(ZeroImageEnergy):
        bolst_image_parabola(Bolst(1.5, 0.6), ell, 0.0)
    # dt1/dt0 = (alpha xi0 - mu beta u / 2)/xi1 changes sign along the orbit
    with pytest.raises(CausalityViolation):
        map_kepler_orbit(Bolst(-1.0, 0.5), ell, -1.0)


def test_kepler_table_example():
    im = ibolst_potential_image(Ibolst(2.0), "kepler", "same", -1.0, -1.0, 1.0)
    assert im.b == pytest.approx(1 / math.sqrt(24), rel=1e-14)
    assert im.b == pytest.approx(0.2041, abs=1e-4)
    assert im.mu_prime == pytest.approx(16 / (3 * math.sqrt(24)), rel=1e-14)
    assert im.mu_prime == pytest.approx(1.0887, abs=1e-4)
    assert im.epsilon == pytest.approx(3.0, rel=1e-12)
    assert im.table_cell == "he-+eps"
    assert im.agrees


def test_kepler_table_b_vanishes():
    bs = [ibolst_potential_image(Ibolst(1 + d), "kepler", "same", -1.0, -1.0, 1.0).b
          for d in (1e-2, 1e-4, 1e-6)]
    assert bs[0] > bs[1] > bs[2] and bs[2] < 1e-6


@pytest.mark.parametrize("source,xi", [("kepler", -1.0), ("harmonic", 1.0)])
@pytest.mark.parametrize("g", [0.5, 2.0, 3.5])
@pytest.mark.parametrize("pair", ["same", "opposite"])
def test_tables_match_classification(source, xi, g, pair):
    xp = xi if pair == "same" else -xi
    im = ibolst_potential_image(Ibolst(g), source, pair, xi, 0.8 * xp, 1.3)
    assert im.agrees, im.to_dict()


def test_table_sign_errors():
    with pytest.raises(SignError):
        ibolst_potential_image(Ibolst(2.0), "kepler", "same", 1.0, -1.0, 1.0)
    with pytest.raises(SignError):
        ibolst_potential_image(Ibolst(2.0), "kepler", "same", -1.0, 1.0, 1.0)
    with pytest.raises(SignError):
        ibolst_potential_image(Ibolst(2.0), "harmonic", "opposite", 1.0, 1.0, 1.0)


def test_back_to_kepler_identity():
    res = back_to_kepler(to_henon_curve(kepler(1.0)))
    assert res.gamma == pytest.approx(1.0, abs=1e-12)
    assert res.J_translate.lam == pytest.approx(0.0, abs=1e-12)
    assert res.J_transvect.epsilon == pytest.approx(0.0, abs=1e-12)


def test_back_to_kepler_roundtrip():
    kep = to_henon_curve(kepler(1.0))
    bolsted = apply_linear(kep, Ibolst(2.0).matrix)
    res = back_to_kepler(bolsted)
    assert res.gamma == pytest.approx(2.0, rel=1e-9)
    rebuilt = apply_linear(res.kepler, Ibolst(res.gamma).matrix)
    scale = bolsted.a / rebuilt.a if bolsted.a else bolsted.b / rebuilt.b
    assert np.allclose(np.array(rebuilt.coeffs) * scale, bolsted.coeffs, atol=1e-9)


def test_back_to_kepler_henon():
    p = to_henon_curve(henon(1.0, 1.0))
    res = back_to_kepler(p)
    k = res.kepler
    t, n = tangent_and_axis(k)
    assert abs(t[0]) < 1e-9 and abs(n[1]) < 1e-9
    # laid through the origin: y^2 = kappa x at 100 samples
    kappa = -k.c / k.b**2
    assert kappa > 0
    ys = np.linspace(-3, 3, 100)
    xs = ys**2 / kappa
    assert np.max(k.residual(xs, ys)) < 1e-9


def test_back_to_kepler_rejects_nonphysical():
    with pytest.raises(NotIsochrone):
        back_to_kepler(Parabola(1.0, 0.0, 0.0, 1.0, 0.0))
