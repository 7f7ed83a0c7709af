"""The acceptance suite: twelve closure checks between closed forms and numerics.

Each ``criterion_N`` returns a :class:`CriterionResult`.  The CLI ``verify``
command and ``tests/test_acceptance.py`` both run these functions, so the
numbers in a report are the numbers the tests assert on.

Random draws use fixed seeds; a run is reproducible bit for bit on one
machine and backend.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np
from scipy import integrate

from . import closed_forms as cf
from . import orbits
from .bolst import (Bolst, Ibolst, KeplerEllipse, _r1_squared, bohlin_image, chi_parameter,
                    delta_phi1, ibolst_potential_image, map_kepler_orbit, momentum_construction,
                    momentum_map)
from .errors import ImaginaryMomentum, InputError
from .geometry import (CurveKind, HenonCurve, check_property_P, parabola_ode_residual,
                       reduce, rotate, to_henon_curve)
from .potentials import (CustomPotential, Family, PotentialSpec, bounded, finite_harmonic,
                         harmonic, henon, kepler)

SEED = 20240611


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    metrics: Dict[str, object] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    runtime: float = 0.0
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.id:2d} {self.name}: {self.detail} ({self.runtime:.2f}s)"

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "passed": bool(self.passed),
                "metrics": self.metrics, "tolerances": self.tolerances,
                "detail": self.detail}


# -- shared grids -----------------------------------------------------------

def isochrone_families() -> Dict[str, PotentialSpec]:
    return {"kepler": kepler(1.0), "harmonic": harmonic(1.0),
            "henon": henon(1.0, 1.0), "bounded": bounded(1.0, 1.0)}


ENERGIES = {
    "kepler": np.linspace(-0.8, -0.2, 5),
    "harmonic": np.linspace(0.5, 2.5, 5),
    "henon": np.linspace(-0.45, -0.1, 5),
    "bounded": np.linspace(0.6, 0.9, 5),
}


def family_grid(name: str, n_L: int = 5):
    psi = isochrone_families()[name]
    return orbits.orbit_grid(psi, ENERGIES[name], n_L=n_L)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.runtime = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- 1, 2, 3: the period table on grids ------------------------------------

@_timed
def criterion_1() -> CriterionResult:
    """Quadrature radial period equals the energy-only closed form."""
    tol, budget = 1e-8, 10.0
    worst_abs, worst_var = 0.0, 0.0
    per = {}
    t0 = time.perf_counter()
    for name, psi in isochrone_families().items():
        xis, Ls = family_grid(name)
        rep = orbits.isochrony_test(psi, xis, Ls)
        exact = np.array([[cf.tau_r_analytic(psi, xi) for _ in Ls] for xi in xis])
        err = float(np.max(np.abs(rep.tau / exact - 1.0)))
        per[name] = {"max_rel_error": err, "variation_over_L": rep.tau_variation}
        worst_abs = max(worst_abs, err)
        worst_var = max(worst_var, rep.tau_variation)
    elapsed = time.perf_counter() - t0
    ok = worst_abs < tol and worst_var < tol and elapsed < budget
    return CriterionResult(
        1, "radial period isochrony", ok,
        {"families": per, "max_rel_error": worst_abs, "max_variation": worst_var},
        {"rel": tol, "runtime_s": budget},
        detail=f"max rel err {worst_abs:.2e}, max L-variation {worst_var:.2e}")


@_timed
def criterion_2() -> CriterionResult:
    """Quadrature precession equals the table formulas; Hénon spot value at L = 2."""
    tol, spot_tol = 1e-8, 1e-6
    worst = 0.0
    per = {}
    for name, psi in isochrone_families().items():
        xis, Ls = family_grid(name)
        err = 0.0
        for xi in xis:
            for L in Ls:
                q = orbits.azimuthal_increment_quad(psi, xi, L, 1e-11)
                err = max(err, abs(q - cf.n_phi_analytic(psi, L)))
        per[name] = err
        worst = max(worst, err)
    psi = henon(1.0, 1.0)
    spot_quad = orbits.azimuthal_increment_quad(psi, -0.05, 2.0, 1e-11)
    spot_exact = cf.n_phi_analytic(psi, 2.0)
    spot_ref = 0.853553
    ok = worst < tol and abs(spot_quad - spot_ref) < spot_tol and abs(spot_exact - spot_ref) < spot_tol
    return CriterionResult(
        2, "precession table", ok,
        {"max_abs_error": per, "spot_quad": spot_quad, "spot_exact": spot_exact},
        {"abs": tol, "spot": spot_tol},
        detail=f"max abs err {worst:.2e}, henon n_phi(L=2) = {spot_quad:.9f}")


def control_potential() -> CustomPotential:
    """psi = -1/r + 0.1 r: smooth, confining and not an isochrone."""
    return CustomPotential(lambda r: -1.0 / r + 0.1 * r,
                           deriv=lambda r: 1.0 / r**2 + 0.1,
                           deriv2=lambda r: -2.0 / r**3,
                           name="-1/r + 0.1 r")


@_timed
def criterion_3() -> CriterionResult:
    """The radial action separates for isochrones and not for the control."""
    iso_tol, ctl_min = 1e-6, 1e-3
    mixed = {}
    for name, psi in isochrone_families().items():
        xis, Ls = family_grid(name)
        mixed[name] = orbits.isochrony_test(psi, xis, Ls).mixed_derivative
    ctl = control_potential()
    xis, Ls = orbits.orbit_grid(ctl, np.linspace(-0.6, 0.2, 5))
    ctl_rep = orbits.isochrony_test(ctl, xis, Ls, rel_tol=1e-9)
    worst = max(mixed.values())
    ok = worst < iso_tol and ctl_rep.mixed_derivative > ctl_min
    return CriterionResult(
        3, "action separability", ok,
        {"isochrones": mixed, "control": ctl_rep.mixed_derivative},
        {"isochrone_max": iso_tol, "control_min": ctl_min},
        detail=f"isochrone max {worst:.2e}, control {ctl_rep.mixed_derivative:.2e}")


# -- 4: affine rules --------------------------------------------------------

@_timed
def criterion_4() -> CriterionResult:
    """Transvection and gauge act on (xi, L) as the closed rules predict."""
    tol = 1e-8
    rng = np.random.default_rng(SEED + 4)
    worst_tau, worst_n = 0.0, 0.0
    cases = []
    for name, base in isochrone_families().items():
        xis, Ls = family_grid(name, n_L=3)
        for _ in range(5):
            xe = float(rng.choice(xis))
            Le = float(rng.choice(Ls))
            eps = float(rng.uniform(-2.0, 2.0))
            lam = float(rng.uniform(-1.0, 0.9 * Le * Le))
            psi = PotentialSpec(base.family, mu=base.mu, omega=base.omega, b=base.b,
                                epsilon=eps, lam=lam)
            xi, L = xe + eps, math.sqrt(Le * Le - lam)
            tau_s = orbits.radial_period_quad(psi, xi, L, 1e-11)
            tau_b = orbits.radial_period_quad(base, xe, Le, 1e-11)
            n_s = orbits.azimuthal_increment_quad(psi, xi, L, 1e-11)
            n_b = orbits.azimuthal_increment_quad(base, xe, Le, 1e-11) * L / Le
            et, en = _rel(tau_s, tau_b), abs(n_s - n_b)
            worst_tau, worst_n = max(worst_tau, et), max(worst_n, en)
            cases.append({"family": name, "epsilon": eps, "lambda": lam, "xi": xi, "L": L,
                          "tau_rel_err": et, "n_phi_err": en})
    ok = worst_tau < tol and worst_n < tol
    return CriterionResult(
        4, "affine rules", ok, {"cases": cases, "tau": worst_tau, "n_phi": worst_n},
        {"rel": tol}, detail=f"tau {worst_tau:.2e}, n_phi {worst_n:.2e} over {len(cases)} draws")


# -- 5, 6: geometry ---------------------------------------------------------

def _same_potential(a: PotentialSpec, b: PotentialSpec, tol: float) -> bool:
    if a.family is not b.family:
        return False
    for k in ("mu", "omega", "b", "epsilon", "lam"):
        x, y = getattr(a, k) or 0.0, getattr(b, k) or 0.0
        if abs(x - y) > tol * max(1.0, abs(x), abs(y)):
            return False
    return True


def random_potential(rng) -> PotentialSpec:
    fam = [Family.KEPLER, Family.HARMONIC, Family.HENON, Family.BOUNDED][rng.integers(4)]
    mu = float(10 ** rng.uniform(-1, 1))
    b = float(10 ** rng.uniform(-1, 1))
    eps = float(rng.uniform(-5, 5))
    lam = float(rng.uniform(-5, 5))
    if fam is Family.HARMONIC:
        return PotentialSpec(fam, omega=mu, epsilon=eps, lam=lam)
    if fam is Family.KEPLER:
        return PotentialSpec(fam, mu=mu, epsilon=eps, lam=lam)
    return PotentialSpec(fam, mu=mu, b=b, epsilon=eps, lam=lam)


def sector_grid(n: int = 36):
    return [-0.5 * math.pi + (k + 0.5) * math.pi / (n // 2) for k in range(n)]


def expected_sector(theta: float) -> set:
    if abs(theta) < 0.5 * math.pi:
        return {CurveKind.HENON_MINUS if theta < 0 else CurveKind.HENON_PLUS}
    return {CurveKind.BOUNDED_PLUS, CurveKind.BOUNDED_MINUS}


@_timed
def criterion_5() -> CriterionResult:
    """Potential -> parabola -> reduce recovers the potential; rotation sectors."""
    tol, budget = 1e-8, 5.0
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 5)
    failures = []
    for k in range(1000):
        psi = random_potential(rng)
        res = reduce(to_henon_curve(psi))
        if not res.physical or not _same_potential(res.potential(), psi, tol):
            failures.append({"index": k, "potential": psi.to_dict(), "got": res.to_dict()})
    sector_bad = []
    kep = to_henon_curve(kepler(1.0))
    for th in sector_grid():
        kind = reduce(rotate(kep, th)).kind
        if kind not in expected_sector(th):
            sector_bad.append({"theta": th, "kind": kind.value})
    elapsed = time.perf_counter() - t0
    ok = not failures and not sector_bad and elapsed < budget
    return CriterionResult(
        5, "classification round trip", ok,
        {"round_trip_failures": failures[:10], "n_failures": len(failures),
         "sector_failures": sector_bad},
        {"rel": tol, "runtime_s": budget},
        detail=f"{1000 - len(failures)}/1000 round trips, {36 - len(sector_bad)}/36 sectors")


CURVE_WINDOWS = {
    "kepler": ((0.5, 4.0), 2.0),
    "harmonic": ((0.5, 4.0), 2.0),
    "henon": ((0.5, 4.0), 2.0),
    "bounded": ((0.2, 1.6), 0.9),
}


def power_law_curve(s: float, mu: float = 1.0) -> Callable:
    """x psi(sqrt(x/2)) for psi = -mu / r^s."""
    return lambda x: -mu * x * (0.5 * np.asarray(x)) ** (-0.5 * s)


@_timed
def criterion_6() -> CriterionResult:
    """Chord property and the fourth-order ODE single out parabolas."""
    spread_tol, ode_tol = 1e-6, 1e-6
    spreads, odes = {}, {}
    for name, psi in isochrone_families().items():
        curve = HenonCurve(psi)
        (lo, hi), x0 = CURVE_WINDOWS[name]
        rep = check_property_P(curve, x0, (lo, hi),
                               fprime=lambda x, c=curve: c.derivative(x, 1))
        spreads[name] = rep.spread
        xs = np.linspace(lo, hi, 20)
        odes[name] = max(abs(parabola_ode_residual(curve, float(x))) for x in xs)
    quartic = check_property_P(lambda x: np.asarray(x) ** 4, 1.0, (0.5, 2.0),
                               fprime=lambda x: 4 * np.asarray(x) ** 3)
    power = check_property_P(power_law_curve(1.5), 2.0, (0.5, 4.0))
    ok = (max(spreads.values()) < spread_tol and max(odes.values()) < ode_tol
          and not quartic.is_parabola and not power.is_parabola)
    return CriterionResult(
        6, "property P and the parabola ODE", ok,
        {"spreads": spreads, "ode_residuals": odes, "quartic_spread": quartic.spread,
         "power_1.5_spread": power.spread},
        {"spread": spread_tol, "ode": ode_tol},
        detail=f"max spread {max(spreads.values()):.2e}, max ODE {max(odes.values()):.2e}, "
               f"x^4 spread {quartic.spread:.2e}, r^-1.5 spread {power.spread:.2e}")


# -- 7, 8: bolsts -----------------------------------------------------------

REF_BOLST = {"alpha": 1.5, "beta": 0.6, "e": 0.7, "p": 0.35, "xi0": -1.0, "xi1": -1.0, "mu": 1.0}


def reference_bolst_orbit():
    """The reference bolst (1.5, 0.6) of an e=0.7 ellipse, mu fixed by (p, e, xi0)."""
    ell = KeplerEllipse.from_shape(REF_BOLST["p"], REF_BOLST["e"], REF_BOLST["xi0"])
    return map_kepler_orbit(Bolst(REF_BOLST["alpha"], REF_BOLST["beta"]), ell, REF_BOLST["xi1"])


def _periastron_advance(psi, xi, L, periods=6.0):
    traj = orbits.integrate_orbit(psi, xi, L, n_radial_periods=periods, tol=1e-12)
    _, php = traj.periastra()
    return float(np.mean(np.diff(php))), traj


def _table_checks(tol):
    cells = []
    for source, xi, amp in (("kepler", -1.0, 1.0), ("harmonic", 1.0, 1.0)):
        for gm in (0.5, 2.0):
            for pair in ("same", "opposite"):
                xp = xi if pair == "same" else -xi
                im = ibolst_potential_image(Ibolst(gm), source, pair, xi, xp, amp, tol)
                cells.append({"source": source, "gamma": gm, "pair": pair,
                              "cell": im.table_cell, "agrees": bool(im.agrees),
                              "classified": im.classified.to_dict()})
    return cells


def _image_momentum(gm, L, same):
    """Lambda'^2 read off the apsides of the ibolsted Kepler orbit."""
    xi, mu = -1.0, 1.0
    xp = xi if same else -xi
    im = ibolst_potential_image(Ibolst(gm), "kepler", "same" if same else "opposite", xi, xp, mu)
    psi1 = im.classified.potential()
    ell = KeplerEllipse.from_energy(mu, xi, L)
    s = abs(xi) if same else -abs(xi)
    out = []
    for r in (ell.r_p, ell.r_a):
        x = 2 * r * r
        w = Ibolst(gm).matrix @ np.array([s * x, x * (-mu / r)])
        x1 = w[0] / abs(xp)
        if x1 <= 0:
            return None
        r1 = math.sqrt(0.5 * x1)
        out.append(xp * x1 - x1 * psi1.value(r1))
    return out


@_timed
def criterion_7() -> CriterionResult:
    """Closed-form image orbit, ibolst tables and the momentum rule."""
    dphi_tol, table_tol, mom_tol = 1e-6, 1e-6, 1e-8
    m = reference_bolst_orbit()
    psi1 = m.image.potential()
    measured, traj = _periastron_advance(psi1, m.xi1, m.L1)
    dphi_err = abs(measured - m.delta_phi1)
    literal = delta_phi1(chi_parameter(REF_BOLST["alpha"], REF_BOLST["beta"], REF_BOLST["p"],
                                       REF_BOLST["xi0"], REF_BOLST["mu"]), REF_BOLST["e"])

    cells = _table_checks(table_tol)
    kepler_ok = all(c["agrees"] for c in cells if c["source"] == "kepler")
    harmonic_ok = all(c["agrees"] for c in cells if c["source"] == "harmonic")

    mom = []
    worst_geo, worst_orbit = 0.0, 0.0
    for gm in (0.5, 2.0, 3.0):
        for L in (0.3, 0.6):
            for same in (True, False):
                try:
                    rule = momentum_map(Ibolst(gm), L, same)
                except ImaginaryMomentum:
                    continue
                geo = momentum_construction(Ibolst(gm), L, same)
                e_geo = abs(geo - rule)
                worst_geo = max(worst_geo, e_geo)
                row = {"gamma": gm, "L": L, "same": same, "rule": rule, "construction": geo}
                apsides = _image_momentum(gm, L, same) if same else None
                if apsides is not None:
                    e_orb = max(abs(v - rule * rule) for v in apsides)
                    row["apsis_L2"] = apsides
                    worst_orbit = max(worst_orbit, e_orb)
                mom.append(row)
    ok = (dphi_err < dphi_tol and kepler_ok and harmonic_ok and worst_geo < mom_tol
          and worst_orbit < mom_tol)
    return CriterionResult(
        7, "bolst closure", ok,
        {"reference": {"mu": m.ellipse.mu, "chi": m.chi, "delta_phi1": m.delta_phi1,
                  "delta_phi1_over_pi": m.delta_phi1 / math.pi, "integrated": measured,
                  "error": dphi_err, "energy_drift": traj.energy_drift,
                  "image": m.image.to_dict(),
                  "literal_mu1_delta_phi1_over_pi": literal / math.pi},
         "tables": cells, "momentum": mom, "momentum_geometry_error": worst_geo,
         "momentum_apsis_error": worst_orbit},
        {"delta_phi": dphi_tol, "table": table_tol, "momentum": mom_tol},
        detail=f"dphi1/pi {m.delta_phi1 / math.pi:.12f} vs integrated err {dphi_err:.1e}, "
               f"{sum(c['agrees'] for c in cells)}/{len(cells)} table cells, "
               f"momentum {max(worst_geo, worst_orbit):.1e}")


BOHLIN = {"p": 0.5, "e": 0.6, "xi0": -1.0, "beta": 0.6, "xi1": -1.0}


def binet_residual(ell: KeplerEllipse, beta: float, xi1: float, omega: float, phi1):
    """u'' + u - omega^2 / (L^2 u^3) for u = 1/r1 along the Bohlin image, relative to u."""
    A = -xi1 / (beta * ell.mu * ell.p)
    c2, s2 = np.cos(2 * phi1), np.sin(2 * phi1)
    w = A * (1 + ell.e * c2)
    w1 = -2 * A * ell.e * s2
    w2 = -4 * A * ell.e * c2
    u = np.sqrt(w)
    u2 = w2 / (2 * u) - w1**2 / (4 * u**3)
    return (u2 + u - omega**2 / (ell.L**2 * u**3)) / u


@_timed
def criterion_8() -> CriterionResult:
    """alpha = 0 turns a Kepler ellipse into a centred harmonic ellipse."""
    tol = 1e-9
    ell = KeplerEllipse.from_shape(BOHLIN["p"], BOHLIN["e"], BOHLIN["xi0"])
    beta, xi1 = BOHLIN["beta"], BOHLIN["xi1"]
    m = map_kepler_orbit(Bolst(0.0, beta), ell, xi1)
    omega, offset = bohlin_image(ell, beta, xi1)
    img = m.image
    kind_ok = img.kind is CurveKind.HARMONIC
    omega_err = _rel(img.omega, omega) if kind_ok else math.inf
    offset_err = abs(img.potential().epsilon - offset) if kind_ok else math.inf
    omega2_formula = 2 * abs(ell.xi0) * xi1**2 / (ell.mu**2 * beta**2)

    phi1 = np.linspace(0, 2 * math.pi, 200)
    binet = float(np.max(np.abs(binet_residual(ell, beta, xi1, omega, phi1))))

    # independent route: integrate in the identified harmonic potential
    psi1 = img.potential()
    traj = orbits.integrate_orbit(psi1, xi1, ell.L, n_radial_periods=2.0, tol=1e-12)
    r_map = np.sqrt(_r1_squared(Bolst(0.0, beta), ell, xi1, 2.0 * traj.phi))
    track = float(np.max(np.abs(traj.r - r_map) / r_map))
    half = bool(np.allclose(m.phi1, 0.5 * m.phi0, rtol=0, atol=1e-15))
    ok = (kind_ok and half and omega_err < tol and offset_err < tol
          and _rel(omega**2, omega2_formula) < tol and binet < tol and track < 1e-7)
    return CriterionResult(
        8, "Bohlin special case", ok,
        {"omega": omega, "omega_classified": img.omega, "omega_rel_err": omega_err,
         "offset": offset, "offset_err": offset_err, "binet_residual": binet,
         "phi1_is_half_phi0": half, "integrated_track_rel_err": track},
        {"binet": tol, "omega": tol, "track": 1e-7},
        detail=f"omega {omega:.12f} (err {omega_err:.1e}), Binet residual {binet:.1e}, "
               f"integrated track {track:.1e}")


# -- 9, 10, 11: laws --------------------------------------------------------

@_timed
def criterion_9() -> CriterionResult:
    """Generalised third law and its energy form."""
    tol = 1e-8
    rows = []
    worst = 0.0
    for name in ("kepler", "henon", "bounded"):
        psi = isochrone_families()[name]
        xis, Ls = family_grid(name, n_L=5)
        for k in range(5):
            rep = cf.kepler3_check(psi, xis[k], Ls[(2 * k) % 5])
            rows.append({"potential": name, "xi": xis[k], "k3": rep.kepler3_residual,
                         "energy_form": rep.energy_form_residual})
            worst = max(worst, rep.kepler3_residual, rep.energy_form_residual)
    fh = finite_harmonic(1.0, 1.0)
    ball = cf.kepler3_check(fh, -1.3, 0.1)
    rows.append({"potential": "finite_harmonic", "xi": -1.3, "k3": ball.kepler3_residual})
    worst = max(worst, ball.kepler3_residual)
    for psi, xi, L in ((kepler(1.0, epsilon=0.3), -0.2, 0.5),
                       (henon(1.0, 1.0, epsilon=-0.2), -0.45, 0.4),
                       (bounded(1.0, 1.0, epsilon=0.5), 1.25, 0.2)):
        rep = cf.kepler3_check(psi, xi, L)
        rows.append({"potential": psi.to_dict(), "xi": xi, "k3": rep.kepler3_residual,
                     "energy_form": rep.energy_form_residual})
        worst = max(worst, rep.kepler3_residual, rep.energy_form_residual)
    return CriterionResult(9, "generalised third law", worst < tol, {"orbits": rows, "worst": worst},
                           {"rel": tol}, detail=f"worst residual {worst:.2e} over {len(rows)} orbits")


def bertrand_candidates() -> Dict[str, PotentialSpec]:
    d = isochrone_families()
    d["harmonic_lam+0.5"] = harmonic(1.0, lam=0.5)
    d["harmonic_lam-0.5"] = harmonic(1.0, lam=-0.5)
    return d


@_timed
def criterion_10() -> CriterionResult:
    """Only Kepler and the harmonic oscillator close every orbit."""
    verdicts = {}
    for name, psi in bertrand_candidates().items():
        # the gauged oscillators have no orbits below xi = sqrt(|lambda|)
        energies = np.linspace(1.5, 2.5, 3) if psi.lam else ENERGIES[name][::2]
        xis, Ls = orbits.orbit_grid(psi, energies, n_L=3)
        res = cf.bertrand_scan(psi, [(x, L) for x in xis for L in Ls])
        verdicts[name] = {"all_closed": res.all_closed, "fraction": list(res.fraction),
                          "n_phi_min": float(res.n_phi.min()), "n_phi_max": float(res.n_phi.max())}
    passing = sorted(k for k, v in verdicts.items() if v["all_closed"])
    ok = passing == ["harmonic", "kepler"]
    return CriterionResult(10, "Bertrand scan", ok, {"verdicts": verdicts, "passing": passing}, {},
                           detail="all-closed: " + ", ".join(passing))


def _quad_I(u1, u2, weight):
    val, _ = integrate.quad(weight, u1, u2, weight="alg", wvar=(0.5, 0.5),
                            epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


@_timed
def criterion_11() -> CriterionResult:
    """Closed forms of the two elementary integrals against adaptive quadrature."""
    tol, rel_tol = 1e-9, 1e-12
    rng = np.random.default_rng(SEED + 11)
    f1 = lambda u: 1.0 / u
    f2 = lambda u: (u - 1.0) / (u * (u - 2.0))
    errs = {"I1": 0.0, "I2_below": 0.0, "I2_above": 0.0}
    rel_err = 0.0
    for _ in range(100):
        u1 = rng.uniform(0.05, 5.0)
        u2 = u1 + rng.uniform(0.01, 5.0)
        q = _quad_I(u1, u2, f1)
        errs["I1"] = max(errs["I1"], abs(cf.integral_I1(u1, u2) - q) / max(1.0, abs(q)))

        u1, u2 = np.sort(rng.uniform(0.05, 1.95, 2))
        q = _quad_I(u1, u2, f2)
        errs["I2_below"] = max(errs["I2_below"], abs(cf.integral_I2(u1, u2) - q) / max(1.0, abs(q)))

        u1 = rng.uniform(2.05, 6.0)
        u2 = u1 + rng.uniform(0.01, 5.0)
        q = _quad_I(u1, u2, f2)
        i2 = cf.integral_I2(u1, u2)
        errs["I2_above"] = max(errs["I2_above"], abs(i2 - q) / max(1.0, abs(q)))
        rhs = cf.integral_I1(u1, u2) + cf.integral_I1(u1 - 2.0, u2 - 2.0)
        rel_err = max(rel_err, abs(2 * i2 - rhs) / max(1.0, abs(rhs)))
    ok = max(errs.values()) < tol and rel_err < rel_tol
    return CriterionResult(11, "elementary integrals", ok, {"errors": errs, "relation": rel_err},
                           {"quad": tol, "relation": rel_tol},
                           detail=f"max quad err {max(errs.values()):.2e}, relation {rel_err:.1e}")


# -- 12: rosettes -----------------------------------------------------------

@_timed
def criterion_12() -> CriterionResult:
    """Measured precession of integrated rosettes."""
    tol = 1e-6
    he = orbits.rosette_stats(orbits.integrate_orbit(henon(1.0, 1.0), -0.25, 0.5, tol=1e-12))
    bo = orbits.rosette_stats(orbits.integrate_orbit(bounded(1.0, 1.0), 0.75, 0.2, tol=1e-12))
    gh_psi = harmonic(1.0, lam=0.5)
    L = 1.0
    gh = orbits.rosette_stats(orbits.integrate_orbit(gh_psi, 2.0, L, tol=1e-12))
    expected = L / (2 * math.sqrt(0.5 + L * L))
    gh_err = abs(gh.n_phi_measured - expected)
    ok = (he.n_phi_measured > 0.5 and he.turns_center and bo.n_phi_measured < 0.5
          and not bo.turns_center and gh_err < tol)
    return CriterionResult(
        12, "rosettes", ok,
        {"henon": {"n_phi": he.n_phi_measured, "turns_center": he.turns_center},
         "bounded": {"n_phi": bo.n_phi_measured, "turns_center": bo.turns_center},
         "gauged_harmonic": {"n_phi": gh.n_phi_measured, "expected": expected, "error": gh_err}},
        {"gauged_harmonic": tol},
        detail=f"henon {he.n_phi_measured:.6f}, bounded {bo.n_phi_measured:.6f}, "
               f"gauged harmonic err {gh_err:.1e}")


# -- suites -----------------------------------------------------------------

CRITERIA: Dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
    11: criterion_11, 12: criterion_12,
}

SUITES: Dict[str, List[int]] = {
    "geometry": [5, 6],
    "orbits": [1, 2, 3, 4, 12],
    "laws": [9, 10, 11],
    "bolst": [7, 8],
}
SUITES["all"] = sorted(i for ids in SUITES.values() for i in ids)


def run_suite(name: str = "all") -> List[CriterionResult]:
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    out = []
    for i in SUITES[name]:
        try:
            out.append(CRITERIA[i]())
        except Exception as exc:  # a crash is a failed criterion, not a crashed suite
            out.append(CriterionResult(i, CRITERIA[i].__name__, False,
                                       detail=f"{type(exc).__name__}: {exc}"))
    return out
