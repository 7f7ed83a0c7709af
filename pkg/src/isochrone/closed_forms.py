"""Closed-form periods, precessions and radial actions of the isochrones.

Everything here is analytic.  The numerical counterparts live in
:mod:`isochrone.orbits`; the acceptance checks compare the two.

An affinely shifted potential ``psi + eps + lam/(2 r^2)`` is handled by
evaluating the base family at the effective orbit
``(xi - eps, sqrt(L^2 + lam))``; precessions pick up an extra factor
``L / sqrt(L^2 + lam)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BranchError, EnergySign, GaugeDomain, InputError, NoPRO, OrderError
from .potentials import Family, PotentialSpec


def _effective(psi: PotentialSpec, xi, L):
    L2 = L * L + psi.lam
    if L2 <= 0:
        raise GaugeDomain(f"L^2 + lambda = {L2} must be positive")
    return xi - psi.epsilon, math.sqrt(L2)


def _energy_for_family(psi, x):
    """Energy measured from the base family; check its sign."""
    fam = psi.family
    if fam in (Family.KEPLER, Family.HENON) and not x < 0:
        raise EnergySign(f"{fam.value} orbits need xi - epsilon < 0, got {x}")
    if fam is Family.BOUNDED and not x > 0:
        raise EnergySign(f"bounded orbits need xi - epsilon > 0, got {x}")
    if fam is Family.HARMONIC and not x > 0:
        raise EnergySign(f"harmonic orbits need xi - epsilon > 0, got {x}")
    return x


def tau_r_analytic(psi: PotentialSpec, xi, L=None) -> float:
    """Radial period; depends on the energy only."""
    fam = psi.family
    if fam in (Family.HARMONIC, Family.FINITE_HARMONIC):
        return math.pi / psi.omega
    x = _energy_for_family(psi, xi - psi.epsilon)
    return 2.0 * math.pi * psi.mu * abs(2.0 * x) ** -1.5


def _n_phi_base(psi, Le):
    fam = psi.family
    if fam is Family.KEPLER:
        return 1.0
    if fam in (Family.HARMONIC, Family.FINITE_HARMONIC):
        return 0.5
    q = Le / (2.0 * math.sqrt(4.0 * psi.b * psi.mu + Le * Le))
    return 0.5 + q if fam is Family.HENON else 0.5 - q


def n_phi_analytic(psi: PotentialSpec, L, xi=None) -> float:
    """Azimuthal increment per radial period in units of 2 pi."""
    if L <= 0:
        raise InputError("n_phi needs L > 0")
    L2 = L * L + psi.lam
    if L2 <= 0:
        raise GaugeDomain(f"L^2 + lambda = {L2} must be positive")
    Le = math.sqrt(L2)
    return _n_phi_base(psi, Le) * L / Le


def radial_action_analytic(psi: PotentialSpec, xi, L) -> float:
    """The action-like integral (1/pi) * int sqrt(2(xi - psi) - L^2/r^2) dr."""
    x, Le = _effective(psi, xi, L)
    fam = psi.family
    if fam is Family.KEPLER:
        x = _energy_for_family(psi, x)
        a = psi.mu / math.sqrt(-2.0 * x) - Le
    elif fam is Family.HARMONIC:
        x = _energy_for_family(psi, x)
        a = x / (2.0 * psi.omega) - 0.5 * Le
    elif fam is Family.FINITE_HARMONIC:
        # interior harmonic well sits 3/2 omega^2 R^2 below zero
        x = x + 1.5 * psi.omega**2 * psi.R**2
        a = x / (2.0 * psi.omega) - 0.5 * Le
    elif fam is Family.HENON:
        x = _energy_for_family(psi, x)
        a = psi.mu / math.sqrt(2.0 * abs(x)) - 0.5 * (Le + math.sqrt(4 * psi.b * psi.mu + Le * Le))
    else:
        x = _energy_for_family(psi, x)
        a = -psi.mu / math.sqrt(2.0 * x) + 0.5 * (math.sqrt(4 * psi.b * psi.mu + Le * Le) - Le)
    scale = max(1.0, abs(a), Le)
    if a < -1e-12 * scale:
        raise NoPRO(f"no periodic orbit at xi={xi}, L={L} (action {a})")
    return max(a, 0.0)


# -- the two elementary integrals ---------------------------------------

def integral_I1(u1, u2) -> float:
    """int_{u1}^{u2} sqrt((u - u1)(u2 - u)) / u du for 0 < u1 <= u2."""
    if not (0 < u1 <= u2):
        raise OrderError("need 0 < u1 <= u2")
    return 0.5 * math.pi * (u1 + u2 - 2.0 * math.sqrt(u1 * u2))


def integral_I2(u1, u2) -> float:
    """int_{u1}^{u2} sqrt((u - u1)(u2 - u)) (u - 1) / (u (u - 2)) du.

    Defined when the interval avoids the pole at u = 2, i.e. u2 < 2 or u1 > 2.
    """
    if not (0 < u1 <= u2):
        raise OrderError("need 0 < u1 <= u2")
    root = math.sqrt(u1 * u2)
    if u1 > 2:
        return 0.5 * math.pi * (u1 + u2 - root - math.sqrt((u1 - 2) * (u2 - 2)) - 2.0)
    if u2 < 2:
        return 0.5 * math.pi * (u1 + u2 - root + math.sqrt((2 - u1) * (2 - u2)) - 2.0)
    raise BranchError("the interval [u1, u2] straddles u = 2")


# -- semi-major axis and the third law -----------------------------------

def isochrone_sma(psi: PotentialSpec, r_p: float, r_a: float) -> float:
    """Generalised semi-major axis of an orbit with apsides r_p <= r_a."""
    if not (0 < r_p <= r_a):
        raise OrderError("need 0 < r_p <= r_a")
    fam = psi.family
    if fam is Family.KEPLER:
        return 0.5 * (r_a + r_p)
    if fam is Family.HENON:
        b2 = psi.b**2
        return 0.5 * (math.sqrt(b2 + r_a**2) + math.sqrt(b2 + r_p**2))
    if fam is Family.BOUNDED:
        b2 = psi.b**2
        return 0.5 * (math.sqrt(b2 - r_a**2) + math.sqrt(b2 - r_p**2))
    if fam is Family.FINITE_HARMONIC:
        if r_a >= psi.R:
            raise InputError("orbit leaves the homogeneous ball")
        return 0.5 ** (2.0 / 3.0) * psi.R
    raise InputError("no semi-major axis is defined for the harmonic family")


def energy_from_sma(psi: PotentialSpec, a: float) -> float:
    """Energy of an orbit with generalised semi-major axis ``a``."""
    fam = psi.family
    if fam in (Family.KEPLER, Family.HENON):
        return -psi.mu / (2.0 * a) + psi.epsilon
    if fam is Family.BOUNDED:
        return psi.mu / (2.0 * a) + psi.epsilon
    raise InputError("energy from a semi-major axis needs kepler, henon or bounded")


@dataclass(frozen=True)
class LawReport:
    tau_r: float
    sma: float
    kepler3_residual: float
    energy_form_residual: float

    def to_dict(self):
        return {"tau_r": self.tau_r, "sma": self.sma,
                "kepler3_residual": self.kepler3_residual,
                "energy_form_residual": self.energy_form_residual}


def kepler3_check(psi: PotentialSpec, xi, L, rel_tol=1e-11) -> LawReport:
    """Third law tau^2 = 4 pi^2 a^3 / mu and its energy form, from quadrature."""
    from .orbits import find_apsides, radial_period_quad

    if psi.family is Family.HARMONIC:
        raise InputError("the third law needs kepler, henon, bounded or finite_harmonic")
    ap = find_apsides(psi, xi, L)
    tau = radial_period_quad(psi, xi, L, rel_tol)
    a = isochrone_sma(psi, ap.r_p, ap.r_a)
    mu = psi.mass
    k3 = abs(tau**2 * mu / (4 * math.pi**2 * a**3) - 1.0)
    if psi.family is Family.FINITE_HARMONIC:
        ef = math.nan
    else:
        ef = abs(tau**2 * abs(xi - psi.epsilon) ** 3 / (0.5 * math.pi**2 * mu**2) - 1.0)
    return LawReport(tau, a, k3, ef)


# -- closed-orbit scan ----------------------------------------------------

@dataclass
class BertrandResult:
    n_phi: np.ndarray
    constant: bool
    rational: bool
    fraction: tuple

    @property
    def all_closed(self) -> bool:
        return self.constant and self.rational


def best_rational(x: float, max_den: int = 100):
    f = Fraction(x).limit_denominator(max_den)
    return f.numerator, f.denominator, abs(x - f.numerator / f.denominator)


def bertrand_scan(psi, points: Sequence[tuple], const_tol=1e-8, rational_tol=1e-9,
                  max_den=100, rel_tol=1e-12) -> BertrandResult:
    """Are all sampled orbits closed?  n_phi must be one rational constant."""
    from .orbits import azimuthal_increment_quad

    vals = np.array([azimuthal_increment_quad(psi, xi, L, rel_tol) for xi, L in points])
    constant = bool(vals.max() - vals.min() < const_tol)
    p, q, err = best_rational(float(np.mean(vals)), max_den)
    rational = constant and err < rational_tol
    return BertrandResult(vals, constant, rational, (p, q))
