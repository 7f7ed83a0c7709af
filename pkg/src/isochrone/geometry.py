"""Isochrones as parabolas in the plane x = 2 r^2, Y = x psi(r).

In these coordinates every isochrone potential traces an arc of a parabola

    (a x + b Y)^2 + c x + d Y + e = 0

and the affine transform psi -> psi + eps + lam / (2 r^2) becomes the plane
map (x, Y) -> (x, Y + eps x + lam).  :func:`reduce` undoes such a map and
reads off the family and its parameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (AmbiguousRoot, DegenerateParabola, InputError, NoChord,
                     NotIsochrone, NotMonotoneCurvature, NotThroughOrigin)
from .potentials import (AffineTransform, Family, PotentialSpec,
                         reduced_offset)

DEGENERACY_TOL = 1e-12
STRAIGHT_TOL = 1e-12
TANGENT_ROOT_TOL = 1e-10
VERTICAL_TANGENT_TOL = 1e-9


@dataclass(frozen=True)
class Parabola:
    """Coefficients of (a x + b Y)^2 + c x + d Y + e = 0, stored canonically.

    Scaling (a, b, c, d, e) -> (t a, t b, t^2 c, t^2 d, t^2 e) leaves the curve
    unchanged; the stored form has a^2 + b^2 = 1 and the first non-zero of
    (a, b) positive.
    """

    a: float
    b: float
    c: float
    d: float
    e: float

    def __post_init__(self):
        a, b, c, d, e = (float(v) for v in (self.a, self.b, self.c, self.d, self.e))
        if not all(math.isfinite(v) for v in (a, b, c, d, e)):
            raise InputError("parabola coefficients must be finite")
        n = math.hypot(a, b)
        if n == 0:
            raise DegenerateParabola("a and b cannot both vanish")
        t = 1.0 / n
        if a < 0 or (a == 0 and b < 0):
            t = -t
        a, b = a * t, b * t
        t2 = t * t
        c, d, e = c * t2, d * t2, e * t2
        if abs(a * d - b * c) <= DEGENERACY_TOL * max(math.hypot(c, d), 1e-300) or (c == 0 and d == 0):
            raise DegenerateParabola("linear part is parallel to the quadratic part")
        for name, val in zip("abcde", (a, b, c, d, e)):
            object.__setattr__(self, name, val)

    @property
    def coeffs(self):
        return (self.a, self.b, self.c, self.d, self.e)

    def __call__(self, x, Y):
        return (self.a * x + self.b * Y) ** 2 + self.c * x + self.d * Y + self.e

    def residual(self, x, Y):
        """Conic residual scaled by the size of the terms involved."""
        x = np.asarray(x, dtype=float)
        Y = np.asarray(Y, dtype=float)
        q = (self.a * x + self.b * Y) ** 2
        scale = q + np.abs(self.c * x) + np.abs(self.d * Y) + abs(self.e) + 1e-300
        return np.abs(self(x, Y)) / scale

    def to_dict(self):
        return dict(zip("abcde", self.coeffs))

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(*(float(d[k]) for k in "abcde"))
        except KeyError as exc:
            raise InputError(f"parabola needs key {exc}") from None

    def close_to(self, other: "Parabola", tol=1e-10) -> bool:
        u = np.array(self.coeffs)
        v = np.array(other.coeffs)
        return bool(np.max(np.abs(u - v)) <= tol * max(1.0, np.max(np.abs(u))))


def _raw_affine(a, b, c, d, e, eps, lam):
    """Coefficients of the image under (x, Y) -> (x, Y + eps x + lam)."""
    A = a - b * eps
    return (A, b, c - d * eps - 2 * b * lam * A, d - 2 * b * b * lam, e - d * lam + b * b * lam * lam)


def transform_affine(p: Parabola, T: AffineTransform) -> Parabola:
    """Image of the curve under the plane version of ``T``."""
    return Parabola(*_raw_affine(*p.coeffs, T.epsilon, T.lam))


def apply_linear(p: Parabola, M) -> Parabola:
    """Image of the curve under the invertible linear map X -> M X."""
    M = np.asarray(M, dtype=float)
    Minv_T = np.linalg.inv(M).T
    a, b = Minv_T @ np.array([p.a, p.b])
    c, d = Minv_T @ np.array([p.c, p.d])
    return Parabola(a, b, c, d, p.e)


def rotation_matrix(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate(p: Parabola, theta: float) -> Parabola:
    """The curve rotated by ``theta`` about the origin."""
    return apply_linear(p, rotation_matrix(theta))


# -- potentials <-> parabolas -------------------------------------------

def _reduced_coeffs(psi: PotentialSpec):
    fam = psi.family
    if fam is Family.KEPLER:
        return (0.0, 1.0, -2.0 * psi.mu**2, 0.0, 0.0)
    if fam is Family.HARMONIC:
        return (psi.omega / 2.0, 0.0, 0.0, -1.0, 0.0)
    if fam in (Family.HENON, Family.BOUNDED):
        k = psi.mu / (2.0 * psi.b)
        sign = -1.0 if fam is Family.HENON else 1.0
        return (sign * k, 1.0, 0.0, -4.0 * psi.b * psi.mu, 0.0)
    raise NotIsochrone(f"{fam.value} does not trace a single parabola")


def to_henon_curve(psi: PotentialSpec) -> Parabola:
    """Parabola traced by (2 r^2, 2 r^2 psi(r))."""
    coeffs = _reduced_coeffs(psi)
    eps = psi.epsilon - reduced_offset(psi.family, psi.mu or 0.0, psi.b or 1.0)
    return Parabola(*_raw_affine(*coeffs, eps, psi.lam))


class HenonCurve:
    """Y(x) = x psi(sqrt(x / 2)) with analytic derivatives up to order 4."""

    def __init__(self, psi: PotentialSpec):
        if psi.family is Family.FINITE_HARMONIC:
            raise NotIsochrone("the finite ball is not a single parabola")
        self.psi = psi

    @property
    def x_max(self):
        return 2.0 * self.psi.r_max**2

    def derivative(self, x, n=0):
        psi = self.psi
        x = np.asarray(x, dtype=float)
        fam = psi.family
        lin = {0: psi.epsilon * x + psi.lam, 1: psi.epsilon + 0 * x}.get(n, 0 * x)
        if fam is Family.KEPLER:
            # -mu sqrt(2) x^(1/2)
            base = -psi.mu * math.sqrt(2.0) * _falling(0.5, n) * x ** (0.5 - n)
        elif fam is Family.HARMONIC:
            w2 = psi.omega**2 / 4.0
            base = {0: w2 * x * x, 1: 2 * w2 * x, 2: 2 * w2 + 0 * x}.get(n, 0 * x)
        else:
            # -2 mu (sqrt(b^2 + sigma x / 2) - b)
            sigma = 1.0 if fam is Family.HENON else -1.0
            u = psi.b**2 + sigma * x / 2.0
            base = -2.0 * psi.mu * (sigma / 2.0) ** n * _falling(0.5, n) * u ** (0.5 - n)
            if n == 0:
                base = base + 2.0 * psi.mu * psi.b
        return base + lin

    def __call__(self, x):
        return self.derivative(x, 0)


def _falling(a, n):
    out = 1.0
    for k in range(n):
        out *= a - k
    return out


# -- classification -----------------------------------------------------

class CurveKind(str, Enum):
    KEPLER = "Kepler"
    HARMONIC = "Harmonic"
    HENON_PLUS = "HenonPlus"
    HENON_MINUS = "HenonMinus"
    BOUNDED_PLUS = "BoundedPlus"
    BOUNDED_MINUS = "BoundedMinus"
    NON_PHYSICAL = "NonPhysical"


_KIND_FAMILY = {
    CurveKind.KEPLER: Family.KEPLER,
    CurveKind.HARMONIC: Family.HARMONIC,
    CurveKind.HENON_PLUS: Family.HENON,
    CurveKind.HENON_MINUS: Family.HENON,
    CurveKind.BOUNDED_PLUS: Family.BOUNDED,
    CurveKind.BOUNDED_MINUS: Family.BOUNDED,
}


@dataclass(frozen=True)
class ClassificationResult:
    """Family read off a parabola, with the affine map back to its input.

    ``affine`` is relative to the reduced curve (the one through the origin
    with a horizontal tangent there), so ``transform_affine(reduced, affine)``
    is the input.  ``kappa`` > 0 marks the Hénon type, < 0 the bounded type.
    The Plus/Minus suffix says whether the parabola opens upwards or
    downwards; on reduced potentials it separates psi+ from its mirrored
    companion psi-.
    """

    kind: CurveKind
    mu: Optional[float] = None
    omega: Optional[float] = None
    b: Optional[float] = None
    affine: AffineTransform = AffineTransform()
    kappa: Optional[float] = None
    note: str = ""

    @property
    def family(self) -> Optional[Family]:
        return _KIND_FAMILY.get(self.kind)

    @property
    def physical(self) -> bool:
        return self.kind is not CurveKind.NON_PHYSICAL

    def potential(self) -> PotentialSpec:
        """The potential whose increasing branch is this curve."""
        if not self.physical:
            raise NotIsochrone(self.note or "no physical potential on this curve")
        fam = self.family
        off = reduced_offset(fam, self.mu or 0.0, self.b or 1.0)
        return PotentialSpec(fam, mu=self.mu, omega=self.omega, b=self.b,
                             epsilon=self.affine.epsilon + off, lam=self.affine.lam)

    def reduced(self) -> Parabola:
        psi = self.potential()
        off = reduced_offset(psi.family, psi.mu or 0.0, psi.b or 1.0)
        return to_henon_curve(PotentialSpec(psi.family, mu=psi.mu, omega=psi.omega,
                                            b=psi.b, epsilon=off))

    def to_dict(self):
        d = {"family": self.kind.value, "epsilon": self.affine.epsilon,
             "lambda": self.affine.lam, "note": self.note}
        for k in ("mu", "omega", "b", "kappa"):
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        return d


def _intercept(p: Parabola):
    """Y-intercept carrying the convex (increasing-potential) branch.

    At x = 0 the conic reads b^2 Y^2 + d Y + e = 0.  After shifting the
    chosen root to the origin the new d equals -sqrt(D); the other root
    gives +sqrt(D) and the concave branch.
    """
    a, b, c, d, e = p.coeffs
    if abs(b) <= STRAIGHT_TOL:
        return -e / d, d, 0.0
    D = d * d - 4 * b * b * e
    # c enters so that rounding noise on a laid parabola is not mistaken for a miss
    scale = d * d + 4 * b * b * abs(e) + (1e-6 * c) ** 2
    if D < 0 and -D > TANGENT_ROOT_TOL * scale:
        raise AmbiguousRoot("the curve never meets the vertical axis")
    if D <= TANGENT_ROOT_TOL * scale:
        return -d / (2 * b * b), 0.0, D
    sq = math.sqrt(D)
    # pick the numerically stable form of (-d - sqrt(D)) / (2 b^2)
    Y0 = 2 * e / (-d + sq) if d < 0 else (-d - sq) / (2 * b * b)
    return Y0, -sq, D


def opening_direction(p: Parabola):
    """Unit vector along the axis, pointing into the parabola's interior."""
    u = np.array([-p.b, p.a])
    s = -(p.c * u[0] + p.d * u[1])
    return u if s >= 0 else -u


def reduce(p: Parabola) -> ClassificationResult:
    """Classify a parabola and find the affine map from its reduced form."""
    a, b, c, d, e = p.coeffs
    Y0, d1, _ = _intercept(p)
    # translate so the convex branch passes through the origin
    a1, b1, c1, _, _ = _raw_affine(a, b, c, d, e, 0.0, -Y0)

    if abs(b) <= STRAIGHT_TOL:
        if d >= 0:
            return ClassificationResult(CurveKind.NON_PHYSICAL,
                                        note="straight parabola opening downwards")
        omega = 2.0 * abs(a) / math.sqrt(-d)
        return ClassificationResult(CurveKind.HARMONIC, omega=omega,
                                    affine=AffineTransform(-c / d, Y0))

    if abs(d1) <= VERTICAL_TANGENT_TOL * math.hypot(c1, d1):
        # vertical tangent at the origin: a laid Kepler parabola
        if c1 >= 0:
            return ClassificationResult(CurveKind.NON_PHYSICAL,
                                        note="laid parabola opening to the left")
        mu = math.sqrt(-c1 / (2 * b * b))
        return ClassificationResult(CurveKind.KEPLER, mu=mu,
                                    affine=AffineTransform(-a1 / b, Y0))

    # transvect to a horizontal tangent
    eps = -c1 / d1
    ar = a1 + b * eps
    kappa = -ar / b
    P = -d1 / (4 * b * b)
    K = abs(kappa)
    bs = math.sqrt(P / (2 * K))
    mu = 2 * K * bs
    up = opening_direction(p)[1] >= 0
    if kappa > 0:
        kind = CurveKind.HENON_PLUS if up else CurveKind.HENON_MINUS
    else:
        kind = CurveKind.BOUNDED_PLUS if up else CurveKind.BOUNDED_MINUS
    return ClassificationResult(kind, mu=mu, b=bs, affine=AffineTransform(eps, Y0),
                                kappa=kappa)


def tangent_and_axis(p: Parabola, tol=1e-12):
    """Unit tangent at the origin and unit axis direction.

    Directions are defined up to sign; the returned vectors have their
    first non-zero component positive.
    """
    if abs(p.e) >= tol:
        raise NotThroughOrigin(f"curve misses the origin (e = {p.e})")
    t = _unit(np.array([-p.d, p.c]))
    n = _unit(np.array([-p.b, p.a]))
    return t, n


def _unit(v):
    v = v / np.linalg.norm(v)
    k = 0 if abs(v[0]) > 1e-15 else 1
    return v if v[k] > 0 else -v


# -- parabola tests on sampled curves ------------------------------------

def central_derivatives(f: Callable, x0: float, h: Optional[float] = None):
    """Second, third and fourth derivatives by Richardson-extrapolated stencils."""
    if h is None:
        h = 0.05 * max(abs(x0), 1e-3)

    def stencil(h):
        fm2, fm1, f0, fp1, fp2 = (float(f(x0 + k * h)) for k in (-2, -1, 0, 1, 2))
        d2 = (fp1 - 2 * f0 + fm1) / h**2
        d3 = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h**3)
        d4 = (fp2 - 4 * fp1 + 6 * f0 - 4 * fm1 + fm2) / h**4
        return np.array([d2, d3, d4])

    best = None
    prev = None
    for k in range(4):
        hk = h / 2**k
        coarse, fine = stencil(2 * hk), stencil(hk)
        rich = fine + (fine - coarse) / 3.0
        if prev is not None:
            gap = np.max(np.abs(rich - prev) / np.maximum(np.abs(rich), 1e-300))
            if best is None or gap < best[0]:
                best = (gap, rich)
        prev = rich
    return best[1]


def parabola_ode_residual(f=None, x0: float = 1.0, derivs: Optional[Sequence[float]] = None,
                          normalize: bool = True) -> float:
    """5 f'''^2 - 3 f'''' f'' at x0; zero exactly when f is a parabola arc.

    Derivatives come from ``derivs`` = (f'', f''', f''''), from a
    :class:`HenonCurve` analytically, or from finite differences.  With
    ``normalize`` the value is divided by max(1, |f''|^3).
    """
    if derivs is not None:
        f2, f3, f4 = derivs
    elif isinstance(f, HenonCurve):
        f2, f3, f4 = (float(f.derivative(x0, n)) for n in (2, 3, 4))
    else:
        f2, f3, f4 = central_derivatives(f, x0)
    res = 5.0 * f3 * f3 - 3.0 * f4 * f2
    if normalize:
        res /= max(1.0, abs(f2) ** 3)
    return float(res)


@dataclass
class PropertyPReport:
    omega_estimates: list
    lambdas: list
    spread: float
    tol: float

    @property
    def is_parabola(self) -> bool:
        return self.spread < self.tol


def check_property_P(f: Callable, x0: float, interval, lambdas=None, fprime=None,
                     tol: float = 1e-6, n_curv: int = 65) -> PropertyPReport:
    """Chord test: on a parabola the chord width grows exactly like sqrt(lambda).

    For each lambda the line parallel to the tangent at x0 and lambda above
    it (below, for concave f) meets f at x_p < x0 < x_a; the ratio
    (x_a - x_p) / sqrt(lambda) is the same for every lambda iff f is a
    parabola arc.
    """
    lo, hi = (float(v) for v in interval)
    if not lo < x0 < hi:
        raise InputError("x0 must lie strictly inside the interval")
    grid = np.linspace(lo, hi, n_curv)[1:-1]
    step = 1e-3 * (hi - lo)
    curv = np.array([(f(x + step) - 2 * f(x) + f(x - step)) / step**2 for x in grid], dtype=float)
    if np.any(curv > 0) and np.any(curv < 0):
        raise NotMonotoneCurvature("f'' changes sign on the interval")
    sign = 1.0 if np.mean(curv) > 0 else -1.0
    if fprime is not None:
        s0 = float(fprime(x0))
    else:
        hh = 1e-4 * max(abs(x0), 1e-3)
        s0 = float((-f(x0 + 2 * hh) + 8 * f(x0 + hh) - 8 * f(x0 - hh) + f(x0 - 2 * hh)) / (12 * hh))
    f0 = float(f(x0))

    def g(x):
        return sign * (float(f(x)) - f0 - s0 * (x - x0))

    if lambdas is None:
        w = min(x0 - lo, hi - x0)
        scale = 0.5 * abs(float(np.interp(x0, grid, curv))) * w * w
        lambdas = [scale * 10.0**-k for k in range(1, 5)]
    est = []
    for lam in lambdas:
        if lam <= 0:
            raise InputError("lambda values must be positive")
        if g(hi) < lam or g(lo) < lam:
            raise NoChord(f"no chord at lambda={lam} inside the interval")
        xa = brentq(lambda x: g(x) - lam, x0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
        xp = brentq(lambda x: g(x) - lam, lo, x0, xtol=1e-300, rtol=1e-15, maxiter=500)
        est.append((xa - xp) / math.sqrt(lam))
    est_arr = np.array(est)
    spread = float((est_arr.max() - est_arr.min()) / abs(est_arr.mean()))
    return PropertyPReport(est, list(lambdas), spread, tol)
