"""Isochrone potential families, affine transforms and derived profiles.

Units: G = 1, the potential is per unit mass and ``r`` is the spherical
radius.  A potential is a base family plus an additive constant ``epsilon``
and a centrifugal "gauge" term ``lam / (2 r^2)``::

    psi(r) = psi_family(r) + epsilon + lam / (2 r^2)

Families
--------
kepler            -mu / r
harmonic          omega^2 r^2 / 2
henon             -mu / (b + sqrt(b^2 + r^2))
bounded           mu / (b + sqrt(b^2 - r^2)),   0 <= r <= b
finite_harmonic   homogeneous ball of radius R: harmonic inside, Kepler outside
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import DomainError, InputError


class Family(str, Enum):
    KEPLER = "kepler"
    HARMONIC = "harmonic"
    FINITE_HARMONIC = "finite_harmonic"
    HENON = "henon"
    BOUNDED = "bounded"


_CODES = {
    Family.KEPLER: _kernels.KEPLER,
    Family.HARMONIC: _kernels.HARMONIC,
    Family.FINITE_HARMONIC: _kernels.FINITE_HARMONIC,
    Family.HENON: _kernels.HENON,
    Family.BOUNDED: _kernels.BOUNDED,
}

_REQUIRED = {
    Family.KEPLER: ("mu",),
    Family.HARMONIC: ("omega",),
    Family.FINITE_HARMONIC: ("omega", "R"),
    Family.HENON: ("mu", "b"),
    Family.BOUNDED: ("mu", "b"),
}


def _positive(name, value):
    if value is None or not math.isfinite(value) or value <= 0:
        raise InputError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class AffineTransform:
    """The map psi -> psi + epsilon + lam / (2 r^2).

    Transforms form a commutative group under composition, which is just
    componentwise addition.
    """

    epsilon: float = 0.0
    lam: float = 0.0

    def compose(self, other: "AffineTransform") -> "AffineTransform":
        return AffineTransform(self.epsilon + other.epsilon, self.lam + other.lam)

    def inverse(self) -> "AffineTransform":
        return AffineTransform(-self.epsilon, -self.lam)

    @property
    def is_identity(self) -> bool:
        return self.epsilon == 0.0 and self.lam == 0.0


@dataclass(frozen=True)
class PotentialSpec:
    """A member of one of the isochrone families, possibly affinely shifted."""

    family: Family
    mu: Optional[float] = None
    omega: Optional[float] = None
    b: Optional[float] = None
    R: Optional[float] = None
    epsilon: float = 0.0
    lam: float = 0.0
    _params: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        for name in _REQUIRED[fam]:
            _positive(name, getattr(self, name))
        for name in ("epsilon", "lam"):
            if not math.isfinite(getattr(self, name)):
                raise InputError(f"{name} must be finite")
        mu = self.mu
        if fam is Family.FINITE_HARMONIC:
            mu = self.omega**2 * self.R**3
        params = np.array([
            mu or 0.0, self.omega or 0.0, self.b or 0.0, self.R or 0.0,
            float(self.epsilon), float(self.lam),
        ])
        object.__setattr__(self, "_params", params)

    # -- kernel access -------------------------------------------------
    @property
    def code(self) -> int:
        return _CODES[self.family]

    @property
    def params(self) -> np.ndarray:
        return self._params

    @property
    def mass(self) -> float:
        """Total mass parameter mu (omega^2 R^3 for the finite ball)."""
        return float(self._params[0])

    @property
    def affine(self) -> AffineTransform:
        return AffineTransform(self.epsilon, self.lam)

    @property
    def r_max(self) -> float:
        return self.b if self.family is Family.BOUNDED else math.inf

    @property
    def psi_inf(self) -> float:
        """Supremum of psi over the domain (escape level for bound orbits)."""
        if self.family is Family.HARMONIC:
            return math.inf
        if self.family is Family.BOUNDED:
            return self.mu / self.b + self.epsilon + 0.5 * self.lam / self.b**2
        return self.epsilon

    # -- evaluation ----------------------------------------------------
    def _check(self, r, allow_edge=True):
        r = np.asarray(r, dtype=float)
        if np.any(~np.isfinite(r)) or np.any(r < 0):
            raise DomainError("radius must be finite and non-negative")
        if np.any(r == 0) and (self.family is Family.KEPLER or self.lam != 0.0):
            raise DomainError("potential is singular at r = 0")
        if self.family is Family.BOUNDED:
            if np.any(r > self.b) or (not allow_edge and np.any(r == self.b)):
                raise DomainError(f"bounded potential is defined on [0, b] = [0, {self.b}]")
        return r

    def _terms(self, r, allow_edge=True):
        r = self._check(r, allow_edge)
        return _kernels.psi_terms(self.code, self._params, np.ravel(r)), r.shape

    def value(self, r):
        (v, _, _), shape = self._terms(r)
        return float(v[0]) if shape == () else v.reshape(shape)

    def deriv(self, r):
        (_, d1, _), shape = self._terms(r, allow_edge=False)
        return float(d1[0]) if shape == () else d1.reshape(shape)

    def deriv2(self, r):
        (_, _, d2), shape = self._terms(r, allow_edge=False)
        return float(d2[0]) if shape == () else d2.reshape(shape)

    __call__ = value

    # -- serialisation -------------------------------------------------
    def to_dict(self) -> dict:
        d = {"family": self.family.value}
        for name in ("mu", "omega", "b", "R"):
            val = getattr(self, name)
            if val is not None:
                d[name] = float(val)
        d["epsilon"] = float(self.epsilon)
        d["lambda"] = float(self.lam)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialSpec":
        known = {"family", "mu", "omega", "b", "R", "epsilon", "lambda", "lam"}
        extra = set(d) - known
        if extra:
            raise InputError(f"unknown potential keys: {sorted(extra)}")
        if "family" not in d:
            raise InputError("potential needs a 'family'")
        try:
            fam = Family(str(d["family"]).lower())
        except ValueError:
            raise InputError(f"unknown family {d['family']!r}") from None
        lam = d.get("lambda", d.get("lam", 0.0))
        kw = {k: (None if d.get(k) is None else float(d[k])) for k in ("mu", "omega", "b", "R")}
        return cls(fam, epsilon=float(d.get("epsilon", 0.0)), lam=float(lam), **kw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PotentialSpec":
        return cls.from_dict(json.loads(text))


class CustomPotential:
    """A user-supplied radial potential, used for negative controls.

    ``value`` and ``deriv`` must accept numpy arrays.  ``deriv`` is
    optional; a central difference is used when it is missing.
    """

    code = None

    def __init__(self, value: Callable, deriv: Optional[Callable] = None,
                 deriv2: Optional[Callable] = None, r_max: float = math.inf,
                 psi_inf: Optional[float] = None, name: str = "custom"):
        self._value = value
        self._deriv = deriv
        self._deriv2 = deriv2
        self.r_max = r_max
        self.name = name
        if psi_inf is None:
            psi_inf = float(value(np.array([r_max if math.isfinite(r_max) else 1e300]))[0])
            if not math.isfinite(psi_inf):
                psi_inf = math.inf
        self.psi_inf = psi_inf

    def value(self, r):
        out = self._value(np.asarray(r, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        if self._deriv is not None:
            out = self._deriv(r)
        else:
            h = 1e-5 * np.maximum(r, 1e-8)
            out = (self._value(r + h) - self._value(r - h)) / (2 * h)
        return float(out) if np.ndim(out) == 0 else out

    def deriv2(self, r):
        r = np.asarray(r, dtype=float)
        if self._deriv2 is not None:
            out = self._deriv2(r)
        else:
            h = 1e-4 * np.maximum(r, 1e-8)
            out = (self._value(r + h) - 2 * self._value(r) + self._value(r - h)) / h**2
        return float(out) if np.ndim(out) == 0 else out

    __call__ = value

    def __repr__(self):
        return f"CustomPotential({self.name!r})"


# -- constructors ---------------------------------------------------------

def kepler(mu: float = 1.0, epsilon: float = 0.0, lam: float = 0.0) -> PotentialSpec:
    return PotentialSpec(Family.KEPLER, mu=mu, epsilon=epsilon, lam=lam)


def harmonic(omega: float = 1.0, epsilon: float = 0.0, lam: float = 0.0) -> PotentialSpec:
    return PotentialSpec(Family.HARMONIC, omega=omega, epsilon=epsilon, lam=lam)


def henon(mu: float = 1.0, b: float = 1.0, epsilon: float = 0.0, lam: float = 0.0) -> PotentialSpec:
    return PotentialSpec(Family.HENON, mu=mu, b=b, epsilon=epsilon, lam=lam)


def bounded(mu: float = 1.0, b: float = 1.0, epsilon: float = 0.0, lam: float = 0.0) -> PotentialSpec:
    return PotentialSpec(Family.BOUNDED, mu=mu, b=b, epsilon=epsilon, lam=lam)


def finite_harmonic(omega: float = 1.0, R: float = 1.0, epsilon: float = 0.0,
                    lam: float = 0.0) -> PotentialSpec:
    return PotentialSpec(Family.FINITE_HARMONIC, omega=omega, R=R, epsilon=epsilon, lam=lam)


def apply_affine(psi: PotentialSpec, T: AffineTransform) -> PotentialSpec:
    """Return ``T(psi)``: the same family with shifted epsilon and lam."""
    return replace(psi, epsilon=psi.epsilon + T.epsilon, lam=psi.lam + T.lam)


def reduced_offset(family: Family, mu: float, b: float) -> float:
    """Constant that makes the family vanish at the centre (0 for Kepler/harmonic)."""
    family = Family(family)
    if family is Family.HENON:
        return mu / (2 * b)
    if family is Family.BOUNDED:
        return -mu / (2 * b)
    return 0.0


def henon_plus(mu: float = 1.0, b: float = 1.0) -> PotentialSpec:
    """Hénon potential shifted to vanish at r = 0."""
    return henon(mu, b, epsilon=mu / (2 * b))


def bounded_plus(mu: float = 1.0, b: float = 1.0) -> PotentialSpec:
    """Bounded potential shifted to vanish at r = 0."""
    return bounded(mu, b, epsilon=-mu / (2 * b))


def branch_transform(family: Family, mu: float, b: float) -> AffineTransform:
    """Affine map from the '+' reduced potential to its '-' companion.

    In the (2r^2, 2r^2 psi) plane the companion's parabola is the mirror
    image Y -> -Y of the '+' one; the companion carries an attractive 1/r^2
    term of strength -4 b mu.
    """
    family = Family(family)
    if family is Family.HENON:
        return AffineTransform(-mu / b, -4 * b * mu)
    if family is Family.BOUNDED:
        return AffineTransform(mu / b, -4 * b * mu)
    raise InputError("only the henon and bounded families have a second branch")


def henon_minus(mu: float = 1.0, b: float = 1.0) -> PotentialSpec:
    return apply_affine(henon_plus(mu, b), branch_transform(Family.HENON, mu, b))


def bounded_minus(mu: float = 1.0, b: float = 1.0) -> PotentialSpec:
    return apply_affine(bounded_plus(mu, b), branch_transform(Family.BOUNDED, mu, b))


# -- profiles ------------------------------------------------------------

def evaluate(psi, r):
    """psi(r) with domain checks."""
    return psi.value(r)


def eval_derivative(psi, r, order: int = 1):
    if order == 0:
        return psi.value(r)
    if order == 1:
        return psi.deriv(r)
    if order == 2:
        return psi.deriv2(r)
    raise InputError("order must be 0, 1 or 2")


def mass_profile(psi, r):
    """Enclosed mass G M(r) = r^2 dpsi/dr."""
    r = np.asarray(r, dtype=float)
    return r * r * psi.deriv(r)


def density(psi, r):
    """Density from Poisson's equation, (psi'' + 2 psi'/r) / (4 pi)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("density needs r > 0")
    return (psi.deriv2(r) + 2.0 * psi.deriv(r) / r) / (4.0 * math.pi)


def parse_potential(text: str) -> PotentialSpec:
    """Parse a JSON object or a compact ``family,key=value,...`` string."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return PotentialSpec.from_json(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad potential JSON: {exc}") from None
    parts = [s.strip() for s in text.split(",") if s.strip()]
    if not parts:
        raise InputError("empty potential description")
    d = {"family": parts[0]}
    for item in parts[1:]:
        if "=" not in item:
            raise InputError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            d[k.strip()] = float(v)
        except ValueError:
            raise InputError(f"not a number: {v!r}") from None
    return PotentialSpec.from_dict(d)
