"""Linear maps between isochrone orbits.

A bolst B_{alpha,beta} acts on the vector w = (xi x, y) of a point of an
orbit's parabola and keeps the interval xi x - y fixed, hence the angular
momentum.  The symmetric one-parameter family B_gamma (ibolsts) forms a
commutative group with eigenvectors k = (1, -1)/sqrt 2 (eigenvalue 1) and
l = (1, 1)/sqrt 2 (eigenvalue gamma).

Two coordinate conventions appear.  Mapping a single orbit
(:func:`map_kepler_orbit`, :func:`bolst_image_potential`) uses
w = (xi x, y) as above.  The ibolst tables and the momentum rule
Lambda' = sqrt(gamma) Lambda use w = (|xi| x, y), in which the interval is
no longer conserved but xi x - y is multiplied by gamma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (CausalityViolation, ImaginaryMomentum, InconsistentEllipse,
                     InputError, NoPRO, NotIsochrone, SignError, SingularBolst,
                     ZeroImageEnergy)
from .geometry import (ClassificationResult, CurveKind, Parabola, apply_linear,
                       reduce, tangent_and_axis, transform_affine)
from .potentials import (AffineTransform, Family, PotentialSpec, apply_affine,
                         bounded_minus, bounded_plus, henon_minus, henon_plus)

K_VEC = np.array([1.0, -1.0]) / math.sqrt(2.0)
L_VEC = np.array([1.0, 1.0]) / math.sqrt(2.0)


def minkowski(w, z) -> float:
    """<w|z> = w1 z1 - w2 z2."""
    return float(w[0] * z[0] - w[1] * z[1])


@dataclass(frozen=True)
class Bolst:
    alpha: float
    beta: float

    def __post_init__(self):
        if self.det == 0:
            raise SingularBolst("alpha + beta must be non-zero")

    @property
    def det(self) -> float:
        return self.alpha + self.beta

    @property
    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, b], [a - 1.0, b + 1.0]])

    @property
    def is_symmetric(self) -> bool:
        return self.alpha - 1.0 == self.beta

    def apply(self, w):
        return self.matrix @ np.asarray(w, dtype=float)

    def inverse_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)


@dataclass(frozen=True)
class Ibolst:
    gamma: float

    def __post_init__(self):
        if self.gamma == 0 or not math.isfinite(self.gamma):
            raise SingularBolst("gamma must be finite and non-zero")

    @property
    def matrix(self) -> np.ndarray:
        g = self.gamma
        return 0.5 * np.array([[g + 1.0, g - 1.0], [g - 1.0, g + 1.0]])

    def as_bolst(self) -> Bolst:
        return Bolst(0.5 * (self.gamma + 1.0), 0.5 * (self.gamma - 1.0))

    def apply(self, w):
        return self.matrix @ np.asarray(w, dtype=float)

    def compose(self, other: "Ibolst") -> "Ibolst":
        return Ibolst(self.gamma * other.gamma)

    def inverse(self) -> "Ibolst":
        return Ibolst(1.0 / self.gamma)


def ibolst_compose(g1: Ibolst, g2: Ibolst) -> Ibolst:
    return g1.compose(g2)


@dataclass(frozen=True)
class Frame:
    u: np.ndarray
    v: np.ndarray
    norm_u_m: float
    norm_v_m: float
    delta: float

    def to_dict(self):
        return {"u": self.u.tolist(), "v": self.v.tolist(),
                "minkowski_u": self.norm_u_m, "minkowski_v": self.norm_v_m,
                "delta": self.delta}


def frame_vectors(g: Ibolst) -> Frame:
    """Images u = B(i), v = B(j) of the canonical basis.

    ``delta`` is the angle with tan(delta) = |(gamma + 1)/(gamma - 1)|, pi/2 at
    gamma = 1.
    """
    u = g.apply([1.0, 0.0])
    v = g.apply([0.0, 1.0])
    gm = g.gamma
    delta = math.pi / 2 if gm == 1 else math.atan(abs((gm + 1.0) / (gm - 1.0)))
    return Frame(u, v, minkowski(u, u), minkowski(v, v), delta)


def momentum_map(g: Ibolst, L: float, same_energy_sign: bool) -> float:
    """Angular momentum of the image orbit seen in the primary frame."""
    if L <= 0:
        raise InputError("L must be positive")
    if not same_energy_sign:
        return L
    if g.gamma < 0:
        raise ImaginaryMomentum("gamma < 0 with energies of equal sign gives no periodic orbit")
    return math.sqrt(g.gamma) * L


def _intersect(p0, d0, p1, d1):
    """Intersection of the lines p0 + s d0 and p1 + t d1."""
    A = np.column_stack([d0, -d1])
    s, _ = np.linalg.solve(A, np.asarray(p1) - np.asarray(p0))
    return np.asarray(p0) + s * np.asarray(d0)


def momentum_construction(g: Ibolst, L: float, same_energy_sign: bool) -> float:
    """Lambda' from the ruler-and-compass construction on the Kepler parabola.

    The apsides of the Kepler orbit lie on the line Delta through
    K = (0, -Lambda^2) parallel to k.  Its image K' = B(K) carries the
    image apsides along k (energies of one sign) or along l (otherwise);
    that line cuts the Kepler tangent R j at H, and Lambda'^2 = |OH|.
    """
    if L <= 0:
        raise InputError("L must be positive")
    if same_energy_sign and g.gamma < 0:
        raise ImaginaryMomentum("gamma < 0 with energies of equal sign gives no periodic orbit")
    K = np.array([0.0, -L * L])
    Kp = g.apply(K)
    direction = K_VEC if same_energy_sign else L_VEC
    H = _intersect(np.zeros(2), np.array([0.0, 1.0]), Kp, direction)
    return math.sqrt(abs(H[1]))


# -- the primary Kepler ellipse -----------------------------------------

@dataclass(frozen=True)
class KeplerEllipse:
    """Bound Kepler orbit, 1/r = (1 + e cos phi) / p."""

    mu: float
    p: float
    e: float

    def __post_init__(self):
        if not self.mu > 0 or not self.p > 0:
            raise InputError("mu and p must be positive")
        if not 0 <= self.e < 1:
            raise InputError("eccentricity must lie in [0, 1)")

    @property
    def xi0(self) -> float:
        return -self.mu * (1.0 - self.e**2) / (2.0 * self.p)

    @property
    def L(self) -> float:
        return math.sqrt(self.mu * self.p)

    @property
    def r_p(self) -> float:
        return self.p / (1.0 + self.e)

    @property
    def r_a(self) -> float:
        return self.p / (1.0 - self.e)

    def radius(self, phi):
        return self.p / (1.0 + self.e * np.cos(phi))

    @classmethod
    def from_energy(cls, mu: float, xi0: float, L: float) -> "KeplerEllipse":
        if not xi0 < 0:
            raise InputError("a bound Kepler orbit needs xi0 < 0")
        e2 = 1.0 + 2.0 * L * L * xi0 / mu**2
        if e2 < -1e-14:
            raise InputError("L exceeds the circular value at this energy")
        return cls(mu, L * L / mu, math.sqrt(max(e2, 0.0)))

    @classmethod
    def from_shape(cls, p: float, e: float, xi0: float,
                   mu: Optional[float] = None) -> "KeplerEllipse":
        """Ellipse with given shape and energy; mu follows unless supplied.

        p, e and xi0 fix mu = 2 p |xi0| / (1 - e^2).  A supplied mu must agree
        to 1e-12 relative, otherwise :class:`InconsistentEllipse` is raised.
        """
        if not xi0 < 0:
            raise InputError("a bound Kepler orbit needs xi0 < 0")
        mu_needed = 2.0 * p * abs(xi0) / (1.0 - e * e)
        if mu is not None and abs(mu - mu_needed) > 1e-12 * mu_needed:
            raise InconsistentEllipse(
                f"p={p}, e={e}, xi0={xi0} require mu={mu_needed!r}, not {mu}")
        return cls(mu_needed, p, e)

    def to_dict(self):
        return {"mu": self.mu, "p": self.p, "e": self.e, "xi0": self.xi0, "L": self.L}


# -- mapping a Kepler orbit ----------------------------------------------

def chi_parameter(alpha, beta, p, xi0, mu) -> float:
    """chi = p alpha |xi0| / (mu beta)."""
    if beta == 0:
        return math.inf
    return p * alpha * abs(xi0) / (mu * beta)


def delta_phi1(chi: float, e: float) -> float:
    """Image azimuth swept from periastron to periastron."""
    if math.isinf(chi):
        return 2.0 * math.pi
    disc = (1.0 + chi) ** 2 - e * e
    if disc <= 0:
        raise NoPRO("the image of this ellipse is not a periodic orbit")
    return math.pi * (1.0 + chi / math.sqrt(disc))


def phi1_of_phi0(phi0, chi: float, e: float):
    """Image polar angle, continued across every apoastron passage."""
    phi0 = np.asarray(phi0, dtype=float)
    if math.isinf(chi):
        return phi0.copy()
    if chi == 0:
        return 0.5 * phi0
    disc = (1.0 + chi) ** 2 - e * e
    if disc <= 0 or (1.0 + chi - e) / (1.0 + chi + e) <= 0:
        raise NoPRO("the image of this ellipse is not a periodic orbit")
    c = math.sqrt((1.0 + chi - e) / (1.0 + chi + e))
    theta = 0.5 * phi0
    # arctan(c tan theta) continued: same quadrant as theta
    a = np.arctan2(c * np.sin(theta), np.cos(theta))
    cont = a + 2.0 * np.pi * np.round((theta - a) / (2.0 * np.pi))
    return theta + chi / math.sqrt(disc) * cont


@dataclass
class MappedOrbit:
    bolst: Bolst
    ellipse: KeplerEllipse
    xi1: float
    L1: float
    chi: float
    delta_phi1: float
    phi0: np.ndarray
    r0: np.ndarray
    phi1: np.ndarray
    r1: np.ndarray
    physical: bool
    image: Optional[ClassificationResult] = None
    notes: list = field(default_factory=list)

    def phi1_of_phi0(self, phi0):
        return _phi1(self.bolst, self.chi, self.ellipse.e, phi0)

    def r1_of_phi0(self, phi0):
        return np.sqrt(_r1_squared(self.bolst, self.ellipse, self.xi1, phi0))

    def rows(self):
        """Columns phi0, r0, phi1, r1, x0, y0, x1, y1."""
        return np.column_stack([self.phi0, self.r0, self.phi1, self.r1,
                                self.r0 * np.cos(self.phi0), self.r0 * np.sin(self.phi0),
                                self.r1 * np.cos(self.phi1), self.r1 * np.sin(self.phi1)])

    def summary(self):
        d = {"alpha": self.bolst.alpha, "beta": self.bolst.beta,
             "ellipse": self.ellipse.to_dict(), "xi1": self.xi1, "L1": self.L1,
             "chi": self.chi, "delta_phi1": self.delta_phi1,
             "delta_phi1_over_pi": self.delta_phi1 / math.pi,
             "physical": self.physical, "notes": list(self.notes)}
        if self.image is not None:
            d["image"] = self.image.to_dict()
            if self.image.physical:
                d["image_potential"] = self.image.potential().to_dict()
        return d


def _phi1(B: Bolst, chi, e, phi0):
    if B.alpha == 0:
        return 0.5 * np.asarray(phi0, dtype=float)
    return phi1_of_phi0(phi0, chi, e)


def _r1_squared(B: Bolst, ell: KeplerEllipse, xi1, phi0):
    r0 = ell.radius(np.asarray(phi0, dtype=float))
    return (B.alpha * ell.xi0 * r0**2 - ell.mu * B.beta * r0) / xi1


def _time_ratio(B: Bolst, ell: KeplerEllipse, xi1, cos_phi):
    """dt1/dt0 = dx1/dx0 along the ellipse."""
    return (B.alpha * ell.xi0 - ell.mu * B.beta * (1.0 + ell.e * cos_phi) / (2.0 * ell.p)) / xi1


def bolst_image_parabola(B: Bolst, ell: KeplerEllipse, xi1: float) -> Parabola:
    """Image of the Kepler parabola in the plane (x1, y1) of the new orbit."""
    if xi1 == 0:
        raise ZeroImageEnergy("xi1 = 0; apply a transvection first so the image energy is non-zero")
    x0 = ell.xi0
    M = np.array([[B.alpha * x0 / xi1, B.beta / xi1],
                  [(B.alpha - 1.0) * x0, B.beta + 1.0]])
    return apply_linear(Parabola(0.0, 1.0, -2.0 * ell.mu**2, 0.0, 0.0), M)


def bolst_image_potential(B: Bolst, ell: KeplerEllipse, xi1: float) -> ClassificationResult:
    """Classify the potential in which the image orbit moves."""
    return reduce(bolst_image_parabola(B, ell, xi1))


def map_kepler_orbit(B: Bolst, ell: KeplerEllipse, xi1: float, phi0_samples=None,
                     classify: bool = True) -> MappedOrbit:
    """Image of a Kepler ellipse under ``B`` at image energy ``xi1``."""
    if xi1 == 0:
        raise ZeroImageEnergy("xi1 = 0; apply a transvection first so the image energy is non-zero")
    if phi0_samples is None:
        phi0_samples = np.linspace(0.0, 2.0 * np.pi, 721)
    phi0 = np.asarray(phi0_samples, dtype=float)
    notes = []

    # dt1/dt0 is affine in cos(phi0): its extremes sit at the apsides
    n_ext = _time_ratio(B, ell, xi1, np.array([1.0, -1.0]))
    n_smp = _time_ratio(B, ell, xi1, np.cos(phi0))
    if np.min(n_ext) * np.max(n_ext) <= 0 or np.min(n_smp) * np.max(n_smp) <= 0:
        raise CausalityViolation("dt1/dt0 changes sign along the orbit")
    if n_ext[0] < 0:
        notes.append("image time runs backwards (dt1/dt0 < 0)")

    chi = 0.0 if B.alpha == 0 else chi_parameter(B.alpha, B.beta, ell.p, ell.xi0, ell.mu)
    r1sq = _r1_squared(B, ell, xi1, phi0)
    r1sq_ext = _r1_squared(B, ell, xi1, np.array([0.0, np.pi]))
    physical = bool(np.all(r1sq > 0) and np.all(r1sq_ext > 0))
    if not physical:
        notes.append("r1^2 <= 0 somewhere: the image is not a periodic orbit")
        phi1 = np.full_like(phi0, np.nan)
        dphi = math.nan
    else:
        phi1 = _phi1(B, chi, ell.e, phi0)
        dphi = math.pi if B.alpha == 0 else delta_phi1(chi, ell.e)
    r1 = np.sqrt(np.where(r1sq > 0, r1sq, np.nan))
    image = None
    if classify:
        image = bolst_image_potential(B, ell, xi1)
        if not image.physical:
            notes.append("image parabola is not physical: " + image.note)
    return MappedOrbit(B, ell, xi1, ell.L, chi, dphi, phi0, ell.radius(phi0), phi1, r1,
                       physical, image, notes)


def bohlin_image(ell: KeplerEllipse, beta: float, xi1: float):
    """Harmonic image of the alpha = 0 bolst: (omega1, constant offset)."""
    if beta == 0:
        raise SingularBolst("alpha + beta must be non-zero")
    if xi1 == 0:
        raise ZeroImageEnergy("xi1 must be non-zero")
    if beta / xi1 >= 0:
        raise InputError("beta / xi1 must be negative for a real image radius")
    omega2 = 2.0 * abs(ell.xi0) * xi1**2 / (ell.mu**2 * beta**2)
    return math.sqrt(omega2), (beta + 1.0) * xi1 / beta


# -- ibolst images of whole potentials ------------------------------------

@dataclass
class PotentialImage:
    table_cell: str
    mu_prime: float
    b: float
    epsilon: float
    table_potential: Optional[PotentialSpec]
    classified: ClassificationResult
    agrees: Optional[bool]

    def to_dict(self):
        d = {"table_cell": self.table_cell, "mu_prime": self.mu_prime, "b": self.b,
             "epsilon": self.epsilon, "classified": self.classified.to_dict(),
             "agrees": self.agrees}
        if self.table_potential is not None:
            d["table_potential"] = self.table_potential.to_dict()
        return d


def ibolst_parabola(g: Ibolst, source: Parabola, xi: float, xi_prime: float) -> Parabola:
    """Image parabola in (x', y') with the ibolst acting on (|xi| x, y).

    When xi and xi' have opposite signs the direction of u = B(i) is
    inverted, i.e. the source abscissa enters as -|xi| x.
    """
    if xi == 0 or xi_prime == 0:
        raise ZeroImageEnergy("energies must be non-zero")
    s = abs(xi) if xi * xi_prime > 0 else -abs(xi)
    S = np.diag([s, 1.0])
    Sp_inv = np.diag([1.0 / abs(xi_prime), 1.0])
    return apply_linear(source, Sp_inv @ g.matrix @ S)


_KEPLER_CELLS = {
    (True, True): ("he-", +1), (True, False): ("bo+", +1),
    (False, True): ("he+", -1), (False, False): ("bo-", -1),
}
# (gamma > 1, opposite) is printed as J(psi_bo-) = psi_he+ + eps; the
# right-hand side is what the bolsted parabola classifies to
_HARMONIC_CELLS = {
    (True, True): ("he+", +1), (True, False): ("he+", +1),
    (False, True): ("bo+", -1), (False, False): ("bo+", -1),
}
_BRANCHES = {"he+": henon_plus, "he-": henon_minus, "bo+": bounded_plus, "bo-": bounded_minus}


def _potential_match(a: PotentialSpec, b: PotentialSpec, tol: float) -> bool:
    if a.family is not b.family:
        return False
    for k in ("mu", "b", "epsilon", "lam"):
        x, y = getattr(a, k) or 0.0, getattr(b, k) or 0.0
        if abs(x - y) > tol * max(1.0, abs(x), abs(y)):
            return False
    return True


def ibolst_potential_image(g: Ibolst, source: str, sign_pair: str, xi: float,
                           xi_prime: float, mu_or_omega: float, tol: float = 1e-6) -> PotentialImage:
    """Tabulated image of a Kepler or harmonic potential under an ibolst.

    The table cell supplies the family branch and (mu', b, epsilon).  The
    same potential is also found by bolsting the source parabola and
    classifying it; ``agrees`` compares the two.
    """
    gm = g.gamma
    if not gm > 0 or gm == 1:
        raise InputError("the tables cover gamma > 0, gamma != 1")
    same = {"same": True, "opposite": False}.get(sign_pair)
    if same is None:
        raise InputError("sign_pair must be 'same' or 'opposite'")
    if mu_or_omega <= 0:
        raise InputError("mu or omega must be positive")
    if source == "kepler":
        if not xi < 0:
            raise SignError("Kepler source orbits need xi < 0")
        if (xi_prime < 0) != same:
            raise SignError(f"xi' = {xi_prime} inconsistent with sign pair '{sign_pair}'")
        mu = mu_or_omega
        root = math.sqrt(abs(8.0 * xi * xi_prime * (gm + 1.0)))
        mu_p = abs(8.0 * mu * xi_prime * gm / ((gm + 1.0) * root))
        b = abs(mu * (gm - 1.0) / root)
        eps = mu_p * (gm + 1.0) ** 2 / (8.0 * gm * b)
        cell, sgn = _KEPLER_CELLS[(gm > 1, same)]
        src = Parabola(0.0, 1.0, -2.0 * mu * mu, 0.0, 0.0)
    elif source == "harmonic":
        if not xi > 0:
            raise SignError("harmonic source orbits need xi > 0")
        if (xi_prime > 0) != same:
            raise SignError(f"xi' = {xi_prime} inconsistent with sign pair '{sign_pair}'")
        om = mu_or_omega
        root = math.sqrt(abs(xi_prime * (gm - 1.0)))
        mu_p = abs(4.0 * xi_prime * xi * gm / (om * (gm - 1.0) * root))
        b = (gm + 1.0) * abs(xi) / (2.0 * om * root)
        eps = mu_p * (gm - 1.0) ** 2 / (8.0 * b * gm)
        cell, sgn = _HARMONIC_CELLS[(gm > 1, same)]
        src = Parabola(om / 2.0, 0.0, 0.0, -1.0, 0.0)
    else:
        raise InputError("source must be 'kepler' or 'harmonic'")
    table_psi = apply_affine(_BRANCHES[cell](mu_p, b), AffineTransform(sgn * eps, 0.0))
    classified = reduce(ibolst_parabola(g, src, xi, xi_prime))
    agrees = None
    if classified.physical:
        agrees = _potential_match(table_psi, classified.potential(), tol)
    else:
        agrees = False
    label = f"{cell}{'+' if sgn > 0 else '-'}eps"
    return PotentialImage(label, mu_p, b, eps, table_psi, classified, agrees)


# -- back to Kepler -------------------------------------------------------

@dataclass
class BackToKepler:
    J_translate: AffineTransform
    J_transvect: AffineTransform
    gamma: float
    kepler: Parabola
    mu: float
    right_opening: bool = True

    def to_dict(self):
        return {"right_opening": self.right_opening,
                "J_translate": {"epsilon": self.J_translate.epsilon,
                                "lambda": self.J_translate.lam},
                "J_transvect": {"epsilon": self.J_transvect.epsilon,
                                "lambda": self.J_transvect.lam},
                "gamma": self.gamma, "mu": self.mu, "kepler": self.kepler.to_dict()}


def back_to_kepler(p: Parabola, tol: float = 1e-9) -> BackToKepler:
    """Translate, transvect and debolst an isochrone parabola onto a laid Kepler one.

    A curve that misses the origin is first translated so its convex branch
    passes through it.  There the curve has tangent
    t and axis n.  A transvection by eps shears both; the ibolst B_gamma
    sends the vertical and horizontal directions to slopes (g+1)/(g-1) and
    (g-1)/(g+1), which are reflections of each other in the diagonal.  So
    eps solves t1' n1' = t2' n2' and gamma follows from the tangent slope.
    Of the two candidate roots the one whose debolsted curve is a Kepler
    parabola opening to the right is preferred.  A left-opening laid curve
    is the Kepler parabola seen with the opposite energy sign and is
    returned with ``right_opening`` false.
    """
    res = reduce(p)
    if not res.physical:
        raise NotIsochrone(res.note or "parabola is not physical")
    # the translation is only needed when the curve misses the origin
    lam = 0.0 if abs(p.e) < 1e-12 else -res.affine.lam
    J_t = AffineTransform(0.0, lam)
    q = transform_affine(p, J_t)
    t, n = tangent_and_axis(q, tol=1e-9 * max(1.0, abs(p.e)))
    t1, t2 = t
    n1, n2 = n
    # -t1 n1 eps^2 - (t1 n2 + t2 n1) eps + (t1 n1 - t2 n2) = 0
    A, Bq, C = -t1 * n1, -(t1 * n2 + t2 * n1), t1 * n1 - t2 * n2
    if abs(A) < 1e-14:
        roots = [] if abs(Bq) < 1e-300 else [-C / Bq]
    else:
        disc = math.sqrt(max(Bq * Bq - 4 * A * C, 0.0))
        roots = [(-Bq + disc) / (2 * A), (-Bq - disc) / (2 * A)]
    best = None
    for eps in roots:
        tp = np.array([t1, t2 + eps * t1])
        if abs(tp[1] - tp[0]) < 1e-14 * np.hypot(*tp):
            continue
        gamma = (tp[1] + tp[0]) / (tp[1] - tp[0])
        if gamma == 0:
            continue
        adjusted = transform_affine(q, AffineTransform(eps, 0.0))
        deb = apply_linear(adjusted, Ibolst(1.0 / gamma).matrix)
        r = reduce(deb)
        tt, nn = tangent_and_axis(deb, tol=1e-9)
        laid = abs(tt[0]) < tol and abs(nn[1]) < tol
        if not laid:
            continue
        # a left-opening laid curve is a Kepler parabola seen with xi of the other sign
        cand = (r.kind is not CurveKind.KEPLER, abs(eps), eps, gamma, deb, r.mu)
        if best is None or cand[:2] < best[:2]:
            best = cand
    if best is None:
        raise NotIsochrone("no ibolst takes this parabola to a laid Kepler parabola")
    left, _, eps, gamma, deb, mu = best
    if left:
        mu = math.sqrt(abs(deb.c) / (2.0 * deb.b**2))
    return BackToKepler(J_t, AffineTransform(eps, 0.0), gamma, deb, mu, not left)
