"""Radially periodic orbits: apsides, regularised quadratures, integration.

An orbit is labelled by its specific energy ``xi`` and angular momentum
``L``.  It is periodic in r when the effective potential
``psi_e(r) = L^2 / (2 r^2) + psi(r)`` has a well that ``xi`` sits inside.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import roots_legendre

from . import _kernels
from ._backend import thread_count
from .errors import (BelowCircular, DomainExit, GaugeDomain, InputError,
                     InsufficientEvents, NoMinimum, NonConvergent, StepFailure,
                     Unbound, ZeroMomentum)
from .potentials import PotentialSpec

CIRCULAR_ENERGY_TOL = 1e-13
NEAR_CIRCULAR_GAP = 1e-8
MAX_ORDER = 2**14


@dataclass(frozen=True)
class OrbitParams:
    xi: float
    L: float

    def __post_init__(self):
        if not (math.isfinite(self.xi) and math.isfinite(self.L)):
            raise InputError("orbit parameters must be finite")
        if self.L < 0:
            raise InputError("angular momentum must be non-negative")


@dataclass(frozen=True)
class Apsides:
    r_p: float
    r_a: float
    r_c: float
    xi_c: float

    @property
    def circular(self) -> bool:
        return self.r_p == self.r_a

    @property
    def x_p(self) -> float:
        return 2.0 * self.r_p**2

    @property
    def x_a(self) -> float:
        return 2.0 * self.r_a**2


def _root(f, lo, hi):
    return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def effective_potential(psi, L, r):
    r = np.asarray(r, dtype=float)
    out = 0.5 * L * L / (r * r) + psi.value(r)
    return float(out) if out.ndim == 0 else out


def _check_momentum(psi, L):
    lam = getattr(psi, "lam", 0.0)
    if L * L + lam <= 0:
        raise GaugeDomain(f"L^2 + lambda = {L * L + lam} must be positive")


def _edge(psi):
    """Largest radius where the force may be evaluated."""
    r_max = psi.r_max
    return r_max * (1 - 1e-15) if math.isfinite(r_max) else math.inf


def _bracket(g, start, r_hi, want_positive_up=True, max_iter=2200):
    """Find lo < hi around a sign change of g, g(lo) < 0 < g(hi)."""
    lo = hi = start
    for _ in range(max_iter):
        if g(lo) < 0:
            break
        lo *= 0.5
    else:
        raise NoMinimum("no sign change towards the centre")
    for _ in range(max_iter):
        if hi >= r_hi:
            hi = r_hi
            break
        if g(hi) > 0:
            break
        hi *= 2.0
    if not g(hi) > 0:
        raise NoMinimum("no sign change towards the edge of the domain")
    return lo, hi


def circular_orbit(psi, L):
    """Radius and energy of the circular orbit with angular momentum L."""
    _check_momentum(psi, L)
    L2 = L * L

    def g(r):
        return r**3 * psi.deriv(r) - L2

    r_hi = _edge(psi)
    start = min(1.0, 0.5 * r_hi)
    lo, hi = _bracket(g, start, r_hi)
    if lo == hi:
        rc = lo
    else:
        rc = _root(g, lo, hi)
    return rc, effective_potential(psi, L, rc)


def circular_at_energy(psi, xi):
    """Circular orbit (r_c, L_c) at energy xi; L_c is the largest L allowed.

    Uses psi + r psi'/2 = xi, which is independent of any 1/r^2 term.
    """
    lam = getattr(psi, "lam", 0.0)

    def h(r):
        return psi.value(r) - 0.5 * lam / r**2 + 0.5 * r * (psi.deriv(r) + lam / r**3) - xi

    r_hi = _edge(psi)
    lo, hi = _bracket(h, min(1.0, 0.5 * r_hi), r_hi)
    rc = _root(h, lo, hi)
    L2 = rc**3 * psi.deriv(rc)
    if L2 <= 0:
        raise NoMinimum("no circular orbit at this energy")
    return rc, math.sqrt(L2)


def find_apsides(psi, xi, L) -> Apsides:
    """Periastron and apoastron of the orbit (xi, L)."""
    # the wall of a finite domain also carries the centrifugal term
    escape = psi.psi_inf
    if math.isfinite(psi.r_max):
        escape += 0.5 * L * L / psi.r_max**2
    if xi >= escape:
        raise Unbound(f"xi = {xi} is not below the escape level {escape}")
    rc, xic = circular_orbit(psi, L)
    if abs(xi - xic) < CIRCULAR_ENERGY_TOL * max(1.0, abs(xic)):
        return Apsides(rc, rc, rc, xic)
    if xi < xic:
        raise BelowCircular(f"xi = {xi} is below the circular energy {xic}")
    L2 = L * L

    def f(r):
        # 2 r^2 (xi - psi_e), well scaled near the centre
        return 2.0 * r * r * (xi - psi.value(r)) - L2

    lo = rc
    for _ in range(2200):
        lo *= 0.5
        if f(lo) < 0:
            break
    else:
        raise NonConvergent("could not bracket the periastron")
    rp = _root(f, lo, rc)

    r_max = psi.r_max
    hi = rc
    for _ in range(2200):
        hi *= 2.0
        if hi >= r_max:
            hi = r_max
            break
        if f(hi) < 0:
            break
    else:
        raise NonConvergent("could not bracket the apoastron")
    ra = _root(f, rc, hi)
    if math.isfinite(r_max) and ra > 0.999 * r_max:
        warnings.warn("apoastron within 0.1% of the domain edge; precision degrades",
                      RuntimeWarning, stacklevel=2)
    return Apsides(rp, ra, rc, xic)


@lru_cache(maxsize=32)
def _nodes(n):
    x, w = roots_legendre(n)
    theta = 0.5 * math.pi * (x + 1.0)
    return np.ascontiguousarray(theta), np.ascontiguousarray(0.5 * math.pi * w)


@dataclass(frozen=True)
class OrbitIntegrals:
    tau_r: float
    n_phi: float
    action: float
    order: int
    apsides: Apsides


def _sums(psi, xi, L, ap, n):
    theta, w = _nodes(n)
    if psi.code is not None:
        return _kernels.orbit_sums(psi.code, psi.params, xi, L, ap.r_p, ap.r_a, theta, w)
    m = 0.5 * (ap.r_p + ap.r_a)
    h = 0.5 * (ap.r_a - ap.r_p)
    r = m - h * np.cos(theta)
    return _kernels.orbit_sums_from_values(np.asarray(psi.value(r)), r, xi, L, h, theta, w)


def orbit_integrals(psi, xi, L, rel_tol=1e-10, which=(0, 1, 2)) -> OrbitIntegrals:
    """tau_r, n_phi and the radial action by Gauss-Legendre order doubling.

    ``which`` selects the quantities that must converge (0 = tau_r,
    1 = n_phi, 2 = action).
    """
    ap = find_apsides(psi, xi, L)
    gap = ap.r_a - ap.r_p
    if gap < NEAR_CIRCULAR_GAP * ap.r_c:
        # harmonic approximation of the bottom of the well
        kappa2 = psi.deriv2(ap.r_c) + 3.0 * L * L / ap.r_c**4
        kappa = math.sqrt(kappa2)
        return OrbitIntegrals(2 * math.pi / kappa, L / (ap.r_c**2 * kappa),
                              max(0.0, xi - ap.xi_c) / kappa, 0, ap)
    n = 16
    prev = np.array(_sums(psi, xi, L, ap, n))
    while True:
        n *= 2
        if n > MAX_ORDER:
            raise NonConvergent(f"quadrature did not reach rel_tol={rel_tol} by order {MAX_ORDER}")
        cur = np.array(_sums(psi, xi, L, ap, n))
        scale = np.abs(cur)
        # the action can vanish; judge it against the tau-scaled energy gap
        scale[2] = max(scale[2], 1e-3 * abs(cur[0]) * abs(xi - ap.xi_c))
        diff = np.abs(cur - prev)
        if all(diff[i] <= rel_tol * scale[i] for i in which):
            return OrbitIntegrals(float(cur[0]), float(cur[1]), float(cur[2]), n, ap)
        prev = cur


def radial_period_quad(psi, xi, L, rel_tol=1e-10) -> float:
    if L == 0:
        raise ZeroMomentum("radial orbits (L = 0) are not supported")
    return orbit_integrals(psi, xi, L, rel_tol, which=(0,)).tau_r


def azimuthal_increment_quad(psi, xi, L, rel_tol=1e-10) -> float:
    if L == 0:
        raise ZeroMomentum("radial orbits (L = 0) are not supported")
    return orbit_integrals(psi, xi, L, rel_tol, which=(1,)).n_phi


def radial_action_quad(psi, xi, L, rel_tol=1e-10) -> float:
    if L == 0:
        raise ZeroMomentum("radial orbits (L = 0) are not supported")
    return orbit_integrals(psi, xi, L, rel_tol, which=(2,)).action


# -- grids ----------------------------------------------------------------

def momentum_range(psi, xi):
    """Open interval (L_min, L_max) of angular momenta bound at energy xi."""
    _, Lc = circular_at_energy(psi, xi)
    lam = getattr(psi, "lam", 0.0)
    return math.sqrt(max(0.0, -lam)), Lc


def orbit_grid(psi, xi_values: Sequence[float], n_L: int = 5, lo=0.15, hi=0.85):
    """Tensor grid of momenta valid at every energy in ``xi_values``."""
    ranges = [momentum_range(psi, xi) for xi in xi_values]
    Lmin = max(r[0] for r in ranges)
    Lmax = min(r[1] for r in ranges)
    if not Lmax > Lmin:
        raise InputError("no common momentum range on this energy grid")
    Ls = Lmin + (Lmax - Lmin) * np.linspace(lo, hi, n_L)
    return list(map(float, xi_values)), [float(x) for x in Ls]


def _map(func, items):
    n = thread_count()
    if n <= 1 or len(items) < 2:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(func, items))


@dataclass
class IsochronyReport:
    tau_variation: float
    nphi_variation: float
    mixed_derivative: float
    tol: float
    tau: np.ndarray = field(repr=False)
    n_phi: np.ndarray = field(repr=False)
    action: np.ndarray = field(repr=False)
    skipped: List[tuple] = field(default_factory=list)

    @property
    def is_isochrone(self) -> bool:
        return (self.tau_variation < self.tol and self.nphi_variation < self.tol
                and self.mixed_derivative < self.tol)


def isochrony_test(psi, xi_grid, L_grid, tol=1e-6, rel_tol=1e-11) -> IsochronyReport:
    """Check the three equivalent signatures of an isochrone on a grid.

    * tau_r independent of L at fixed xi,
    * n_phi independent of xi at fixed L,
    * the radial action separates, A(xi, L) = f(xi) + g(L), measured by the
      mixed finite difference on neighbouring grid cells.
    """
    xi_grid = [float(x) for x in xi_grid]
    L_grid = [float(x) for x in L_grid]
    pts = [(i, j) for i in range(len(xi_grid)) for j in range(len(L_grid))]
    shape = (len(xi_grid), len(L_grid))
    tau = np.full(shape, np.nan)
    nph = np.full(shape, np.nan)
    act = np.full(shape, np.nan)
    skipped = []

    def work(ij):
        i, j = ij
        try:
            return ij, orbit_integrals(psi, xi_grid[i], L_grid[j], rel_tol)
        except InputError as exc:
            return ij, exc

    for (i, j), res in _map(work, pts):
        if isinstance(res, Exception):
            skipped.append((xi_grid[i], L_grid[j], str(res)))
            continue
        tau[i, j], nph[i, j], act[i, j] = res.tau_r, res.n_phi, res.action

    def spread(a, axis):
        mx = np.nanmax(a, axis=axis)
        mn = np.nanmin(a, axis=axis)
        mean = np.nanmean(np.abs(a), axis=axis)
        return float(np.nanmax((mx - mn) / mean))

    # rows or columns emptied by skipped points give nan, not a warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        tau_var = spread(tau, 1)
        nph_var = spread(nph, 0)
        dxi = np.diff(xi_grid)[:, None]
        dL = np.diff(L_grid)[None, :]
        mixed = (act[1:, 1:] - act[1:, :-1] - act[:-1, 1:] + act[:-1, :-1]) / (dxi * dL)
        mixed_max = float(np.nanmax(np.abs(mixed))) if mixed.size else 0.0
    return IsochronyReport(tau_var, nph_var, mixed_max, tol, tau, nph, act, skipped)


# -- integration ----------------------------------------------------------

@dataclass
class Trajectory:
    t: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    v_r: np.ndarray
    energy_err: np.ndarray
    event_t: np.ndarray
    event_r: np.ndarray
    event_phi: np.ndarray
    event_kind: np.ndarray  # +1 periastron, -1 apoastron
    xi: float
    L: float

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energy_err)))

    @property
    def x(self):
        return self.r * np.cos(self.phi)

    @property
    def y(self):
        return self.r * np.sin(self.phi)

    @property
    def events(self):
        return [{"t": float(t), "kind": "peri" if k > 0 else "apo"}
                for t, k in zip(self.event_t, self.event_kind)]

    def periastra(self):
        sel = self.event_kind > 0
        return self.event_t[sel], self.event_phi[sel]


def integrate_orbit(psi: PotentialSpec, xi, L, phi0=0.0, n_radial_periods=10.0,
                    tol=1e-10, t_end=None) -> Trajectory:
    """Integrate the orbit from periastron with an adaptive Dormand-Prince pair."""
    if psi.code is None:
        raise InputError("integration needs a family potential")
    if L <= 0:
        raise ZeroMomentum("integration needs L > 0")
    ap = find_apsides(psi, xi, L)
    if t_end is None:
        t_end = n_radial_periods * radial_period_quad(psi, xi, L)
    # start exactly on the energy surface
    out = _kernels.integrate(psi.code, psi.params, L, ap.r_p, 0.0, phi0, t_end,
                             tol, tol, r_max=psi.r_max)
    ts, rs, vs, ps, es, et, er, ep, ek, status = out
    if status == _kernels.LEFT_DOMAIN:
        raise DomainExit("trajectory left the domain of the potential")
    if status != _kernels.OK:
        raise StepFailure(f"integrator stopped early (status {status}) at t = {ts[-1]}")
    e0 = effective_potential(psi, L, ap.r_p)
    es = es + (e0 - xi)
    return Trajectory(ts, rs, ps, vs, es, et, er, ep, ek, xi, L)


@dataclass(frozen=True)
class RosetteStats:
    n_phi_measured: float
    tau_measured: float
    half_sweep: float
    turns_center: bool


def rosette_stats(traj: Trajectory) -> RosetteStats:
    """Precession measured from the periastron events of a trajectory.

    ``turns_center`` holds when a full radial period sweeps more than half
    a turn (n_phi > 1/2): the path then winds around the origin instead of
    oscillating on one side of it.
    """
    tp, php = traj.periastra()
    if len(tp) < 2:
        raise InsufficientEvents("need at least two periastra")
    n_phi = float(np.mean(np.diff(php))) / (2 * math.pi)
    tau = float(np.mean(np.diff(tp)))
    sweeps = []
    kinds = traj.event_kind
    for k in range(len(kinds) - 1):
        if kinds[k] < 0 and kinds[k + 1] > 0:
            sweeps.append(traj.event_phi[k + 1] - traj.event_phi[k])
    if not sweeps:
        raise InsufficientEvents("need an apoastron followed by a periastron")
    half = float(np.mean(sweeps))
    return RosetteStats(n_phi, tau, half, n_phi > 0.5)
