"""Hot numerical kernels.

Each kernel is plain Python/numpy that numba can also compile.  The
dispatchers at the bottom pick the compiled variant or the numpy variant
according to :mod:`isochrone._backend`.

Potential parameters travel as a float64 array ``p = [mu, omega, b, R, eps, lam]``
together with an integer family code.
"""
import math

import numpy as np

from ._backend import USE_NUMBA, maybe_jit

KEPLER = 0
HARMONIC = 1
FINITE_HARMONIC = 2
HENON = 3
BOUNDED = 4

# status codes returned by the integrator
OK = 0
MAX_STEPS = 1
STEP_UNDERFLOW = 2
LEFT_DOMAIN = 3


def _psi_terms(code, p, r):
    """(psi, dpsi/dr, d2psi/dr2) at a single radius; nan outside the domain."""
    mu, omega, b, R, eps, lam = p[0], p[1], p[2], p[3], p[4], p[5]
    nan = math.nan
    if r < 0.0:
        return nan, nan, nan
    if code == KEPLER:
        if r == 0.0:
            return nan, nan, nan
        v = -mu / r
        d1 = mu / (r * r)
        d2 = -2.0 * mu / (r * r * r)
    elif code == HARMONIC:
        w2 = omega * omega
        v = 0.5 * w2 * r * r
        d1 = w2 * r
        d2 = w2
    elif code == FINITE_HARMONIC:
        w2 = omega * omega
        if r < R:
            v = 0.5 * w2 * r * r - 1.5 * w2 * R * R
            d1 = w2 * r
            d2 = w2
        else:
            m = w2 * R * R * R
            v = -m / r
            d1 = m / (r * r)
            d2 = -2.0 * m / (r * r * r)
    else:
        sigma = 1.0 if code == HENON else -1.0
        s2 = b * b + sigma * r * r
        if s2 < 0.0:
            return nan, nan, nan
        s = math.sqrt(s2)
        bs = b + s
        # written around the central value so the reduced form keeps precision
        v = -sigma * mu / (2.0 * b) + mu * r * r / (2.0 * b * bs * bs)
        if s == 0.0:
            d1 = math.inf
            d2 = math.inf
        else:
            d1 = mu * r / (s * bs * bs)
            d2 = mu / (s * bs * bs) - sigma * mu * r * r * (bs / s + 2.0) / (s2 * bs * bs * bs)
    v += eps
    if lam != 0.0:
        if r == 0.0:
            return nan, nan, nan
        r2 = r * r
        v += 0.5 * lam / r2
        d1 -= lam / (r2 * r)
        d2 += 3.0 * lam / (r2 * r2)
    return v, d1, d2


psi_terms_scalar = maybe_jit(_psi_terms)


def _psi_terms_loop(code, p, r):
    n = r.shape[0]
    v = np.empty(n)
    d1 = np.empty(n)
    d2 = np.empty(n)
    for i in range(n):
        a, b_, c = psi_terms_scalar(code, p, r[i])
        v[i] = a
        d1[i] = b_
        d2[i] = c
    return v, d1, d2


_psi_terms_loop_jit = maybe_jit(_psi_terms_loop)


def psi_terms_numpy(code, p, r):
    """Vectorised twin of the scalar kernel."""
    mu, omega, b, R, eps, lam = (float(x) for x in p)
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if code == KEPLER:
            v = -mu / r
            d1 = mu / r**2
            d2 = -2.0 * mu / r**3
            bad = r <= 0.0
        elif code == HARMONIC:
            w2 = omega * omega
            v = 0.5 * w2 * r * r
            d1 = w2 * r
            d2 = np.full_like(r, w2)
            bad = r < 0.0
        elif code == FINITE_HARMONIC:
            w2 = omega * omega
            m = w2 * R**3
            inside = r < R
            v = np.where(inside, 0.5 * w2 * r * r - 1.5 * w2 * R * R, -m / r)
            d1 = np.where(inside, w2 * r, m / r**2)
            d2 = np.where(inside, w2, -2.0 * m / r**3)
            bad = r < 0.0
        else:
            sigma = 1.0 if code == HENON else -1.0
            s2 = b * b + sigma * r * r
            s = np.sqrt(s2)
            bs = b + s
            v = -sigma * mu / (2.0 * b) + mu * r * r / (2.0 * b * bs * bs)
            d1 = np.where(s > 0, mu * r / (s * bs * bs), np.inf)
            d2 = np.where(
                s > 0,
                mu / (s * bs * bs) - sigma * mu * r * r * (bs / s + 2.0) / (s2 * bs**3),
                np.inf,
            )
            bad = (r < 0.0) | (s2 < 0.0)
        v = v + eps
        if lam != 0.0:
            v = v + 0.5 * lam / r**2
            d1 = d1 - lam / r**3
            d2 = d2 + 3.0 * lam / r**4
            bad = bad | (r == 0.0)
    v = np.where(bad, np.nan, v)
    d1 = np.where(bad, np.nan, d1)
    d2 = np.where(bad, np.nan, d2)
    return v, d1, d2


def psi_terms(code, p, r):
    """Potential and its first two radial derivatives on an array of radii."""
    r = np.ascontiguousarray(np.atleast_1d(np.asarray(r, dtype=float)))
    if USE_NUMBA:
        return _psi_terms_loop_jit(code, np.asarray(p, dtype=float), r)
    return psi_terms_numpy(code, p, r)


# ---------------------------------------------------------------------------
# Radial quadrature on the cosine-substituted interval.
#
# r(theta) = m - h cos(theta) with m, h the mid-point and half-width of
# [r_p, r_a].  The radial kinetic term F(r) = 2(xi - psi) - L^2/r^2 vanishes
# at both ends, so G = F / ((r - r_p)(r_a - r)) is smooth and the integrands
# below have no endpoint singularity.  F is formed from divided differences
# anchored at the nearer apsis; subtracting nearly equal potential values
# instead loses most digits at the nodes that crowd the interval ends.


def _psi_divdiff(code, p, a, r):
    """(psi(r) - psi(a)) / (r - a) without the 1/r^2 term or the constant."""
    mu, omega, b, R = p[0], p[1], p[2], p[3]
    if code == KEPLER:
        return mu / (a * r)
    if code == HARMONIC:
        return 0.5 * omega * omega * (r + a)
    if code == FINITE_HARMONIC:
        w2 = omega * omega
        if r < R and a < R:
            return 0.5 * w2 * (r + a)
        if r >= R and a >= R:
            return w2 * R * R * R / (a * r)
        va, _, _ = psi_terms_scalar(code, p, a)
        vr, _, _ = psi_terms_scalar(code, p, r)
        return (vr - va) / (r - a)
    sigma = 1.0 if code == HENON else -1.0
    s = math.sqrt(max(b * b + sigma * r * r, 0.0))
    sa = math.sqrt(max(b * b + sigma * a * a, 0.0))
    return mu * (r + a) / ((s + sa) * (b + s) * (b + sa))


_psi_divdiff = maybe_jit(_psi_divdiff)


def _orbit_sums(code, p, xi, L, rp, ra, theta, weights):
    h = 0.5 * (ra - rp)
    Leff2 = L * L + p[5]
    tau = 0.0
    nphi = 0.0
    act = 0.0
    for i in range(theta.shape[0]):
        half = 0.5 * theta[i]
        sh = math.sin(half)
        ch = math.cos(half)
        if theta[i] <= 0.5 * math.pi:
            a = rp
            da = 2.0 * h * sh * sh      # r - r_p
            other = 2.0 * h * ch * ch   # r_a - r
            r = rp + da
        else:
            a = ra
            other = 2.0 * h * sh * sh   # r - r_p
            r = ra - 2.0 * h * ch * ch
        Fdd = -2.0 * _psi_divdiff(code, p, a, r) + Leff2 * (r + a) / (r * r * a * a)
        G = Fdd / other if a == rp else -Fdd / other
        if G <= 0.0:
            G = 1e-300
        sg = math.sqrt(G)
        s = math.sin(theta[i])
        hs2 = h * h * s * s
        w = weights[i]
        tau += w * 2.0 / sg
        nphi += w * L / (r * r * sg)
        act += w * hs2 * sg
    return tau, nphi / math.pi, act / math.pi


_orbit_sums_jit = maybe_jit(_orbit_sums)


def _psi_divdiff_numpy(code, p, a, r):
    mu, omega, b, R = (float(x) for x in p[:4])
    if code == KEPLER:
        return mu / (a * r)
    if code == HARMONIC:
        return 0.5 * omega * omega * (r + a)
    if code == FINITE_HARMONIC:
        w2 = omega * omega
        va, _, _ = psi_terms_numpy(code, p, a)
        vr, _, _ = psi_terms_numpy(code, p, r)
        with np.errstate(divide="ignore", invalid="ignore"):
            mixed = (vr - va) / (r - a)
        out = np.where((r < R) & (a < R), 0.5 * w2 * (r + a), w2 * R**3 / (a * r))
        return np.where((r < R) == (a < R), out, mixed)
    sigma = 1.0 if code == HENON else -1.0
    s = np.sqrt(np.maximum(b * b + sigma * r * r, 0.0))
    sa = np.sqrt(np.maximum(b * b + sigma * a * a, 0.0))
    return mu * (r + a) / ((s + sa) * (b + s) * (b + sa))


def _split_nodes(rp, ra, theta):
    h = 0.5 * (ra - rp)
    sh2 = np.sin(0.5 * theta) ** 2
    ch2 = np.cos(0.5 * theta) ** 2
    low = theta <= 0.5 * math.pi
    r = np.where(low, rp + 2.0 * h * sh2, ra - 2.0 * h * ch2)
    a = np.where(low, rp, ra)
    # (r - r_p)(r_a - r) divided by (r - a), signed so that G > 0
    other = np.where(low, 2.0 * h * ch2, -2.0 * h * sh2)
    return h, r, a, other


def orbit_sums_from_values(psi_vals, r, xi, L, h, theta, weights):
    """Numpy reduction from potential samples (custom potentials).

    Uses the direct form of F, so accuracy is limited near the apsides.
    """
    s = np.sin(theta)
    hs2 = (h * s) ** 2
    F = 2.0 * (xi - psi_vals) - L * L / (r * r)
    G = np.maximum(F / hs2, 1e-300)
    return _reduce(G, r, L, hs2, weights)


def _reduce(G, r, L, hs2, weights):
    sg = np.sqrt(G)
    tau = float(np.dot(weights, 2.0 / sg))
    nphi = float(np.dot(weights, L / (r * r * sg))) / math.pi
    act = float(np.dot(weights, hs2 * sg)) / math.pi
    return tau, nphi, act


def orbit_sums(code, p, xi, L, rp, ra, theta, weights):
    """(tau_r, n_phi, radial action) for one node set."""
    if USE_NUMBA:
        return _orbit_sums_jit(code, np.asarray(p, dtype=float), xi, L, rp, ra, theta, weights)
    h, r, a, other = _split_nodes(rp, ra, theta)
    Leff2 = L * L + float(p[5])
    Fdd = -2.0 * _psi_divdiff_numpy(code, p, a, r) + Leff2 * (r + a) / (r * r * a * a)
    G = np.maximum(Fdd / other, 1e-300)
    hs2 = (h * np.sin(theta)) ** 2
    return _reduce(G, r, L, hs2, weights)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with the 4th-order continuous extension, specialised to
# the planar central-force problem y = (r, v_r, phi).

_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    -71.0 / 57600.0, 71.0 / 16695.0, -71.0 / 1920.0, 17253.0 / 339200.0, -22.0 / 525.0, 1.0 / 40.0)

# dense output coefficients (Shampine), rows = stages, columns = theta^1..theta^4
_P = np.array([
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0],
])


def _rhs(code, p, L, r, v):
    _, d1, _ = psi_terms_scalar(code, p, r)
    return v, -d1 + L * L / (r * r * r), L / (r * r)


def _energy(code, p, L, r, v):
    val, _, _ = psi_terms_scalar(code, p, r)
    return 0.5 * v * v + 0.5 * L * L / (r * r) + val


def _poly4(c0, c1, c2, c3, c4, x):
    return c0 + x * (c1 + x * (c2 + x * (c3 + x * c4)))


def _integrate(code, p, L, r0, v0, phi0, t_end, rtol, atol, max_steps, max_events, r_max, P):
    ts = np.empty(max_steps + 1)
    rs = np.empty(max_steps + 1)
    vs = np.empty(max_steps + 1)
    ps = np.empty(max_steps + 1)
    es = np.empty(max_steps + 1)
    ev_t = np.empty(max_events)
    ev_r = np.empty(max_events)
    ev_p = np.empty(max_events)
    ev_k = np.empty(max_events, dtype=np.int64)

    e0 = _energy(code, p, L, r0, v0)
    t = 0.0
    r = r0
    v = v0
    ph = phi0
    ts[0] = t
    rs[0] = r
    vs[0] = v
    ps[0] = ph
    es[0] = 0.0
    n = 1
    ne = 0
    if v0 == 0.0 and max_events > 0:
        k1r, k1v, k1p = _rhs(code, p, L, r, v)
        ev_t[0] = 0.0
        ev_r[0] = r
        ev_p[0] = ph
        ev_k[0] = 1 if k1v > 0.0 else -1
        ne = 1

    k1r, k1v, k1p = _rhs(code, p, L, r, v)
    # initial step from the usual two-norm heuristic
    sr = atol + rtol * abs(r)
    sv = atol + rtol * abs(v)
    sp = atol + rtol * abs(ph)
    d0 = math.sqrt(((r / sr) ** 2 + (v / sv) ** 2 + (ph / sp) ** 2) / 3.0)
    d1 = math.sqrt(((k1r / sr) ** 2 + (k1v / sv) ** 2 + (k1p / sp) ** 2) / 3.0)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    h = min(h, t_end)
    status = OK
    rejects = 0
    while t < t_end:
        if n > max_steps:
            status = MAX_STEPS
            break
        if h < 1e-14 * max(1.0, abs(t)):
            status = STEP_UNDERFLOW
            break
        if t + h > t_end:
            h = t_end - t
        y2r = r + h * (_A21 * k1r)
        y2v = v + h * (_A21 * k1v)
        k2r, k2v, k2p = _rhs(code, p, L, y2r, y2v)
        y3r = r + h * (_A31 * k1r + _A32 * k2r)
        y3v = v + h * (_A31 * k1v + _A32 * k2v)
        k3r, k3v, k3p = _rhs(code, p, L, y3r, y3v)
        y4r = r + h * (_A41 * k1r + _A42 * k2r + _A43 * k3r)
        y4v = v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v)
        k4r, k4v, k4p = _rhs(code, p, L, y4r, y4v)
        y5r = r + h * (_A51 * k1r + _A52 * k2r + _A53 * k3r + _A54 * k4r)
        y5v = v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v)
        k5r, k5v, k5p = _rhs(code, p, L, y5r, y5v)
        y6r = r + h * (_A61 * k1r + _A62 * k2r + _A63 * k3r + _A64 * k4r + _A65 * k5r)
        y6v = v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v)
        k6r, k6v, k6p = _rhs(code, p, L, y6r, y6v)
        nr = r + h * (_B1 * k1r + _B3 * k3r + _B4 * k4r + _B5 * k5r + _B6 * k6r)
        nv = v + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
        nph = ph + h * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B5 * k5p + _B6 * k6p)
        k7r, k7v, k7p = _rhs(code, p, L, nr, nv)
        er = h * (_E1 * k1r + _E3 * k3r + _E4 * k4r + _E5 * k5r + _E6 * k6r + _E7 * k7r)
        ev = h * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v)
        ep = h * (_E1 * k1p + _E3 * k3p + _E4 * k4p + _E5 * k5p + _E6 * k6p + _E7 * k7p)
        sr = atol + rtol * max(abs(r), abs(nr))
        sv = atol + rtol * max(abs(v), abs(nv))
        sp = atol + rtol * max(abs(ph), abs(nph))
        err = math.sqrt(((er / sr) ** 2 + (ev / sv) ** 2 + (ep / sp) ** 2) / 3.0)
        if not (err <= 1.0) or not (nr > 0.0) or nr > r_max:
            # nan from leaving the domain counts as a rejection
            rejects += 1
            if err != err or not (nr > 0.0) or nr > r_max:
                h *= 0.25
            else:
                h *= max(0.2, 0.9 * err ** -0.2)
            if rejects > 200:
                status = LEFT_DOMAIN if (nr > r_max or err != err) else STEP_UNDERFLOW
                break
            continue
        rejects = 0

        # apsis events: sign change of v_r inside the step
        if v * nv < 0.0 and ne < max_events:
            c1 = h * (P[0, 0] * k1v + P[2, 0] * k3v + P[3, 0] * k4v + P[4, 0] * k5v + P[5, 0] * k6v + P[6, 0] * k7v)
            c2 = h * (P[0, 1] * k1v + P[2, 1] * k3v + P[3, 1] * k4v + P[4, 1] * k5v + P[5, 1] * k6v + P[6, 1] * k7v)
            c3 = h * (P[0, 2] * k1v + P[2, 2] * k3v + P[3, 2] * k4v + P[4, 2] * k5v + P[5, 2] * k6v + P[6, 2] * k7v)
            c4 = h * (P[0, 3] * k1v + P[2, 3] * k3v + P[3, 3] * k4v + P[4, 3] * k5v + P[5, 3] * k6v + P[6, 3] * k7v)
            lo = 0.0
            hi = 1.0
            flo = v
            x = 0.5
            for _ in range(200):
                x = 0.5 * (lo + hi)
                fx = _poly4(v, c1, c2, c3, c4, x)
                if fx == 0.0:
                    break
                if (fx < 0.0) == (flo < 0.0):
                    lo = x
                    flo = fx
                else:
                    hi = x
                if hi - lo < 1e-16:
                    break
            x = 0.5 * (lo + hi)
            q = np.empty(4)
            for j in range(4):
                q[j] = h * (P[0, j] * k1r + P[2, j] * k3r + P[3, j] * k4r + P[4, j] * k5r + P[5, j] * k6r + P[6, j] * k7r)
            er_ = _poly4(r, q[0], q[1], q[2], q[3], x)
            for j in range(4):
                q[j] = h * (P[0, j] * k1p + P[2, j] * k3p + P[3, j] * k4p + P[4, j] * k5p + P[5, j] * k6p + P[6, j] * k7p)
            ep_ = _poly4(ph, q[0], q[1], q[2], q[3], x)
            ev_t[ne] = t + x * h
            ev_r[ne] = er_
            ev_p[ne] = ep_
            ev_k[ne] = 1 if v < 0.0 else -1
            ne += 1

        t = t + h
        r = nr
        v = nv
        ph = nph
        k1r, k1v, k1p = k7r, k7v, k7p
        ts[n] = t
        rs[n] = r
        vs[n] = v
        ps[n] = ph
        es[n] = _energy(code, p, L, r, v) - e0
        n += 1
        fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h *= fac
    return ts[:n], rs[:n], vs[:n], ps[:n], es[:n], ev_t[:ne], ev_r[:ne], ev_p[:ne], ev_k[:ne], status


_rhs = maybe_jit(_rhs)
_energy = maybe_jit(_energy)
_poly4 = maybe_jit(_poly4)
_integrate_jit = maybe_jit(_integrate)


def integrate(code, p, L, r0, v0, phi0, t_end, rtol, atol, max_steps=400000,
              max_events=100000, r_max=math.inf):
    """Run the adaptive integrator; returns sample and event arrays plus a status code."""
    args = (int(code), np.asarray(p, dtype=float), float(L), float(r0), float(v0),
            float(phi0), float(t_end), float(rtol), float(atol), int(max_steps),
            int(max_events), float(r_max), _P)
    return _integrate_jit(*args)
