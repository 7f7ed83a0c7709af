"""Command-line front end: ``isochrone classify|periods|orbit|bolst|verify``.

Every command prints one JSON document to stdout.  Floats are written with
17 significant digits and keys are sorted, so identical invocations give
byte-identical output.  Exit codes: 0 success, 2 bad input, 3 a numerical
check failed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .errors import InputError, IsochroneError

SCHEMA = "isochrone/1"
EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3


class UsageError(InputError):
    pass


# -- output -----------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "to_dict"):
        return dumps(obj.to_dict(), indent, _level)
    if hasattr(obj, "value"):  # enums
        return dumps(obj.value, indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _envelope(command: str, **data) -> dict:
    return {"schema": SCHEMA, "command": command, **data}


def _emit(doc, path=None):
    text = dumps(doc) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_float(float(v)) if math.isfinite(v) else "nan" for v in row))
            fh.write("\n")


# -- argument helpers -------------------------------------------------------

def _floats(text: str, n: int):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"expected {n} comma-separated numbers, got {len(vals)}")
    return vals


def _read_json_arg(text: str) -> dict:
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text()
        except OSError as exc:
            raise UsageError(str(exc)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad JSON: {exc}") from None


def _potential(text: str):
    from .potentials import parse_potential

    if text.startswith("@"):
        text = json.dumps(_read_json_arg(text))
    return parse_potential(text)


# -- commands ---------------------------------------------------------------

def cmd_classify(args) -> int:
    from .geometry import Parabola, reduce, to_henon_curve

    given = [x for x in (args.coeffs, args.parabola, args.potential) if x is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --coeffs, --parabola, --potential")
    if args.coeffs is not None:
        p = Parabola(*_floats(args.coeffs, 5))
    elif args.parabola is not None:
        p = Parabola.from_dict(_read_json_arg(args.parabola))
    else:
        p = to_henon_curve(_potential(args.potential))
    res = reduce(p)
    out = _envelope("classify", parabola=p.to_dict(), result=res.to_dict())
    if res.physical:
        out["potential"] = res.potential().to_dict()
    _emit(out)
    return EXIT_OK


def cmd_periods(args) -> int:
    from . import closed_forms as cf
    from . import orbits

    psi = _potential(args.potential)
    xi, L = args.xi, args.L
    if L <= 0:
        raise UsageError("--L must be positive")
    out = _envelope("periods", potential=psi.to_dict(), xi=xi, L=L, method=args.method)
    status = EXIT_OK
    if args.method in ("quad", "both"):
        q = orbits.orbit_integrals(psi, xi, L, args.rel_tol)
        out["quad"] = {"tau_r": q.tau_r, "n_phi": q.n_phi, "A_r": q.action}
    if args.method in ("analytic", "both"):
        out["analytic"] = {"tau_r": cf.tau_r_analytic(psi, xi, L),
                           "n_phi": cf.n_phi_analytic(psi, L),
                           "A_r": cf.radial_action_analytic(psi, xi, L)}
    if args.method == "both":
        agree = {}
        for k in ("tau_r", "n_phi", "A_r"):
            a, b = out["quad"][k], out["analytic"][k]
            agree[k] = abs(a - b) / max(1.0, abs(b))
        ok = all(v <= args.tol for v in agree.values())
        out["agreement"] = {"rel_diff": agree, "tol": args.tol, "ok": ok}
        if not ok:
            status = EXIT_VERIFY
    _emit(out)
    return status


def cmd_orbit(args) -> int:
    from . import orbits

    psi = _potential(args.potential)
    if args.periods <= 0:
        raise UsageError("--periods must be positive")
    traj = orbits.integrate_orbit(psi, args.xi, args.L, phi0=args.phi0,
                                  n_radial_periods=args.periods, tol=args.tol)
    write_csv(args.out, ["t", "r", "phi", "x", "y", "energy_err"],
              zip(traj.t, traj.r, traj.phi, traj.x, traj.y, traj.energy_err))
    events_path = args.events or str(Path(args.out).with_suffix(".events.json"))
    Path(events_path).write_text(dumps(_envelope("orbit-events", events=traj.events)) + "\n")
    out = _envelope("orbit", potential=psi.to_dict(), xi=args.xi, L=args.L,
                    periods=args.periods, csv=args.out, events=events_path,
                    n_samples=len(traj.t), n_events=len(traj.event_t),
                    energy_drift=traj.energy_drift)
    try:
        st = orbits.rosette_stats(traj)
        out["rosette"] = {"n_phi_measured": st.n_phi_measured, "tau_measured": st.tau_measured,
                          "turns_center": st.turns_center}
    except IsochroneError:
        pass
    _emit(out)
    return EXIT_OK


def cmd_bolst(args) -> int:
    from .bolst import Bolst, KeplerEllipse, chi_parameter, delta_phi1, map_kepler_orbit

    B = Bolst(args.alpha, args.beta)
    ell = KeplerEllipse.from_shape(args.p, args.e, args.xi0)
    phi0 = np.linspace(0.0, 2.0 * math.pi, args.samples)
    m = map_kepler_orbit(B, ell, args.xi1, phi0)
    summary = m.summary()
    if args.mu is not None and abs(args.mu - ell.mu) > 1e-12 * max(1.0, ell.mu):
        # (p, e, xi0) already fix mu; keep the literal value for comparison
        lit = {"mu": args.mu}
        if args.alpha != 0:
            chi = chi_parameter(args.alpha, args.beta, args.p, args.xi0, args.mu)
            lit["chi"] = chi
            try:
                lit["delta_phi1"] = delta_phi1(chi, args.e)
                lit["delta_phi1_over_pi"] = lit["delta_phi1"] / math.pi
            except IsochroneError as exc:
                lit["note"] = str(exc)
        summary["literal_mu"] = lit
        summary["notes"].append(f"mu = {args.mu} is inconsistent with (p, e, xi0); "
                                f"the orbit uses mu = {ell.mu!r}")
    if args.alpha == 0 and m.image is not None and m.image.kind.value == "Harmonic":
        from .bolst import bohlin_image
        try:
            om, off = bohlin_image(ell, args.beta, args.xi1)
            summary["bohlin"] = {"omega1": om, "offset": off}
        except InputError as exc:
            summary["notes"].append(str(exc))
    write_csv(args.out, ["phi0", "r0", "phi1", "r1", "x0", "y0", "x1", "y1"], m.rows())
    out = _envelope("bolst", csv=args.out, summary=summary)
    _emit(out, args.summary)
    if args.summary:
        _emit(_envelope("bolst", csv=args.out, summary_path=args.summary,
                        delta_phi1=m.delta_phi1, chi=m.chi, physical=m.physical))
    return EXIT_OK


def cmd_verify(args) -> int:
    from ._backend import BACKEND
    from .verification import SUITES, run_suite

    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    results = run_suite(args.suite)
    for r in results:
        print(r.line(), file=sys.stderr)
    passed = all(r.passed for r in results)
    report = _envelope("verify", suite=args.suite, passed=passed, backend=BACKEND,
                       criteria=[r.to_dict() for r in results])
    if args.report:
        _emit(report, args.report)
    _emit({"schema": SCHEMA, "command": "verify", "suite": args.suite, "passed": passed,
           "results": [{"id": r.id, "passed": r.passed} for r in results]})
    return EXIT_OK if passed else EXIT_VERIFY


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isochrone", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=None,
                    help="worker cap for grid sweeps (overrides ISOCHRONE_THREADS)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a parabola of the Henon plane")
    p.add_argument("--coeffs", help="a,b,c,d,e of (ax+bY)^2 + cx + dY + e = 0")
    p.add_argument("--parabola", help="JSON object {a,b,c,d,e} or @file")
    p.add_argument("--potential", help="classify the curve of a potential")
    p.set_defaults(func=cmd_classify)

    pot_help = "family,key=value,... (e.g. henon,mu=1,b=1) or a JSON object or @file"
    p = sub.add_parser("periods", help="radial period, precession and radial action")
    p.add_argument("--potential", required=True, help=pot_help)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--method", choices=["quad", "analytic", "both"], default="both")
    p.add_argument("--tol", type=float, default=1e-8, help="agreement tolerance for --method both")
    p.add_argument("--rel-tol", type=float, default=1e-10, help="quadrature tolerance")
    p.set_defaults(func=cmd_periods)

    p = sub.add_parser("orbit", help="integrate an orbit to CSV")
    p.add_argument("--potential", required=True, help=pot_help)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--periods", type=float, default=10.0)
    p.add_argument("--phi0", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", required=True)
    p.add_argument("--events", help="events JSON path (default: <out stem>.events.json)")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("bolst", help="map a Kepler ellipse with a bolst")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--p", type=float, required=True, help="semilatus rectum")
    p.add_argument("--e", type=float, required=True, help="eccentricity")
    p.add_argument("--mu", type=float, default=None,
                   help="optional; (p, e, xi0) fix mu, a different value is reported alongside")
    p.add_argument("--xi0", type=float, required=True)
    p.add_argument("--xi1", type=float, required=True)
    p.add_argument("--samples", type=int, default=721)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="write the summary JSON here instead of stdout")
    p.set_defaults(func=cmd_bolst)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", default="all", help="all, geometry, orbits, laws or bolst")
    p.add_argument("--report", help="write the full JSON report here")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return EXIT_INPUT
        os.environ["ISOCHRONE_THREADS"] = str(args.threads)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(dumps({"schema": SCHEMA, "error": {"type": type(exc).__name__,
                                                            "message": str(exc)}}) + "\n")
        return EXIT_INPUT
    except IsochroneError as exc:
        sys.stderr.write(dumps({"schema": SCHEMA, "error": {"type": type(exc).__name__,
                                                            "message": str(exc)}}) + "\n")
        return EXIT_VERIFY


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
