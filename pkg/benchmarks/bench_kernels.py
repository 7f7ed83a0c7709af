"""Time the numba kernels against the pure numpy fallback.

Each backend runs in its own interpreter because the choice is fixed at
import time.  Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
import numpy as np
import isochrone as iso
from isochrone import orbits

psi = iso.henon(1.0, 1.0)
xs, Ls = orbits.orbit_grid(psi, np.linspace(-0.4, -0.1, 8), n_L=8)
grid = [(x, L) for x in xs for L in Ls]

def quad_sweep():
    return sum(orbits.radial_period_quad(psi, x, L) for x, L in grid)

def integrate():
    return orbits.integrate_orbit(psi, -0.25, 0.5, n_radial_periods=20.0).energy_drift

out = {"backend": iso.BACKEND}
for name, fn in (("quad_sweep_64", quad_sweep), ("integrate_20_periods", integrate)):
    t0 = time.perf_counter(); fn(); first = time.perf_counter() - t0
    best = float("inf")
    for _ in range(REPEAT):
        t0 = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t0)
    out[name] = {"first_call_s": first, "best_s": best}
print(json.dumps(out))
"""


def run(backend, repeat):
    env = dict(os.environ, ISOCHRONE_BACKEND=backend)
    code = WORKLOAD.replace("REPEAT", str(repeat))
    r = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    if r.returncode:
        raise SystemExit(r.stderr)
    return json.loads(r.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    results = [run(b, args.repeat) for b in ("numba", "numpy")]
    print(f"{'task':24s} {'backend':8s} {'first (s)':>10s} {'best (s)':>10s}")
    for task in ("quad_sweep_64", "integrate_20_periods"):
        for res in results:
            t = res[task]
            print(f"{task:24s} {res['backend']:8s} {t['first_call_s']:10.4f} {t['best_s']:10.4f}")
        a, b = (res[task]["best_s"] for res in results)
        print(f"{'':24s} speedup  {b / a:10.1f}x")


if __name__ == "__main__":
    main()
