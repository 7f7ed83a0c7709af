import json
import os
import subprocess
import sys

import pytest

SCRIPT = """
import json
import isochrone as iso
from isochrone import orbits
psi = iso.henon(1.0, 1.0)
out = {
    "backend": iso.BACKEND,
    "tau": orbits.radial_period_quad(psi, -0.25, 0.5),
    "nphi": orbits.azimuthal_increment_quad(psi, -0.25, 0.5),
    "action": orbits.radial_action_quad(psi, -0.25, 0.5),
}
tr = orbits.integrate_orbit(psi, -0.25, 0.5, n_radial_periods=2.0)
out["r_end"] = float(tr.r[-1])
print(json.dumps(out))
"""


def _run(backend):
    env = dict(os.environ, ISOCHRONE_BACKEND=backend)
    r = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True,
                       env=env, timeout=300)
    assert r.returncode == 0, r.stderr
    return json.loads(r.stdout)


def test_numpy_backend_matches():
    pytest.importorskip("numba")
    a, b = _run("numba"), _run("numpy")
    assert a["backend"] == "numba" and b["backend"] == "numpy"
    for k in ("tau", "nphi", "action"):
        assert a[k] == pytest.approx(b[k], rel=1e-13)
    assert a["r_end"] == pytest.approx(b["r_end"], rel=1e-8)


def test_numpy_backend_alone():
    b = _run("numpy")
    assert b["backend"] == "numpy"
    assert b["tau"] == pytest.approx(17.771531752633464, rel=1e-10)
