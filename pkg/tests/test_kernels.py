import os
import subprocess
import sys

import numpy as np
import pytest

from fivebar import kernels
from fivebar._pykernels import fk_batch as py_fk, reach_terms as py_reach, \
    tracking_terms as py_tracking

from conftest import L0, L1, L2

backends = [kernels.python_backend]
if kernels.compiled_backend is not None:
    backends.append(kernels.compiled_backend)


@pytest.mark.skipif(os.environ.get("FIVEBAR_PURE_PYTHON", "").strip() not in ("", "0"),
                    reason="fallback forced by environment")
def test_compiled_backend_is_default_when_built():
    import importlib.util
    built = importlib.util.find_spec("fivebar._ckernels") is not None
    assert kernels.BACKEND == ("cython" if built else "python")


def test_env_var_forces_python_fallback():
    out = subprocess.run(
        [sys.executable, "-c", "import fivebar; print(fivebar.BACKEND)"],
        env={**os.environ, "FIVEBAR_PURE_PYTHON": "1"}, capture_output=True, text=True,
        check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("backend", backends, ids=lambda b: b.__name__)
def test_fk_batch_matches_python(backend, rng):
    t1 = rng.uniform(0, np.pi, 500)
    t2 = rng.uniform(0, np.pi, 500)
    x, z, ok = backend.fk_batch(L0, L1, L2, t1, t2)
    xr, zr, okr = py_fk(L0, L1, L2, t1, t2)
    np.testing.assert_array_equal(ok, okr)
    assert 0 < ok.sum() < ok.size
    np.testing.assert_allclose(x[ok], xr[ok], rtol=0, atol=1e-10)
    np.testing.assert_allclose(z[ok], zr[ok], rtol=0, atol=1e-10)
    assert np.all(np.isnan(x[~ok]))


@pytest.mark.parametrize("backend", backends, ids=lambda b: b.__name__)
def test_tracking_and_reach_terms_match_python(backend, rng):
    dx = rng.uniform(-50, 150, 80)
    dz = rng.uniform(50, 220, 80)
    for args in [(L0, L1, L2, 2.68, 1.61, 1.45, 0.71), (150.0, 40.0, 60.0, 3.0, 0.2, 2.0, 0.1)]:
        a = backend.tracking_terms(*args, dx, dz)
        b = py_tracking(*args, dx, dz)
        assert a[1] == b[1]
        np.testing.assert_allclose(a[0], b[0], rtol=1e-12)
        np.testing.assert_allclose(a[2], b[2], rtol=1e-12, atol=1e-300)
        np.testing.assert_allclose(backend.reach_terms(*args[:3], dx, dz),
                                   py_reach(*args[:3], dx, dz), rtol=1e-12)


@pytest.mark.parametrize("backend", backends, ids=lambda b: b.__name__)
def test_tracking_single_sample_uses_start_angles(backend):
    x, z, _ = py_fk(L0, L1, L2, np.array([2.68]), np.array([1.45]))
    dist, bad, _ = backend.tracking_terms(L0, L1, L2, 2.68, 1.0, 1.45, 0.5, x + 3.0, z + 4.0)
    assert bad == 0
    assert dist == pytest.approx(5.0, abs=1e-12)


def test_benchmark_script_runs(capsys):
    import runpy
    from pathlib import Path

    script = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    mod = runpy.run_path(str(script))
    mod["main"](["--repeat", "1"])
    out = capsys.readouterr().out
    assert "tracking_terms" in out and "synthesize" in out
