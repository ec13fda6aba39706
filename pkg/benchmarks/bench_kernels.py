"""Compare the compiled and pure-Python kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat 20]

Times batched forward kinematics, the tracking-error reduction used by the
synthesis objective, and a complete synthesis run with each backend.
"""
import argparse
import timeit

import numpy as np

from fivebar import io as fio
from fivebar import kernels, synthesis
from fivebar.synthesis import REFERENCE_DESIGN, Bounds


def cases(backend):
    d = REFERENCE_DESIGN
    rng = np.random.default_rng(0)
    th1 = rng.uniform(1.6, 2.7, 10_000)
    th2 = rng.uniform(0.7, 1.45, 10_000)
    desired = fio.load_default_desired_path()
    dx, dz = desired.x.copy(), desired.z.copy()

    def run_synthesis():
        original = synthesis.kernels
        synthesis.kernels = backend
        try:
            synthesis.synthesize(desired, Bounds.default(), d)
        finally:
            synthesis.kernels = original

    return {
        "fk_batch (10k poses)": lambda: backend.fk_batch(d.l0, d.l1, d.l2, th1, th2),
        "tracking_terms (60 samples)": lambda: backend.tracking_terms(
            d.l0, d.l1, d.l2, d.theta1_start, d.theta1_end, d.theta2_start, d.theta2_end, dx, dz),
        "synthesize (default budget)": run_synthesis,
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=20)
    args = p.parse_args(argv)

    backends = {"python": kernels.python_backend}
    if kernels.compiled_backend is None:
        print("compiled backend unavailable; timing the Python fallback only")
    else:
        backends["cython"] = kernels.compiled_backend

    results = {}
    for name, backend in backends.items():
        for label, fn in cases(backend).items():
            n = 1 if label.startswith("synthesize") else args.repeat
            results[(label, name)] = min(timeit.repeat(fn, number=n, repeat=3)) / n

    labels = list(cases(backends["python"]))
    print(f"{'kernel':32s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for label in labels:
        py = results[(label, "python")]
        cy = results.get((label, "cython"))
        cy_txt = f"{cy * 1e3:10.3f}ms" if cy else f"{'n/a':>12s}"
        speed = f"{py / cy:7.1f}x" if cy else f"{'':>8s}"
        print(f"{label:32s} {py * 1e3:10.3f}ms {cy_txt} {speed}")


if __name__ == "__main__":
    main()
