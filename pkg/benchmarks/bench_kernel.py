"""Compare the compiled and pure-Python series product kernels.

    python3 benchmarks/bench_kernel.py [--repeat 5]

Times the raw term-product kernel on dense random series in the rings used
by the obstruction pipeline, and one end-to-end determinant evaluation with
each backend (the end-to-end run uses a subprocess per backend, since the
backend is chosen at import).
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit

from crembed.series import GaussianRational, Ring, TruncatedSeries
from crembed.series import _kernel_py

try:
    from crembed.series import _kernel
except ImportError:  # extension not built
    _kernel = None

CASES = [
    ("3 vars, cap 12", Ring(("z", "w", "x"), 12), 0.6),
    ("3 vars, cap 14, group cap 2", Ring(("z", "w", "x"), 14, [(("z", "w"), 2)]), 0.5),
    ("5 vars, cap 8", Ring(("a", "b", "c", "d", "e"), 8), 0.4),
]

END_TO_END = """
import time
from crembed.hypersurface import corpus_entry
from crembed.obstruction.pipeline import full_pipeline
from crembed.series import BACKEND
t = time.perf_counter()
full_pipeline(corpus_entry("abs2_4").germ, 2, order=4, samples=4, seed=0)
print(BACKEND, time.perf_counter() - t)
"""


def dense(ring: Ring, density: float, rng: random.Random) -> TruncatedSeries:
    coeffs = {}
    for e in ring.monomials():
        if rng.random() < density:
            coeffs[e] = GaussianRational(rng.randint(-99, 99), rng.randint(-99, 99))
    return TruncatedSeries.from_dict(ring, coeffs)


def args_for(a: TruncatedSeries, b: TruncatedSeries):
    return (a._keys, a._degs, a._gdegs, a._re, a._im, b._keys, b._degs, b._gdegs, b._re, b._im, a.ring.cap, a.ring.gcaps)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-end-to-end", action="store_true")
    opts = ap.parse_args()
    rng = random.Random(0)
    print(f"{'case':32s} {'terms':>7s} {'python ms':>10s} {'compiled ms':>12s} {'speedup':>8s}")
    for label, ring, density in CASES:
        a, b = dense(ring, density, rng), dense(ring, density, rng)
        args = args_for(a, b)
        py = min(timeit.repeat(lambda: _kernel_py.mul_terms(*args), number=1, repeat=opts.repeat))
        if _kernel is not None:
            c = min(timeit.repeat(lambda: _kernel.mul_terms(*args), number=1, repeat=opts.repeat))
            print(f"{label:32s} {len(a):7d} {py * 1e3:10.1f} {c * 1e3:12.1f} {py / c:7.1f}x")
        else:
            print(f"{label:32s} {len(a):7d} {py * 1e3:10.1f} {'n/a':>12s} {'':>8s}")
    if opts.skip_end_to_end:
        return
    print("\nend to end: abs2_4, N=2, 4 samples, series order 4")
    for pure in (True, False):
        env = dict(os.environ)
        env.pop("CREMBED_PURE_PYTHON", None)
        if pure:
            env["CREMBED_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"  {backend:9s} {float(secs):7.2f} s")


if __name__ == "__main__":
    main()
