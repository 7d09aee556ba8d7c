"""Compare the numba kernels against the pure-numpy fallback.

Runs identical field sweeps through both backends (selected per call via
SPIN_ATLAS_BACKEND) and reports wall time and speedup.  The first numba call
includes JIT compilation; a warmup pass is timed separately.

Usage: python3 benchmarks/backend_benchmark.py [--points N]
"""

import argparse
import os
import time

import numpy as np

from spin_atlas.catalog import get_system
from spin_atlas.sweep import sweep

CASES = ["nv-p1", "nv-2p1", "nv-onv-p1"]


def timed_sweep(sys_id: str, points: int) -> float:
    spec = get_system(sys_id).system
    start = time.perf_counter()
    sr = sweep(spec, 0.5, 1100.0, points)
    elapsed = time.perf_counter() - start
    assert np.isfinite(sr.eigenvalues).all()
    return elapsed


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=512)
    args = parser.parse_args()

    os.environ["SPIN_ATLAS_BACKEND"] = "numba"
    warmup = time.perf_counter()
    timed_sweep("nv", 8)
    print(f"numba warmup (JIT compile): {time.perf_counter() - warmup:.2f} s\n")

    print(f"{'system':<12} {'dim':>5} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}")
    for sys_id in CASES:
        dim = get_system(sys_id).system.dimension
        os.environ["SPIN_ATLAS_BACKEND"] = "numpy"
        t_np = timed_sweep(sys_id, args.points)
        os.environ["SPIN_ATLAS_BACKEND"] = "numba"
        t_nb = timed_sweep(sys_id, args.points)
        print(f"{sys_id:<12} {dim:>5} {t_np:>10.3f} {t_nb:>10.3f} {t_np / t_nb:>7.2f}x")


if __name__ == "__main__":
    main()
