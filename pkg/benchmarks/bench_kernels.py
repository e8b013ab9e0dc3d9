"""Benchmark the BEM influence-matrix assembly: numba kernel vs numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [refinement ...]

Set ELLHARM_NO_NUMBA=1 to verify the fallback path is the one being timed.
"""

import sys
import time

import numpy as np

from ellharm import _kernels
from ellharm.bem import mesh_sphere


def _time(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv):
    refinements = [int(v) for v in argv] or [3, 4]
    print(f"numba available: {_kernels.NUMBA_AVAILABLE}")
    for ref in refinements:
        mesh = mesh_sphere(1.0, ref)
        cen, nrm, area = mesh.centroids, mesh.normals, mesh.areas
        n = mesh.panel_count
        t_np, A_np = _time(_kernels._assemble_numpy, cen, nrm, area, 1.0)
        line = f"N={n:6d}  numpy {t_np * 1e3:9.1f} ms"
        if _kernels.NUMBA_AVAILABLE:
            _kernels._assemble_numba(cen, nrm, area, 1.0)  # compile once
            t_nb, A_nb = _time(_kernels._assemble_numba, cen, nrm, area, 1.0)
            assert np.allclose(A_np, A_nb, rtol=1e-12, atol=1e-12)
            line += f"  numba {t_nb * 1e3:9.1f} ms  speedup {t_np / t_nb:5.1f}x"
        print(line)


if __name__ == "__main__":
    main(sys.argv[1:])
