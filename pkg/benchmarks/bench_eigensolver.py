"""Time the compiled and pure-Python eigensolver backends side by side.

    python3 benchmarks/bench_eigensolver.py [--sizes 40 80 160 320] [--repeat 3]

Matrices are assembled operators for the gaussian kernel on [-2, 2] with
r = 2, so the sizes are N_h = 2n.  Spectra from both backends are compared
before timing is reported.
"""

import argparse
import time

import numpy as np

from nceig.assembly import assemble
from nceig.eigensolver import available_backends, eigenvalues
from nceig.kernels import Kernel
from nceig.mesh import uniform_partition
from nceig.quadrature import gauss_rule


def best_time(matrix, backend, repeat):
    best = float("inf")
    spec = None
    for _ in range(repeat):
        start = time.perf_counter()
        spec = eigenvalues(matrix, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, spec


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[20, 40, 80, 160],
                        help="number of subintervals n (matrix size 2n)")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; timing the Python fallback only")
    print(f"{'N_h':>6} " + " ".join(f"{b + ' [s]':>14}" for b in backends) + f" {'speedup':>8} {'max diff':>10}")
    for n in args.sizes:
        matrix = assemble(Kernel.gaussian(), 1.0, uniform_partition(-2, 2, n), gauss_rule(2))
        times, spectra = [], []
        for backend in backends:
            seconds, spec = best_time(matrix, backend, args.repeat)
            times.append(seconds)
            spectra.append(np.array(spec.eigenvalues))
        diff = max(float(np.max(np.abs(s - spectra[0]))) for s in spectra)
        speedup = times[-1] / times[0] if len(times) > 1 else 1.0
        print(f"{matrix.size:>6} " + " ".join(f"{t:>14.4f}" for t in times) + f" {speedup:>8.1f} {diff:>10.1e}")


if __name__ == "__main__":
    main()
