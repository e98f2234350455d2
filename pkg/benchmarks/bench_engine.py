"""Time the compiled and numpy backends on the recurrence and residual kernels.

    python benchmarks/bench_engine.py --pmax 4000 8000 --kernel 9x^8 --repeat 3
"""

import argparse
import time

import numpy as np

from separatrix import asymptotics, engine
from separatrix.kernels import build_kernels
from separatrix.polyalg import parse_poly


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--kernel", default="9x^8")
    ap.add_argument("--pmax", type=int, nargs="+", default=[2000, 4000, 8000])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    k = build_kernels(parse_poly(args.kernel))
    backends = []
    for name in ("cython", "python"):
        try:
            engine.use_backend(name)
            backends.append(name)
        except ImportError:
            print(f"backend {name} unavailable, skipped")

    print(f"kernel {args.kernel}, threads {args.threads}, best of {args.repeat}")
    print(f"{'pmax':>7} {'backend':>8} {'recurrence s':>13} {'residuals s':>12} {'max |dl|':>10}")
    for pmax in args.pmax:
        ref = None
        for name in backends:
            engine.use_backend(name)
            t_seq, table = best_of(lambda: engine.compute_sequence(k, pmax, threads=args.threads), args.repeat)
            t_res, _ = best_of(lambda: asymptotics.residual_linearized(table, k, threads=args.threads), args.repeat)
            if ref is None:
                ref = table.log_lambda
            dl = float(np.nanmax(np.abs(table.log_lambda - ref)))
            print(f"{pmax:>7} {name:>8} {t_seq:>13.3f} {t_res:>12.3f} {dl:>10.1e}")


if __name__ == "__main__":
    main()
