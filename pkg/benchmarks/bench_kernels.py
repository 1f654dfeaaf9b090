"""Compare the compiled and pure-Python enumeration kernels.

    python benchmarks/bench_kernels.py [--bound 50] [--window 100] [--repeat 3]
"""

import argparse
import time

from degmaps import kernels
from degmaps.degsets import condition
from degmaps.poly import Poly

k, l, eps = Poly.var("k"), Poly.var("l"), Poly.var("eps")

CASES = {
    "kl | kl even": (k * l, condition([(k * l, 2)]), ("k", "l")),
    "k(k+2l)": (k * (k + 2 * l), condition([]), ("k", "l")),
    "kl + eps | k(l+1) even": (k * l + eps, condition([(k * (l + 1), 2)]), ("k", "eps", "l")),
}


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=50)
    ap.add_argument("--window", type=int, default=100)
    ap.add_argument("--modulus", type=int, default=24)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    impls = {"python": kernels.backend("python")}
    try:
        impls["cython"] = kernels.backend("cython")
    except ImportError:
        print("compiled kernels not built; timing the pure-Python path only")

    print(f"{'case':28s} {'kernel':8s} {'backend':8s} {'seconds':>10s}")
    for name, (p, cond, names) in CASES.items():
        lo = [0 if n == "eps" else -args.bound for n in names]
        hi = [1 if n == "eps" else args.bound for n in names]
        sizes = [2 if n == "eps" else args.modulus for n in names]
        results = {}
        for bname, impl in impls.items():
            tw, w = _time(lambda: kernels.window_values(p, cond, names, lo, hi, args.window, impl=impl), args.repeat)
            tr, r = _time(lambda: kernels.residue_values(p, cond, names, sizes, args.modulus, impl=impl), args.repeat)
            results[bname] = (w, r)
            print(f"{name:28s} {'window':8s} {bname:8s} {tw:10.5f}")
            print(f"{name:28s} {'residue':8s} {bname:8s} {tr:10.5f}")
        if len(results) == 2:
            assert results["python"] == results["cython"], f"backends disagree on {name}"
    print("backends agree" if len(impls) == 2 else "")


if __name__ == "__main__":
    main()
