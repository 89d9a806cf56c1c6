"""Exact or bounded code distance for small layouts."""

import argparse
import time

from fermicode import verifier as V
from fermicode.assembler import LayoutSpec, assemble

DEFAULT = ["3:1,2", "5:1,2", "3:2,2"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("cases", nargs="*", default=DEFAULT, help="d_Ff:grid items, e.g. 3:1,2")
    ap.add_argument("--time-limit", type=float, default=300.0)
    ap.add_argument("--enumerate-to", type=int, default=3, help="brute-force lower bound up to this weight")
    args = ap.parse_args()
    print(f"{'d_Ff':>4} {'grid':>8} {'n':>5} {'enum':>6} {'lower':>5} {'upper':>5} {'exact':>5} {'s':>6}")
    for case in args.cases:
        d, grid = case.split(":")
        code = assemble(LayoutSpec(int(d), tuple(int(x) for x in grid.split(","))))
        t0 = time.time()
        enum = V.distance_by_enumeration(code, args.enumerate_to)
        est = V.exact_distance_milp(code, args.time_limit)
        print(f"{d:>4} {grid:>8} {code.n_qubits:>5} {str(enum):>6} {est.lower:>5} {est.upper:>5} "
              f"{str(est.exact):>5} {time.time() - t0:>6.1f}", flush=True)


if __name__ == "__main__":
    main()
