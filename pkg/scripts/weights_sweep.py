"""Logical-operator weights, padding and census across block distances."""

import argparse
import json
import time

from fermicode import verifier as V
from fermicode.assembler import LayoutSpec, assemble


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", default="3,5,7,9", help="comma-separated d_Ff values")
    ap.add_argument("--grid", default="2,2", help="block grid, e.g. 2,2 or 1,2,2")
    ap.add_argument("--json", help="write rows to this file")
    args = ap.parse_args()
    grid = tuple(int(x) for x in args.grid.split(","))
    rows = []
    print(f"{'d':>3} {'lattice':>12} {'|W^L|':>8} {'|T^L|':>14} {'(5d-1)/2':>9} {'pad/blk':>8} {'census':>7} {'k-N_F':>6} {'s':>5}")
    for d in (int(x) for x in args.d.split(",")):
        t0 = time.time()
        code = assemble(LayoutSpec(d, grid))
        w = sorted({lg.op.weight for lg in code.logicals if lg.kind == "W"})
        t = sorted({lg.op.weight for lg in code.logicals if lg.kind == "T"})
        row = {"d_Ff": d, "lattice": list(code.lattice.sizes), "W_L": w, "T_L": t, "T_bound": (5 * d - 1) // 2,
               "padding_per_block": len(code.padding) / code.N_F, "census": len(V.footprint_census(code)),
               "n_sector": code.n_logical_qubits - code.N_F, "seconds": round(time.time() - t0, 1)}
        rows.append(row)
        print(f"{d:>3} {str(tuple(row['lattice'])):>12} {str(w):>8} {str(t):>14} {row['T_bound']:>9} "
              f"{row['padding_per_block']:>8g} {row['census']:>7} {row['n_sector']:>6} {row['seconds']:>5}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
