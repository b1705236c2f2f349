#!/usr/bin/env python3
"""Print Gram blocks of the residue pairing at chosen bidegrees.

    python3 scripts/gram_explorer.py --degree 2 --modes=-3:3 --K 4

Rows are product monomials of the shuffle model, columns the matching free
words; the report shows the h-valuation profile, determinant data and the
nondegeneracy verdict.
"""

import argparse
import itertools

from qcurrents.cartan import cartan_by_name
from qcurrents.geometry import CurveConfig
from qcurrents.pairing import gram
from qcurrents.shuffle import embed_generator, star


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--degree", type=int, default=1, choices=(1, 2))
    ap.add_argument("--modes", default="-3:3", help="LO:HI mode range")
    ap.add_argument("--K", type=int, default=4)
    args = ap.parse_args()
    lo, hi = (int(x) for x in args.modes.split(":"))
    modes = list(range(lo, hi))
    cfg = CurveConfig(K=args.K, max_mode=max(8, abs(lo), abs(hi)))
    cartan = cartan_by_name("A1")
    if args.degree == 1:
        rows = [embed_generator(0, m, cartan, cfg.K) for m in modes]
        labels = [f"e[{m}]" for m in modes]
        cols = [((0, m),) for m in modes]
        clabels = [f"f[{m}]" for m in modes]
        bidegree = ((1,), (-1,))
    else:
        rows, labels, cols, clabels = [], [], [], []
        for p, q in itertools.combinations_with_replacement(modes, 2):
            rows.append(star(embed_generator(0, p, cartan, cfg.K),
                             embed_generator(0, q, cartan, cfg.K), cartan))
            labels.append(f"e[{p}]*e[{q}]")
            cols.append(((0, p), (0, q)))
            clabels.append(f"f[{p}]f[{q}]")
        bidegree = ((2,), (-2,))
    rep = gram(rows, cols, bidegree, cartan, cfg,
               row_labels=labels, col_labels=clabels)
    print(f"bidegree {bidegree}, {len(rows)} x {len(cols)} block")
    print(f"valuation offset (principal degree): {rep.valuation_offset}")
    print(f"det valuation: {rep.det_valuation}, leading: {rep.det_leading}")
    print(f"nondegenerate: {rep.nondegenerate}")
    if len(rows) <= 8:
        for i, row in enumerate(rep.matrix):
            vals = ["+".join(f"{c}h^{k}" for k, c in enumerate(hs.coeffs) if c)
                    or "0" for hs in row]
            print(f"  {labels[i]:12s} {vals}")


if __name__ == "__main__":
    main()
