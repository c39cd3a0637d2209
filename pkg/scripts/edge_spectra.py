#!/usr/bin/env python3
"""Export edge-mode dispersion CSVs for four named boundary conditions.

Writes one file per condition (kx, omega, branch_id rows; branch_id -1
marks the bulk band edge) plus a small JSON summary of branch counts.

Usage: python3 scripts/edge_spectra.py [--outdir OUT] [--m M] [--eps EPS]
"""
import argparse
import json
import pathlib

from halfdirac import ModelParams, make_class
from halfdirac.edge import spectrum_rows

NAMED = {
    "dirichlet": ("A12", {}),
    "condition_a": ("A14", {"beta": -1.0}),
    "condition_a_flipped": ("A14", {"beta": 1.0}),
    "condition_b": ("A34", {"beta1": 4.0, "beta2": -4.0, "b12": -1j}),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="out/spectra")
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--eps", type=float, default=0.1)
    args = ap.parse_args()

    p = ModelParams(m=args.m, eps=args.eps)
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    summary = {}
    for name, (tag, params) in NAMED.items():
        bc = make_class(tag, params, p)
        rows, branches = spectrum_rows(p, bc)
        path = outdir / f"{name}.csv"
        with open(path, "w") as fh:
            fh.write("kx,omega,branch_id\n")
            for kx, omega, branch_id in rows:
                fh.write(f"{kx:.17g},{omega:.17g},{int(branch_id)}\n")
        summary[name] = {
            "n_branches": len(branches),
            "events": [(b.start_event, b.end_event) for b in branches],
            "csv": str(path),
        }
        print(f"{name:22s} branches={len(branches)}  -> {path}")

    with open(outdir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)


if __name__ == "__main__":
    main()
