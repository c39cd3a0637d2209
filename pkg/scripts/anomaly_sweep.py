#!/usr/bin/env python3
"""Randomized per-class verification sweep, written as a JSON report.

Draws boundary conditions from every canonical class, computes the three
windings for each, and checks both the identity C_+ = n_b + w_inf and the
closed-form anomaly prediction.

Usage: python3 scripts/anomaly_sweep.py [--samples N] [--seed S] [--out F]
"""
import argparse
import json
import sys
import time

from halfdirac import ModelParams
from halfdirac.cli import _dumps, _jsonable, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--out", default="out/anomaly_sweep.json")
    args = ap.parse_args()

    p = ModelParams(m=args.m, eps=args.eps)
    t0 = time.monotonic()
    summary = run_sweep(p, samples=args.samples, seed=args.seed)
    dt = time.monotonic() - t0

    import pathlib
    path = pathlib.Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_dumps(_jsonable(summary)) + "\n")

    print(json.dumps({
        "n_runs": summary["n_runs"],
        "n_convergent": summary["n_convergent"],
        "identity_match_rate": summary["identity_match_rate"],
        "prediction_match_rate": summary["prediction_match_rate"],
        "seconds": round(dt, 1),
        "report": str(path),
    }, indent=2))
    ok = (summary["identity_match_rate"] == 1.0
          and summary["prediction_match_rate"] is not None
          and summary["prediction_match_rate"] >= 0.95)
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
