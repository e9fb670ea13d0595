#!/usr/bin/env python3
"""Side-by-side margins of two disk bounds on one grid.

Evaluates the plain disk bound and its double-log refinement against the
exponential-of-disk family, writing per-radius margins so the crossover
structure is visible in one CSV.

Usage:
    python scripts/bound_showdown.py [--rho 1.0] [--out out/showdown.csv]
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import wvlab as W  # noqa: E402
from wvlab.reports import write_csv  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rho", type=float, default=1.0)
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--out", default="out/showdown.csv")
    args = ap.parse_args()

    series = W.family("kovari", rho=args.rho)
    grid = W.RadialGrid.gap_span(0.5, 0.995, 120)
    kov = W.bound_spec("kov", delta=args.delta, C=1.0)
    sk = W.bound_spec("sk", delta=args.delta, C=1.0)

    rows = []
    for ev in W.evaluate_grid(series, grid):
        row = [ev.r, ev.log_M]
        for spec in (kov, sk):
            try:
                log_b = W.eval_bound(spec, log_mu=ev.log_mu, r=ev.r)
                row.append(log_b - ev.log_M)
            except W.DomainError:
                row.append("undefined")
        rows.append(tuple(row))

    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    write_csv(args.out, ["r", "log_M", "slack_kov", "slack_sk"], rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
