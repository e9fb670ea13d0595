#!/usr/bin/env python3
"""Evidence sweep for the open question: plain-log measure of the violation
set of the iterated-log disk bound as the grid pushes toward the boundary.

For several grid extents the script fits nothing and claims nothing; it just
records how the disk-weight measure of the estimated violation set grows (or
does not) with the extent.  Whether a finite-log-measure exceptional set
suffices for this bound is open; the output is evidence only.

Usage:
    python scripts/question_evidence.py [--out out/question.csv]
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import wvlab as W  # noqa: E402
from wvlab.reports import EVIDENCE_NOTE, write_csv  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--C", type=float, default=1.0)
    ap.add_argument("--out", default="out/question.csv")
    args = ap.parse_args()

    series = W.family("suleimanov", epsilon=args.epsilon)
    bound = W.bound_spec("logimp", n=2, delta=args.delta, C=args.C)
    rows = []
    for r_end in (0.99, 0.997, 0.999, 0.9997, 0.9999):
        grid = W.RadialGrid.gap_span(0.9, r_end, 120)
        rep = W.violation_set(series, bound, grid,
                              measure_h=[W.h_disk(), W.h_disklog()])
        rows.append((r_end,
                     rep.measure_by["disk"].value,
                     rep.measure_by["disklog"].value,
                     rep.violation_count))

    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    write_csv(args.out,
              ["grid_end", "disk_measure", "disklog_measure", "violations"],
              rows)
    print(f"wrote {args.out}")
    for r_end, disk_m, dlog_m, nviol in rows:
        print(f"  up to {r_end}: disk {disk_m:.4f}, disklog {dlog_m:.4f}, "
              f"{nviol} violating points")
    print(EVIDENCE_NOTE)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
