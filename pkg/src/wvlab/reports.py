"""Deterministic report emission.

CSV schema v1: first line ``# wvlab-csv v1``, then the header row, then data
rows with RFC-4180 quoting and floats printed to 17 significant digits.
Identical inputs produce byte-identical files; summaries carry the defaults
block for reproducibility instead of timestamps.
"""

from __future__ import annotations

import csv
import io
import math

CSV_VERSION_LINE = "# wvlab-csv v1"

DEFAULTS = {
    "tol": "1e-09",
    "measure_tol": "1e-09",
    "grid_q": "0.9",
    "sweep_range": "1e-03..1e+09 step 10^(1/8)",
    "divergence_threshold": "1e+06",
    "truncation_run": "50",
    "truncation_cap": "100000000",
    "samples": "64",
}


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def render_csv(header: list, rows) -> str:
    buf = io.StringIO()
    buf.write(CSV_VERSION_LINE + "\n")
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: list, rows) -> None:
    text = render_csv(header, rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def defaults_block() -> list:
    return [f"default {k} = {v}" for k, v in sorted(DEFAULTS.items())]


EVIDENCE_NOTE = (
    "NOTE: grid-estimated exceptional sets and their measures are empirical "
    "evidence only, not proof; no asymptotic claim is implied."
)


def render_summary(title: str, lines: list) -> str:
    out = [f"== {title} ==", ""]
    out += defaults_block()
    out.append("")
    out += list(lines)
    out.append("")
    out.append(EVIDENCE_NOTE)
    return "\n".join(out) + "\n"
