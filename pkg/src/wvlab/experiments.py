"""End-to-end verification drivers.

These orchestrate the lower layers over radial grids: estimating violation
sets for catalog bounds, constructing budgeted exceptional sets with their
analytic tail budget, fitting constants by sweeping, and measuring the
lower-bound constant for the extremal families.

Violation sets are per-cell grid estimates (sampled at the left endpoint),
reported as estimates; grid-refinement stability is the quality control.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import BoundSpec, HSpec, PsiSpec, eval_bound, psi_eval, psi_tail
from .errors import DomainError, InvariantViolation, ValidationError
from .measures import DEFAULT_MEASURE_TOL, IntervalSet, MeasureOutcome, \
    h_log_measure
from .rosenbloom import stats
from .series import DEFAULT_TOL, PowerSeries, log_max_term, log_positive_value

SWEEP_C_MIN = 1e-3
SWEEP_C_MAX = 1e9
SWEEP_STEP = 10.0 ** 0.125


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radii below R.

    Schemes: ``geometric`` multiplies the radius (for infinite disks),
    ``geometric_in_gap`` shrinks the gap to R geometrically (finite disks),
    which is where the boundary asymptotics live.
    """

    R: float
    points: tuple
    scheme: str
    r0: float
    q: float
    count: int

    def __post_init__(self):
        pts = self.points
        if len(pts) < 2:
            raise ValidationError("grid needs at least two points")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValidationError("grid must be strictly increasing")
        if pts[-1] >= self.R:
            raise ValidationError(
                f"grid must stay below R={self.R:g}, reaches {pts[-1]:g}"
            )

    @classmethod
    def geometric(cls, start: float, end: float, count: int,
                  R: float = math.inf) -> "RadialGrid":
        if not (0 < start < end):
            raise ValidationError("need 0 < start < end")
        if count < 2:
            raise ValidationError("need count >= 2")
        q = (end / start) ** (1.0 / (count - 1))
        pts = tuple(start * q ** k for k in range(count))
        return cls(R=R, points=pts, scheme="geometric", r0=start, q=q,
                   count=count)

    @classmethod
    def geometric_in_gap(cls, r0: float, q: float, count: int,
                         R: float = 1.0) -> "RadialGrid":
        if not (0 <= r0 < R):
            raise ValidationError("need 0 <= r0 < R")
        if not (0 < q < 1):
            raise ValidationError("need 0 < q < 1")
        if count < 2:
            raise ValidationError("need count >= 2")
        gap = R - r0
        pts = tuple(R - gap * q ** k for k in range(count))
        return cls(R=R, points=pts, scheme="geometric_in_gap", r0=r0, q=q,
                   count=count)

    @classmethod
    def gap_span(cls, r0: float, r_end: float, count: int,
                 R: float = 1.0) -> "RadialGrid":
        """Gap-geometric grid with both endpoints prescribed."""
        if not (0 <= r0 < r_end < R):
            raise ValidationError("need 0 <= r0 < r_end < R")
        if count < 2:
            raise ValidationError("need count >= 2")
        q = ((R - r_end) / (R - r0)) ** (1.0 / (count - 1))
        return cls.geometric_in_gap(r0, q, count, R=R)

    def refined(self, factor: int = 2) -> "RadialGrid":
        """Same endpoints, ``factor`` times the density; nests the original."""
        if factor < 2:
            raise ValidationError("refinement factor must be >= 2")
        q_new = self.q ** (1.0 / factor)
        count_new = factor * (self.count - 1) + 1
        if self.scheme == "geometric":
            pts = tuple(self.r0 * q_new ** k for k in range(count_new))
        else:
            gap = self.R - self.r0
            pts = tuple(self.R - gap * q_new ** k for k in range(count_new))
        return RadialGrid(R=self.R, points=pts, scheme=self.scheme,
                          r0=self.r0, q=q_new, count=count_new)


def _reject_monomial(series: PowerSeries, what: str) -> None:
    if series.monomial_degree is not None:
        raise ValidationError(
            f"{what} refuses monomials: max term equals the function and "
            "every bound holds trivially"
        )
    if series._known_finite_support:
        raise ValidationError(
            f"{what} needs an unbounded function; finite coefficient "
            "support stays bounded on every disk"
        )


@dataclass(frozen=True)
class PointEval:
    r: float
    log_mu: float
    nu: int
    log_M: float


def evaluate_grid(series: PowerSeries, grid: RadialGrid,
                  tol: float = DEFAULT_TOL, jobs: int = 1) -> list:
    """Per-point max term and positive value; fixed order, jobs only affect
    wall time."""

    def one(r: float) -> PointEval:
        mt = log_max_term(series, r)
        return PointEval(r=r, log_mu=mt.log_mu, nu=mt.central_index,
                         log_M=log_positive_value(series, r, tol))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, grid.points))
    return [one(r) for r in grid.points]


@dataclass(frozen=True)
class PointMargin:
    r: float
    log_M: float
    log_bound: float
    slack: float  # log_bound - log_M; negative means violation


@dataclass(frozen=True)
class ViolationReport:
    """Grid estimate of where a bound fails, with its measures.

    ``E_est`` covers exactly the grid cells whose left sample violates; it is
    an estimate, not a certified set.
    """

    bound: BoundSpec
    E_est: IntervalSet
    measure_by: dict
    margins: list
    undefined_points: list
    grid: RadialGrid

    @property
    def violation_count(self) -> int:
        return sum(1 for m in self.margins if m.slack < 0)


def _cells_from_mask(grid: RadialGrid, mask) -> IntervalSet:
    pts = grid.points
    pairs = [(pts[k], pts[k + 1])
             for k in range(len(pts) - 1) if mask[k]]
    return IntervalSet.from_pairs(pairs, grid.R)


def violation_set(
    series: PowerSeries,
    bound: BoundSpec,
    grid: RadialGrid,
    measure_h: list | None = None,
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
) -> ViolationReport:
    """Estimate the set where log M exceeds the bound, cell by cell.

    Grid points where the bound expression is undefined are excluded and
    reported, never silently dropped.
    """
    if bound.bound_id == "lower":
        raise ValidationError(
            "lower bounds go through optimality_check, not violation_set"
        )
    _reject_monomial(series, "violation_set")
    evals = evaluate_grid(series, grid, tol, jobs)
    margins = []
    undefined = []
    mask = [False] * (len(grid.points) - 1)
    for k, ev in enumerate(evals):
        try:
            log_b = eval_bound(bound, log_mu=ev.log_mu, log_M=ev.log_M,
                               r=ev.r)
        except DomainError as exc:
            undefined.append((ev.r, str(exc)))
            continue
        slack = log_b - ev.log_M
        margins.append(PointMargin(r=ev.r, log_M=ev.log_M, log_bound=log_b,
                                   slack=slack))
        if slack < 0 and k < len(mask):
            mask[k] = True
    E = _cells_from_mask(grid, mask)
    measures = {}
    for h in (measure_h or []):
        measures[h.h_id] = h_log_measure(E, h, tol=DEFAULT_MEASURE_TOL)
    return ViolationReport(bound=bound, E_est=E, measure_by=measures,
                           margins=margins, undefined_points=undefined,
                           grid=grid)


# ---------------------------------------------------------------------------
# Budgeted exceptional set


@dataclass(frozen=True)
class LemmaSetRow:
    r: float
    x: float
    v: float
    d: float
    threshold: float  # h(r) * psi(v)
    violating: bool


@dataclass(frozen=True)
class LemmaSetResult:
    E: IntervalSet
    measure: MeasureOutcome
    budget: float
    target: str
    rows: list


def standard_lemma_set(
    series: PowerSeries,
    psi: PsiSpec,
    h: HSpec,
    target: str,
    grid: RadialGrid,
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
) -> LemmaSetResult:
    """Grid estimate of the set where a derivative beats h * psi(value).

    ``target='g'`` tests g' against h(r) psi(g); ``target='gprime'`` tests
    g'' against h(r) psi(g').  The derivatives come from the coefficient
    distribution (exact, not finite-differenced).  The measured set must stay
    within the analytic tail budget of 1/psi from the grid-start value; the
    substitution argument applies cell-wise with exact derivatives, so a
    failure is reported as an invariant violation, not shrugged off.
    """
    if target not in ("g", "gprime"):
        raise ValidationError("target must be 'g' or 'gprime'")
    _reject_monomial(series, "standard_lemma_set")

    def one(r: float):
        st = stats(series, math.log(r), tol)
        return st

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            sts = list(pool.map(one, grid.points))
    else:
        sts = [one(r) for r in grid.points]
    if target == "g":
        v = [s.g for s in sts]
        d = [s.g1 for s in sts]
    else:
        v = [s.g1 for s in sts]
        d = [s.g2 for s in sts]
    if any(b < a for a, b in zip(v, v[1:])) or not v[-1] > v[0]:
        raise ValidationError(
            f"hypothesis violated: target value for {target!r} is not "
            "increasing along the grid"
        )
    if v[0] < psi.a:
        raise DomainError(
            f"psi {psi} undefined at the grid start value {v[0]:g}; "
            "start the grid later"
        )
    rows = []
    mask = [False] * (len(grid.points) - 1)
    for k, r in enumerate(grid.points):
        x = math.log(r)
        thr = h.value(r) * psi_eval(psi, v[k])
        violating = d[k] >= thr
        rows.append(LemmaSetRow(r=r, x=x, v=v[k], d=d[k], threshold=thr,
                                violating=violating))
        if violating and k < len(mask):
            mask[k] = True
    E = _cells_from_mask(grid, mask)
    measure = h_log_measure(E, h, tol=DEFAULT_MEASURE_TOL)
    budget = psi_tail(psi, v[0])
    value = measure.require_value()
    if value > budget * (1.0 + 1e-6) + max(tol, 1e-9):
        raise InvariantViolation(
            f"budgeted set measure {value:.6g} exceeds the analytic budget "
            f"{budget:.6g} for {series.label!r}, psi {psi}, h {h}, "
            f"target {target!r}"
        )
    return LemmaSetResult(E=E, measure=measure, budget=budget, target=target,
                          rows=rows)


# ---------------------------------------------------------------------------
# Constant sweep


@dataclass(frozen=True)
class SweepResult:
    c_star: float | None
    trajectory: list          # (C, measure value or None, divergent flag)
    budget: float
    h_id: str
    undefined_points: list


def constant_sweep(
    series: PowerSeries,
    bound: BoundSpec,
    grid: RadialGrid,
    h: HSpec,
    measure_budget: float,
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
) -> SweepResult:
    """Smallest C on a log-spaced sweep whose violation measure fits a budget.

    The per-point deficits log M - log(bound at C=1) do not depend on C, so
    the sweep thresholds precomputed deficits; the per-cell measures are also
    precomputed and summed per mask (violation cells are exact unions of grid
    cells).  A sweep with no admissible C is a valid not-found outcome.
    """
    if bound.bound_id == "lower":
        raise ValidationError("cannot sweep a lower bound")
    if bound.C != 1.0:
        bound = BoundSpec(bound.bound_id, delta=bound.delta, n=bound.n, C=1.0,
                          h=bound.h, psi1=bound.psi1, psi2=bound.psi2)
    _reject_monomial(series, "constant_sweep")
    evals = evaluate_grid(series, grid, tol, jobs)
    deficits = []
    undefined = []
    for ev in evals:
        try:
            base = eval_bound(bound, log_mu=ev.log_mu, log_M=ev.log_M, r=ev.r)
        except DomainError as exc:
            undefined.append((ev.r, str(exc)))
            deficits.append(None)
            continue
        deficits.append(ev.log_M - base)
    pts = grid.points
    cell_measure = np.zeros(len(pts) - 1)
    for k in range(len(pts) - 1):
        single = IntervalSet.from_pairs([(pts[k], pts[k + 1])], grid.R)
        cell_measure[k] = h_log_measure(single, h).require_value()
    n_c = int(round(math.log10(SWEEP_C_MAX / SWEEP_C_MIN) * 8)) + 1
    trajectory = []
    c_star = None
    for i in range(n_c):
        C = SWEEP_C_MIN * SWEEP_STEP ** i
        logC = math.log(C)
        total = 0.0
        for k in range(len(pts) - 1):
            dk = deficits[k]
            if dk is not None and dk > logC:
                total += cell_measure[k]
        trajectory.append((C, total, False))
        if c_star is None and total <= measure_budget:
            c_star = C
    return SweepResult(c_star=c_star, trajectory=trajectory,
                       budget=measure_budget, h_id=h.h_id,
                       undefined_points=undefined)


# ---------------------------------------------------------------------------
# Lower-bound constant


@dataclass(frozen=True)
class OptimalityResult:
    c_low: float
    c_low_refined: float
    rel_change: float
    argmin_r: float
    skipped_points: int
    outside_model_families: bool
    rows: list  # (r, log_ratio) on the base grid


def optimality_check(
    series: PowerSeries,
    grid: RadialGrid,
    tol: float = DEFAULT_TOL,
    jobs: int = 1,
    refine_factor: int = 2,
) -> OptimalityResult:
    """Fit the largest constant under M >= C * mu/(1-r) * sqrt(log(mu/(1-r))).

    ``c_low`` is the grid minimum of the ratio in log domain; stability under
    grid refinement (default x2) is part of the result.  Points where the
    expression is undefined (the log factor not yet positive) are skipped and
    counted.
    """
    if grid.R != 1.0:
        raise ValidationError("the lower-bound ratio lives on the unit disk")
    _reject_monomial(series, "optimality_check")

    def log_ratios(g: RadialGrid):
        evals = evaluate_grid(series, g, tol, jobs)
        out = []
        skipped = 0
        for ev in evals:
            u = -math.log1p(-ev.r)
            B = ev.log_mu + u
            if B <= 0:
                skipped += 1
                continue
            rhs = B + 0.5 * math.log(B)
            out.append((ev.r, ev.log_M - rhs))
        if not out:
            raise DomainError(
                "lower-bound expression undefined on the whole grid; "
                "start the grid at larger radii"
            )
        return out, skipped

    base, skipped = log_ratios(grid)
    fine, _ = log_ratios(grid.refined(refine_factor))
    min_r, min_log = min(base, key=lambda t: t[1])
    fine_log = min(t[1] for t in fine)
    c_low = math.exp(min_log)
    c_fine = math.exp(fine_log)
    rel_change = abs(c_fine - c_low) / c_low if c_low > 0 else math.inf
    if not c_low > 0:
        raise InvariantViolation("lower-bound constant is not positive")
    return OptimalityResult(
        c_low=c_low, c_low_refined=c_fine, rel_change=rel_change,
        argmin_r=min_r, skipped_points=skipped,
        outside_model_families=series.family_id not in ("kovari",
                                                        "suleimanov"),
        rows=base,
    )


# ---------------------------------------------------------------------------
# Config-driven runs


def _measure_lines(measures: dict) -> list:
    lines = []
    for h_id, outcome in sorted(measures.items()):
        if outcome.divergent:
            lines.append(f"measure[{h_id}] = DIVERGENT ({outcome.note})")
        else:
            lines.append(f"measure[{h_id}] = {outcome.value:.12g}")
    return lines


def run_experiment(config, out_dir, jobs: int = 1) -> dict:
    """Execute the configured pipeline; write CSV plus summary, return paths.

    Output is deterministic: identical configs produce byte-identical files.
    """
    import os

    from .families import make_family
    from .reports import render_summary, write_csv
    from .rosenbloom import verify_pointwise_lemma

    os.makedirs(out_dir, exist_ok=True)
    series = make_family(config.family)
    label = config.label
    csv_path = os.path.join(out_dir, f"{label}.csv")
    summary_path = os.path.join(out_dir, f"{label}.summary.txt")
    lines = [f"mode = {config.mode}", f"family = {series.label}",
             f"grid = {config.grid.scheme} r0={config.grid.r0:.12g} "
             f"q={config.grid.q:.12g} count={config.grid.count}"]

    if config.mode == "eval":
        evals = evaluate_grid(series, config.grid, config.tol, jobs)
        write_csv(csv_path, ["r", "log_mu", "nu", "log_M"],
                  [(e.r, e.log_mu, e.nu, e.log_M) for e in evals])
        lines.append(f"points = {len(evals)}")
    elif config.mode == "stats":
        rows = []
        for r in config.grid.points:
            st = stats(series, math.log(r), config.tol)
            rows.append((r, st.g, st.g1, st.g2))
        write_csv(csv_path, ["r", "g", "g1", "g2"], rows)
        lines.append(f"points = {len(rows)}")
    elif config.mode == "check":
        report = violation_set(series, config.bound, config.grid,
                               measure_h=list(config.measure_h),
                               tol=config.tol, jobs=jobs)
        write_csv(csv_path, ["r", "log_M", "log_bound", "slack"],
                  [(m.r, m.log_M, m.log_bound, m.slack)
                   for m in report.margins])
        lines.append(f"bound = {report.bound}")
        lines.append(f"violating_points = {report.violation_count}")
        lines.append(f"violation_cells = {len(report.E_est.intervals)}")
        lines += _measure_lines(report.measure_by)
        if report.undefined_points:
            lines.append(
                f"undefined at {len(report.undefined_points)} grid points"
            )
    elif config.mode == "lemma":
        c = config.lemma_c if config.lemma_c else math.sqrt(3.0)
        x_grid = [math.log(r) for r in config.grid.points]
        reports_rows = verify_pointwise_lemma(series, x_grid, c, config.tol)
        write_csv(
            csv_path,
            ["x", "r", "g", "g1", "g2", "log_mu", "log_window",
             "count_bound", "margin_chebyshev", "margin_count",
             "c_constant", "holds"],
            [(p.x, math.exp(p.x), p.g, p.g1, p.g2, p.log_mu, p.log_window,
              p.count_bound, p.margin_chebyshev, p.margin_count,
              p.c_constant, p.holds) for p in reports_rows],
        )
        lines.append(f"c = {c:.12g}")
        lines.append(
            f"chain_holds_everywhere = {all(p.holds for p in reports_rows)}"
        )
        if config.lemma_psi is not None and config.lemma_h is not None \
                and config.lemma_target is not None:
            res = standard_lemma_set(series, config.lemma_psi, config.lemma_h,
                                     config.lemma_target, config.grid,
                                     config.tol, jobs)
            lines.append(
                f"budgeted set: target={res.target} "
                f"measure={res.measure.value:.12g} budget={res.budget:.12g}"
            )
    elif config.mode == "sweep":
        res = constant_sweep(series, config.bound, config.grid,
                             config.sweep_h, config.sweep_budget,
                             config.tol, jobs)
        write_csv(csv_path, ["C", "measure"],
                  [(C, m) for C, m, _ in res.trajectory])
        lines.append(f"budget = {res.budget:.12g} under h={res.h_id}")
        lines.append(
            "C_star = " + (f"{res.c_star:.12g}" if res.c_star is not None
                           else "not found in sweep range")
        )
    elif config.mode == "optimality":
        res = optimality_check(series, config.grid, config.tol, jobs)
        write_csv(csv_path, ["r", "log_ratio"], res.rows)
        lines.append(f"C_low = {res.c_low:.12g}")
        lines.append(f"C_low_refined = {res.c_low_refined:.12g}")
        lines.append(f"rel_change = {res.rel_change:.12g}")
        if res.outside_model_families:
            lines.append("flag: family is outside the extremal model families")
    else:  # pragma: no cover
        raise ValidationError(f"unknown mode {config.mode!r}")

    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write(render_summary(f"wvlab {config.mode}: {label}", lines))
    return {"csv": csv_path, "summary": summary_path}
