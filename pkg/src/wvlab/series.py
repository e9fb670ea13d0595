"""Coefficient-magnitude power series and log-domain evaluation.

A :class:`PowerSeries` describes an analytic function on ``|z| < radius``
through the logs of its coefficient magnitudes.  All evaluations work on the
term logs ``log|a_n| + n*log(r)``: the largest one is the max-term, their
log-sum-exp is the value of the associated nonnegative-coefficient function.

Truncation is governed by a run-length rule: a horizon ``N`` is accepted once
the 50 terms following it each fall below ``max_term * tol / 50`` and ``N``
lies strictly beyond the current central index.  The scan doubles its window
until that happens, with a hard cap.  The rule is deliberately robust to
non-unimodal coefficient sequences but remains a heuristic beyond the
verified window.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSeriesError,
    DomainError,
    TruncationError,
    ValidationError,
)
from .logdomain import LOG_ZERO, log_sum_exp

DEFAULT_TOL = 1e-9
TAIL_RUN = 50
HARD_CAP = 10**8
_FIRST_WINDOW = 512


class CoefficientSource:
    """Provides log coefficient magnitudes for indices ``0..stop-1``.

    ``extend_to`` returns an array of length at least ``stop``; the returned
    prefix must be identical across calls (deterministic queries), and the
    source must be safe to extend under the owner's lock while readers hold
    previously returned arrays.
    """

    def extend_to(self, stop: int) -> np.ndarray:
        raise NotImplementedError


class VectorizedSource(CoefficientSource):
    """Source backed by a vectorized formula ``fn(n_array) -> log|a_n|``."""

    def __init__(self, fn):
        self._fn = fn
        self._logc = np.empty(0, dtype=float)

    def extend_to(self, stop: int) -> np.ndarray:
        cur = self._logc.size
        if stop > cur:
            grow = max(stop, 2 * cur, _FIRST_WINDOW)
            block = np.asarray(
                self._fn(np.arange(cur, grow, dtype=float)), dtype=float
            )
            if np.isnan(block).any():
                bad = int(np.flatnonzero(np.isnan(block))[0]) + cur
                raise DomainError(
                    f"coefficient formula produced NaN at n={bad}",
                    subexpression="log_coeff(n)",
                )
            self._logc = np.concatenate([self._logc, block])
        return self._logc


class ArraySource(CoefficientSource):
    """Source backed by an explicit finite prefix; zero beyond it."""

    def __init__(self, values: np.ndarray):
        self._values = np.asarray(values, dtype=float)
        self._logc = self._values

    def extend_to(self, stop: int) -> np.ndarray:
        if stop > self._logc.size:
            pad = np.full(max(stop, 2 * self._logc.size) - self._values.size,
                          LOG_ZERO)
            self._logc = np.concatenate([self._values, pad])
        return self._logc


@dataclass(frozen=True)
class MaxTermResult:
    """Largest term log and the largest index attaining it."""

    log_mu: float
    central_index: int


@dataclass(frozen=True)
class _Scan:
    log_mu: float
    nu: int
    horizon: int


class PowerSeries:
    """Analytic function given by coefficient magnitude logs.

    Instances are immutable apart from an internal, lock-protected coefficient
    cache, so they are safe to share between concurrent readers.  Results are
    bitwise independent of the number of workers: summation happens per radius
    in a fixed order.
    """

    def __init__(
        self,
        source: CoefficientSource,
        radius: float,
        label: str = "series",
        family_id: str | None = None,
        monomial_degree: int | None = None,
    ):
        if not (radius > 0):
            raise ValidationError(f"radius must be positive, got {radius}")
        self._source = source
        self.radius = float(radius)
        self.label = label
        self.family_id = family_id
        self.monomial_degree = monomial_degree
        self._lock = threading.Lock()

    @classmethod
    def from_log_coeffs(
        cls,
        values,
        radius: float = math.inf,
        label: str = "series",
        monomial_degree: int | None = None,
    ) -> "PowerSeries":
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1:
            raise ValidationError("log coefficient array must be 1-d")
        if np.isnan(arr).any() or np.isposinf(arr).any():
            raise ValidationError("log coefficients must be finite or -inf")
        series = cls(ArraySource(arr), radius, label,
                     monomial_degree=monomial_degree)
        series._known_all_zero = not np.any(arr > LOG_ZERO)
        series._known_finite_support = True
        return series

    _known_all_zero = False
    _known_finite_support = False

    def log_coeff(self, n: int) -> float:
        """log|a_n|; ``-inf`` exactly when the coefficient vanishes."""
        if n < 0:
            raise ValidationError(f"coefficient index must be >= 0, got {n}")
        return float(self.log_coeffs(n + 1)[n])

    def log_coeffs(self, stop: int) -> np.ndarray:
        """Read-only view of log|a_n| for ``n < stop``."""
        with self._lock:
            arr = self._source.extend_to(stop)
        return arr[:stop]

    def _terms(self, x: float, stop: int) -> np.ndarray:
        """Term logs ``log|a_n| + n*x`` for ``n < stop``."""
        return self.log_coeffs(stop) + x * np.arange(stop, dtype=float)

    def __repr__(self):  # pragma: no cover
        return f"PowerSeries({self.label!r}, radius={self.radius})"


def _find_horizon(t: np.ndarray, log_tail_tol: float) -> _Scan | None:
    """Locate the smallest accepted horizon within a computed term prefix.

    Accepts the smallest ``N`` strictly beyond the running central index such
    that the 50 terms after ``N`` each sit below ``running_max +
    log_tail_tol``.  Ties for the max break upward.
    """
    cm = np.maximum.accumulate(t)
    if cm[-1] == LOG_ZERO:
        return None
    small = t < cm + log_tail_tol
    notsmall = np.flatnonzero(~small)
    if notsmall.size == 0:
        return None
    runs = np.empty(notsmall.size, dtype=np.int64)
    runs[:-1] = np.diff(notsmall) - 1
    runs[-1] = t.size - notsmall[-1] - 1
    idx = np.arange(t.size)
    achieves = np.where(t == cm, idx, -1)
    nu_run = np.maximum.accumulate(achieves)
    for i in np.flatnonzero(runs >= TAIL_RUN):
        p = int(notsmall[i])
        nu_p = int(nu_run[p])
        if nu_p < 0:
            continue
        if p > nu_p:
            horizon = p
        elif runs[i] >= TAIL_RUN + 1:
            horizon = p + 1
        else:
            continue
        return _Scan(float(cm[horizon]), int(nu_run[horizon]), horizon)
    return None


def _scan(series: PowerSeries, x: float, tol: float) -> _Scan:
    if series._known_all_zero:
        raise DegenerateSeriesError(
            f"series {series.label!r} has no nonzero coefficient"
        )
    log_tail_tol = math.log(tol / TAIL_RUN)
    stop = _FIRST_WINDOW
    while True:
        stop = min(stop, HARD_CAP)
        t = series._terms(x, stop)
        found = _find_horizon(t, log_tail_tol)
        if found is not None:
            return found
        if stop >= HARD_CAP:
            raise TruncationError(
                f"no certified horizon for {series.label!r} at log r={x:g} "
                f"within {HARD_CAP} terms",
                horizon=stop,
            )
        stop *= 2


def _check_radius(series: PowerSeries, r: float) -> None:
    if not (r >= 0):
        raise ValidationError(f"radius must be >= 0, got {r}")
    if r >= series.radius:
        raise DomainError(
            f"r={r:g} is outside the disk of convergence "
            f"(radius {series.radius:g})"
        )


def truncation_horizon(series: PowerSeries, r: float, tol: float) -> int:
    """Smallest accepted summation horizon at radius ``r``.

    The exact value is implementation-reported, not contractual; what the
    contract guarantees is that the 50 terms after the horizon each fall
    below ``mu * tol / 50`` and the horizon exceeds the central index.
    """
    _check_radius(series, r)
    if r == 0:
        deg = series.monomial_degree
        return (deg if deg is not None else 0) + 1
    return _scan(series, math.log(r), tol).horizon


def log_max_term(series: PowerSeries, r: float) -> MaxTermResult:
    """Max term log and central index at radius ``r``; ties break upward."""
    _check_radius(series, r)
    if series._known_all_zero:
        raise DegenerateSeriesError(
            f"series {series.label!r} has no nonzero coefficient"
        )
    if r == 0:
        return MaxTermResult(series.log_coeff(0), 0)
    s = _scan(series, math.log(r), DEFAULT_TOL)
    return MaxTermResult(s.log_mu, s.nu)


def log_positive_value(series: PowerSeries, r: float,
                       tol: float = DEFAULT_TOL) -> float:
    """log of ``sum_n |a_n| r^n`` with relative truncation error <= tol."""
    _check_radius(series, r)
    if series._known_all_zero:
        raise DegenerateSeriesError(
            f"series {series.label!r} has no nonzero coefficient"
        )
    if r == 0:
        return series.log_coeff(0)
    x = math.log(r)
    s = _scan(series, x, tol)
    return log_sum_exp(series._terms(x, s.horizon + 1))


def max_modulus_sampled(
    series: PowerSeries,
    r: float,
    samples: int,
    phases=None,
    tol: float = DEFAULT_TOL,
) -> float:
    """Lower bound for log max|f| on the circle ``|z| = r``.

    Maximizes |f| over ``samples`` equally spaced points.  ``phases`` gives
    the coefficient arguments (array or vectorized callable over n); with the
    default of zero phases the maximum sits at ``z = r`` and the result equals
    :func:`log_positive_value` up to tolerance.
    """
    _check_radius(series, r)
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    if series._known_all_zero:
        raise DegenerateSeriesError(
            f"series {series.label!r} has no nonzero coefficient"
        )
    if r == 0:
        return series.log_coeff(0)
    x = math.log(r)
    s = _scan(series, x, tol)
    n = np.arange(s.horizon + 1, dtype=float)
    t = series._terms(x, s.horizon + 1)
    m = float(np.max(t))
    w = np.exp(t - m)
    if phases is None:
        phi = 0.0
    elif callable(phases):
        phi = np.asarray(phases(n), dtype=float)
    else:
        phi = np.zeros(n.size)
        given = np.asarray(phases, dtype=float)
        phi[: min(given.size, n.size)] = given[: n.size]
    best = 0.0
    for k in range(samples):
        theta = 2.0 * math.pi * k / samples
        val = abs(np.sum(w * np.exp(1j * (n * theta + phi))))
        if val > best:
            best = val
    if best == 0.0:
        return LOG_ZERO
    return m + math.log(best)
