"""Catalog of growth-weight functions and named bound expressions.

Two families of building blocks:

* psi specs: positive increasing functions with a convergent ``1/psi`` tail
  integral (``pow``, ``logpow``, ``iter``, ``exphalf``, ``square``, custom).
* h specs: positive increasing radial weights with a divergent ``h(r)/r``
  integral up to the convergence boundary (``unit``, ``disk``, ``disklog``,
  custom).

Bound expressions are assembled additively in log domain so that quantities
like ``exp(1e6)`` never materialize.  Iterated-log domain failures are hard
errors naming the offending subexpression; silently clamping them would
fabricate data in the asymptotic regime the expressions describe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DivergenceError, DomainError, ValidationError

PSI_IDS = ("pow", "logpow", "iter", "exphalf", "square", "custom")
H_IDS = ("unit", "disk", "disklog", "custom")
BOUND_IDS = ("wv", "wvb", "wvc", "kov", "kov_n", "sul", "sul_n",
             "sk", "sk_n", "main", "sk4", "logimp", "lower")

# Stable CLI vocabulary: bound id -> display expression (README carries the
# same table).
BOUND_FORMULAS = {
    "wv": "C * mu * (log mu)^(1/2+delta)",
    "wvb": "C * mu * (log mu)^(1/2) * (log_2 mu)^(1+delta)",
    "wvc": ("C * mu * (log mu)^(1/2) * log_2 mu ... log_{n-1} mu"
            " * (log_n mu)^(1+delta)"),
    "kov": "C * mu/(1-r) * (log(mu/(1-r)))^(1/2+delta)",
    "kov_n": ("C * mu/(1-r) * (log B)^(1/2) * log_2 B ... log_{n-1} B"
              " * (log_n B)^(1+delta),  B = mu/(1-r)"),
    "sul": "C * mu/(1-r)^(1+delta) * (log(mu/(1-r)))^(1/2+delta)",
    "sul_n": ("C * mu/(1-r) * (log 1/(1-r))^(1+delta) * (log B)^(1/2)"
              " * log_2 B ... log_{n-1} B * (log_n B)^(1+delta)"),
    "sk": ("C * mu/(1-r) * (log 1/(1-r))^(1/2+delta) * (log B)^(1/2)"
           " * (log_2 B)^(1+delta)"),
    "sk_n": ("C * mu/(1-r) * (log 1/(1-r))^(1/2+delta) * (log B)^(1/2)"
             " * log_2 B ... log_{n-1} B * (log_n B)^(1+delta)"),
    "main": "C * mu * sqrt(h(r) * psi2(h(r) * psi1(log M)))",
    "sk4": ("C * h * mu * (log h)^(1/2+delta) * (log(h*mu))^(1/2)"
            " * log_2(h*mu) ... log_{n-1}(h*mu) * (log_n(h*mu))^(1+delta)"),
    "logimp": ("C * mu/(1-r) * (log B)^(1/2) * log_2 B ... log_{n-1} B"
               " * (log_n B)^(1+delta),  B = mu/(1-r)"),
    "lower": "C * mu/(1-r) * (log(mu/(1-r)))^(1/2)   [lower bound, C = 1]",
}


def iterated_log(k: int, y: float) -> float:
    """log applied k times; requires the result to be strictly positive.

    Never clamps: an argument at or below the k-th iterated-exponential
    threshold raises a domain error naming the failing level.
    """
    if not (isinstance(k, int) and k >= 1):
        raise ValidationError(f"iterated log order must be an integer >= 1, got {k}")
    v = float(y)
    for level in range(1, k + 1):
        if not v > 0:
            raise DomainError(
                f"iterated log level {level} of y={y:g} hits a nonpositive "
                f"argument {v:g}",
                subexpression=f"log_{level}(y)",
            )
        v = math.log(v)
    if not v > 0:
        raise DomainError(
            f"log_{k}(y) = {v:g} is not positive for y={y:g}",
            subexpression=f"log_{k}(y)",
        )
    return v


def _tower(height: int) -> float:
    """exp iterated ``height`` times starting from 1 (e, e^e, ...)."""
    v = 1.0
    for _ in range(height):
        v = math.exp(v)
    return v


def _pos_log(value: float, name: str) -> float:
    if not value > 0:
        raise DomainError(f"{name} = {value:g} is not positive",
                          subexpression=name)
    return math.log(value)


# ---------------------------------------------------------------------------
# psi specs


@dataclass(frozen=True)
class PsiSpec:
    """One positive increasing function with integrable reciprocal tail."""

    psi_id: str
    delta: float | None = None
    n: int | None = None
    a: float = 0.0
    fn: Callable[[float], float] | None = None

    def __str__(self):
        if self.psi_id == "pow":
            return f"pow(delta={self.delta:g})"
        if self.psi_id == "logpow":
            return f"logpow(delta={self.delta:g})"
        if self.psi_id == "iter":
            return f"iter(n={self.n}, delta={self.delta:g})"
        return self.psi_id


def psi_pow(delta: float, a: float = 0.0) -> PsiSpec:
    """psi(y) = y^(1+delta)."""
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    if a < 0:
        raise ValidationError("threshold a must be >= 0 for pow")
    return PsiSpec("pow", delta=delta, a=a)


def psi_logpow(delta: float, a: float | None = None) -> PsiSpec:
    """psi(y) = y * (log y)^(1+delta), defined for y > 1."""
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    a = math.e if a is None else a
    if not a > 1:
        raise ValidationError("threshold a must be > 1 for logpow")
    return PsiSpec("logpow", delta=delta, a=a)


def psi_iter(n: int, delta: float, a: float | None = None) -> PsiSpec:
    """psi(y) = y * log y * log_2 y ... (log_{n-1} y)^(1+delta), n >= 2.

    With n = 2 the middle product is empty and the expression coincides with
    ``logpow``.
    """
    if not (isinstance(n, int) and n >= 2):
        raise ValidationError(f"iter order n must be an integer >= 2, got {n}")
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    a = _tower(n - 1) if a is None else a
    iterated_log(n - 1, a)  # validates the whole chain is positive at a
    return PsiSpec("iter", delta=delta, n=n, a=a)


def psi_exphalf(a: float = 0.0) -> PsiSpec:
    """psi(y) = exp(y/2)."""
    if a < 0:
        raise ValidationError("threshold a must be >= 0 for exphalf")
    return PsiSpec("exphalf", a=a)


def psi_square(a: float = 0.0) -> PsiSpec:
    """psi(y) = y^2."""
    if a < 0:
        raise ValidationError("threshold a must be >= 0 for square")
    return PsiSpec("square", a=a)


def psi_custom(fn: Callable[[float], float], a: float) -> PsiSpec:
    """User psi; the tail integral is computed by adaptive quadrature."""
    return PsiSpec("custom", a=a, fn=fn)


def _check_psi_domain(spec: PsiSpec, y: float) -> None:
    if y < spec.a:
        raise DomainError(
            f"psi {spec} queried at y={y:g} below its threshold a={spec.a:g}",
            subexpression=f"psi({spec})",
        )


def psi_eval(spec: PsiSpec, y: float) -> float:
    """Linear-domain psi(y)."""
    _check_psi_domain(spec, y)
    if spec.psi_id == "pow":
        if not y > 0:
            raise DomainError(f"pow psi needs y > 0, got {y:g}")
        return y ** (1.0 + spec.delta)
    if spec.psi_id == "logpow":
        ly = _pos_log(y, "log(y)")
        return y * ly ** (1.0 + spec.delta)
    if spec.psi_id == "iter":
        out = y
        for j in range(1, spec.n - 1):
            out *= iterated_log(j, y)
        return out * iterated_log(spec.n - 1, y) ** (1.0 + spec.delta)
    if spec.psi_id == "exphalf":
        return math.exp(y / 2.0)
    if spec.psi_id == "square":
        if not y > 0:
            raise DomainError(f"square psi needs y > 0, got {y:g}")
        return y * y
    return float(spec.fn(y))


def psi_log_of_linear(spec: PsiSpec, y: float) -> float:
    """log psi(y) for a linear-domain argument (which may be a log itself)."""
    _check_psi_domain(spec, y)
    if spec.psi_id == "pow":
        return (1.0 + spec.delta) * _pos_log(y, "y")
    if spec.psi_id == "logpow":
        ly = _pos_log(y, "log(y)")
        return math.log(y) + (1.0 + spec.delta) * math.log(ly)
    if spec.psi_id == "iter":
        out = _pos_log(y, "y")
        for j in range(1, spec.n - 1):
            out += math.log(iterated_log(j, y))
        return out + (1.0 + spec.delta) * math.log(iterated_log(spec.n - 1, y))
    if spec.psi_id == "exphalf":
        return y / 2.0
    if spec.psi_id == "square":
        return 2.0 * _pos_log(y, "y")
    return _pos_log(float(spec.fn(y)), "psi(y)")


def psi_log_of_log(spec: PsiSpec, log_y: float) -> float:
    """log psi(y) given log(y); the argument itself may be astronomically big."""
    if spec.a > 0 and log_y < math.log(spec.a):
        raise DomainError(
            f"psi {spec} queried below its threshold (log y={log_y:g})",
            subexpression=f"psi({spec})",
        )
    if spec.psi_id == "pow":
        return (1.0 + spec.delta) * log_y
    if spec.psi_id == "logpow":
        lly = _pos_log(log_y, "log(y)")
        return log_y + (1.0 + spec.delta) * lly
    if spec.psi_id == "iter":
        out = log_y
        level = log_y  # log_1(y); deeper levels follow by taking logs
        for j in range(1, spec.n - 1):
            out += _pos_log(level, f"log_{j}(y)")
            level = math.log(level)
        if not level > 0:
            raise DomainError(
                f"log_{spec.n - 1}(y) not positive (log y={log_y:g})",
                subexpression=f"log_{spec.n - 1}(y)",
            )
        return out + (1.0 + spec.delta) * math.log(level)
    if spec.psi_id == "exphalf":
        if log_y > 709.0:
            raise DomainError(
                f"exp-half psi overflows: log y={log_y:g} exceeds float range",
                subexpression="exp(y/2)",
            )
        return math.exp(log_y) / 2.0
    if spec.psi_id == "square":
        return 2.0 * log_y
    if log_y > 709.0:
        raise DomainError("custom psi cannot be evaluated at log y > 709")
    return _pos_log(float(spec.fn(math.exp(log_y))), "psi(y)")


def psi_tail(spec: PsiSpec, a0: float) -> float:
    """Tail integral of 1/psi over [a0, infinity)."""
    _check_psi_domain(spec, a0)
    if spec.psi_id == "pow":
        if not a0 > 0:
            raise DomainError("pow tail needs a0 > 0")
        return a0 ** (-spec.delta) / spec.delta
    if spec.psi_id == "logpow":
        la = _pos_log(a0, "log(a0)")
        return la ** (-spec.delta) / spec.delta
    if spec.psi_id == "iter":
        return iterated_log(spec.n - 1, a0) ** (-spec.delta) / spec.delta
    if spec.psi_id == "exphalf":
        return 2.0 * math.exp(-a0 / 2.0)
    if spec.psi_id == "square":
        if not a0 > 0:
            raise DomainError("square tail needs a0 > 0")
        return 1.0 / a0
    return _custom_tail(spec, a0)


def _custom_tail(spec: PsiSpec, a0: float, rel_tol: float = 1e-9) -> float:
    """Quadrature of 1/fn over [a0, inf); raises if it fails to converge."""
    from .measures import _integrate_smooth  # local import avoids a cycle

    def integrand(y):
        import numpy as np
        vals = np.asarray([float(spec.fn(float(t))) for t in np.atleast_1d(y)])
        if np.any(vals <= 0):
            raise DomainError("custom psi must stay positive on its tail")
        return 1.0 / vals

    total = 0.0
    lo = a0
    hi = max(2.0 * a0, a0 + 1.0)
    for _ in range(240):
        piece = _integrate_smooth(integrand, lo, hi, abs_tol=rel_tol / 8.0
                                  * max(total, 1e-300) + 1e-300)
        total += piece
        if piece <= rel_tol * total and total > 0:
            return total
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            break
    raise DivergenceError(
        f"tail integral of 1/psi from a0={a0:g} did not converge"
    )


# ---------------------------------------------------------------------------
# h specs


@dataclass(frozen=True)
class HSpec:
    """Positive increasing radial weight on [rho_start, radius)."""

    h_id: str
    rho_start: float
    radius: float
    fn: Callable[[float], float] | None = None

    def __str__(self):
        return self.h_id

    def _check(self, r: float) -> None:
        if not (self.rho_start <= r < self.radius):
            raise DomainError(
                f"h weight {self.h_id!r} undefined at r={r:g} "
                f"(domain [{self.rho_start:g}, {self.radius:g}))",
                subexpression=f"h({self.h_id})",
            )

    def value(self, r: float) -> float:
        self._check(r)
        if self.h_id == "unit":
            return 1.0
        if self.h_id == "disk":
            return 1.0 / (1.0 - r)
        if self.h_id == "disklog":
            u = -math.log1p(-r)
            return 1.0 / ((1.0 - r) * u)
        return float(self.fn(r))

    def log_value(self, r: float) -> float:
        self._check(r)
        if self.h_id == "unit":
            return 0.0
        if self.h_id == "disk":
            return -math.log1p(-r)
        if self.h_id == "disklog":
            u = -math.log1p(-r)
            return u - math.log(u)
        return _pos_log(float(self.fn(r)), "h(r)")


def h_unit() -> HSpec:
    return HSpec("unit", rho_start=1.0, radius=math.inf)


def h_disk() -> HSpec:
    return HSpec("disk", rho_start=0.0, radius=1.0)


def h_disklog() -> HSpec:
    return HSpec("disklog", rho_start=1.0 - 1.0 / math.e, radius=1.0)


def h_custom(fn: Callable[[float], float], rho_start: float,
             radius: float) -> HSpec:
    if not (0 <= rho_start < radius):
        raise ValidationError("need 0 <= rho_start < radius")
    return HSpec("custom", rho_start=rho_start, radius=radius, fn=fn)


def h_by_id(name: str) -> HSpec:
    table = {"unit": h_unit, "disk": h_disk, "disklog": h_disklog}
    if name not in table:
        raise ValidationError(
            f"unknown h weight {name!r}; choose from {sorted(table)}"
        )
    return table[name]()


# ---------------------------------------------------------------------------
# Bound expressions


@dataclass(frozen=True)
class BoundSpec:
    """Identifier plus parameters naming one catalog bound expression."""

    bound_id: str
    delta: float | None = None
    n: int | None = None
    C: float = 1.0
    h: HSpec | None = None
    psi1: PsiSpec | None = None
    psi2: PsiSpec | None = None

    def __str__(self):
        parts = [self.bound_id]
        if self.n is not None:
            parts.append(f"n={self.n}")
        if self.delta is not None:
            parts.append(f"delta={self.delta:g}")
        if self.bound_id != "lower":
            parts.append(f"C={self.C:g}")
        if self.h is not None:
            parts.append(f"h={self.h}")
        if self.psi1 is not None:
            parts.append(f"psi1={self.psi1}")
        if self.psi2 is not None:
            parts.append(f"psi2={self.psi2}")
        return parts[0] + "(" + ", ".join(parts[1:]) + ")"


_NEEDS_DELTA = {"wv", "wvb", "wvc", "kov", "kov_n", "sul", "sul_n",
                "sk", "sk_n", "sk4", "logimp"}
_NEEDS_N = {"wvc", "kov_n", "sul_n", "sk_n", "sk4", "logimp"}
_NEEDS_H = {"main", "sk4"}
DISK_BOUND_IDS = {"kov", "kov_n", "sul", "sul_n", "sk", "sk_n",
                  "logimp", "lower"}


def bound_spec(bound_id: str, delta: float | None = None, n: int | None = None,
               C: float | None = None, h: HSpec | None = None,
               psi1: PsiSpec | None = None,
               psi2: PsiSpec | None = None) -> BoundSpec:
    """Validated constructor for catalog bound expressions."""
    if bound_id not in BOUND_IDS:
        raise ValidationError(
            f"unknown bound id {bound_id!r}; choose from {BOUND_IDS}"
        )
    if bound_id == "lower":
        if C is not None and C != 1.0:
            raise ValidationError(
                "the lower bound is evaluated with C = 1; fit constants in "
                "the experiment layer"
            )
        C = 1.0
    else:
        C = 1.0 if C is None else float(C)
        if not C > 0:
            raise ValidationError(f"C must be > 0, got {C}")
    if bound_id in _NEEDS_DELTA:
        if delta is None or not delta > 0:
            raise ValidationError(f"bound {bound_id!r} needs delta > 0")
    elif delta is not None:
        raise ValidationError(f"bound {bound_id!r} takes no delta")
    if bound_id in _NEEDS_N:
        if n is None or not (isinstance(n, int) and n >= 2):
            raise ValidationError(f"bound {bound_id!r} needs integer n >= 2")
    elif n is not None:
        raise ValidationError(f"bound {bound_id!r} takes no n")
    if bound_id in _NEEDS_H:
        if h is None:
            raise ValidationError(f"bound {bound_id!r} needs an h weight")
    if bound_id == "main":
        if psi1 is None or psi2 is None:
            raise ValidationError("bound 'main' needs psi1 and psi2")
    elif psi1 is not None or psi2 is not None:
        raise ValidationError(f"bound {bound_id!r} takes no psi specs")
    return BoundSpec(bound_id, delta=delta, n=n, C=C, h=h,
                     psi1=psi1, psi2=psi2)


def _iter_factors_log(base: float, n: int, delta: float, name: str) -> float:
    """Sum of log factors  0.5*log(B) + sum log(log_j B) + (1+d)*log(log_n B).

    ``base`` is already the first log (e.g. log(mu/(1-r))); the factors are
    powers of its further iterated logs.
    """
    out = 0.5 * _pos_log(base, f"log({name})")
    for j in range(2, n):
        out += math.log(iterated_log(j - 1, base))
    out += (1.0 + delta) * math.log(iterated_log(n - 1, base))
    return out


def eval_bound(spec: BoundSpec, log_mu: float, log_M: float | None = None,
               r: float | None = None, h: HSpec | None = None) -> float:
    """log of the named bound's right-hand side (lower bound for ``lower``).

    Disk-type expressions need ``r`` in [0, 1); ``main`` additionally needs
    ``log_M``.  All iterated-log arguments must be above their thresholds,
    otherwise a domain error naming the subexpression propagates.
    """
    h = h if h is not None else spec.h
    bid = spec.bound_id
    L = float(log_mu)
    logC = math.log(spec.C)

    if bid in DISK_BOUND_IDS:
        if r is None:
            raise ValidationError(f"bound {bid!r} needs the radius r")
        if not (0 <= r < 1):
            raise DomainError(f"bound {bid!r} needs r in [0, 1), got {r:g}")

    if bid == "wv":
        return logC + L + (0.5 + spec.delta) * _pos_log(L, "log(mu)")
    if bid in ("wvb", "wvc"):
        n = 2 if bid == "wvb" else spec.n
        return logC + L + _iter_factors_log(L, n, spec.delta, "mu")

    if bid in ("kov", "kov_n", "sul", "sul_n", "sk", "sk_n",
               "logimp", "lower"):
        u = -math.log1p(-r)
        B = L + u
        if bid == "kov":
            return logC + B + (0.5 + spec.delta) * _pos_log(B, "log(mu/(1-r))")
        if bid in ("kov_n", "logimp"):
            return logC + B + _iter_factors_log(B, spec.n, spec.delta,
                                                "mu/(1-r)")
        if bid == "sul":
            return (logC + L + (1.0 + spec.delta) * u
                    + (0.5 + spec.delta) * _pos_log(B, "log(mu/(1-r))"))
        if bid == "sul_n":
            return (logC + B
                    + (1.0 + spec.delta) * _pos_log(u, "log(1/(1-r))")
                    + _iter_factors_log(B, spec.n, spec.delta, "mu/(1-r)"))
        if bid == "sk":
            return (logC + B
                    + (0.5 + spec.delta) * _pos_log(u, "log(1/(1-r))")
                    + _iter_factors_log(B, 2, spec.delta, "mu/(1-r)"))
        if bid == "sk_n":
            return (logC + B
                    + (0.5 + spec.delta) * _pos_log(u, "log(1/(1-r))")
                    + _iter_factors_log(B, spec.n, spec.delta, "mu/(1-r)"))
        # lower
        return B + 0.5 * _pos_log(B, "log(mu/(1-r))")

    if bid == "main":
        if log_M is None:
            raise ValidationError("bound 'main' consumes log_M; it is absent")
        if h is None:
            raise ValidationError("bound 'main' needs an h weight")
        if r is None:
            raise ValidationError("bound 'main' needs the radius r")
        lh = h.log_value(r)
        inner = lh + psi_log_of_linear(spec.psi1, float(log_M))
        return logC + L + 0.5 * (lh + psi_log_of_log(spec.psi2, inner))

    if bid == "sk4":
        if h is None:
            raise ValidationError("bound 'sk4' needs an h weight")
        if r is None:
            raise ValidationError("bound 'sk4' needs the radius r")
        lh = h.log_value(r)
        W = lh + L
        return (logC + lh + L
                + (0.5 + spec.delta) * _pos_log(lh, "log(h)")
                + _iter_factors_log(W, spec.n, spec.delta, "h*mu"))

    raise ValidationError(f"unknown bound id {bid!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Composition chain diagnostics


@dataclass(frozen=True)
class PhiChainRow:
    y: float
    log_phi: float
    log_rhs_product: float
    log_rhs_square: float
    holds_product: bool
    holds_square: bool
    log_ratio_square: float


@dataclass(frozen=True)
class PhiChainReport:
    delta: float
    rows: list
    y0: float | None            # smallest grid y after which both hold
    monotone_start: float | None  # phi/y^2 strictly decreasing from here on


def phi_chain_check(delta: float, y_grid) -> PhiChainReport:
    """Check the two elementary majorizations of phi = psi o psi for
    psi(y) = y (log y)^(1+delta):

        phi(y) <= 2^(1+delta) * y * (log y)^(2+2*delta)
        phi(y) <= y^2

    Reports the smallest grid point beyond which both hold at every later
    grid point (may be unattained) and where the ratio phi/y^2 becomes
    strictly decreasing for good.
    """
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta}")
    psi = psi_logpow(delta)
    rows = []
    for y in y_grid:
        y = float(y)
        ly = _pos_log(y, "log(y)")
        inner = psi_log_of_linear(psi, y)          # log psi(y)
        log_phi = psi_log_of_log(psi, inner)       # log psi(psi(y))
        log_rhs1 = ((1.0 + delta) * math.log(2.0) + math.log(y)
                    + (2.0 + 2.0 * delta) * math.log(ly))
        log_rhs2 = 2.0 * math.log(y)
        rows.append(PhiChainRow(
            y=y, log_phi=log_phi, log_rhs_product=log_rhs1,
            log_rhs_square=log_rhs2,
            holds_product=log_phi <= log_rhs1 + 1e-12,
            holds_square=log_phi <= log_rhs2 + 1e-12,
            log_ratio_square=log_phi - log_rhs2,
        ))
    y0 = None
    for i in range(len(rows)):
        if all(r.holds_product and r.holds_square for r in rows[i:]):
            y0 = rows[i].y
            break
    monotone_start = None
    for i in range(len(rows) - 1):
        tail = [r.log_ratio_square for r in rows[i:]]
        if all(b < a for a, b in zip(tail, tail[1:])):
            monotone_start = rows[i].y
            break
    return PhiChainReport(delta=delta, rows=rows, y0=y0,
                          monotone_start=monotone_start)
