"""Construction of the named function families and user-defined series.

Families are built from coefficient recurrences or closed log-coefficient
formulas:

* ``exp``          log|a_n| = -log n!, infinite radius
* ``geometric``    log|a_n| = 0, radius 1
* ``monomial``     a single nonzero coefficient ``c * z^k``
* ``kovari``       coefficients of exp((1-z)^-rho), rho > 0, radius 1
* ``suleimanov``   log|a_n| = n^eps for n >= 1 (a_0 = 0), 0 < eps < 1, radius 1
* ``formula``      a user formula for log|a_n| in a restricted expression
                   language over n (see README)

The ``kovari`` coefficients grow sub-factorially but overflow floats well
before interesting radii, so the recurrences run on linearly scaled values
``a_n * exp(-shift)`` with a running rescale; logs are taken at the end.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import gammaln

from .errors import ValidationError
from .logdomain import LOG_ZERO
from .series import CoefficientSource, PowerSeries, VectorizedSource

FAMILY_IDS = ("exp", "geometric", "monomial", "kovari", "suleimanov", "formula")

_RESCALE_THRESHOLD = 1e200
_RESCALE_SHIFT = 230.0  # exp(-230) ~ 1e-100 per rescale


@dataclass(frozen=True)
class FamilySpec:
    """Identifier plus named parameters for one function family."""

    family_id: str
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.family_id not in FAMILY_IDS:
            raise ValidationError(
                f"unknown family {self.family_id!r}; choose from {FAMILY_IDS}"
            )
        _validators[self.family_id](dict(self.params))


def _require_float(params: dict, key: str, cond, desc: str) -> float:
    if key not in params:
        raise ValidationError(f"family parameter {key!r} is required ({desc})")
    try:
        v = float(params[key])
    except (TypeError, ValueError):
        raise ValidationError(f"family parameter {key!r} must be a number")
    if not cond(v):
        raise ValidationError(f"family parameter {key!r}={v} must satisfy {desc}")
    return v


def _validate_exp(params):
    if params:
        raise ValidationError("family 'exp' takes no parameters")


def _validate_geometric(params):
    if params:
        raise ValidationError("family 'geometric' takes no parameters")


def _validate_monomial(params):
    _require_float(params, "coeff", lambda c: c != 0 and math.isfinite(c),
                   "nonzero finite")
    k = _require_float(params, "degree", lambda k: k >= 0 and k == int(k),
                       "integer >= 0")
    params.pop("coeff"), params.pop("degree")
    if params:
        raise ValidationError(f"unexpected monomial parameters {sorted(params)}")
    return int(k)


def _validate_kovari(params):
    _require_float(params, "rho", lambda v: v > 0 and math.isfinite(v), "> 0")
    params.pop("rho")
    if params:
        raise ValidationError(f"unexpected kovari parameters {sorted(params)}")


def _validate_suleimanov(params):
    _require_float(params, "epsilon", lambda v: 0 < v < 1, "in (0, 1)")
    params.pop("epsilon")
    if params:
        raise ValidationError(
            f"unexpected suleimanov parameters {sorted(params)}"
        )


def _validate_formula(params):
    text = params.pop("formula", None)
    if not isinstance(text, str) or not text.strip():
        raise ValidationError("family 'formula' requires a formula string")
    _compile_formula(text)
    if "radius" in params:
        _require_float(params, "radius", lambda v: v > 0, "> 0")
        params.pop("radius")
    if params:
        raise ValidationError(f"unexpected formula parameters {sorted(params)}")


_validators = {
    "exp": _validate_exp,
    "geometric": _validate_geometric,
    "monomial": _validate_monomial,
    "kovari": _validate_kovari,
    "suleimanov": _validate_suleimanov,
    "formula": _validate_formula,
}


# ---------------------------------------------------------------------------
# Restricted formula language: +, -, *, /, **, log, exp, sqrt, pow, n,
# numeric literals and the constants e, pi.  No names beyond these, no
# attribute access, no user recursion.

_FORMULA_FUNCS = {"log": np.log, "exp": np.exp, "sqrt": np.sqrt,
                  "pow": np.power}
_FORMULA_CONSTS = {"e": math.e, "pi": math.pi}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
           ast.Div: np.divide, ast.Pow: np.power}
_UNARYOPS = {ast.USub: np.negative, ast.UAdd: lambda v: v}


def _compile_formula(text: str):
    """Compile a log-coefficient formula into a vectorized callable of n."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValidationError(f"formula syntax error: {exc.msg}") from None

    def check(node):
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.UnaryOp) and type(node.op) in _UNARYOPS:
            check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) \
                    or node.func.id not in _FORMULA_FUNCS or node.keywords:
                raise ValidationError(
                    "formula calls are limited to log, exp, sqrt, pow"
                )
            for arg in node.args:
                check(arg)
        elif isinstance(node, ast.Name):
            if node.id != "n" and node.id not in _FORMULA_CONSTS:
                raise ValidationError(
                    f"formula name {node.id!r} is not allowed; "
                    "only n, e, pi are defined"
                )
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise ValidationError("formula literals must be numeric")
        else:
            raise ValidationError(
                f"formula construct {type(node).__name__} is not allowed"
            )

    check(tree)

    def evaluate(node, n):
        if isinstance(node, ast.Expression):
            return evaluate(node.body, n)
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](evaluate(node.left, n),
                                          evaluate(node.right, n))
        if isinstance(node, ast.UnaryOp):
            return _UNARYOPS[type(node.op)](evaluate(node.operand, n))
        if isinstance(node, ast.Call):
            args = [evaluate(a, n) for a in node.args]
            return _FORMULA_FUNCS[node.func.id](*args)
        if isinstance(node, ast.Name):
            if node.id == "n":
                return n
            return _FORMULA_CONSTS[node.id]
        return float(node.value)

    def fn(n_array):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = evaluate(tree, np.asarray(n_array, dtype=float))
        return np.broadcast_to(np.asarray(out, dtype=float),
                               np.shape(n_array)).copy()

    return fn


# ---------------------------------------------------------------------------
# Coefficient recurrences.

def binomial_series(rho: float, count: int) -> np.ndarray:
    """Coefficients b_n of (1-z)^(-rho): b_n = C(n+rho-1, n), via log-Gamma."""
    if not rho > 0:
        raise ValidationError(f"rho must be > 0, got {rho}")
    n = np.arange(count, dtype=float)
    return np.exp(gammaln(n + rho) - gammaln(rho) - gammaln(n + 1.0))


def exp_of_series(b) -> np.ndarray:
    """Taylor coefficients of exp(sum b_k z^k) by the standard recurrence.

    a_0 = exp(b_0) and n*a_n = sum_{k=1..n} k*b_k*a_{n-k}; nonnegative b keeps
    the recurrence subtraction-free.  Linear-domain output, intended for
    moderate lengths; the family constructors use the scaled log variant.
    """
    b = np.asarray(b, dtype=float)
    if b.size == 0:
        raise ValidationError("coefficient sequence must be nonempty")
    if not np.all(np.isfinite(b)) or np.any(b < 0):
        raise ValidationError("exp_of_series requires finite b_k >= 0")
    kb = b * np.arange(b.size, dtype=float)
    a = np.empty(b.size)
    a[0] = math.exp(b[0])
    for n in range(1, b.size):
        a[n] = float(np.dot(kb[1: n + 1], a[n - 1:: -1])) / n
    return a


class _ScaledExpSource(CoefficientSource):
    """log coefficients of exp(g) where g has nonnegative coefficients.

    Runs the subtraction-free convolution recurrence on scaled linear values,
    rescaling whenever they approach float overflow.
    """

    def __init__(self, b_fn):
        self._b_fn = b_fn          # count -> array of b_0..b_{count-1}
        self._kb = np.empty(0)
        self._v = np.empty(0)      # scaled a_n values
        self._shift = 0.0
        self._logc = np.empty(0)

    def _ensure_kb(self, count):
        if self._kb.size < count:
            b = np.asarray(self._b_fn(count), dtype=float)
            if not np.all(np.isfinite(b)) or np.any(b < 0):
                raise ValidationError("exp-of-series input must be b_k >= 0")
            self._kb = b * np.arange(count, dtype=float)

    def extend_to(self, stop: int) -> np.ndarray:
        cur = self._logc.size
        if stop <= cur:
            return self._logc
        grow = max(stop, 2 * cur, 256)
        self._ensure_kb(grow)
        v = np.empty(grow)
        v[:cur] = self._v
        logc = np.empty(grow)
        logc[:cur] = self._logc
        if cur == 0:
            b0 = float(np.asarray(self._b_fn(1), dtype=float)[0])
            v[0] = 1.0
            self._shift = b0  # a_0 = exp(b_0) stored as exp(-shift)*a_0 = 1
            logc[0] = b0
            cur = 1
        for n in range(cur, grow):
            if v[n - 1] > _RESCALE_THRESHOLD:
                v[:n] *= math.exp(-_RESCALE_SHIFT)
                self._shift += _RESCALE_SHIFT
            s = float(np.dot(self._kb[1: n + 1], v[n - 1:: -1])) / n
            v[n] = s
            logc[n] = (math.log(s) + self._shift) if s > 0 else LOG_ZERO
        self._v = v
        self._logc = logc
        return self._logc


class _KovariRho1Source(CoefficientSource):
    """log coefficients of exp(1/(1-z)) via its three-term recurrence.

    (1-z)^2 f' = f gives (n+1)a_{n+1} = (2n+1)a_n - (n-1)a_{n-1}, linear time,
    which is what makes horizons of ~1e6 terms near r -> 1 affordable.  Runs
    scaled like the convolution source; cross-checked against it in tests.
    """

    def __init__(self):
        self._v = np.empty(0)
        self._shift = 0.0
        self._logc = np.empty(0)

    def extend_to(self, stop: int) -> np.ndarray:
        cur = self._logc.size
        if stop <= cur:
            return self._logc
        grow = max(stop, 2 * cur, 256)
        v = np.empty(grow)
        v[:cur] = self._v
        logc = np.empty(grow)
        logc[:cur] = self._logc
        if cur == 0:
            v[0] = 1.0
            v[1] = 1.0
            self._shift = 1.0  # a_0 = a_1 = e
            logc[0] = 1.0
            logc[1] = 1.0
            cur = 2
        shift = self._shift
        for n in range(cur - 1, grow - 1):
            if v[n] > _RESCALE_THRESHOLD:
                v[: n + 1] *= math.exp(-_RESCALE_SHIFT)
                shift += _RESCALE_SHIFT
            v[n + 1] = ((2 * n + 1) * v[n] - (n - 1) * v[n - 1]) / (n + 1)
            logc[n + 1] = math.log(v[n + 1]) + shift
        self._shift = shift
        self._v = v
        self._logc = logc
        return self._logc


# ---------------------------------------------------------------------------

def make_family(spec: FamilySpec) -> PowerSeries:
    """Build the series described by ``spec``."""
    p = dict(spec.params)
    fid = spec.family_id
    if fid == "exp":
        return PowerSeries(
            VectorizedSource(lambda n: -gammaln(n + 1.0)),
            math.inf, "exp", family_id="exp",
        )
    if fid == "geometric":
        return PowerSeries(
            VectorizedSource(lambda n: np.zeros(np.shape(n))),
            1.0, "geometric", family_id="geometric",
        )
    if fid == "monomial":
        c = float(p["coeff"])
        k = int(float(p["degree"]))
        values = np.full(k + 1, LOG_ZERO)
        values[k] = math.log(abs(c))
        s = PowerSeries.from_log_coeffs(
            values, math.inf, f"monomial({c:g}, {k})", monomial_degree=k
        )
        s.family_id = "monomial"
        return s
    if fid == "kovari":
        rho = float(p["rho"])
        source = _KovariRho1Source() if rho == 1.0 else _ScaledExpSource(
            lambda count, _r=rho: binomial_series(_r, count)
        )
        return PowerSeries(source, 1.0, f"kovari({rho:g})", family_id="kovari")
    if fid == "suleimanov":
        eps = float(p["epsilon"])

        def log_coeff(n, _e=eps):
            n = np.asarray(n, dtype=float)
            out = n ** _e
            out[n == 0] = LOG_ZERO  # summation starts at n = 1
            return out

        return PowerSeries(
            VectorizedSource(log_coeff), 1.0,
            f"suleimanov({eps:g})", family_id="suleimanov",
        )
    if fid == "formula":
        text = str(p["formula"])
        radius = float(p.get("radius", math.inf))
        fn = _compile_formula(text)
        probe = fn(np.arange(8, dtype=float))
        if np.isnan(probe).any() or np.isposinf(probe).any():
            raise ValidationError(
                "formula must evaluate to a finite value or -inf at small n"
            )
        return PowerSeries(VectorizedSource(fn), radius,
                           f"formula({text})", family_id="formula")
    raise ValidationError(f"unknown family {fid!r}")  # pragma: no cover


def family(family_id: str, **params) -> PowerSeries:
    """Shorthand: ``family('kovari', rho=1)`` etc."""
    return make_family(FamilySpec(family_id, params))
