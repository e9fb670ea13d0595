"""Experiment configuration files.

Line-oriented UTF-8 ``key = value`` pairs grouped under ``[section]``
headers; lists are comma-separated.  Example::

    [experiment]
    mode = check
    label = logimp-on-suleimanov

    [family]
    id = suleimanov
    epsilon = 0.5

    [grid]
    scheme = gap
    r0 = 0.9
    q = 0.9
    count = 200

    [bound]
    id = logimp
    n = 2
    delta = 0.5
    C = 1.0

    [measure]
    h = disklog, disk
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

from .bounds import BoundSpec, HSpec, PsiSpec, bound_spec, h_by_id, \
    psi_exphalf, psi_iter, psi_logpow, psi_pow, psi_square
from .errors import ValidationError
from .experiments import RadialGrid
from .families import FamilySpec
from .series import DEFAULT_TOL

MODES = ("eval", "stats", "check", "lemma", "sweep", "optimality")


def parse_psi(text: str) -> PsiSpec:
    """Parse ``pow:0.5``, ``logpow:1``, ``iter:3:0.5``, ``exphalf``,
    ``square``."""
    parts = [p.strip() for p in text.split(":")]
    name = parts[0]
    try:
        if name == "pow" and len(parts) == 2:
            return psi_pow(float(parts[1]))
        if name == "logpow" and len(parts) == 2:
            return psi_logpow(float(parts[1]))
        if name == "iter" and len(parts) == 3:
            return psi_iter(int(parts[1]), float(parts[2]))
        if name == "exphalf" and len(parts) == 1:
            return psi_exphalf()
        if name == "square" and len(parts) == 1:
            return psi_square()
    except ValueError:
        raise ValidationError(f"bad psi parameters in {text!r}") from None
    raise ValidationError(
        f"cannot parse psi spec {text!r}; use pow:D, logpow:D, iter:N:D, "
        "exphalf, square"
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated inputs for one experiment run."""

    mode: str
    label: str
    family: FamilySpec
    grid: RadialGrid
    bound: BoundSpec | None = None
    measure_h: tuple = ()
    lemma_c: float | None = None
    lemma_psi: PsiSpec | None = None
    lemma_h: HSpec | None = None
    lemma_target: str | None = None
    sweep_budget: float | None = None
    sweep_h: HSpec | None = None
    tol: float = DEFAULT_TOL


class _Section:
    """Typed access to one config section with field-level diagnostics."""

    def __init__(self, name: str, mapping):
        self.name = name
        self._map = dict(mapping)

    def take(self, key: str, required: bool = False, default=None):
        if key in self._map:
            return self._map.pop(key)
        if required:
            raise ValidationError(
                f"config section [{self.name}] is missing key {key!r}"
            )
        return default

    def take_float(self, key: str, required: bool = False, default=None):
        raw = self.take(key, required, None)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ValidationError(
                f"config [{self.name}] {key} = {raw!r} is not a number"
            ) from None

    def take_int(self, key: str, required: bool = False, default=None):
        v = self.take_float(key, required, None)
        if v is None:
            return default
        if v != int(v):
            raise ValidationError(
                f"config [{self.name}] {key} must be an integer"
            )
        return int(v)

    def finish(self):
        if self._map:
            raise ValidationError(
                f"config section [{self.name}] has unknown keys "
                f"{sorted(self._map)}"
            )


def _parse_family(sec: _Section) -> FamilySpec:
    fid = sec.take("id", required=True)
    params = {}
    for key in ("rho", "epsilon", "coeff", "degree", "radius"):
        v = sec.take_float(key)
        if v is not None:
            params[key] = v
    formula = sec.take("formula")
    if formula is not None:
        params["formula"] = formula
    sec.finish()
    return FamilySpec(fid, params)


def _parse_grid(sec: _Section) -> RadialGrid:
    scheme = sec.take("scheme", required=True)
    if scheme == "geo":
        start = sec.take_float("start", required=True)
        end = sec.take_float("end", required=True)
        count = sec.take_int("count", required=True)
        radius = sec.take_float("radius", default=math.inf)
        sec.finish()
        return RadialGrid.geometric(start, end, count, R=radius)
    if scheme == "gap":
        r0 = sec.take_float("r0", required=True)
        q = sec.take_float("q", default=0.9)
        count = sec.take_int("count", required=True)
        radius = sec.take_float("radius", default=1.0)
        sec.finish()
        return RadialGrid.geometric_in_gap(r0, q, count, R=radius)
    raise ValidationError(f"config [grid] scheme must be geo or gap, got "
                          f"{scheme!r}")


def _parse_bound(sec: _Section) -> BoundSpec:
    bid = sec.take("id", required=True)
    delta = sec.take_float("delta")
    n = sec.take_int("n")
    C = sec.take_float("C")
    h = sec.take("h")
    psi1 = sec.take("psi1")
    psi2 = sec.take("psi2")
    sec.finish()
    return bound_spec(
        bid, delta=delta, n=n, C=C,
        h=h_by_id(h) if h else None,
        psi1=parse_psi(psi1) if psi1 else None,
        psi2=parse_psi(psi2) if psi2 else None,
    )


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case-sensitive (C vs c)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"config parse error: {exc}") from None
    sections = {name: _Section(name, parser[name])
                for name in parser.sections()}

    def need(name: str) -> _Section:
        if name not in sections:
            raise ValidationError(f"config is missing section [{name}]")
        return sections[name]

    exp = need("experiment")
    mode = exp.take("mode", required=True)
    if mode not in MODES:
        raise ValidationError(
            f"config [experiment] mode must be one of {MODES}, got {mode!r}"
        )
    label = exp.take("label", default=mode)
    tol = exp.take_float("tol", default=DEFAULT_TOL)
    exp.finish()

    family = _parse_family(need("family"))
    grid = _parse_grid(need("grid"))

    bound = None
    if "bound" in sections:
        bound = _parse_bound(sections["bound"])
    measure_h: tuple = ()
    if "measure" in sections:
        sec = sections["measure"]
        raw = sec.take("h", required=True)
        measure_h = tuple(h_by_id(p.strip()) for p in raw.split(","))
        sec.finish()
    lemma_c = lemma_psi = lemma_h = lemma_target = None
    if "lemma" in sections:
        sec = sections["lemma"]
        lemma_c = sec.take_float("c", default=math.sqrt(3.0))
        psi_raw = sec.take("psi")
        lemma_psi = parse_psi(psi_raw) if psi_raw else None
        h_raw = sec.take("h")
        lemma_h = h_by_id(h_raw) if h_raw else None
        lemma_target = sec.take("target")
        if lemma_target not in (None, "g", "gprime"):
            raise ValidationError("config [lemma] target must be g or gprime")
        sec.finish()
    sweep_budget = sweep_h = None
    if "sweep" in sections:
        sec = sections["sweep"]
        sweep_budget = sec.take_float("budget", required=True)
        sweep_h = h_by_id(sec.take("h", required=True))
        sec.finish()

    known = {"experiment", "family", "grid", "bound", "measure", "lemma",
             "sweep"}
    extra = set(sections) - known
    if extra:
        raise ValidationError(f"config has unknown sections {sorted(extra)}")

    if mode in ("check", "sweep") and bound is None:
        raise ValidationError(f"mode {mode!r} needs a [bound] section")
    if mode == "sweep" and sweep_budget is None:
        raise ValidationError("mode 'sweep' needs a [sweep] section")

    return ExperimentConfig(
        mode=mode, label=label, family=family, grid=grid, bound=bound,
        measure_h=measure_h, lemma_c=lemma_c, lemma_psi=lemma_psi,
        lemma_h=lemma_h, lemma_target=lemma_target,
        sweep_budget=sweep_budget, sweep_h=sweep_h, tol=tol,
    )
