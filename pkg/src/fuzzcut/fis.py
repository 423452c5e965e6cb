"""Mamdani inference over trapezoidal sets.

AND is min, each consequent set is clipped at its rule's firing strength,
clipped sets are summed pointwise over a uniform grid on [0, 1], and the
crisp value is the discrete centroid of that sum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

LABELS = ("Low", "Medium", "High")
INPUTS = ("fbar", "gbar", "hbar")
OUTPUT = "rho"
VARIABLES = (*INPUTS, OUTPUT)

MIN_RESOLUTION = 101
NO_FIRE_MASS = 1e-9


class ConfigError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid fuzzy system config:\n  " + "\n  ".join(self.violations))


@dataclass(frozen=True)
class TrapezoidSet:
    label: str
    a: float
    b: float
    c: float
    d: float

    @property
    def breakpoints(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, x):
        return membership(self, x)


def membership(s: TrapezoidSet, x):
    """Trapezoid membership; vertical edges (a == b or c == d) are allowed."""
    x = np.asarray(x, dtype=np.float64)
    y = np.where((x >= s.b) & (x <= s.c), 1.0, 0.0)
    # tiny edge widths can overflow outside the edge, where the value is discarded
    with np.errstate(over="ignore", invalid="ignore"):
        if s.b > s.a:
            y = np.where((x > s.a) & (x < s.b), (x - s.a) / (s.b - s.a), y)
        if s.d > s.c:
            y = np.where((x > s.c) & (x < s.d), (s.d - x) / (s.d - s.c), y)
    y = np.clip(y, 0.0, 1.0)
    return y if y.ndim else float(y)


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    sets: tuple[TrapezoidSet, ...]

    def __getitem__(self, label: str) -> TrapezoidSet:
        for s in self.sets:
            if s.label == label:
                return s
        raise KeyError(label)

    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.sets)


@dataclass(frozen=True)
class Clause:
    variable: str
    label: str
    negated: bool = False

    def __str__(self):
        return f"{self.variable} is {'not ' if self.negated else ''}{self.label}"


@dataclass(frozen=True)
class Rule:
    antecedents: tuple[Clause, ...]
    consequent: str

    def __str__(self):
        return "if " + " and ".join(map(str, self.antecedents)) + f" then rho is {self.consequent}"


def _variable_violations(var: LinguisticVariable) -> list[str]:
    out = []
    labels = var.labels()
    if sorted(labels) != sorted(LABELS) or len(labels) != 3:
        out.append(f"{var.name}: sets must be exactly {list(LABELS)}, got {list(labels)}")
    for s in var.sets:
        if s.label not in LABELS:
            out.append(f"{var.name}: unknown label {s.label!r}")
        bp = s.breakpoints
        if not all(np.isfinite(bp)):
            out.append(f"{var.name}.{s.label}: non-finite breakpoint {bp}")
            continue
        if not (0.0 <= s.a <= s.b <= s.c <= s.d <= 1.0):
            out.append(f"{var.name}.{s.label}: unordered breakpoints {list(bp)}")
    if out:
        return out
    lo, med, hi = var["Low"], var["Medium"], var["High"]
    if not (lo.a <= med.a <= hi.a):
        out.append(f"{var.name}: supports not ordered (Low.a <= Medium.a <= High.a)")
    if lo.a != 0.0 or hi.d != 1.0:
        out.append(f"{var.name}: supports do not cover [0, 1]")
    if not med.a < lo.d:
        out.append(f"{var.name}: Low and Medium supports do not overlap")
    if not hi.a < med.d:
        out.append(f"{var.name}: Medium and High supports do not overlap")
    return out


@dataclass(frozen=True)
class FuzzySystemConfig:
    variables: tuple[LinguisticVariable, ...]
    rules: tuple[Rule, ...]
    resolution: int = 1001
    no_fire_value: float = 1.0
    name: str = ""

    def __post_init__(self):
        bad = self.violations()
        if bad:
            raise ConfigError(bad)

    def violations(self) -> list[str]:
        out = []
        names = [v.name for v in self.variables]
        if sorted(names) != sorted(VARIABLES) or len(names) != len(VARIABLES):
            out.append(f"variables must be exactly {list(VARIABLES)}, got {names}")
        for v in self.variables:
            out.extend(_variable_violations(v))
        known = {v.name: set(v.labels()) for v in self.variables}
        for k, rule in enumerate(self.rules, 1):
            if not rule.antecedents:
                out.append(f"rule {k}: no antecedents")
            seen = set()
            for cl in rule.antecedents:
                if cl.variable not in INPUTS or cl.variable not in known:
                    out.append(f"rule {k}: dangling reference to variable {cl.variable!r}")
                elif cl.label not in known[cl.variable]:
                    out.append(f"rule {k}: unknown label {cl.label!r} for {cl.variable}")
                if cl.variable in seen:
                    out.append(f"rule {k}: more than one clause on {cl.variable}")
                seen.add(cl.variable)
            if rule.consequent not in known.get(OUTPUT, ()):
                out.append(f"rule {k}: unknown label {rule.consequent!r} for {OUTPUT}")
        if not self.rules:
            out.append("rule base is empty")
        if int(self.resolution) != self.resolution or self.resolution < MIN_RESOLUTION:
            out.append(f"resolution must be an integer >= {MIN_RESOLUTION}, got {self.resolution}")
        if not (0.0 <= self.no_fire_value <= 1.0):
            out.append(f"no_fire_value must lie in [0, 1], got {self.no_fire_value}")
        return out

    def variable(self, name: str) -> LinguisticVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def with_resolution(self, resolution: int) -> "FuzzySystemConfig":
        return FuzzySystemConfig(self.variables, self.rules, resolution, self.no_fire_value, self.name)

    def with_variables(self, variables) -> "FuzzySystemConfig":
        return FuzzySystemConfig(tuple(variables), self.rules, self.resolution, self.no_fire_value, self.name)

    def with_rules(self, rules) -> "FuzzySystemConfig":
        return FuzzySystemConfig(self.variables, tuple(rules), self.resolution, self.no_fire_value, self.name)


@dataclass(frozen=True)
class RhoDegree:
    value: float
    fired: tuple[float, ...]
    no_fire: bool = False


@dataclass(frozen=True)
class _OutputTable:
    """Discrete sums of min(s, mu(x)) over the grid, for any clip level s.

    With grid values sorted by membership, the points below s contribute
    their own membership and the rest contribute s, so mass and first moment
    follow from prefix sums and one binary search.
    """

    mu_sorted: np.ndarray
    mass_prefix: np.ndarray  # leading 0, cumulative mu over sorted points
    moment_prefix: np.ndarray  # leading 0, cumulative x * mu
    x_prefix: np.ndarray  # leading 0, cumulative x
    size: int

    @classmethod
    def build(cls, grid: np.ndarray, mu: np.ndarray) -> "_OutputTable":
        order = np.argsort(mu, kind="stable")
        ms, xs = mu[order], grid[order]
        z = np.zeros(1)
        return cls(
            ms,
            np.concatenate([z, np.cumsum(ms)]),
            np.concatenate([z, np.cumsum(xs * ms)]),
            np.concatenate([z, np.cumsum(xs)]),
            grid.size,
        )

    def sums(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        idx = np.searchsorted(self.mu_sorted, s, side="left")
        mass = self.mass_prefix[idx] + s * (self.size - idx)
        moment = self.moment_prefix[idx] + s * (self.x_prefix[-1] - self.x_prefix[idx])
        return mass, moment


@dataclass(frozen=True)
class _Compiled:
    grid: np.ndarray
    out_mu: np.ndarray  # (rules, resolution) consequent set per rule
    tables: tuple  # per rule _OutputTable
    clauses: tuple  # per rule: tuple of (input index, TrapezoidSet, negated)
    no_fire_value: float


@lru_cache(maxsize=256)
def _compile(cfg: FuzzySystemConfig) -> _Compiled:
    grid = np.linspace(0.0, 1.0, int(cfg.resolution))
    out = cfg.variable(OUTPUT)
    per_label = {lab: membership(out[lab], grid) for lab in out.labels()}
    tables = {lab: _OutputTable.build(grid, mu) for lab, mu in per_label.items()}
    out_mu = np.array([per_label[r.consequent] for r in cfg.rules])
    clauses = tuple(
        tuple((INPUTS.index(cl.variable), cfg.variable(cl.variable)[cl.label], cl.negated) for cl in r.antecedents)
        for r in cfg.rules
    )
    return _Compiled(grid, out_mu, tuple(tables[r.consequent] for r in cfg.rules), clauses, cfg.no_fire_value)


def firing_strengths(cfg: FuzzySystemConfig, fbar, gbar, hbar) -> np.ndarray:
    """Strengths with shape (len(inputs), rules)."""
    comp = _compile(cfg)
    xs = [np.atleast_1d(np.asarray(v, dtype=np.float64)) for v in (fbar, gbar, hbar)]
    strengths = np.empty((xs[0].shape[0], len(comp.clauses)))
    for k, clauses in enumerate(comp.clauses):
        s = np.ones(xs[0].shape[0])
        for idx, tset, neg in clauses:
            mu = np.asarray(membership(tset, xs[idx]))
            s = np.minimum(s, 1.0 - mu if neg else mu)
        strengths[:, k] = s
    return strengths


def _defuzzify(comp: _Compiled, mass: np.ndarray, moment: np.ndarray):
    dead = mass < NO_FIRE_MASS
    rho = np.where(dead, comp.no_fire_value, moment / np.where(dead, 1.0, mass))
    return rho, dead


def evaluate_many(cfg: FuzzySystemConfig, fbar, gbar, hbar):
    """Vectorized inference. Returns ``(rho, strengths, no_fire_mask)``."""
    comp = _compile(cfg)
    strengths = firing_strengths(cfg, fbar, gbar, hbar)
    mass = np.zeros(strengths.shape[0])
    moment = np.zeros(strengths.shape[0])
    for k, table in enumerate(comp.tables):
        dm, dx = table.sums(strengths[:, k])
        mass += dm
        moment += dx
    rho, dead = _defuzzify(comp, mass, moment)
    return rho, strengths, dead


def evaluate_dense(cfg: FuzzySystemConfig, fbar, gbar, hbar, chunk: int = 512):
    """Same result as :func:`evaluate_many`, by materializing the aggregate."""
    comp = _compile(cfg)
    strengths = firing_strengths(cfg, fbar, gbar, hbar)
    rho = np.empty(strengths.shape[0])
    for lo in range(0, strengths.shape[0], chunk):
        s = strengths[lo : lo + chunk]
        agg = np.zeros((s.shape[0], comp.grid.size))
        for k in range(s.shape[1]):
            agg += np.minimum(s[:, k : k + 1], comp.out_mu[k])
        rho[lo : lo + chunk] = _defuzzify(comp, agg.sum(axis=1), agg @ comp.grid)[0]
    return rho


def evaluate(cfg: FuzzySystemConfig, fbar: float, gbar: float, hbar: float) -> RhoDegree:
    rho, strengths, no_fire = evaluate_many(cfg, [fbar], [gbar], [hbar])
    return RhoDegree(float(rho[0]), tuple(float(v) for v in strengths[0]), bool(no_fire[0]))


def aggregate(cfg: FuzzySystemConfig, fbar: float, gbar: float, hbar: float) -> tuple[np.ndarray, np.ndarray]:
    """The summed output set on the grid, for inspection and plotting."""
    comp = _compile(cfg)
    s = firing_strengths(cfg, fbar, gbar, hbar)[0]
    agg = sum(np.minimum(s[k], comp.out_mu[k]) for k in range(len(s)))
    return comp.grid, agg


# ---------------------------------------------------------------- (de)serialization


def _clause_text(cl: Clause) -> str:
    return f"not {cl.label}" if cl.negated else cl.label


def to_dict(cfg: FuzzySystemConfig) -> dict:
    return {
        "name": cfg.name,
        "variables": [
            {"name": v.name, "sets": [{"label": s.label, "trapezoid": list(s.breakpoints)} for s in v.sets]}
            for v in cfg.variables
        ],
        "rules": [{"if": {cl.variable: _clause_text(cl) for cl in r.antecedents}, "then": r.consequent} for r in cfg.rules],
        "resolution": cfg.resolution,
        "no_fire_value": cfg.no_fire_value,
    }


def from_dict(d: dict) -> FuzzySystemConfig:
    problems = []
    variables = []
    for k, vd in enumerate(d.get("variables", [])):
        sets = []
        for sd in vd.get("sets", []):
            tr = sd.get("trapezoid", [])
            if len(tr) != 4:
                problems.append(f"{vd.get('name')}.{sd.get('label')}: trapezoid needs 4 breakpoints")
                continue
            sets.append(TrapezoidSet(str(sd.get("label")), *(float(t) for t in tr)))
        variables.append(LinguisticVariable(str(vd.get("name", f"#{k}")), tuple(sets)))
    rules = []
    for k, rd in enumerate(d.get("rules", []), 1):
        clauses = []
        for var, text in rd.get("if", {}).items():
            words = str(text).split()
            if len(words) == 2 and words[0] == "not":
                clauses.append(Clause(var, words[1], True))
            elif len(words) == 1:
                clauses.append(Clause(var, words[0]))
            else:
                problems.append(f"rule {k}: cannot parse clause {var}: {text!r}")
        rules.append(Rule(tuple(clauses), str(rd.get("then"))))
    try:
        cfg = FuzzySystemConfig(
            tuple(variables),
            tuple(rules),
            d.get("resolution", 1001),
            float(d.get("no_fire_value", 1.0)),
            str(d.get("name", "")),
        )
    except ConfigError as exc:
        raise ConfigError(problems + exc.violations) from None
    if problems:
        raise ConfigError(problems)
    return cfg


def save_config(cfg: FuzzySystemConfig, path) -> None:
    Path(path).write_text(json.dumps(to_dict(cfg), indent=2) + "\n")


def load_config(path) -> FuzzySystemConfig:
    return from_dict(json.loads(Path(path).read_text()))


def resolve_config(spec: str | None) -> FuzzySystemConfig:
    """``A``/``B`` select a builtin profile, anything else is a JSON path."""
    from fuzzcut.profiles import builtin_profile

    if spec is None:
        import os

        spec = os.environ.get("FUZZCUT_PROFILE", "B")
    if spec.upper() in ("A", "B"):
        return builtin_profile(spec.upper())
    return load_config(spec)


def builtin_profile(which: str) -> FuzzySystemConfig:
    from fuzzcut.profiles import builtin_profile as _bp

    return _bp(which)
