"""Constriction-coefficient PSO over membership breakpoints.

Each variable contributes eight free numbers, the breakpoints that are not
pinned to 0 or 1::

    Low.c, Low.d, Medium.a, Medium.b, Medium.c, Medium.d, High.a, High.b

so a full config is a 32-vector. Rule bases are never touched.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from fuzzcut.evaluation import load_descriptors, score_sample
from fuzzcut.fis import VARIABLES, FuzzySystemConfig, LinguisticVariable, TrapezoidSet, evaluate_many, to_dict
from fuzzcut.raster import load_pattern
from fuzzcut.segmenter import PlanItem, cuts_from_plan, plan

log = logging.getLogger(__name__)

CHI = 0.7298
C1 = C2 = 1.49618
PER_VARIABLE = 8
GAP = 1e-6


# ---------------------------------------------------------------- encoding


def config_to_vector(cfg: FuzzySystemConfig) -> np.ndarray:
    out = []
    for name in VARIABLES:
        v = cfg.variable(name)
        lo, med, hi = v["Low"], v["Medium"], v["High"]
        out += [lo.c, lo.d, *med.breakpoints, hi.a, hi.b]
    return np.array(out, dtype=np.float64)


def vector_to_config(base: FuzzySystemConfig, x: np.ndarray) -> FuzzySystemConfig:
    x = repair(x)
    variables = []
    for j, name in enumerate(VARIABLES):
        lc, ld, ma, mb, mc, md, ha, hb = (float(t) for t in x[j * PER_VARIABLE : (j + 1) * PER_VARIABLE])
        variables.append(
            LinguisticVariable(
                name,
                (
                    TrapezoidSet("Low", 0.0, 0.0, lc, ld),
                    TrapezoidSet("Medium", ma, mb, mc, md),
                    TrapezoidSet("High", ha, hb, 1.0, 1.0),
                ),
            )
        )
    return base.with_variables(variables)


def _repair_variable(v: np.ndarray) -> np.ndarray:
    v = np.clip(v, 0.0, 1.0)
    lc, ld = np.sort(v[0:2])
    ma, mb, mc, md = np.sort(v[2:6])
    ha, hb = np.sort(v[6:8])
    # Medium must start before Low ends
    ld = max(ld, GAP)
    ma = min(ma, ld - GAP)
    # Medium must have width, and High must start inside it but after Medium does
    md = max(md, ma + GAP)
    ha = max(min(ha, md - GAP), ma)
    hb = max(hb, ha)
    return np.array([lc, ld, ma, mb, mc, md, ha, hb])


def repair(x: np.ndarray) -> np.ndarray:
    """Project a raw position back onto valid configs. Idempotent."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (PER_VARIABLE * len(VARIABLES),):
        raise ValueError(f"expected a {PER_VARIABLE * len(VARIABLES)}-vector, got shape {x.shape}")
    return np.concatenate([_repair_variable(x[j : j + PER_VARIABLE]) for j in range(0, x.size, PER_VARIABLE)])


# ---------------------------------------------------------------- swarm


@dataclass
class ParticleState:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_fitness: object


@dataclass
class SwarmResult:
    best_position: np.ndarray
    best_fitness: object
    history: list
    evaluations: int
    particles: list[ParticleState] = field(repr=False, default_factory=list)


def _check_finite(value, where: str):
    vals = value if isinstance(value, tuple) else (value,)
    if not all(np.isfinite(v) for v in vals):
        raise FloatingPointError(f"non-finite fitness {value!r} at {where}")
    return value


def pso(
    fitness: Callable[[np.ndarray], object],
    start: np.ndarray,
    swarm: int = 30,
    iters: int = 100,
    seed: int = 0,
    project: Callable[[np.ndarray], np.ndarray] = repair,
    spread: float = 0.1,
) -> SwarmResult:
    """Maximize ``fitness`` with the constriction update

        v <- chi * (v + c1 r1 (pbest - x) + c2 r2 (gbest - x))

    Particle 0 starts exactly at ``start`` so the result never scores below
    it. Fitness values may be floats or tuples (compared lexicographically).
    All random draws are made up front so results depend only on ``seed``.
    """
    if swarm < 2 or iters < 0:
        raise ValueError("need swarm >= 2 and iters >= 0")
    rng = np.random.default_rng(seed)
    dim = start.size
    start = project(start)
    x = np.vstack([start, project_rows(start + rng.uniform(-spread, spread, (swarm - 1, dim)), project)])
    v = rng.uniform(-spread, spread, (swarm, dim))
    v[0] = 0.0
    r1 = rng.random((iters, swarm, dim))
    r2 = rng.random((iters, swarm, dim))

    scores = [_check_finite(fitness(x[p]), f"init particle {p}") for p in range(swarm)]
    evaluations = swarm
    pbest, pscore = x.copy(), list(scores)
    g = max(range(swarm), key=lambda p: (pscore[p], -p))
    history = [pscore[g]]
    for t in range(iters):
        gbest = pbest[g]
        v = CHI * (v + C1 * r1[t] * (pbest - x) + C2 * r2[t] * (gbest - x))
        x = project_rows(x + v, project)
        for p in range(swarm):
            s = _check_finite(fitness(x[p]), f"iteration {t} particle {p}")
            evaluations += 1
            if s > pscore[p]:
                pbest[p], pscore[p] = x[p].copy(), s
        g = max(range(swarm), key=lambda p: (pscore[p], -p))
        history.append(pscore[g])
    particles = [ParticleState(x[p].copy(), v[p].copy(), pbest[p].copy(), pscore[p]) for p in range(swarm)]
    return SwarmResult(pbest[g].copy(), pscore[g], history, evaluations, particles)


def project_rows(x: np.ndarray, project) -> np.ndarray:
    return np.vstack([project(row) for row in x])


# ---------------------------------------------------------------- segmentation fitness


@dataclass(frozen=True)
class PreparedSample:
    id: str
    items: tuple[PlanItem, ...]
    pre_cuts: tuple[int, ...]
    truth: tuple[int, ...]


def prepare(descs: list[dict], root) -> list[PreparedSample]:
    """Features do not depend on the config, so extract them once."""
    out = []
    for d in sorted(descs, key=lambda d: d["id"]):
        pattern = load_pattern(Path(root) / d["image"])
        items, pre = plan(pattern, len(d["chars"]))
        out.append(PreparedSample(d["id"], tuple(items), tuple(pre), tuple(d["cuts"])))
    return out


@dataclass(frozen=True)
class Fitness:
    exact: float
    within_k: float
    neg_mean_error: float

    def key(self) -> tuple[float, float, float]:
        return (self.exact, self.within_k, self.neg_mean_error)


def fitness(cfg: FuzzySystemConfig, samples: list[PreparedSample], tolerance_k: int = 5) -> Fitness:
    """Exact-cut accuracy, then within-k accuracy, then minus mean |cut error|."""
    if not samples:
        raise ValueError("empty dataset")
    # one batched inference call over every candidate column of every block
    chunks, index = [], []
    for si, s in enumerate(samples):
        for bi, item in enumerate(s.items):
            if item.features is not None:
                f = item.features
                chunks.append((f.fbar[1:-1], f.gbar[1:-1], f.hbar[1:-1]))
                index.append((si, bi, f.n))
    rho_flat = evaluate_many(cfg, *(np.concatenate(c) for c in zip(*chunks)))[0] if chunks else np.empty(0)
    rhos = [[None] * len(s.items) for s in samples]
    pos = 0
    for si, bi, n in index:
        r = np.full(n, np.nan)
        r[1:-1] = rho_flat[pos : pos + n - 2]
        rhos[si][bi] = r
        pos += n - 2

    exact = within = 0
    errors: list[int] = []
    for s, r in zip(samples, rhos):
        cuts, _ = cuts_from_plan(list(s.items), s.pre_cuts, r)
        sc = score_sample(cuts, s.truth, tolerance_k)
        exact += sc.exact
        within += sc.within_k
        if not sc.count_mismatch:
            errors += [abs(c - t) for c, t in zip(cuts, s.truth)]
    mean_err = sum(errors) / len(errors) if errors else 0.0
    return Fitness(exact / len(samples), within / len(samples), -mean_err)


@dataclass
class TuneReport:
    best_config: FuzzySystemConfig
    history: list[float]
    evaluations: int
    seed: int
    base_fitness: Fitness
    best_fitness: Fitness
    holdout_base: Fitness | None = None
    holdout_best: Fitness | None = None
    train_ids: list[str] = field(default_factory=list)
    holdout_ids: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def fit(f):
            return None if f is None else {"exact": f.exact, "within_k": f.within_k, "neg_mean_error": f.neg_mean_error}

        return {
            "seed": self.seed,
            "evaluations": self.evaluations,
            "history": list(self.history),
            "train": {"base": fit(self.base_fitness), "best": fit(self.best_fitness), "ids": self.train_ids},
            "holdout": {"base": fit(self.holdout_base), "best": fit(self.holdout_best), "ids": self.holdout_ids},
            "best_config": to_dict(self.best_config),
        }


def pso_tune(
    base_cfg: FuzzySystemConfig,
    samples: list[PreparedSample],
    swarm: int = 30,
    iters: int = 100,
    seed: int = 0,
    tolerance_k: int = 5,
    holdout: list[PreparedSample] | None = None,
) -> TuneReport:
    if not samples:
        raise ValueError("empty dataset")

    def score(x):
        return fitness(vector_to_config(base_cfg, x), samples, tolerance_k).key()

    res = pso(score, config_to_vector(base_cfg), swarm=swarm, iters=iters, seed=seed)
    best_cfg = vector_to_config(base_cfg, res.best_position)
    report = TuneReport(
        best_config=best_cfg,
        history=[h[0] for h in res.history],
        evaluations=res.evaluations,
        seed=seed,
        base_fitness=fitness(base_cfg, samples, tolerance_k),
        best_fitness=fitness(best_cfg, samples, tolerance_k),
        train_ids=[s.id for s in samples],
    )
    if holdout:
        report.holdout_base = fitness(base_cfg, holdout, tolerance_k)
        report.holdout_best = fitness(best_cfg, holdout, tolerance_k)
        report.holdout_ids = [s.id for s in holdout]
    log.info("tuned %s: exact %.4f -> %.4f", base_cfg.name or "config", report.base_fitness.exact, report.best_fitness.exact)
    return report


def split_dataset(descs: list[dict], seed: int, holdout_fraction: float = 0.2) -> tuple[list[dict], list[dict]]:
    descs = sorted(descs, key=lambda d: d["id"])
    order = np.random.default_rng(seed).permutation(len(descs))
    n_hold = int(round(holdout_fraction * len(descs)))
    if len(descs) - n_hold < 1:
        n_hold = 0
    hold = sorted((descs[i] for i in order[:n_hold]), key=lambda d: d["id"])
    train = sorted((descs[i] for i in order[n_hold:]), key=lambda d: d["id"])
    return train, hold


def tune_dataset(dataset_dir, base_cfg, swarm=30, iters=100, seed=0, tolerance_k=5, holdout_fraction=0.2) -> TuneReport:
    descs = load_descriptors(dataset_dir)
    if not descs:
        raise ValueError(f"no descriptors in {dataset_dir}")
    train, hold = split_dataset(descs, seed, holdout_fraction)
    return pso_tune(
        base_cfg,
        prepare(train, dataset_dir),
        swarm=swarm,
        iters=iters,
        seed=seed,
        tolerance_k=tolerance_k,
        holdout=prepare(hold, dataset_dir) if hold else None,
    )


def save_report(report: TuneReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
