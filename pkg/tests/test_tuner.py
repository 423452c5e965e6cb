import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzcut.evaluation import evaluate_descriptors, load_descriptors
from fuzzcut.fis import Clause, LinguisticVariable, Rule, TrapezoidSet, builtin_profile, evaluate_many
from fuzzcut.tuner import (
    config_to_vector,
    fitness,
    prepare,
    pso,
    pso_tune,
    repair,
    split_dataset,
    tune_dataset,
    vector_to_config,
)

A, B = builtin_profile("A"), builtin_profile("B")
vectors = st.lists(st.floats(-0.5, 1.5, allow_nan=False), min_size=32, max_size=32).map(np.array)


def test_vector_round_trip():
    for cfg in (A, B):
        x = config_to_vector(cfg)
        assert x.shape == (32,)
        np.testing.assert_array_equal(repair(x), x)
        assert vector_to_config(cfg, x) == cfg


@settings(max_examples=300, deadline=None)
@given(vectors)
def test_repair_idempotent_and_valid(x):
    y = repair(x)
    np.testing.assert_array_equal(repair(y), y)
    assert ((y >= 0) & (y <= 1)).all()
    cfg = vector_to_config(B, y)  # raises if any invariant broke
    assert cfg.rules == B.rules


def test_repair_shape_checked():
    with pytest.raises(ValueError, match="32-vector"):
        repair(np.zeros(8))


def test_pso_low_dimensional_sphere():
    center = np.linspace(0.2, 0.8, 8)
    res = pso(lambda x: -float(((x - center) ** 2).sum()), np.full(8, 0.5), seed=1, project=lambda x: x)
    assert np.linalg.norm(res.best_position - center) < 1e-3
    assert all(a <= b for a, b in zip(res.history, res.history[1:]))
    assert res.evaluations == 30 * 101


def test_pso_zero_iterations_keeps_start():
    start = config_to_vector(B)
    res = pso(lambda x: -float(x.sum()), start, swarm=4, iters=0)
    assert len(res.history) == 1 and res.evaluations == 4


def test_pso_tuple_fitness_lexicographic():
    res = pso(lambda x: (round(float(x[0]), 1), -float(x[1] ** 2)), np.zeros(2), swarm=10, iters=30, project=lambda x: np.clip(x, 0, 1))
    assert res.best_fitness[0] == 1.0


def test_pso_rejects_non_finite():
    with pytest.raises(FloatingPointError, match="non-finite"):
        pso(lambda x: float("nan"), np.zeros(2), swarm=3, iters=1, project=lambda x: x)
    with pytest.raises(ValueError):
        pso(lambda x: 0.0, np.zeros(2), swarm=1)


def test_pso_deterministic():
    f = lambda x: -float(np.abs(x - 0.3).sum())  # noqa: E731
    a = pso(f, config_to_vector(B), swarm=6, iters=10, seed=5)
    b = pso(f, config_to_vector(B), swarm=6, iters=10, seed=5)
    assert a.history == b.history
    np.testing.assert_array_equal(a.best_position, b.best_position)


def test_fitness_recount(small_dataset):
    descs = load_descriptors(small_dataset)[:20]
    fit = fitness(B, prepare(descs, small_dataset), 5)
    rep = evaluate_descriptors(descs, small_dataset, B, 5, True)
    assert fit.exact == rep.exact_accuracy
    assert fit.within_k == rep.within_k_accuracy
    assert fit.neg_mean_error == pytest.approx(-rep.mean_abs_error)


def test_fitness_perfect_and_no_fire(small_dataset):
    descs = load_descriptors(small_dataset)
    samples = prepare(descs, small_dataset)
    rep = evaluate_descriptors(descs, small_dataset, B, 5, True)
    hit_ids = {d["id"] for d in descs} - {f["id"] for f in rep.failures}
    hits = [s for s in samples if s.id in hit_ids]
    assert hits and fitness(B, hits).exact == 1.0
    # fbar High only above 0.9985, which no candidate column of these widths reaches
    fb = LinguisticVariable(
        "fbar",
        (
            TrapezoidSet("Low", 0, 0, 0.5, 0.6),
            TrapezoidSet("Medium", 0.5, 0.6, 0.99, 0.999),
            TrapezoidSet("High", 0.9985, 0.999, 1, 1),
        ),
    )
    dead = B.with_variables([fb, *B.variables[1:]]).with_rules([Rule((Clause("fbar", "High"),), "Low")])
    assert evaluate_many(dead, [0.9], [0.5], [0.5])[2].all()
    assert 0.0 <= fitness(dead, samples).exact <= 1.0
    with pytest.raises(ValueError, match="empty"):
        fitness(B, [])


def test_tuning_never_worse_and_deterministic(small_dataset):
    samples = prepare(load_descriptors(small_dataset), small_dataset)
    r1 = pso_tune(B, samples, swarm=6, iters=4, seed=2)
    r2 = pso_tune(B, samples, swarm=6, iters=4, seed=2)
    assert r1.best_fitness.key() >= r1.base_fitness.key()
    assert r1.history == sorted(r1.history) and len(r1.history) == 5
    assert r1.to_dict() == r2.to_dict()
    assert r1.best_config.rules == B.rules


def test_split_and_tune_dataset(small_dataset):
    descs = load_descriptors(small_dataset)
    train, hold = split_dataset(descs, 0)
    assert len(hold) == round(0.2 * len(descs)) and not {d["id"] for d in train} & {d["id"] for d in hold}
    rep = tune_dataset(small_dataset, B, swarm=4, iters=2, seed=0)
    assert rep.holdout_best is not None and len(rep.holdout_ids) == len(hold)
