import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fuzzcut.features
from fuzzcut.fis import builtin_profile
from fuzzcut.raster import BinaryPattern, PatternError
from fuzzcut.segmenter import (
    Block,
    _ranked,
    allocate_chars,
    best_cut,
    estimate_chars,
    presplit,
    segment,
    segments_from_cuts,
    select_cuts,
    split_pattern,
)

import oracles
from conftest import random_pattern, trimmed_patterns

B = builtin_profile("B")


def bars(*widths_and_gaps, height=6):
    """Alternate solid blocks and blank gaps: bars(5, 1, 5) is 5 ink, 1 blank, 5 ink."""
    cols = []
    for k, w in enumerate(widths_and_gaps):
        cols += [k % 2 == 0] * w
    return BinaryPattern.from_black(np.tile(np.array(cols), (height, 1)))


def test_presplit_single_gap():
    blocks, cuts = presplit(bars(5, 1, 5))
    assert cuts == [6]
    assert [(b.start, b.stop) for b in blocks] == [(1, 5), (7, 11)]


def test_presplit_no_gap():
    blocks, cuts = presplit(bars(7))
    assert cuts == [] and len(blocks) == 1


def test_presplit_run_middle():
    _, cuts = presplit(bars(5, 3, 4))
    assert cuts == [7]
    _, cuts = presplit(bars(5, 2, 4))
    assert cuts == [6]


@settings(max_examples=200, deadline=None)
@given(trimmed_patterns(max_n=30))
def test_presplit_blocks_have_no_blank_columns(p):
    blocks, cuts = presplit(p)
    for b in blocks:
        assert (fuzzcut.features.vertical_projection(b.pattern) > 0).all()
        assert b.pattern.n == b.width
    assert len(cuts) == len(blocks) - 1


@settings(max_examples=200, deadline=None)
@given(trimmed_patterns(max_n=30))
def test_presplit_mirror(p):
    V = fuzzcut.features.vertical_projection(p)
    runs, j = [], 0
    while j < p.n:
        if V[j] == 0:
            k = j
            while V[k + 1] == 0:
                k += 1
            runs.append((j + 1, k + 1))
            j = k
        j += 1
    _, cuts = presplit(p)
    _, mcuts = presplit(p.mirror())
    assert len(cuts) == len(mcuts) == len(runs)
    for (a, b), c, mc in zip(runs, cuts, reversed(mcuts)):
        # odd-length runs mirror exactly; even ones land one column left
        assert mc == p.n + 1 - c - (0 if (b - a) % 2 == 0 else 1)


@settings(max_examples=250, deadline=None)
@given(trimmed_patterns(solid_columns=True), st.sampled_from("AB"))
def test_best_cut_matches_exhaustive_scan(p, which):
    cfg = builtin_profile(which)
    col, rho = best_cut(p, cfg)
    assert col == oracles.best_cut(p.to_strings(), cfg)
    assert np.isnan(rho[0]) and np.isnan(rho[-1])


def test_best_cut_three_columns():
    assert best_cut(BinaryPattern.from_strings(["000", "010"]), B)[0] == 2
    with pytest.raises(PatternError, match="no candidate columns"):
        best_cut(BinaryPattern.from_strings(["00"]), B)


def test_tie_rule_prefers_center_then_lower_index():
    rho = np.full(8, 0.3)
    fbar = np.abs(4.5 - np.arange(1, 9)) / 4.5
    assert _ranked(rho, fbar)[:2] == [4, 5]


def test_estimate_and_allocate():
    sq = Block(bars(6), 1, 6)
    wide = Block(bars(20), 8, 27)
    assert estimate_chars(sq) == 1
    assert estimate_chars(wide) == 3
    assert estimate_chars(Block(bars(60), 1, 60)) == 4
    assert allocate_chars([sq, wide], None) == [1, 3]
    assert allocate_chars([sq, wide], 3) == [1, 2]
    assert allocate_chars([sq, wide], 1) == [1, 1]


def test_select_cuts_separation():
    rho = np.array([np.nan, 0.1, 0.11, 0.12, 0.5, 0.5, 0.2, 0.5, 0.5, np.nan])
    fbar = np.zeros(10)
    assert select_cuts(rho, fbar, 3) == [2, 7]


def test_square_pattern_no_cuts():
    res = segment(bars(6), B)
    assert res.cuts == () and res.segments == ((1, 6),)


def test_bridge_pair():
    m = 12
    left = np.zeros((m, 10), bool)
    left[:, 1:3] = left[:, 7:9] = True
    left[0, 1:9] = True
    right = left.copy()
    bridge = np.zeros((m, 1), bool)
    bridge[m - 1] = True
    img = np.hstack([left[:, 1:9], bridge, right[:, 1:9]])
    p = BinaryPattern.from_black(img)
    j = 9
    res = segment(p, B, expected_chars=2)
    assert len(res.cuts) == 1 and abs(res.cuts[0] - j) <= 2
    assert res.cuts[0] == oracles.best_cut(p.to_strings(), B)


def test_blank_column_plus_touching_pair():
    pair = np.zeros((8, 13), bool)
    pair[:, [0, 1, 5, 7, 11, 12]] = True
    pair[7, :] = True
    glyph = np.zeros((8, 4), bool)
    glyph[:, 0:2] = True
    glyph[0, :] = True
    p = BinaryPattern.from_black(np.hstack([glyph, np.zeros((8, 1), bool), pair]))
    res = segment(p, B, expected_chars=3)
    assert res.presplit_cuts == (5,)
    assert len(res.fuzzy_cuts) == 1 and 6 < res.fuzzy_cuts[0] < 18
    assert len(res.cuts) == 2 and not res.under_segmented


def test_under_segmented_flag():
    res = segment(BinaryPattern.from_strings(["0000"]), B, expected_chars=4)
    assert res.under_segmented and len(res.cuts) < 3


def test_untrimmed_rejected():
    with pytest.raises(PatternError, match="trimmed"):
        segment(BinaryPattern.from_strings(["1000"]), B)


@settings(max_examples=200, deadline=None)
@given(trimmed_patterns(max_n=40), st.one_of(st.none(), st.integers(1, 5)))
def test_segment_invariants(p, k):
    res = segment(p, B, k)
    assert list(res.cuts) == sorted(set(res.cuts))
    assert all(2 <= c <= p.n - 1 for c in res.cuts)
    assert len(res.segments) == len(res.cuts) + 1
    covered = [c for a, b in res.segments for c in range(a, b + 1)]
    assert covered == list(range(1, p.n + 1))
    assert set(res.presplit_cuts) <= set(res.cuts)
    assert len(res.rho_profile) == p.n


def test_h_never_sees_blank_column(monkeypatch):
    calls = []
    real = fuzzcut.features.compute_h

    def spy(V):
        calls.append(np.asarray(V).copy())
        return real(V)

    monkeypatch.setattr(fuzzcut.features, "compute_h", spy)
    rng = np.random.default_rng(11)
    for _ in range(200):
        p = random_pattern(rng, int(rng.integers(2, 12)), int(rng.integers(3, 40)), 0.2)
        segment(p, B)
    assert calls and all((V[1:-1] > 0).all() for V in calls)


def test_segment_deterministic():
    p = random_pattern(np.random.default_rng(5), 12, 40, 0.35)
    a, b = segment(p, B, 3), segment(p, B, 3)
    assert a.cuts == b.cuts
    assert a.rho_profile.tobytes() == b.rho_profile.tobytes()


def test_split_and_segments():
    assert segments_from_cuts(10, [4, 8]) == ((1, 3), (4, 7), (8, 10))
    pieces = split_pattern(bars(3, 1, 3), [4])
    assert [q.n for q in pieces] == [3, 3]
