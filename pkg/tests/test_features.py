import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fuzzcut.features import (
    BlankColumnError,
    center_feature,
    compute_g,
    compute_h,
    extract,
    normalize_feature,
    vertical_projection,
)
from fuzzcut.raster import BinaryPattern, PatternError

import oracles
from conftest import trimmed_patterns

TABLE_FBAR = [0.8182, 0.7273, 0.6364, 0.5455, 0.4545, 0.3636, 0.2727, 0.1818, 0.0909, 0.0,
              0.0909, 0.1818, 0.2727, 0.3636, 0.4545, 0.5455, 0.6364, 0.7273, 0.8182]  # fmt: skip


def test_projection_counts():
    p = BinaryPattern.from_strings(["1001", "1011", "1001"])
    assert vertical_projection(p).tolist() == [0, 3, 2, 0]
    assert vertical_projection(BinaryPattern.from_strings(["00", "00"])).tolist() == [2, 2]
    assert vertical_projection(BinaryPattern.from_strings(["0"] * 5)).tolist() == [5]


def test_center_feature():
    c, f = center_feature(21)
    assert c == 11
    assert f[11] == pytest.approx(1 / 11)
    assert f[10] == 0
    np.testing.assert_allclose(f[1:-1], TABLE_FBAR, atol=5e-5)
    c, f = center_feature(4)
    assert c == 2.5 and f[0] == pytest.approx(0.6)
    with pytest.raises(PatternError, match="too narrow"):
        center_feature(1)


def test_g_examples():
    assert compute_g([1, 5, 1, 5, 1])[2] == 4
    assert compute_g([3, 3, 3, 3, 3])[2] == 0
    # global peaks: l=1, r=5 for i=2, so (4 - 2 + 4) / 2
    g = compute_g([4, 1, 2, 1, 4])
    assert g[1] == 3 and g[3] == 3
    assert g[0] == g[-1] == 0


def test_g_peak_ties_toward_column():
    # equal peaks on each side; the ones adjacent to index 3 win
    from fuzzcut.features import _peak_indices

    left, right = _peak_indices(np.array([5, 1, 5, 0, 5, 1, 5]))
    assert left[3] == 2 and right[3] == 4


def test_h_examples():
    assert compute_h([2, 4, 2, 4, 2])[2] == 2
    assert compute_h([5, 1, 5])[1] == 8
    assert compute_h([1, 1, 1])[1] == 0
    with pytest.raises(BlankColumnError, match="blank column reached h"):
        compute_h([1, 0, 1])


def test_normalize_examples():
    bar, flag = normalize_feature([0, 2, 2, 2, 0], range(2, 5))
    assert flag and bar.tolist() == [0.5] * 5
    bar, flag = normalize_feature([0, 1, 3, 2, 0], range(2, 5))
    assert not flag
    assert bar[2] == 0 and bar[1] == 1 and bar[3] == 0.5
    with pytest.raises(PatternError):
        normalize_feature([1, 2], range(2, 2))


def test_three_column_pattern_single_candidate():
    f = extract(BinaryPattern.from_strings(["000"]))
    assert list(f.candidates) == [2]
    assert f.g_uninformative and f.h_uninformative


def test_extract_rejects_narrow():
    with pytest.raises(PatternError, match="no candidate"):
        extract(BinaryPattern.from_strings(["00"]))


@settings(max_examples=300, deadline=None)
@given(trimmed_patterns(solid_columns=True))
def test_extract_matches_oracle(p):
    V, fbar, gbar, hbar = oracles.features(p.to_strings())
    f = extract(p)
    assert f.V.tolist() == V
    np.testing.assert_array_equal(f.fbar, fbar)
    np.testing.assert_allclose(f.gbar, gbar, rtol=0, atol=1e-12)
    np.testing.assert_allclose(f.hbar, hbar, rtol=0, atol=1e-12)


@settings(max_examples=300, deadline=None)
@given(trimmed_patterns(solid_columns=True))
def test_ranges_and_extremes(p):
    f = extract(p)
    for bar in (f.fbar, f.gbar, f.hbar):
        assert ((bar >= 0) & (bar <= 1)).all()
    cand = np.arange(1, f.n - 1)
    for raw, bar, flat in ((f.raw_g, f.gbar, f.g_uninformative), (f.raw_h, f.hbar, f.h_uninformative)):
        if flat:
            assert (bar == 0.5).all()
            continue
        sub = raw[cand]
        assert set(cand[bar[cand] == 0]) == set(cand[sub == sub.max()])
        assert set(cand[bar[cand] == 1]) == set(cand[sub == sub.min()])


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 60))
def test_fbar_monotone_in_distance(n):
    c, f = center_feature(n)
    d = np.abs(c - np.arange(1, n + 1))
    order = np.argsort(d, kind="stable")
    assert (np.diff(f[order]) >= 0).all()
    assert ((np.diff(f[order]) > 0) == (np.diff(d[order]) > 0)).all()
    if n % 2:
        assert f[n // 2] == 0


@settings(max_examples=200, deadline=None)
@given(trimmed_patterns(solid_columns=True))
def test_mirror_symmetry(p):
    f, fm = extract(p), extract(p.mirror())
    np.testing.assert_array_equal(fm.fbar, f.fbar[::-1])
    np.testing.assert_array_equal(fm.raw_h, f.raw_h[::-1])
    V = f.V
    # raw_g mirrors when every left/right peak is unique
    unique_peaks = all(
        (V[:i] == V[:i].max()).sum() == 1 and (V[i + 1 :] == V[i + 1 :].max()).sum() == 1 for i in range(1, f.n - 1)
    )
    if unique_peaks:
        np.testing.assert_allclose(fm.raw_g, f.raw_g[::-1], rtol=0, atol=1e-12)


def test_g_mirror_on_symmetric_projection():
    g = compute_g([4, 1, 2, 1, 4])
    np.testing.assert_array_equal(g, g[::-1])


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.integers(-50, 50), min_size=3, max_size=30),
    st.floats(0.01, 100),
    st.floats(-100, 100),
)
def test_normalize_affine_invariant(raw, a, b):
    raw = np.array(raw, dtype=np.float64)
    cand = range(2, len(raw))
    bar, flag = normalize_feature(raw, cand)
    bar2, flag2 = normalize_feature(a * raw + b, cand)
    assert flag == flag2
    np.testing.assert_allclose(bar2, bar, rtol=0, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=3, max_size=30))
def test_normalize_extremes(raw):
    raw = np.array(raw, dtype=np.float64)
    sub = raw[1:-1]
    assume(sub.min() != sub.max())
    bar, _ = normalize_feature(raw, range(2, len(raw)))
    assert bar[1:-1].min() == 0 and bar[1:-1].max() == 1
