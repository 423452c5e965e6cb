"""Per-column cut features from the vertical projection.

Columns are 1-based in every public value (``cut``, ``candidates``); the
arrays themselves are plain 0-based numpy vectors of length n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fuzzcut.raster import BinaryPattern, PatternError


class BlankColumnError(RuntimeError):
    """h was asked for a column with no black pixel; presplit should prevent this."""


@dataclass(frozen=True)
class ColumnFeatures:
    n: int
    c: float
    V: np.ndarray
    fbar: np.ndarray
    gbar: np.ndarray
    hbar: np.ndarray
    raw_g: np.ndarray
    raw_h: np.ndarray
    blank_columns: tuple[int, ...]
    g_uninformative: bool = False
    h_uninformative: bool = False

    @property
    def candidates(self) -> range:
        return range(2, self.n)

    def triple(self, column: int) -> tuple[float, float, float]:
        i = column - 1
        return float(self.fbar[i]), float(self.gbar[i]), float(self.hbar[i])


def vertical_projection(p: BinaryPattern) -> np.ndarray:
    return p.black.sum(axis=0).astype(np.int64)


def center_feature(n: int) -> tuple[float, np.ndarray]:
    """Center c = (n+1)/2 and normalized distance |c - i| / c for i = 1..n."""
    if n < 2:
        raise PatternError("pattern too narrow")
    c = (n + 1) / 2
    i = np.arange(1, n + 1, dtype=np.float64)
    return c, np.abs(c - i) / c


def _peak_indices(V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Left peak: argmax over V[0:i], ties to the largest index.
    # Right peak: argmax over V[i+1:], ties to the smallest index.
    n = len(V)
    left = np.zeros(n, dtype=np.int64)
    best = 0
    for i in range(1, n):
        if V[i - 1] >= V[best]:
            best = i - 1
        left[i] = best
    right = np.zeros(n, dtype=np.int64)
    best = n - 1
    for i in range(n - 2, -1, -1):
        if V[i + 1] >= V[best]:
            best = i + 1
        right[i] = best
    return left, right


def compute_g(V) -> np.ndarray:
    """Peak-to-valley score; boundary columns are 0 placeholders."""
    V = np.asarray(V, dtype=np.int64)
    n = len(V)
    g = np.zeros(n, dtype=np.float64)
    if n < 3:
        return g
    left, right = _peak_indices(V)
    i = np.arange(1, n - 1)
    g[1:-1] = (V[left[i]] - 2 * V[i] + V[right[i]]) / (V[i] + 1)
    return g


def compute_h(V) -> np.ndarray:
    """Second difference over V(i); boundary columns are 0 placeholders."""
    V = np.asarray(V, dtype=np.int64)
    n = len(V)
    h = np.zeros(n, dtype=np.float64)
    if n < 3:
        return h
    mid = V[1:-1]
    if (mid == 0).any():
        col = int(np.flatnonzero(mid == 0)[0]) + 2
        raise BlankColumnError(f"blank column reached h (column {col})")
    h[1:-1] = (V[:-2] - 2 * mid + V[2:]) / mid
    return h


def normalize_feature(raw, candidates) -> tuple[np.ndarray, bool]:
    """Return ``(bar, uninformative)`` with bar = 1 - min-max scaled raw.

    Min and max are taken over the 1-based ``candidates`` only; values outside
    that range (boundary placeholders) are clipped into [0, 1]. A constant
    feature maps to 0.5 everywhere and sets the flag.
    """
    raw = np.asarray(raw, dtype=np.float64)
    idx = np.asarray(list(candidates), dtype=np.int64) - 1
    if idx.size == 0:
        raise PatternError("no candidate columns")
    sub = raw[idx]
    lo, hi = sub.min(), sub.max()
    if hi == lo:
        return np.full(raw.shape, 0.5), True
    tilde = (raw - lo) / (hi - lo)
    return np.clip(1.0 - tilde, 0.0, 1.0), False


def extract(p: BinaryPattern) -> ColumnFeatures:
    V = vertical_projection(p)
    n = p.n
    if n < 3:
        raise PatternError("no candidate columns")
    c, fbar = center_feature(n)
    raw_g = compute_g(V)
    raw_h = compute_h(V)
    cand = range(2, n)
    gbar, g_flat = normalize_feature(raw_g, cand)
    hbar, h_flat = normalize_feature(raw_h, cand)
    return ColumnFeatures(
        n=n,
        c=c,
        V=V,
        fbar=fbar,
        gbar=gbar,
        hbar=hbar,
        raw_g=raw_g,
        raw_h=raw_h,
        blank_columns=tuple(int(j) + 1 for j in np.flatnonzero(V == 0)),
        g_uninformative=g_flat,
        h_uninformative=h_flat,
    )
