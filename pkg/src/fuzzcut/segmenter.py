"""Cut selection: presplit at blank columns, then fuzzy scoring per block.

A cut at column ``c`` starts a new segment at ``c``; the segment to its left
ends at ``c - 1``. All columns are 1-based and global to the input pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fuzzcut.features import ColumnFeatures, extract, vertical_projection
from fuzzcut.fis import FuzzySystemConfig, evaluate_many
from fuzzcut.raster import BinaryPattern, PatternError, is_trimmed, trim

MAX_CHARS_PER_BLOCK = 4
MIN_SEPARATION = 3


@dataclass(frozen=True)
class Block:
    """A presplit piece: its trimmed pattern and 1-based global column span."""

    pattern: BinaryPattern
    start: int
    stop: int

    @property
    def width(self) -> int:
        return self.stop - self.start + 1


@dataclass(frozen=True)
class CutResult:
    n: int
    cuts: tuple[int, ...]
    rho_profile: np.ndarray  # length n, NaN where a column was not scored
    segments: tuple[tuple[int, int], ...]
    presplit_cuts: tuple[int, ...]
    fbar: np.ndarray = field(repr=False, default=None)
    gbar: np.ndarray = field(repr=False, default=None)
    hbar: np.ndarray = field(repr=False, default=None)
    under_segmented: bool = False

    @property
    def fuzzy_cuts(self) -> tuple[int, ...]:
        return tuple(c for c in self.cuts if c not in self.presplit_cuts)


def presplit(p: BinaryPattern) -> tuple[list[Block], list[int]]:
    """Split at every maximal run of blank columns.

    The cut for a run sits at its middle column, rounded down.
    """
    V = vertical_projection(p)
    blank = V == 0
    blocks, cuts = [], []
    j = 0
    n = p.n
    while j < n:
        if blank[j]:
            k = j
            while k + 1 < n and blank[k + 1]:
                k += 1
            cuts.append((j + 1 + k + 1) // 2)
            j = k + 1
            continue
        k = j
        while k + 1 < n and not blank[k + 1]:
            k += 1
        sub = trim(BinaryPattern(p.cells[:, j : k + 1]))
        blocks.append(Block(sub, j + 1, k + 1))
        j = k + 1
    return blocks, cuts


def score_columns(p: BinaryPattern, cfg: FuzzySystemConfig) -> tuple[ColumnFeatures, np.ndarray]:
    """Features and rho for candidate columns 2..n-1 (NaN elsewhere)."""
    feats = extract(p)
    return feats, block_rho(cfg, feats)


def _ranked(rho: np.ndarray, fbar: np.ndarray) -> list[int]:
    """Candidate columns (1-based) by ascending rho, then fbar, then index."""
    cand = range(2, len(rho))
    return sorted(cand, key=lambda col: (rho[col - 1], fbar[col - 1], col))


def best_cut(p: BinaryPattern, cfg: FuzzySystemConfig) -> tuple[int, np.ndarray]:
    if p.n < 3:
        raise PatternError("no candidate columns")
    feats, rho = score_columns(p, cfg)
    return _ranked(rho, feats.fbar)[0], rho


def estimate_chars(block: Block) -> int:
    ratio = block.width / max(1, block.pattern.m)
    return min(MAX_CHARS_PER_BLOCK, max(1, math.floor(ratio + 0.5)))


def allocate_chars(blocks: list[Block], expected_chars: int | None) -> list[int]:
    """Characters per block. With a known total, every block gets one and the
    rest go one at a time to the block with the widest per-char span."""
    if expected_chars is None:
        return [estimate_chars(b) for b in blocks]
    counts = [1] * len(blocks)
    for _ in range(max(0, expected_chars - len(blocks))):
        k = max(range(len(blocks)), key=lambda j: (blocks[j].width / counts[j], -j))
        counts[k] += 1
    return counts


def select_cuts(rho: np.ndarray, fbar: np.ndarray, k: int) -> list[int]:
    """Greedy k-1 lowest-rho columns with pairwise separation."""
    width = len(rho)
    sep = max(MIN_SEPARATION, width / (2 * k))
    chosen: list[int] = []
    for col in _ranked(rho, fbar):
        if len(chosen) == k - 1:
            break
        if all(abs(col - c) >= sep for c in chosen):
            chosen.append(col)
    return sorted(chosen)


@dataclass(frozen=True)
class PlanItem:
    block: Block
    chars: int
    features: ColumnFeatures | None  # None for blocks narrower than 3 columns


def plan(p: BinaryPattern, expected_chars: int | None = None) -> tuple[list[PlanItem], list[int]]:
    """Everything in :func:`segment` that does not depend on the fuzzy config."""
    if not is_trimmed(p):
        raise PatternError("pattern must be trimmed")
    blocks, pre_cuts = presplit(p)
    counts = allocate_chars(blocks, expected_chars)
    items = [PlanItem(b, k, extract(b.pattern) if b.pattern.n >= 3 else None) for b, k in zip(blocks, counts)]
    return items, pre_cuts


def block_rho(cfg: FuzzySystemConfig, feats: ColumnFeatures) -> np.ndarray:
    rho = np.full(feats.n, np.nan)
    sl = slice(1, feats.n - 1)
    rho[sl] = evaluate_many(cfg, feats.fbar[sl], feats.gbar[sl], feats.hbar[sl])[0]
    return rho


def cuts_from_plan(items: list[PlanItem], pre_cuts, rhos) -> tuple[tuple[int, ...], bool]:
    """Merge presplit cuts with per-block fuzzy cuts; ``rhos`` aligns with ``items``."""
    fuzzy: list[int] = []
    under = False
    for item, rho in zip(items, rhos):
        if item.chars <= 1:
            continue
        if item.features is None:
            under = True
            continue
        local = select_cuts(rho, item.features.fbar, item.chars)
        under |= len(local) < item.chars - 1
        fuzzy.extend(c + item.block.start - 1 for c in local)
    return tuple(sorted(set(pre_cuts) | set(fuzzy))), under


def segment(p: BinaryPattern, cfg: FuzzySystemConfig, expected_chars: int | None = None) -> CutResult:
    """Presplit, then pick fuzzy cuts inside each block.

    Without ``expected_chars`` a block holds round(width / height) characters,
    clamped to 1..4. Raises :class:`PatternError` on untrimmed input.
    """
    n = p.n
    items, pre_cuts = plan(p, expected_chars)
    rhos = [block_rho(cfg, it.features) if it.features is not None else None for it in items]
    cuts, under = cuts_from_plan(items, pre_cuts, rhos)

    profile = {name: np.full(n, np.nan) for name in ("rho", "fbar", "gbar", "hbar")}
    for item, rho in zip(items, rhos):
        if item.features is None:
            continue
        # trimming a block only removes rows, so its columns map 1:1
        sl = slice(item.block.start - 1, item.block.stop)
        profile["rho"][sl] = rho
        profile["fbar"][sl] = item.features.fbar
        profile["gbar"][sl] = item.features.gbar
        profile["hbar"][sl] = item.features.hbar
    return CutResult(
        n=n,
        cuts=cuts,
        rho_profile=profile["rho"],
        segments=segments_from_cuts(n, cuts),
        presplit_cuts=tuple(pre_cuts),
        fbar=profile["fbar"],
        gbar=profile["gbar"],
        hbar=profile["hbar"],
        under_segmented=under,
    )


def segments_from_cuts(n: int, cuts) -> tuple[tuple[int, int], ...]:
    bounds = [1, *cuts, n + 1]
    return tuple((bounds[j], bounds[j + 1] - 1) for j in range(len(bounds) - 1))


def split_pattern(p: BinaryPattern, cuts) -> list[BinaryPattern]:
    """Slice ``p`` into segments; empty segments are returned untrimmed."""
    out = []
    for start, stop in segments_from_cuts(p.n, cuts):
        piece = p.columns(start, stop)
        out.append(trim(piece) if piece.black.any() else piece)
    return out
