"""Labeled touching-character datasets built by merging glyph bitmaps.

Glyphs are bottom-aligned and the right glyph slides left until the union is
8-connected across the junction. The ground-truth cut is the leftmost column
in which both glyphs have ink, or, with no shared column, the first column
of the right glyph.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from fuzzcut.raster import BinaryPattern, is_trimmed, load_pattern, write_pattern

log = logging.getLogger(__name__)

HEIGHT_RATIO = 0.5


class NoTouchError(ValueError):
    pass


@dataclass(frozen=True)
class Glyph:
    pattern: BinaryPattern
    label: str
    source: str = ""

    def __post_init__(self):
        if len(self.label) != 1:
            raise ValueError(f"glyph label must be one character, got {self.label!r}")
        if not is_trimmed(self.pattern):
            raise ValueError(f"glyph {self.label!r} ({self.source}) is not trimmed")


@dataclass(frozen=True)
class Merged:
    """Result of placing a right glyph at column offset ``shift`` (0-based)."""

    pattern: BinaryPattern
    cut: int  # 1-based
    shift: int
    left_height: int
    right_height: int
    touching_pairs: int
    shared_columns: tuple[int, int] | None  # 1-based inclusive, if any


def _dilate8(mask: np.ndarray) -> np.ndarray:
    m, n = mask.shape
    pad = np.pad(mask, 1)
    out = np.zeros_like(mask)
    for dr in (0, 1, 2):
        for dc in (0, 1, 2):
            out |= pad[dr : dr + m, dc : dc + n]
    return out


def place(left: BinaryPattern, right: BinaryPattern, shift: int) -> Merged:
    """Overlay ``right`` at column ``shift`` of ``left``, bottom-aligned.

    ``shift`` may be negative only down to where both remain in the canvas'
    column range starting at min(0, shift).
    """
    h = max(left.m, right.m)
    x0 = min(0, shift)
    width = max(left.n, shift + right.n) - x0
    a = np.zeros((h, width), dtype=bool)
    b = np.zeros((h, width), dtype=bool)
    a[h - left.m :, -x0 : -x0 + left.n] = left.black
    b[h - right.m :, shift - x0 : shift - x0 + right.n] = right.black
    union = a | b
    cols = np.flatnonzero(union.any(axis=0))
    rows = np.flatnonzero(union.any(axis=1))
    c0 = cols[0]
    a = a[rows[0] : rows[-1] + 1, c0 : cols[-1] + 1]
    b = b[rows[0] : rows[-1] + 1, c0 : cols[-1] + 1]
    union = a | b

    touching = int((_dilate8(a) & b).sum())
    both = np.flatnonzero(a.any(axis=0) & b.any(axis=0))
    if both.size:
        cut = int(both[0]) + 1
        shared = (int(both[0]) + 1, int(both[-1]) + 1)
    else:
        cut = int(np.flatnonzero(b.any(axis=0))[0]) + 1
        shared = None
    return Merged(
        BinaryPattern.from_black(union),
        cut,
        shift,
        left.m,
        right.m,
        touching,
        shared,
    )


def merge(left: Glyph | BinaryPattern, right: Glyph | BinaryPattern, extra_overlap: int = 0) -> Merged:
    """Slide ``right`` leftwards from one blank column of separation until
    the union first touches, then ``extra_overlap`` further columns."""
    lp = left.pattern if isinstance(left, Glyph) else left
    rp = right.pattern if isinstance(right, Glyph) else right
    for shift in range(lp.n, 0, -1):
        mg = place(lp, rp, shift)
        if mg.touching_pairs:
            if extra_overlap:
                mg = place(lp, rp, max(1, shift - extra_overlap))
            return mg
    raise NoTouchError("no touching configuration")


def filter_sample(mg: Merged, height_ratio: float = HEIGHT_RATIO) -> tuple[bool, str]:
    lo, hi = sorted((mg.left_height, mg.right_height))
    if lo / hi < height_ratio:
        return False, "height"
    if mg.touching_pairs == 0:
        return False, "no-touch"
    if not 2 <= mg.cut <= mg.pattern.n - 1:
        return False, "cut-at-border"
    return True, ""


def load_glyphs(glyph_dir) -> list[Glyph]:
    """Glyph files are named ``<char>__<source>.txt`` (or ``.pbm``)."""
    glyphs = []
    for path in sorted(Path(glyph_dir).iterdir()):
        if path.suffix.lower() not in (".txt", ".pbm") or "__" not in path.stem:
            continue
        label, source = path.stem.split("__", 1)
        glyphs.append(Glyph(load_pattern(path), label, source))
    return glyphs


@dataclass(frozen=True)
class Sample:
    pattern: BinaryPattern
    chars: str
    cuts: tuple[int, ...]
    source: dict


def build_sample(glyphs: list[Glyph], extra_overlap: int = 0, height_ratio: float = HEIGHT_RATIO):
    """Chain glyphs left to right; returns ``(Sample, "")`` or ``(None, reason)``."""
    acc = glyphs[0].pattern
    cuts: list[int] = []
    shifts: list[int] = []
    for g in glyphs[1:]:
        try:
            mg = merge(acc, g, extra_overlap)
        except NoTouchError:
            return None, "no-touch"
        # height filter compares the new glyph with its neighbour, not the chain
        prev = glyphs[len(cuts)].pattern.m
        mg_pair = Merged(mg.pattern, mg.cut, mg.shift, prev, g.pattern.m, mg.touching_pairs, mg.shared_columns)
        keep, reason = filter_sample(mg_pair, height_ratio)
        if not keep:
            return None, reason
        cuts.append(mg.cut)
        shifts.append(mg.shift)
        acc = mg.pattern
    return (
        Sample(
            acc,
            "".join(g.label for g in glyphs),
            tuple(cuts),
            {"sources": [g.source for g in glyphs], "shifts": shifts, "extra_overlap": extra_overlap},
        ),
        "",
    )


def generate(
    glyph_dir,
    out_dir,
    count: int,
    max_chars: int = 4,
    two_char_fraction: float = 0.9,
    seed: int = 0,
    extra_overlap: int = 0,
    height_ratio: float = HEIGHT_RATIO,
    max_attempts: int | None = None,
) -> dict:
    """Write ``count`` samples plus ``manifest.json`` into ``out_dir``.

    Every sample draws its glyphs from a single source (font and size).
    Returns the manifest.
    """
    glyphs = load_glyphs(glyph_dir)
    if len(glyphs) < 2:
        raise ValueError(f"need at least 2 glyphs in {glyph_dir}, found {len(glyphs)}")
    if not 2 <= max_chars <= 4:
        raise ValueError("max_chars must be in 2..4")
    by_source: dict[str, list[Glyph]] = {}
    for g in glyphs:
        by_source.setdefault(g.source, []).append(g)
    sources = sorted(s for s, gs in by_source.items() if gs)

    rng = np.random.default_rng(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    max_attempts = max_attempts or 50 * count
    descriptors = []
    rejected: dict[str, int] = {}
    attempts = 0
    while len(descriptors) < count and attempts < max_attempts:
        attempts += 1
        if max_chars == 2 or rng.random() < two_char_fraction:
            size = 2
        else:
            size = int(rng.integers(3, max_chars + 1))
        pool = by_source[sources[int(rng.integers(len(sources)))]]
        picks = [pool[int(j)] for j in rng.integers(len(pool), size=size)]
        sample, reason = build_sample(picks, extra_overlap, height_ratio)
        if sample is None:
            rejected[reason] = rejected.get(reason, 0) + 1
            continue
        idx = len(descriptors)
        stem = f"sample_{idx:05d}"
        write_pattern(sample.pattern, out / f"{stem}.txt")
        write_pattern(sample.pattern, out / f"{stem}.pbm")
        desc = {
            "id": stem,
            "image": f"{stem}.txt",
            "chars": sample.chars,
            "cuts": list(sample.cuts),
            "source": {"seed": seed, "index": idx, **sample.source},
        }
        (out / f"{stem}.json").write_text(json.dumps(desc, indent=2, sort_keys=True) + "\n")
        descriptors.append(desc)
    if len(descriptors) < count:
        log.warning("generated %d of %d requested samples after %d attempts", len(descriptors), count, attempts)
    manifest = {
        "params": {
            "glyph_dir": Path(glyph_dir).name,
            "count": count,
            "max_chars": max_chars,
            "two_char_fraction": two_char_fraction,
            "seed": seed,
            "extra_overlap": extra_overlap,
            "height_ratio": height_ratio,
        },
        "achieved": len(descriptors),
        "attempts": attempts,
        "rejected": dict(sorted(rejected.items())),
        "samples": descriptors,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
