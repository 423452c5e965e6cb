"""Image ingestion, Otsu binarization and the binary pattern type.

Cell convention everywhere: 0 is black (foreground), 1 is white (background).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class PatternError(ValueError):
    """Raised for patterns that cannot be processed (e.g. no black pixel)."""


class ParseError(ValueError):
    """Raised when an image or pattern file is malformed."""

    def __init__(self, message: str, offset: int, path: str | None = None):
        where = f"{path}: " if path else ""
        super().__init__(f"{where}{message} (byte offset {offset})")
        self.offset = offset
        self.path = path


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Grayscale raster with intensities in 0..255, shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"gray image must be 2-D and non-empty, got shape {px.shape}")
        if px.size and (px.min() < 0 or px.max() > 255):
            raise ValueError("gray intensities must lie in 0..255")
        object.__setattr__(self, "pixels", _frozen(px.astype(np.uint8)))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @classmethod
    def from_rows(cls, rows) -> "GrayImage":
        return cls(np.array(rows, dtype=np.int64))

    @classmethod
    def from_rgb(cls, rgb: np.ndarray) -> "GrayImage":
        """Luminance conversion 0.299 R + 0.587 G + 0.114 B, rounded to nearest."""
        rgb = np.asarray(rgb, dtype=np.float64)
        lum = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
        return cls(np.clip(np.floor(lum + 0.5), 0, 255).astype(np.uint8))

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class BinaryPattern:
    """Bilevel pattern, ``cells`` has shape (m, n); 0 = black, 1 = white."""

    cells: np.ndarray
    _black: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = np.asarray(self.cells)
        if c.ndim != 2:
            raise ValueError(f"pattern must be 2-D, got shape {c.shape}")
        if c.size and not np.isin(c, (0, 1)).all():
            raise ValueError("pattern cells must be 0 or 1")
        c = c.astype(np.uint8)
        object.__setattr__(self, "cells", _frozen(c))
        object.__setattr__(self, "_black", _frozen(c == 0))

    @property
    def m(self) -> int:
        return self.cells.shape[0]

    @property
    def n(self) -> int:
        return self.cells.shape[1]

    @property
    def black(self) -> np.ndarray:
        """Boolean mask of foreground pixels."""
        return self._black

    @classmethod
    def from_black(cls, mask) -> "BinaryPattern":
        return cls(np.where(np.asarray(mask, dtype=bool), 0, 1))

    @classmethod
    def from_strings(cls, rows) -> "BinaryPattern":
        return cls(np.array([[int(ch) for ch in r] for r in rows], dtype=np.uint8).reshape(len(rows), -1))

    def to_strings(self) -> list[str]:
        return ["".join(str(int(v)) for v in row) for row in self.cells]

    def mirror(self) -> "BinaryPattern":
        return BinaryPattern(self.cells[:, ::-1])

    def columns(self, start: int, stop: int) -> "BinaryPattern":
        """Sub-pattern of 1-based inclusive columns start..stop."""
        return BinaryPattern(self.cells[:, start - 1 : stop])

    def __eq__(self, other):
        if not isinstance(other, BinaryPattern):
            return NotImplemented
        return self.cells.shape == other.cells.shape and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.cells.shape, self.cells.tobytes()))


def otsu_threshold(img: GrayImage) -> int:
    """Otsu's threshold over the 256-bin histogram.

    Pixels ``<= t`` form the dark class. Between-class variance is compared
    exactly in integer arithmetic; ties go to the lowest threshold. A
    constant image returns its single intensity.
    """
    hist = np.bincount(img.pixels.ravel(), minlength=256).astype(object)
    levels = np.arange(256, dtype=object)
    total = int(img.pixels.size)
    total_sum = int((hist * levels).sum())

    best_t = None
    best_num, best_den = 0, 1
    n0 = 0
    s0 = 0
    for t in range(256):
        n0 += int(hist[t])
        s0 += t * int(hist[t])
        n1 = total - n0
        if n0 == 0 or n1 == 0:
            continue
        # sigma_b^2 * total^2 = (total*s0 - n0*S)^2 / (n0*n1)
        num = (total * s0 - n0 * total_sum) ** 2
        den = n0 * n1
        if best_t is None or num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    if best_t is None:
        return int(img.pixels.flat[0])
    return best_t


def binarize(img: GrayImage, threshold: int) -> BinaryPattern:
    return BinaryPattern((img.pixels > threshold).astype(np.uint8))


def trim(p: BinaryPattern) -> BinaryPattern:
    """Drop all-white border rows and columns."""
    blk = p.black
    if not blk.any():
        raise PatternError("empty pattern")
    rows = np.flatnonzero(blk.any(axis=1))
    cols = np.flatnonzero(blk.any(axis=0))
    return BinaryPattern(p.cells[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1])


def is_trimmed(p: BinaryPattern) -> bool:
    if p.m == 0 or p.n == 0:
        return False
    b = p.black
    return bool(b[0].any() and b[-1].any() and b[:, 0].any() and b[:, -1].any())


# ---------------------------------------------------------------- file formats


class _Reader:
    """Whitespace/comment-aware token reader for Netpbm headers."""

    def __init__(self, data: bytes, path: str | None):
        self.data = data
        self.pos = 0
        self.path = path

    def fail(self, msg: str, offset: int | None = None):
        raise ParseError(msg, self.pos if offset is None else offset, self.path)

    def skip_space(self):
        d = self.data
        while self.pos < len(d):
            ch = d[self.pos]
            if ch == ord("#"):
                while self.pos < len(d) and d[self.pos] not in b"\r\n":
                    self.pos += 1
            elif ch in b" \t\r\n\v\f":
                self.pos += 1
            else:
                break

    def token(self, what: str) -> bytes:
        self.skip_space()
        start = self.pos
        d = self.data
        while self.pos < len(d) and d[self.pos] not in b" \t\r\n\v\f#":
            self.pos += 1
        if start == self.pos:
            self.fail(f"unexpected end of file while reading {what}")
        return d[start : self.pos]

    def integer(self, what: str, minimum: int = 0) -> int:
        start = self.pos
        tok = self.token(what)
        if not tok.isdigit():
            self.fail(f"illegal symbol {tok[:8]!r} in {what}", start)
        v = int(tok)
        if v < minimum:
            self.fail(f"{what} must be >= {minimum}, got {v}", start)
        return v

    def single_whitespace(self):
        if self.pos >= len(self.data) or self.data[self.pos] not in b" \t\r\n\v\f":
            self.fail("expected a single whitespace byte before raster data")
        self.pos += 1


def _parse_netpbm(data: bytes, path: str | None = None):
    r = _Reader(data, path)
    if len(data) < 2 or data[0:1] != b"P" or data[1:2] not in b"123456":
        r.fail("missing Netpbm magic number", 0)
    kind = data[1:2].decode()
    r.pos = 2
    width = r.integer("width", 1)
    height = r.integer("height", 1)
    maxval = 1
    if kind in "2356":
        maxval = r.integer("maxval", 1)
        if maxval > 65535:
            r.fail(f"maxval {maxval} exceeds 65535")
    channels = 3 if kind in "36" else 1
    count = width * height * channels

    if kind == "1":
        vals = []
        d = data
        while len(vals) < count:
            r.skip_space()
            if r.pos >= len(d):
                r.fail(f"truncated raster: {len(vals)} of {count} bits")
            ch = d[r.pos]
            if ch not in b"01":
                r.fail(f"illegal symbol {chr(ch)!r} in PBM raster")
            vals.append(ch - 48)
            r.pos += 1
        arr = np.array(vals, dtype=np.uint8).reshape(height, width)
    elif kind in "23":
        vals = []
        while len(vals) < count:
            r.skip_space()
            if r.pos >= len(data):
                r.fail(f"truncated raster: {len(vals)} of {count} samples")
            start = r.pos
            v = r.integer("sample")
            if v > maxval:
                r.fail(f"sample {v} exceeds maxval {maxval}", start)
            vals.append(v)
        arr = np.array(vals, dtype=np.int64).reshape((height, width, 3) if channels == 3 else (height, width))
    elif kind == "4":
        r.single_whitespace()
        stride = (width + 7) // 8
        need = stride * height
        raw = data[r.pos : r.pos + need]
        if len(raw) < need:
            r.fail(f"truncated raster: {len(raw)} of {need} bytes", len(data))
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8).reshape(height, stride), axis=1)
        arr = bits[:, :width].astype(np.uint8)
    else:
        r.single_whitespace()
        size = 1 if maxval < 256 else 2
        need = count * size
        raw = data[r.pos : r.pos + need]
        if len(raw) < need:
            r.fail(f"truncated raster: {len(raw)} of {need} bytes", len(data))
        arr = np.frombuffer(raw, dtype=np.uint8 if size == 1 else ">u2").astype(np.int64)
        arr = arr.reshape((height, width, 3) if channels == 3 else (height, width))
        if arr.max(initial=0) > maxval:
            r.fail(f"sample exceeds maxval {maxval}")
    return kind, arr, maxval


def _scale_to_255(arr: np.ndarray, maxval: int) -> np.ndarray:
    if maxval == 255:
        return arr
    return np.floor(arr * 255 / maxval + 0.5).astype(np.int64)


def parse_text_pattern(text: str, path: str | None = None) -> BinaryPattern:
    """Plain pattern format: ``"m n"`` header then m lines of n chars in {0,1}."""
    data = text.encode() if isinstance(text, str) else text
    nl = data.find(b"\n")
    header = data if nl < 0 else data[:nl]
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ParseError("malformed header, expected 'm n'", 0, path)
    m, n = int(parts[0]), int(parts[1])
    offset = nl + 1 if nl >= 0 else len(data)
    rows = []
    for r in range(m):
        if offset >= len(data):
            raise ParseError(f"truncated pattern: {r} of {m} rows", offset, path)
        end = data.find(b"\n", offset)
        end = len(data) if end < 0 else end
        line = data[offset:end].rstrip(b"\r")
        for j, ch in enumerate(line):
            if ch not in b"01":
                raise ParseError(f"illegal symbol {chr(ch)!r}", offset + j, path)
        if len(line) != n:
            raise ParseError(f"row {r + 1} has {len(line)} cells, expected {n}", offset, path)
        rows.append([ch - 48 for ch in line])
        offset = end + 1
    if data[offset:].strip():
        raise ParseError("trailing data after last row", offset, path)
    return BinaryPattern(np.array(rows, dtype=np.uint8).reshape(m, n))


def format_text_pattern(p: BinaryPattern) -> str:
    return "\n".join([f"{p.m} {p.n}", *p.to_strings()]) + "\n"


def format_pbm(p: BinaryPattern, binary: bool = False) -> bytes:
    """PBM encodes foreground as 1, so cells are inverted on the way out."""
    ink = p.black.astype(np.uint8)
    if binary:
        packed = np.packbits(ink, axis=1)
        return f"P4\n{p.n} {p.m}\n".encode() + packed.tobytes()
    lines = ["P1", f"{p.n} {p.m}"]
    lines += [" ".join(str(v) for v in row) for row in ink]
    return ("\n".join(lines) + "\n").encode()


def format_pgm(img: GrayImage, binary: bool = True) -> bytes:
    if binary:
        return f"P5\n{img.width} {img.height}\n255\n".encode() + img.pixels.tobytes()
    lines = ["P2", f"{img.width} {img.height}", "255"]
    lines += [" ".join(str(int(v)) for v in row) for row in img.pixels]
    return ("\n".join(lines) + "\n").encode()


def _detect_format(data: bytes, path: Path) -> str:
    if data[:1] == b"P" and data[1:2] in b"123456":
        return "netpbm"
    return "text"


def load_gray(path) -> GrayImage:
    """Load a PGM (P2/P5), PPM (P3/P6, luminance) or PBM (P1/P4) file."""
    path = Path(path)
    data = path.read_bytes()
    kind, arr, maxval = _parse_netpbm(data, str(path))
    if kind in "14":
        return GrayImage(np.where(arr == 1, 0, 255))
    arr = _scale_to_255(arr, maxval)
    if kind in "36":
        return GrayImage.from_rgb(arr)
    return GrayImage(arr)


def load_pattern(path, fmt: str = "auto", invert: bool = False) -> BinaryPattern:
    """Load a bilevel pattern.

    ``fmt`` is one of ``auto``, ``text``, ``pbm`` or ``pgm``. Grayscale inputs
    are binarized with Otsu's threshold. ``invert`` flips polarity for corpora
    that store ink as white.
    """
    path = Path(path)
    data = path.read_bytes()
    if fmt == "auto":
        fmt = "text" if _detect_format(data, path) == "text" else "netpbm"
    if fmt == "text":
        p = parse_text_pattern(data, str(path))
    elif fmt in ("pbm", "pgm", "netpbm"):
        kind, arr, maxval = _parse_netpbm(data, str(path))
        if fmt == "pbm" and kind not in "14":
            raise ParseError(f"expected PBM, found P{kind}", 0, str(path))
        if kind in "14":
            p = BinaryPattern(1 - arr)
        else:
            img = load_gray(path)
            p = binarize(img, otsu_threshold(img))
    else:
        raise ValueError(f"unknown pattern format {fmt!r}")
    if invert:
        p = BinaryPattern(1 - p.cells)
    return p


def write_pattern(p: BinaryPattern, path, fmt: str | None = None) -> None:
    """Write ``p`` as text (default), ``pbm`` (P1) or ``pbm-raw`` (P4)."""
    path = Path(path)
    if fmt is None:
        fmt = "pbm" if path.suffix.lower() == ".pbm" else "text"
    if fmt == "text":
        path.write_text(format_text_pattern(p))
    elif fmt == "pbm":
        path.write_bytes(format_pbm(p))
    elif fmt == "pbm-raw":
        path.write_bytes(format_pbm(p, binary=True))
    else:
        raise ValueError(f"unknown pattern format {fmt!r}")
