import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from fuzzcut.raster import BinaryPattern

GLYPHS = Path(__file__).parent / "fixtures" / "glyphs"


def random_pattern(rng: np.random.Generator, m: int, n: int, density: float = 0.4, solid_columns: bool = False):
    """Random trimmed pattern; ``solid_columns`` forbids blank columns."""
    black = rng.random((m, n)) < density
    black[0, rng.integers(n)] = True
    black[-1, rng.integers(n)] = True
    black[rng.integers(m), 0] = True
    black[rng.integers(m), -1] = True
    if solid_columns:
        for j in np.flatnonzero(~black.any(axis=0)):
            black[rng.integers(m), j] = True
    return BinaryPattern.from_black(black)


@st.composite
def trimmed_patterns(draw, min_n=3, max_n=24, max_m=16, solid_columns=False):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.sampled_from([0.15, 0.3, 0.5, 0.8]))
    return random_pattern(np.random.default_rng(seed), m, n, density, solid_columns)


@pytest.fixture(scope="session")
def glyph_dir():
    return GLYPHS


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    from fuzzcut.synth import generate

    out = tmp_path_factory.mktemp("synth")
    generate(GLYPHS, out, count=24, seed=7)
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
