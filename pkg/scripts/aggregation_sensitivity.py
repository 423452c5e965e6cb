"""Compare unbounded-sum and bounded-sum aggregation.

    python scripts/aggregation_sensitivity.py

Reports the largest rho difference over a 20^3 input grid per profile, the
reference profile rows under both readings, and synthetic accuracy under both.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from conftest import GLYPHS  # noqa: E402
from test_acceptance import VU_PROFILE  # noqa: E402

import fuzzcut.segmenter as seg  # noqa: E402
from fuzzcut.evaluation import evaluate as evaluate_dataset  # noqa: E402
from fuzzcut.fis import _compile, builtin_profile, evaluate_many, firing_strengths  # noqa: E402
from fuzzcut.synth import generate  # noqa: E402


def rho_bounded(cfg, f, g, h):
    comp = _compile(cfg)
    s = firing_strengths(cfg, f, g, h)
    out = np.empty(s.shape[0])
    for lo in range(0, s.shape[0], 512):
        chunk = s[lo : lo + 512]
        agg = np.zeros((chunk.shape[0], comp.grid.size))
        for k in range(chunk.shape[1]):
            agg += np.minimum(chunk[:, k : k + 1], comp.out_mu[k])
        agg = np.minimum(agg, 1.0)
        mass = agg.sum(axis=1)
        out[lo : lo + 512] = np.where(mass < 1e-9, cfg.no_fire_value, (agg @ comp.grid) / np.maximum(mass, 1e-300))
    return out


def main():
    x = np.linspace(0, 1, 20)
    F, G, H = (v.ravel() for v in np.meshgrid(x, x, x, indexing="ij"))
    for which in "AB":
        cfg = builtin_profile(which)
        d = np.abs(evaluate_many(cfg, F, G, H)[0] - rho_bounded(cfg, F, G, H))
        print(f"profile {which}: grid max |diff| {d.max():.4f}, mean {d.mean():.5f}, inputs differing > 1e-9: {(d > 1e-9).mean():.1%}")

    cfg = builtin_profile("B")
    f, g, h, ref = (np.array([r[k] for r in VU_PROFILE]) for k in (1, 2, 3, 4))
    u, b = evaluate_many(cfg, f, g, h)[0], rho_bounded(cfg, f, g, h)
    print(f"reference profile: max |unbounded - bounded| {np.abs(u - b).max():.4f}; "
          f"max |dev| vs reference unbounded {np.abs(u - ref).max():.4f}, bounded {np.abs(b - ref).max():.4f}")

    with tempfile.TemporaryDirectory() as tmp:
        generate(GLYPHS, tmp, count=120, max_chars=2, two_char_fraction=1.0, seed=2024)
        unbounded = evaluate_dataset(tmp, cfg, k=2, use_truth_char_count=True).within_k_accuracy
        original = seg.block_rho

        def block_rho_bounded(cfg, feats):
            rho = np.full(feats.n, np.nan)
            sl = slice(1, feats.n - 1)
            rho[sl] = rho_bounded(cfg, feats.fbar[sl], feats.gbar[sl], feats.hbar[sl])
            return rho

        seg.block_rho = block_rho_bounded
        try:
            bounded = evaluate_dataset(tmp, cfg, k=2, use_truth_char_count=True).within_k_accuracy
        finally:
            seg.block_rho = original
    print(f"synthetic within-2 accuracy: unbounded {unbounded:.3f}, bounded {bounded:.3f}")


if __name__ == "__main__":
    main()
