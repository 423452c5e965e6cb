"""Accuracy of the builtin profiles on generated touching-character sets.

    python scripts/synthetic_benchmark.py [--count 120] [--seeds 2024 1 2 3 4]

For each seed: two-character set (within-2, truth char count), mixed 2..4
set (within-5, with and without truth char count), and a breakdown of the
two-character result by how far the true cut sits from the pattern center.
"""

import argparse
import sys
import tempfile
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from conftest import GLYPHS  # noqa: E402

from fuzzcut.evaluation import evaluate, load_descriptors  # noqa: E402
from fuzzcut.fis import builtin_profile  # noqa: E402
from fuzzcut.raster import load_pattern  # noqa: E402
from fuzzcut.synth import generate  # noqa: E402


def center_breakdown(root, report, k):
    missed = {f["id"] for f in report.failures if f["reason"] != "within-k"}
    bins = {"fbar<0.15": [0, 0], "0.15-0.3": [0, 0], ">=0.3": [0, 0]}
    for d in load_descriptors(root):
        n = load_pattern(Path(root) / d["image"]).n
        c = (n + 1) / 2
        f = abs(c - d["cuts"][0]) / c
        key = "fbar<0.15" if f < 0.15 else ("0.15-0.3" if f < 0.3 else ">=0.3")
        bins[key][0] += 1
        bins[key][1] += d["id"] not in missed
    return "  ".join(f"{b}: {h}/{t}" for b, (t, h) in bins.items())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=120)
    ap.add_argument("--seeds", type=int, nargs="+", default=[2024, 1, 2, 3, 4])
    args = ap.parse_args()
    rows = []
    for seed in args.seeds:
        with tempfile.TemporaryDirectory() as two, tempfile.TemporaryDirectory() as mixed:
            generate(GLYPHS, two, count=args.count, max_chars=2, two_char_fraction=1.0, seed=seed)
            generate(GLYPHS, mixed, count=args.count, max_chars=4, seed=seed)
            line = [seed]
            for which in "BA":
                cfg = builtin_profile(which)
                r2 = evaluate(two, cfg, k=2, use_truth_char_count=True)
                rt = evaluate(mixed, cfg, k=5, use_truth_char_count=True)
                re = evaluate(mixed, cfg, k=5, use_truth_char_count=False)
                line += [r2.within_k_accuracy, r2.exact_accuracy, rt.within_k_accuracy, re.within_k_accuracy]
                if which == "B":
                    print(f"seed {seed} profile B two-char within-2 by true-cut offset: {center_breakdown(two, r2, 2)}")
            rows.append(line)
    print()
    print(f"{'seed':>6} | {'B w2':>6} {'B ex':>6} {'B w5 t':>7} {'B w5 e':>7} | {'A w2':>6} {'A ex':>6} {'A w5 t':>7} {'A w5 e':>7}")
    for r in rows:
        print(f"{r[0]:>6} | " + " ".join(f"{v:6.3f}" if i % 4 < 2 else f"{v:7.3f}" for i, v in enumerate(r[1:5]))
              + " | " + " ".join(f"{v:6.3f}" if i % 4 < 2 else f"{v:7.3f}" for i, v in enumerate(r[5:9])))
    m = np.mean([r[1:] for r in rows], axis=0)
    print(f"{'mean':>6} | " + " ".join(f"{v:6.3f}" for v in m[:4]) + " | " + " ".join(f"{v:6.3f}" for v in m[4:]))
    print("w2 = within-2 on two-char sets (truth count); ex = exact; w5 t/e = within-5 on mixed sets with truth/estimated count")


if __name__ == "__main__":
    main()
