"""Score the 19 published feature triples of the "vu" example with a profile.

    python scripts/profile_replay.py [--profile B] [--bounded]

Prints column, inputs, our rho, the published rho and the difference.
``--bounded`` clips the aggregate at 1 before taking the centroid.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from test_acceptance import VU_PROFILE  # noqa: E402

from fuzzcut.fis import aggregate, evaluate, resolve_config  # noqa: E402


def bounded_rho(cfg, f, g, h):
    grid, agg = aggregate(cfg, f, g, h)
    agg = np.minimum(agg, 1.0)
    return float((grid * agg).sum() / agg.sum()) if agg.sum() > 1e-9 else cfg.no_fire_value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--profile", default="B")
    ap.add_argument("--bounded", action="store_true")
    args = ap.parse_args()
    cfg = resolve_config(args.profile)
    print(f"{'col':>3} {'fbar':>7} {'gbar':>7} {'hbar':>7} {'rho':>7} {'ref':>7} {'diff':>8}  fired")
    for col, f, g, h, ref in VU_PROFILE:
        r = evaluate(cfg, f, g, h)
        rho = bounded_rho(cfg, f, g, h) if args.bounded else r.value
        fired = ",".join(str(k + 1) for k, s in enumerate(r.fired) if s > 0)
        print(f"{col:>3} {f:7.4f} {g:7.4f} {h:7.4f} {rho:7.4f} {ref:7.4f} {rho - ref:+8.4f}  {fired}")


if __name__ == "__main__":
    main()
