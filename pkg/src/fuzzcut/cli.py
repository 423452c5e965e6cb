"""Command line entry point: ``fuzzcut <command> ...``.

Exit status is 0 on success, 1 on domain errors (bad config, empty pattern,
unreadable file) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from fuzzcut import evaluation, synth, tuner
from fuzzcut.features import extract
from fuzzcut.fis import VARIABLES, ConfigError, evaluate, membership, resolve_config, save_config
from fuzzcut.raster import ParseError, PatternError, binarize, load_gray, load_pattern, otsu_threshold, trim, write_pattern
from fuzzcut.segmenter import segment, split_pattern

log = logging.getLogger("fuzzcut")


class DomainError(Exception):
    pass


def _out_path(args, path) -> Path:
    p = Path(path)
    if args.outdir and not p.is_absolute():
        p = Path(args.outdir) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _seed(args, fallback: int) -> int:
    return args.global_seed if args.global_seed is not None else fallback


def _read_pattern(path) -> "BinaryPattern":  # noqa: F821
    if not Path(path).exists():
        raise DomainError(f"no such file: {path}")
    return trim(load_pattern(path))


def _fmt(x: float, places: int = 4) -> str:
    return "nan" if np.isnan(x) else f"{x:.{places}f}"


# ---------------------------------------------------------------- commands


def cmd_binarize(args):
    if not Path(args.image).exists():
        raise DomainError(f"no such file: {args.image}")
    img = load_gray(args.image)
    t = otsu_threshold(img) if args.threshold is None else args.threshold
    p = binarize(img, t)
    if not args.no_trim:
        p = trim(p)
    print(f"threshold {t}", file=sys.stderr)
    if args.out:
        write_pattern(p, _out_path(args, args.out), args.format)
    else:
        sys.stdout.write("\n".join([f"{p.m} {p.n}", *p.to_strings()]) + "\n")


def cmd_features(args):
    p = _read_pattern(args.pattern)
    f = extract(p)
    rows = [
        [i + 1, int(f.V[i]), f"{f.fbar[i]:.6f}", f"{f.gbar[i]:.6f}", f"{f.hbar[i]:.6f}"] for i in range(f.n)
    ]
    if args.out == "json":
        json.dump(
            {"n": f.n, "c": f.c, "columns": [dict(zip(("column", "V", "fbar", "gbar", "hbar"), r)) for r in rows]},
            sys.stdout,
            indent=2,
        )
        sys.stdout.write("\n")
        return
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["column", "V", "fbar", "gbar", "hbar"])
    w.writerows(rows)


def cmd_fis_eval(args):
    cfg = resolve_config(args.config)
    for name, v in (("f", args.f), ("g", args.g), ("h", args.h)):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"--{name} must lie in [0, 1], got {v}")
    r = evaluate(cfg, args.f, args.g, args.h)
    print(f"{r.value:.4f}")
    for k, (rule, s) in enumerate(zip(cfg.rules, r.fired), 1):
        print(f"rule {k:2d} {s:.4f}  {rule}", file=sys.stderr)
    if r.no_fire:
        print("no rule fired", file=sys.stderr)


def cmd_fis_plot(args):
    cfg = resolve_config(args.config)
    xs = np.linspace(0.0, 1.0, args.samples)
    header = ["x"]
    cols = []
    for name in VARIABLES:
        var = cfg.variable(name)
        for s in var.sets:
            header.append(f"{name}.{s.label}")
            cols.append(membership(s, xs))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i, x in enumerate(xs):
        w.writerow([f"{x:.4f}", *(f"{c[i]:.4f}" for c in cols)])
    if args.output:
        _out_path(args, args.output).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def cmd_segment(args):
    cfg = resolve_config(args.profile)
    p = _read_pattern(args.pattern)
    res = segment(p, cfg, args.chars)
    print(" ".join(str(c) for c in res.cuts))
    if res.under_segmented:
        print("warning: under-segmented", file=sys.stderr)
    if args.emit_profile:
        with open(_out_path(args, args.emit_profile), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["column", "fbar", "gbar", "hbar", "rho"])
            for i in range(res.n):
                if np.isnan(res.rho_profile[i]):
                    continue
                w.writerow([i + 1, _fmt(res.fbar[i]), _fmt(res.gbar[i]), _fmt(res.hbar[i]), _fmt(res.rho_profile[i])])
    if args.emit_segments:
        d = _out_path(args, Path(args.emit_segments) / "x").parent
        for k, piece in enumerate(split_pattern(p, res.cuts), 1):
            write_pattern(piece, d / f"segment_{k:02d}.txt")


def cmd_synth(args):
    manifest = synth.generate(
        args.glyphs,
        _out_path(args, args.out),
        count=args.count,
        max_chars=args.max_chars,
        two_char_fraction=args.two_frac,
        seed=_seed(args, args.seed),
        extra_overlap=args.overlap,
        height_ratio=args.height_ratio,
    )
    print(f"wrote {manifest['achieved']} samples ({manifest['attempts']} attempts) to {args.out}")
    if manifest["achieved"] < args.count:
        print(f"warning: only {manifest['achieved']} of {args.count} samples generated", file=sys.stderr)


def cmd_tune(args):
    base = resolve_config(args.base)
    report = tuner.tune_dataset(
        args.dataset,
        base,
        swarm=args.swarm,
        iters=args.iters,
        seed=_seed(args, args.seed),
        tolerance_k=args.tolerance,
        holdout_fraction=args.holdout,
    )
    out = _out_path(args, args.out)
    save_config(report.best_config, out)
    report_path = _out_path(args, args.report) if args.report else out.with_name(out.stem + ".report.json")
    tuner.save_report(report, report_path)
    print(f"train exact {report.base_fitness.exact:.4f} -> {report.best_fitness.exact:.4f}")
    if report.holdout_best is not None:
        print(f"holdout exact {report.holdout_base.exact:.4f} -> {report.holdout_best.exact:.4f}")


def cmd_evaluate(args):
    cfg = resolve_config(args.profile)
    if not Path(args.dataset).is_dir():
        raise DomainError(f"no such dataset directory: {args.dataset}")
    report = evaluation.evaluate(args.dataset, cfg, args.tolerance, args.truth_chars)
    print(report.summary())
    if args.out:
        evaluation.save_report(report, _out_path(args, args.out))


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fuzzcut", description="Fuzzy segmentation of touching characters.")
    ap.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    ap.add_argument("--seed", dest="global_seed", type=int, default=None, help="override every command's seed")
    ap.add_argument("--outdir", default=None, help="directory for relative output paths")
    sub = ap.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("binarize", help="Otsu-binarize a PGM/PPM/PBM image")
    p.add_argument("image")
    p.add_argument("--out", help="output pattern path (default: stdout, text format)")
    p.add_argument("--format", choices=["text", "pbm", "pbm-raw"], default=None)
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--no-trim", action="store_true")
    p.set_defaults(func=cmd_binarize)

    p = sub.add_parser("features", help="per-column V, fbar, gbar, hbar")
    p.add_argument("pattern")
    p.add_argument("--out", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("fis", help="inspect a fuzzy system")
    fsub = p.add_subparsers(dest="fis_command", metavar="fis_command")
    q = fsub.add_parser("eval", help="rho for one (fbar, gbar, hbar) triple")
    q.add_argument("--config", default=None, help="A, B or a JSON config path")
    q.add_argument("--f", type=float, required=True)
    q.add_argument("--g", type=float, required=True)
    q.add_argument("--h", type=float, required=True)
    q.set_defaults(func=cmd_fis_eval)
    q = fsub.add_parser("plot", help="sampled membership curves as CSV")
    q.add_argument("--config", default=None)
    q.add_argument("--out", choices=["csv"], default="csv")
    q.add_argument("--output", default=None, help="file path (default: stdout)")
    q.add_argument("--samples", type=int, default=101)
    q.set_defaults(func=cmd_fis_plot)

    p = sub.add_parser("segment", help="find cut columns in a pattern")
    p.add_argument("pattern")
    p.add_argument("--profile", default=None, help="A, B or a JSON config path")
    p.add_argument("--chars", type=int, default=None)
    p.add_argument("--emit-profile", default=None)
    p.add_argument("--emit-segments", default=None)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("synth", help="generate a touching-character dataset")
    p.add_argument("--glyphs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--max-chars", type=int, default=4)
    p.add_argument("--two-frac", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--overlap", type=int, default=0, help="extra columns of overlap past first touch")
    p.add_argument("--height-ratio", type=float, default=synth.HEIGHT_RATIO)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("tune", help="PSO-tune membership breakpoints")
    p.add_argument("--dataset", required=True)
    p.add_argument("--base", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--swarm", type=int, default=30)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=int, default=5)
    p.add_argument("--holdout", type=float, default=0.2)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("evaluate", help="score a profile on a dataset")
    p.add_argument("dataset")
    p.add_argument("--profile", default=None)
    p.add_argument("--tolerance", type=int, default=5)
    p.add_argument("--truth-chars", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        ap.print_usage(sys.stderr)
        return 2
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args.func(args)
    except (DomainError, ConfigError, PatternError, ParseError, OSError, ValueError, FloatingPointError) as exc:
        print(f"fuzzcut: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
