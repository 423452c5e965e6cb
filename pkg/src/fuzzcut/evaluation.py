"""Positional accuracy of chosen cuts against dataset descriptors."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from fuzzcut.fis import FuzzySystemConfig
from fuzzcut.raster import load_pattern
from fuzzcut.segmenter import segment


@dataclass(frozen=True)
class SampleScore:
    exact: bool
    within_k: bool
    count_mismatch: bool = False


def score_sample(chosen, truth, k: int) -> SampleScore:
    chosen, truth = list(chosen), list(truth)
    if len(chosen) != len(truth):
        return SampleScore(False, False, True)
    exact = chosen == truth
    within = all(abs(c - t) <= k for c, t in zip(sorted(chosen), sorted(truth)))
    return SampleScore(exact, within)


@dataclass
class SizeBreakdown:
    total: int = 0
    exact_hits: int = 0
    within_k_hits: int = 0


@dataclass
class EvalReport:
    total: int = 0
    exact_hits: int = 0
    within_k_hits: int = 0
    k: int = 5
    use_truth_char_count: bool = False
    per_size: dict[str, SizeBreakdown] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    abs_errors: list[int] = field(default_factory=list)

    @property
    def exact_accuracy(self) -> float:
        return self.exact_hits / self.total if self.total else 0.0

    @property
    def within_k_accuracy(self) -> float:
        return self.within_k_hits / self.total if self.total else 0.0

    @property
    def mean_abs_error(self) -> float:
        return sum(self.abs_errors) / len(self.abs_errors) if self.abs_errors else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_size"] = {k: asdict(v) for k, v in sorted(self.per_size.items())}
        d["exact_accuracy"] = round(self.exact_accuracy, 6)
        d["within_k_accuracy"] = round(self.within_k_accuracy, 6)
        d["mean_abs_error"] = round(self.mean_abs_error, 6)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(
            total=d["total"],
            exact_hits=d["exact_hits"],
            within_k_hits=d["within_k_hits"],
            k=d["k"],
            use_truth_char_count=d["use_truth_char_count"],
            per_size={k: SizeBreakdown(**v) for k, v in d["per_size"].items()},
            failures=list(d["failures"]),
            abs_errors=list(d["abs_errors"]),
        )

    def summary(self) -> str:
        lines = [
            f"{'chars':>6} {'total':>6} {'exact':>7} {'within':>7}",
        ]
        for size, b in sorted(self.per_size.items()):
            lines.append(f"{size:>6} {b.total:>6} {b.exact_hits:>7} {b.within_k_hits:>7}")
        lines.append(f"{'all':>6} {self.total:>6} {self.exact_hits:>7} {self.within_k_hits:>7}")
        lines.append(
            f"exact {self.exact_accuracy:.4f}  within-{self.k} {self.within_k_accuracy:.4f}  "
            f"mean |err| {self.mean_abs_error:.4f}"
        )
        return "\n".join(lines)


def load_descriptors(dataset_dir) -> list[dict]:
    """Descriptors from ``manifest.json`` if present, else every ``*.json``."""
    root = Path(dataset_dir)
    manifest = root / "manifest.json"
    if manifest.exists():
        descs = json.loads(manifest.read_text())["samples"]
    else:
        descs = [json.loads(p.read_text()) for p in sorted(root.glob("*.json"))]
    for d in descs:
        d.setdefault("id", Path(d["image"]).stem)
    return sorted(descs, key=lambda d: d["id"])


def run_dataset(descs: list[dict], root, cfg: FuzzySystemConfig, use_truth_char_count: bool = True):
    """Yield ``(descriptor, chosen cuts or None, error message)`` per sample."""
    root = Path(root)
    for d in descs:
        try:
            pattern = load_pattern(root / d["image"])
        except (OSError, ValueError) as exc:
            yield d, None, f"{type(exc).__name__}: {exc}"
            continue
        expected = len(d["chars"]) if use_truth_char_count else None
        yield d, list(segment(pattern, cfg, expected).cuts), ""


def evaluate(dataset_dir, cfg: FuzzySystemConfig, k: int = 5, use_truth_char_count: bool = False) -> EvalReport:
    descs = load_descriptors(dataset_dir)
    if not descs:
        raise ValueError(f"no descriptors in {dataset_dir}")
    return evaluate_descriptors(descs, dataset_dir, cfg, k, use_truth_char_count)


def evaluate_descriptors(descs, root, cfg, k: int = 5, use_truth_char_count: bool = False) -> EvalReport:
    report = EvalReport(k=k, use_truth_char_count=use_truth_char_count)
    descs = sorted(descs, key=lambda d: d.setdefault("id", Path(d["image"]).stem))
    for d, chosen, err in run_dataset(descs, root, cfg, use_truth_char_count):
        truth = list(d["cuts"])
        size = str(len(d["chars"]))
        b = report.per_size.setdefault(size, SizeBreakdown())
        report.total += 1
        b.total += 1
        if chosen is None:
            report.failures.append({"id": d["id"], "chosen": None, "truth": truth, "reason": err})
            continue
        s = score_sample(chosen, truth, k)
        report.exact_hits += s.exact
        report.within_k_hits += s.within_k
        b.exact_hits += s.exact
        b.within_k_hits += s.within_k
        if not s.count_mismatch:
            report.abs_errors.extend(abs(c - t) for c, t in zip(chosen, truth))
        if not s.exact:
            reason = "count-mismatch" if s.count_mismatch else ("within-k" if s.within_k else "miss")
            report.failures.append({"id": d["id"], "chosen": chosen, "truth": truth, "reason": reason})
    report.failures.sort(key=lambda f: f["id"])
    return report


def save_report(report: EvalReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
