"""SVM versus MVM timing.

SVM translates every version on its own; MVM translates the combined
model once. Building the combined model and projecting results are not
timed. Equivalence is verified before anything is measured.
"""

from __future__ import annotations

import csv
import gc
import io
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .ast2cd import example_tgg
from .engine import transform_forward, transform_forward_mv, verify_equivalence
from .errors import InputError, VerificationError
from .generate import BenchConfig, generate_history, sharing
from .mvm import VersionHistory, comb
from .mvrules import adapt_all
from .tgg import TGGRule, derive_forward_rules

STDDEV_LIMIT = 0.05
MIN_SAMPLE_MS = 3000.0
CSV_FIELDS = ("strategy", "versions", "elements", "mean_ms", "stddev_ms", "applications")


@dataclass
class Timing:
    strategy: str
    samples_ms: list
    applications: int
    elements: int
    inner: int = 1

    @property
    def mean_ms(self) -> float:
        return statistics.fmean(self.samples_ms)

    @property
    def stddev_ms(self) -> float:
        return statistics.stdev(self.samples_ms) if len(self.samples_ms) > 1 else 0.0

    @property
    def unstable(self) -> bool:
        """Relative standard deviation above 5%."""
        return self.mean_ms > 0 and self.stddev_ms > STDDEV_LIMIT * self.mean_ms


@dataclass
class BenchResult:
    versions: int
    timings: dict = field(default_factory=dict)
    sharing: float = 1.0

    @property
    def svm(self) -> Timing:
        return self.timings["SVM"]

    @property
    def mvm(self) -> Timing:
        return self.timings["MVM"]

    @property
    def speedup(self) -> float:
        return self.svm.mean_ms / self.mvm.mean_ms

    @property
    def flagged(self) -> list:
        return [t.strategy for t in self.timings.values() if t.unstable]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for t in self.timings.values():
            w.writerow([t.strategy, self.versions, t.elements, f"{t.mean_ms:.3f}", f"{t.stddev_ms:.3f}", t.applications])
        return buf.getvalue()

    def summary(self) -> str:
        lines = [
            f"versions={self.versions} sharing={self.sharing:.3f} "
            f"MVM elements={self.mvm.elements} vs sum of versions={self.svm.elements}",
        ]
        for t in self.timings.values():
            flag = "  [stddev > 5% of mean]" if t.unstable else ""
            lines.append(
                f"{t.strategy}: {t.mean_ms:.1f} ms +- {t.stddev_ms:.1f} ms per run "
                f"({len(t.samples_ms)} samples of {t.inner} run(s)), {t.applications} applications{flag}"
            )
        lines.append(f"speedup (SVM/MVM): {self.speedup:.2f}")
        return "\n".join(lines)


def _timed(fn, inner: int = 1) -> float:
    """Mean wall time of one call in ms, over ``inner`` back-to-back calls."""
    gc.collect()
    gc.disable()
    try:
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        return (time.perf_counter() - start) * 1000.0 / inner
    finally:
        gc.enable()


def bench_history(
    history: VersionHistory,
    tgg: Sequence[TGGRule],
    *,
    repeat: int = 10,
    parallel: bool = False,
    verify: bool = True,
    min_sample_ms: float = MIN_SAMPLE_MS,
) -> BenchResult:
    """Time both strategies on ``history``.

    Each of the ``repeat`` samples is the mean per-run time over enough
    back-to-back runs to last ``min_sample_ms``; short runs are otherwise
    dominated by scheduler noise. ``min_sample_ms=0`` times single runs.
    """
    if repeat < 1:
        raise InputError("repeat must be positive")
    tgg = list(tgg)
    if verify:
        report = verify_equivalence(history, tgg)
        if not report.ok:
            raise VerificationError("equivalence check failed; refusing to benchmark", report)
    forward = derive_forward_rules(tgg)
    mv_rules = adapt_all(forward)
    mvm = comb(history)
    models = [history.models[v] for v in history.versions]
    counts = {}

    def svm():
        counts["SVM"] = sum(len(transform_forward(m, forward).log) for m in models)

    def svm_parallel():
        with ThreadPoolExecutor() as pool:
            counts["SVM-parallel"] = sum(len(r.log) for r in pool.map(lambda m: transform_forward(m, forward), models))

    def mv():
        counts["MVM"] = len(transform_forward_mv(mvm, mv_rules).log)

    runs = {"SVM": svm, "MVM": mv}
    if parallel:
        runs["SVM-parallel"] = svm_parallel
    samples = {k: [] for k in runs}
    inner = {}
    for k, fn in runs.items():
        fn()  # warm-up
        once = _timed(fn)
        inner[k] = max(1, math.ceil(min_sample_ms / once)) if once > 0 else 1
    for _ in range(repeat):
        for k, fn in runs.items():
            samples[k].append(_timed(fn, inner[k]))
    sizes = {"SVM": history.total_size(), "SVM-parallel": history.total_size(), "MVM": mvm.structural_size()}
    result = BenchResult(len(history.versions), sharing=sharing(history))
    for k in runs:
        result.timings[k] = Timing(k, samples[k], counts[k], sizes[k], inner[k])
    return result


def run_bench(
    cfg: BenchConfig,
    tgg: Optional[Sequence[TGGRule]] = None,
    *,
    repeat: int = 10,
    parallel: bool = False,
    min_sample_ms: float = MIN_SAMPLE_MS,
) -> BenchResult:
    """Generate a history from ``cfg`` and time both strategies on it."""
    tgg = tgg if tgg is not None else example_tgg()
    return bench_history(generate_history(cfg), tgg, repeat=repeat, parallel=parallel, min_sample_ms=min_sample_ms)
