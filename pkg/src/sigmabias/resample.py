"""Bootstrap subsets and per-group performance distributions.

Subset ``i`` is drawn from a child generator seeded by ``(master_seed, i)``,
so every subset is reproducible on its own and the K values do not depend on
evaluation order or on how the work is split across threads.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import InputError, InsufficientDataError
from .ingest import LabeledScoreSet
from .perf import DEFAULT_TARGET_FPR, PerfKind

DEFAULT_K = 20
DEFAULT_SUBSET_SIZE_EER = 6000
DEFAULT_SUBSET_SIZE_TPR = 9000
DEFAULT_CANDIDATE_SIZES = (500, 1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000, 9000, 10000)
DEFAULT_SUBSET_COUNTS = (5, 10, 20, 50)
DEFAULT_STABILITY_EPSILON = 0.10

_UINT64_MASK = (1 << 64) - 1


def derive_seed(master_seed, *keys):
    """Deterministic 64-bit child seed for ``(master_seed, *keys)``."""
    ss = np.random.SeedSequence(int(master_seed) & _UINT64_MASK,
                                spawn_key=tuple(int(k) for k in keys))
    lo, hi = ss.generate_state(2, np.uint32)
    return int(lo) | (int(hi) << 32)


def group_key(name):
    """Non-negative integer identifying a group name inside a seed derivation."""
    return int.from_bytes(b"\x01" + name.encode("utf-8"), "big")


def child_rng(master_seed, index):
    ss = np.random.SeedSequence(int(master_seed) & _UINT64_MASK, spawn_key=(int(index),))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class BootstrapConfig:
    k: int = DEFAULT_K
    subset_size: int = DEFAULT_SUBSET_SIZE_EER
    master_seed: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise InputError(f"k must be non-negative, got {self.k}")
        if self.subset_size < 2:
            raise InputError(f"subset_size must be at least 2, got {self.subset_size}")
        if not 0 <= self.master_seed <= _UINT64_MASK:
            raise InputError("master_seed must be an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class PerfDistribution:
    group: str
    kind: PerfKind
    values: np.ndarray
    target_fpr: Optional[float] = None
    mean: float = field(init=False)
    std: float = field(init=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "kind", PerfKind.parse(self.kind))
        if v.size == 0:
            mean, std = math.nan, math.nan
        elif np.all(v == v[0]):
            mean, std = float(v[0]), 0.0
        else:
            mean = float(v.mean())
            std = float(v.std(ddof=1))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @property
    def k(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, PerfDistribution):
            return NotImplemented
        return (self.group == other.group and self.kind == other.kind
                and self.target_fpr == other.target_fpr
                and np.array_equal(self.values, other.values))

    __hash__ = None


def _pools(score_set):
    gen = np.asarray(score_set.genuine, dtype=np.float64)
    imp = np.asarray(score_set.impostor, dtype=np.float64)
    if gen.size == 0 or imp.size == 0:
        raise InsufficientDataError(
            f"group {score_set.group!r} needs genuine and impostor scores for bootstrapping "
            f"(got {gen.size} genuine, {imp.size} impostor)")
    return gen, imp


def bootstrap_indices(n_gen, n_imp, cfg):
    """(K, subset_size) index matrices into the genuine and impostor pools."""
    gen_idx = np.empty((cfg.k, cfg.subset_size), dtype=np.int64)
    imp_idx = np.empty((cfg.k, cfg.subset_size), dtype=np.int64)
    for i in range(cfg.k):
        rng = child_rng(cfg.master_seed, i)
        gen_idx[i] = rng.integers(0, n_gen, size=cfg.subset_size)
        imp_idx[i] = rng.integers(0, n_imp, size=cfg.subset_size)
    return gen_idx, imp_idx


def bootstrap_subsets(score_set, cfg):
    """K subsets of ``subset_size`` genuine and impostor scores, with replacement."""
    if cfg.k == 0:
        return []
    gen, imp = _pools(score_set)
    gen_idx, imp_idx = bootstrap_indices(gen.size, imp.size, cfg)
    return [LabeledScoreSet(score_set.group, gen[gi], imp[ii])
            for gi, ii in zip(gen_idx, imp_idx)]


def _evaluate_rows(gen, imp, gen_idx, imp_idx, code, target, workers):
    k = gen_idx.shape[0]
    if workers is None or workers <= 1 or k < 2:
        return np.asarray(_kernels.subset_performance(gen, imp, gen_idx, imp_idx, code, target))
    out = np.empty(k, dtype=np.float64)
    bounds = np.linspace(0, k, min(workers, k) + 1).astype(int)

    def run(lo, hi):
        out[lo:hi] = _kernels.subset_performance(gen, imp, gen_idx[lo:hi], imp_idx[lo:hi],
                                                 code, target)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(run, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]:
            fut.result()
    return out


def performance_distribution(score_set, cfg, kind, target_fpr=None, workers=1):
    """The K bootstrapped EER or TPR@FPR values of one group."""
    kind = PerfKind.parse(kind)
    if kind is PerfKind.TPR:
        if target_fpr is None:
            raise InputError("TPR distributions need a target_fpr")
        if not 0.0 < target_fpr < 1.0:
            raise InputError(f"target_fpr must lie in (0, 1), got {target_fpr}")
        target = float(target_fpr)
    else:
        if target_fpr is not None:
            raise InputError("EER distributions take no target_fpr")
        target = DEFAULT_TARGET_FPR
    if cfg.k == 0:
        return PerfDistribution(score_set.group, kind, np.empty(0), target_fpr)
    gen, imp = _pools(score_set)
    gen_idx, imp_idx = bootstrap_indices(gen.size, imp.size, cfg)
    values = _evaluate_rows(gen, imp, gen_idx, imp_idx, kind.code, target, workers)
    return PerfDistribution(score_set.group, kind, values, target_fpr)


def subset_error_rates(score_set, cfg, threshold):
    """Per-subset (FMR, FNMR) at a fixed threshold, on the same subsets as
    :func:`performance_distribution` with this ``cfg``."""
    gen, imp = _pools(score_set)
    gen_idx, imp_idx = bootstrap_indices(gen.size, imp.size, cfg)
    fmr = np.count_nonzero(imp[imp_idx] >= threshold, axis=1) / cfg.subset_size
    fnmr = np.count_nonzero(gen[gen_idx] < threshold, axis=1) / cfg.subset_size
    return fmr, fnmr


# --------------------------------------------------------------------------
# subset-size calibration

@dataclass(frozen=True)
class VariabilityCurve:
    kind: PerfKind
    subset_sizes: tuple
    subset_counts: tuple
    std_per_size: dict
    recommended_size: int
    warning: bool
    stability_epsilon: float

    def stds(self, subset_count):
        return np.array([self.std_per_size[(n, subset_count)] for n in self.subset_sizes])

    def rows(self):
        for n in self.subset_sizes:
            for s in self.subset_counts:
                yield n, s, self.std_per_size[(n, s)]

    def to_csv(self, path_or_file):
        own = not hasattr(path_or_file, "write")
        fh = open(path_or_file, "w", encoding="utf-8", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("subset_size", "subset_count", "std"))
            for n, s, sd in self.rows():
                w.writerow((n, s, repr(float(sd))))
        finally:
            if own:
                fh.close()


def recommend_size(sizes, stds, epsilon):
    """Smallest size whose std changes by less than ``epsilon`` (relative) at the
    next size.  Returns ``(size, warning)``; falls back to the largest size."""
    for i in range(len(sizes) - 1):
        a, b = stds[i], stds[i + 1]
        if a == 0.0:
            change = 0.0 if b == 0.0 else math.inf
        else:
            change = abs(b - a) / a
        if change < epsilon:
            return sizes[i], False
    return sizes[-1], True


def calibrate_subset_size(score_set, candidate_sizes=DEFAULT_CANDIDATE_SIZES,
                          s=DEFAULT_K, kind=PerfKind.EER,
                          stability_epsilon=DEFAULT_STABILITY_EPSILON,
                          master_seed=0, target_fpr=DEFAULT_TARGET_FPR, workers=1):
    """Std of the bootstrapped performance value per (subset size, subset count).

    ``s`` may be one subset count or several; the recommendation is read from
    the curve with the largest count.
    """
    kind = PerfKind.parse(kind)
    sizes = tuple(int(n) for n in candidate_sizes)
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InputError("candidate sizes must be non-empty and strictly ascending")
    counts = (int(s),) if np.isscalar(s) else tuple(int(c) for c in s)
    if not counts or min(counts) < 2:
        raise InputError("subset counts must be at least 2")
    tfpr = target_fpr if kind is PerfKind.TPR else None

    table = {}
    for n in sizes:
        for c in counts:
            cfg = BootstrapConfig(c, n, derive_seed(master_seed, n, c))
            table[(n, c)] = performance_distribution(score_set, cfg, kind, tfpr, workers).std
    ref_count = max(counts)
    rec, warn = recommend_size(sizes, [table[(n, ref_count)] for n in sizes],
                               stability_epsilon)
    return VariabilityCurve(kind, sizes, counts, table, rec, warn, stability_epsilon)


# --------------------------------------------------------------------------
# batch aggregation

@dataclass(frozen=True)
class BatchAggregate:
    per_batch: Sequence
    mean_report: object


def aggregate_batches(reports):
    """Element-wise mean over M structurally identical per-batch reports."""
    from .risk import mean_report

    reports = list(reports)
    if not reports:
        raise InputError("aggregate_batches needs at least one report")
    return BatchAggregate(tuple(reports), mean_report(reports))
