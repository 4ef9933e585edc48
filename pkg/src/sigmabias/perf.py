"""Verification performance: empirical ROC, EER and TPR at a fixed FPR.

Decision rule: a comparison is a match iff ``score >= threshold``.  FPR is
identified with FMR and TPR with 1 - FNMR.
"""

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import _kernels
from .errors import InputError, InsufficientDataError


class PerfKind(str, Enum):
    EER = "EER"
    TPR = "TPR_at_FPR"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text == "eer":
            return cls.EER
        if text in ("tpr", "tpr_at_fpr", "tpr@fpr"):
            return cls.TPR
        raise InputError(f"unknown performance kind {value!r}")

    @property
    def code(self):
        return _kernels.KIND_EER if self is PerfKind.EER else _kernels.KIND_TPR


DEFAULT_TARGET_FPR = 0.01


@dataclass(frozen=True)
class OperatingPoint:
    threshold: float
    fmr: float
    fnmr: float

    @property
    def tpr(self):
        return 1.0 - self.fnmr


@dataclass(frozen=True, eq=False)
class RocCurve:
    thresholds: np.ndarray
    fmr: np.ndarray
    fnmr: np.ndarray

    def __len__(self):
        return self.thresholds.size

    def at(self, threshold):
        """Rates at an arbitrary threshold (step function, ``>=`` acceptance)."""
        # rates at thresholds[i] hold on (thresholds[i-1], thresholds[i]]
        idx = min(int(np.searchsorted(self.thresholds, threshold, side="left")), len(self) - 1)
        return OperatingPoint(float(threshold), float(self.fmr[idx]), float(self.fnmr[idx]))

    def to_csv(self, path_or_file):
        own = not hasattr(path_or_file, "write")
        fh = open(path_or_file, "w", encoding="utf-8", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("threshold", "fmr", "fnmr"))
            for row in zip(self.thresholds, self.fmr, self.fnmr):
                w.writerow(tuple(repr(float(v)) for v in row))
        finally:
            if own:
                fh.close()


@dataclass(frozen=True)
class PerformanceValue:
    kind: PerfKind
    value: float
    operating_fpr: Optional[float] = None
    threshold: Optional[float] = None


def _sorted_sides(score_set):
    gen = np.sort(np.asarray(score_set.genuine, dtype=np.float64))
    imp = np.sort(np.asarray(score_set.impostor, dtype=np.float64))
    if gen.size == 0 or imp.size == 0:
        raise InsufficientDataError(
            f"group {getattr(score_set, 'group', '?')!r} needs genuine and impostor "
            f"scores (got {gen.size} genuine, {imp.size} impostor)")
    return gen, imp


def build_roc(score_set):
    """Empirical ROC over the distinct observed scores plus two sentinels.

    ``fmr[i]`` is the fraction of impostor scores ``>= thresholds[i]`` and
    ``fnmr[i]`` the fraction of genuine scores ``< thresholds[i]``.
    """
    gen, imp = _sorted_sides(score_set)
    thr, fmr, fnmr = _kernels.roc_arrays(gen, imp)
    return RocCurve(np.asarray(thr), np.asarray(fmr), np.asarray(fnmr))


def compute_eer(roc):
    """Rate where FMR = FNMR, interpolated at the lowest-threshold crossing."""
    eer, tau = _kernels.eer_from_curve(roc.thresholds, roc.fmr, roc.fnmr)
    return PerformanceValue(PerfKind.EER, float(eer), threshold=float(tau))


def tpr_at_fpr(roc, target_fpr=DEFAULT_TARGET_FPR):
    if not 0.0 < target_fpr < 1.0:
        raise InputError(f"target_fpr must lie in (0, 1), got {target_fpr}")
    tpr, tau = _kernels.tpr_from_curve(roc.thresholds, roc.fmr, roc.fnmr, float(target_fpr))
    return PerformanceValue(PerfKind.TPR, float(tpr), operating_fpr=float(target_fpr),
                            threshold=float(tau))


def performance(score_set, kind, target_fpr=DEFAULT_TARGET_FPR):
    kind = PerfKind.parse(kind)
    roc = build_roc(score_set)
    if kind is PerfKind.EER:
        return compute_eer(roc)
    return tpr_at_fpr(roc, target_fpr)
