"""Reference-group selection, risk tiers and the per-group bias report."""

import bisect
import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from .biasmetrics import (DEFAULT_SIGNIFICANCE, SpConfig, SpMode, eop, n_sigma,
                          sp_full_subsets, sp_simplified, welch_t_test)
from .errors import AggregationError, InputError, InsufficientDataError

DEFAULT_CUT_POINTS = (1.0, 2.0, 3.0)
DEFAULT_LABELS = ("low", "medium", "high", "critical")

FLAG_INFINITE_SEPARATION = "infinite_separation"
FLAG_DEGENERATE_VARIANCE = "degenerate_variance"


@dataclass(frozen=True)
class ReferencePolicy:
    """``None`` selects by mean (lowest EER, highest TPR); a name forces that group."""

    eer_reference: Optional[str] = None
    tpr_reference: Optional[str] = None

    def describe(self):
        return {"eer": self.eer_reference or "lowest_mean",
                "tpr": self.tpr_reference or "highest_mean"}


@dataclass(frozen=True)
class RiskThresholds:
    cut_points: tuple = DEFAULT_CUT_POINTS
    labels: tuple = DEFAULT_LABELS

    def __post_init__(self):
        cuts = tuple(float(c) for c in self.cut_points)
        labels = tuple(str(s) for s in self.labels)
        if not cuts:
            raise InputError("risk thresholds need at least one cut-point")
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise InputError("risk cut-points must be strictly ascending")
        if any(not math.isfinite(c) for c in cuts):
            raise InputError("risk cut-points must be finite")
        if len(labels) != len(cuts) + 1:
            raise InputError(f"{len(cuts)} cut-points need {len(cuts) + 1} labels, "
                             f"got {len(labels)}")
        object.__setattr__(self, "cut_points", cuts)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def parse(cls, cuts_text, labels_text=None):
        try:
            cuts = tuple(float(c) for c in cuts_text.split(",") if c.strip())
        except ValueError:
            raise InputError(f"cannot parse risk thresholds {cuts_text!r}") from None
        if labels_text:
            labels = tuple(s.strip() for s in labels_text.split(","))
        elif len(cuts) == len(DEFAULT_CUT_POINTS):
            labels = DEFAULT_LABELS
        else:
            labels = tuple(f"level{i}" for i in range(len(cuts) + 1))
        return cls(cuts, labels)

    def level_index(self, n):
        if math.isnan(n):
            raise InputError("cannot map NaN to a risk level")
        return bisect.bisect_right(self.cut_points, n)

    def to_dict(self):
        return {"cut_points": list(self.cut_points), "labels": list(self.labels)}


def map_risk_level(n, thresholds=RiskThresholds()):
    """Label of the half-open interval ``[cut_i, cut_{i+1})`` that contains ``n``."""
    return thresholds.labels[thresholds.level_index(n)]


def _mean_of(x):
    return float(getattr(x, "mean", x))


def select_reference(eer, tpr=None, policy=ReferencePolicy()):
    """(EER reference, TPR reference) group names.

    ``eer`` / ``tpr`` map group name to a PerfDistribution or a plain mean.
    Ties go to the lexicographically smallest name.
    """
    if not eer:
        raise InputError("reference selection needs at least one group")
    tpr = eer if tpr is None else tpr

    if policy.eer_reference is not None:
        if policy.eer_reference not in eer:
            raise InputError(f"EER reference group {policy.eer_reference!r} not in data")
        ref_eer = policy.eer_reference
    else:
        ref_eer = min(eer, key=lambda g: (_mean_of(eer[g]), g))

    if policy.tpr_reference is not None:
        if policy.tpr_reference not in tpr:
            raise InputError(f"TPR reference group {policy.tpr_reference!r} not in data")
        ref_tpr = policy.tpr_reference
    elif tpr is eer and policy.eer_reference is None:
        ref_tpr = ref_eer
    else:
        ref_tpr = min(tpr, key=lambda g: (-_mean_of(tpr[g]), g))
    return ref_eer, ref_tpr


@dataclass(frozen=True)
class GroupComparison:
    group: str
    reference_eer: str
    reference_tpr: str
    sp: float
    eop: float
    t_test_p: float
    n_sigma: float
    risk_level: str
    t_test_z: float = 0.0
    t_test_df: float = 0.0
    flags: tuple = ()

    def to_dict(self):
        return {
            "group": self.group,
            "reference_eer": self.reference_eer,
            "reference_tpr": self.reference_tpr,
            "sp": self.sp,
            "eop": self.eop,
            "t_test_p": self.t_test_p,
            "t_test_z": _finite_or_none(self.t_test_z),
            "t_test_df": self.t_test_df,
            "n_sigma": _finite_or_none(self.n_sigma),
            "risk_level": self.risk_level,
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, d):
        flags = tuple(d.get("flags", ()))
        n = d["n_sigma"]
        if n is None:
            n = math.inf
        z = d.get("t_test_z", 0.0)
        if z is None:
            z = math.inf if FLAG_DEGENERATE_VARIANCE in flags else math.nan
        return cls(d["group"], d["reference_eer"], d["reference_tpr"], d["sp"], d["eop"],
                   d["t_test_p"], n, d["risk_level"], z, d.get("t_test_df", 0.0), flags)


def _finite_or_none(x):
    return x if math.isfinite(x) else None


@dataclass(frozen=True)
class BiasReport:
    model_label: str
    batches: int
    sigma_ref: float
    group_means: dict
    comparisons: tuple
    thresholds: RiskThresholds = RiskThresholds()
    config: dict = field(default_factory=dict)

    @property
    def groups(self):
        return tuple(c.group for c in self.comparisons)

    def comparison(self, group):
        for c in self.comparisons:
            if c.group == group:
                return c
        raise KeyError(group)

    @property
    def reference_eer(self):
        return self.comparisons[0].reference_eer if self.comparisons else None

    @property
    def reference_tpr(self):
        return self.comparisons[0].reference_tpr if self.comparisons else None

    def to_dict(self):
        return {
            "model_label": self.model_label,
            "batches": self.batches,
            "sigma_ref": self.sigma_ref,
            "reference_eer": self.reference_eer,
            "reference_tpr": self.reference_tpr,
            "group_means": {g: dict(m) for g, m in self.group_means.items()},
            "comparisons": [c.to_dict() for c in self.comparisons],
            "risk_thresholds": self.thresholds.to_dict(),
            "config": self.config,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d):
        th = d.get("risk_thresholds")
        thresholds = RiskThresholds(tuple(th["cut_points"]), tuple(th["labels"])) \
            if th else RiskThresholds()
        return cls(d["model_label"], d["batches"], d["sigma_ref"],
                   {g: dict(m) for g, m in d["group_means"].items()},
                   tuple(GroupComparison.from_dict(c) for c in d["comparisons"]),
                   thresholds, d.get("config", {}))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def csv_rows(self):
        for c in self.comparisons:
            means = self.group_means[c.group]
            yield c.group, "mean_eer", means["eer"]
            yield c.group, "mean_tpr", means["tpr"]
            yield c.group, "sp", c.sp
            yield c.group, "eop", c.eop
            yield c.group, "t_test_p", c.t_test_p
            yield c.group, "n_sigma", c.n_sigma
            yield c.group, "risk_level", c.risk_level

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("group", "metric", "value"))
        for g, metric, value in self.csv_rows():
            w.writerow((g, metric, repr(value) if isinstance(value, float) else value))
        return buf.getvalue()


def self_comparison(group, reference_eer, reference_tpr, thresholds):
    return GroupComparison(group, reference_eer, reference_tpr, 1.0, 1.0, 1.0, 0.0,
                           map_risk_level(0.0, thresholds))


def assemble_report(eer_dists: Mapping, tpr_dists: Mapping, policy=ReferencePolicy(),
                    thresholds=RiskThresholds(), significance=DEFAULT_SIGNIFICANCE,
                    model_label="model", config=None, sp_config=SpConfig(),
                    sp_rates: Optional[Mapping] = None, sp_threshold=None):
    """One comparison row per group against the policy-selected references.

    SP, T-test and N-Sigma compare EER distributions against the EER
    reference; EOP compares TPR distributions against the TPR reference.
    ``sp_rates`` (group -> (fmr[K], fnmr[K]) at ``sp_threshold``) is required
    when ``sp_config.mode`` is ``full``.
    """
    groups = list(eer_dists)
    if not groups:
        raise InputError("no groups to report on")
    missing = [g for g in groups if g not in tpr_dists] + \
              [g for g in tpr_dists if g not in eer_dists]
    if missing:
        raise InputError(f"missing EER or TPR distribution for groups {sorted(set(missing))}")
    ks = {d.k for d in eer_dists.values()} | {d.k for d in tpr_dists.values()}
    if len(ks) != 1:
        raise InputError(f"all distributions must share one K, got {sorted(ks)}")
    k = ks.pop()
    if k < 2 and len(groups) > 1:
        raise InsufficientDataError("distribution metrics need K >= 2")
    full_sp = sp_config.mode is SpMode.FULL
    if full_sp and sp_rates is None:
        raise InputError("full SP mode needs per-subset FMR/FNMR rates")

    ref_eer, ref_tpr = select_reference(eer_dists, tpr_dists, policy)
    e_ref = eer_dists[ref_eer]
    t_ref = tpr_dists[ref_tpr]

    rows = []
    for g in groups:
        if g == ref_eer and g == ref_tpr:
            rows.append(self_comparison(g, ref_eer, ref_tpr, thresholds))
            continue
        flags = []
        if g == ref_eer:
            sp_v, p, z, df, n = 1.0, 1.0, 0.0, 0.0, 0.0
        else:
            d = eer_dists[g]
            if full_sp:
                fr, nr = sp_rates[ref_eer]
                fe, ne = sp_rates[g]
                sp_v = sp_full_subsets(fr, nr, fe, ne, sp_config, ref_eer, g,
                                       sp_threshold).value
            else:
                sp_v = sp_simplified(e_ref, d, ref_eer, g).value
            tt = welch_t_test(e_ref, d, significance)
            ns = n_sigma(e_ref, d)
            p, z, df, n = tt.p_value, tt.z, tt.degrees_of_freedom, ns.n
            if tt.degenerate_variance and tt.p_value == 0.0:
                flags.append(FLAG_DEGENERATE_VARIANCE)
            if ns.infinite_separation:
                flags.append(FLAG_INFINITE_SEPARATION)
        eop_v = 1.0 if g == ref_tpr else eop(t_ref, tpr_dists[g], t_ref.target_fpr,
                                             ref_tpr, g).value
        rows.append(GroupComparison(g, ref_eer, ref_tpr, sp_v, eop_v, p, n,
                                    map_risk_level(n, thresholds), z, df, tuple(flags)))

    means = {g: {"eer": eer_dists[g].mean, "tpr": tpr_dists[g].mean} for g in groups}
    cfg = dict(config or {})
    cfg.setdefault("reference_policy", policy.describe())
    cfg.setdefault("significance", significance)
    cfg.setdefault("sp", {"mode": sp_config.mode.value, "alpha_weight": sp_config.alpha_weight})
    return BiasReport(model_label, 1, float(e_ref.std), means, tuple(rows), thresholds, cfg)


def _mean(values):
    arr = np.asarray(values, dtype=np.float64)
    if np.all(arr == arr[0]):
        return float(arr[0])
    return float(arr.mean())


def mean_report(reports):
    """Element-wise mean of structurally identical reports; risk levels are
    re-derived from the averaged N-Sigma."""
    reports = list(reports)
    if not reports:
        raise InputError("need at least one report")
    first = reports[0]
    shape = [(c.group, c.reference_eer, c.reference_tpr) for c in first.comparisons]
    for r in reports[1:]:
        if [(c.group, c.reference_eer, c.reference_tpr) for c in r.comparisons] != shape:
            raise AggregationError("reports differ in groups or reference groups")
        if r.thresholds != first.thresholds:
            raise AggregationError("reports use different risk thresholds")
        if set(r.group_means) != set(first.group_means):
            raise AggregationError("reports differ in group means structure")

    rows = []
    for i, c0 in enumerate(first.comparisons):
        cs = [r.comparisons[i] for r in reports]
        n = _mean([c.n_sigma for c in cs])
        flags = tuple(sorted({f for c in cs for f in c.flags}))
        rows.append(GroupComparison(
            c0.group, c0.reference_eer, c0.reference_tpr,
            _mean([c.sp for c in cs]), _mean([c.eop for c in cs]),
            _mean([c.t_test_p for c in cs]), n, map_risk_level(n, first.thresholds),
            _mean([c.t_test_z for c in cs]), _mean([c.t_test_df for c in cs]), flags))

    means = {g: {key: _mean([r.group_means[g][key] for r in reports])
                 for key in first.group_means[g]}
             for g in first.group_means}
    return replace(first, batches=sum(r.batches for r in reports),
                   sigma_ref=_mean([r.sigma_ref for r in reports]),
                   group_means=means, comparisons=tuple(rows))
