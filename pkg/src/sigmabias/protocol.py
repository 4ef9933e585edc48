"""Evaluation workflow shared by score-file assessment and simulation.

Per batch: K bootstrapped subsets per group and kind -> EER and TPR
distributions.  References are chosen once, from the group means averaged
over all batches, then every batch is compared against those references and
the per-batch reports are averaged.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from .biasmetrics import DEFAULT_SIGNIFICANCE, SpConfig, SpMode
from .errors import InputError, InsufficientDataError
from .perf import DEFAULT_TARGET_FPR, PerfKind, compute_eer, build_roc
from .resample import (DEFAULT_K, DEFAULT_SUBSET_SIZE_EER, DEFAULT_SUBSET_SIZE_TPR,
                       BootstrapConfig, aggregate_batches, derive_seed, group_key,
                       performance_distribution, subset_error_rates)
from .risk import ReferencePolicy, RiskThresholds, assemble_report, select_reference


@dataclass(frozen=True)
class AssessmentSettings:
    k: int = DEFAULT_K
    subset_size_eer: int = DEFAULT_SUBSET_SIZE_EER
    subset_size_tpr: int = DEFAULT_SUBSET_SIZE_TPR
    target_fpr: float = DEFAULT_TARGET_FPR
    significance: float = DEFAULT_SIGNIFICANCE
    sp: SpConfig = field(default_factory=SpConfig)
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise InputError(f"K must be at least 2 for distribution metrics, got {self.k}")
        if not 0.0 < self.target_fpr < 1.0:
            raise InputError(f"target FPR must lie in (0, 1), got {self.target_fpr}")
        if not 0.0 < self.significance < 1.0:
            raise InputError(f"significance must lie in (0, 1), got {self.significance}")

    def boot_config(self, batch, group, kind):
        kind = PerfKind.parse(kind)
        size = self.subset_size_eer if kind is PerfKind.EER else self.subset_size_tpr
        return BootstrapConfig(self.k, size,
                               derive_seed(self.seed, batch, group_key(group), kind.code))

    def to_dict(self):
        d = asdict(self)
        d["sp"] = {"mode": self.sp.mode.value, "alpha_weight": self.sp.alpha_weight}
        return d


@dataclass(frozen=True)
class BatchDistributions:
    sets: dict
    eer: dict
    tpr: dict


def batch_distributions(score_sets, settings, batch=0, workers=1):
    sets = {}
    for s in score_sets:
        if s.group in sets:
            raise InputError(f"duplicate group {s.group!r}")
        if s.genuine.size == 0 or s.impostor.size == 0:
            raise InsufficientDataError(
                f"group {s.group!r} needs genuine and impostor scores "
                f"(got {s.genuine.size} genuine, {s.impostor.size} impostor)")
        sets[s.group] = s
    if not sets:
        raise InsufficientDataError("no score sets to evaluate")
    eer = {g: performance_distribution(s, settings.boot_config(batch, g, PerfKind.EER),
                                       PerfKind.EER, workers=workers)
           for g, s in sets.items()}
    tpr = {g: performance_distribution(s, settings.boot_config(batch, g, PerfKind.TPR),
                                       PerfKind.TPR, settings.target_fpr, workers=workers)
           for g, s in sets.items()}
    return BatchDistributions(sets, eer, tpr)


def _full_sp_inputs(bd, settings, batch, ref_eer):
    tau = compute_eer(build_roc(bd.sets[ref_eer])).threshold
    rates = {g: subset_error_rates(s, settings.boot_config(batch, g, PerfKind.EER), tau)
             for g, s in bd.sets.items()}
    return rates, tau


def report_from_batches(batches, settings, policy=ReferencePolicy(),
                        thresholds=RiskThresholds(), model_label="model", config=None):
    """Compare every batch against batch-averaged references and average."""
    batches = list(batches)
    if not batches:
        raise InputError("need at least one batch")
    groups = list(batches[0].eer)
    for bd in batches[1:]:
        if list(bd.eer) != groups:
            raise InputError("all batches must cover the same groups")
    eer_means = {g: float(np.mean([bd.eer[g].mean for bd in batches])) for g in groups}
    tpr_means = {g: float(np.mean([bd.tpr[g].mean for bd in batches])) for g in groups}
    ref_eer, ref_tpr = select_reference(eer_means, tpr_means, policy)
    fixed = ReferencePolicy(ref_eer, ref_tpr)

    cfg = dict(config or {})
    cfg["settings"] = settings.to_dict()
    cfg["reference_policy"] = policy.describe()
    cfg["references"] = {"eer": ref_eer, "tpr": ref_tpr}

    reports = []
    for b, bd in enumerate(batches):
        sp_rates, tau = (None, None)
        if settings.sp.mode is SpMode.FULL:
            sp_rates, tau = _full_sp_inputs(bd, settings, b, ref_eer)
        reports.append(assemble_report(bd.eer, bd.tpr, fixed, thresholds,
                                       settings.significance, model_label, cfg,
                                       settings.sp, sp_rates, tau))
    return aggregate_batches(reports)


def assess_score_sets(score_sets, settings, policy=ReferencePolicy(),
                      thresholds=RiskThresholds(), model_label="model", config=None,
                      workers=1):
    """Single-batch assessment of measured scores."""
    bd = batch_distributions(score_sets, settings, 0, workers)
    return report_from_batches([bd], settings, policy, thresholds, model_label,
                               config).mean_report
