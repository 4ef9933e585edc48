"""Bias metrics between a reference group and an evaluated group.

Pointwise metrics (SP, EOP) pair the K per-subset performance values index by
index.  Distribution metrics (Welch T-test, N-Sigma) treat each group's K
values as a sample.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import InputError
from .normality import NormalityResult, shapiro_wilk  # noqa: F401  (re-export)
from .special import t_cdf, t_ppf, t_sf  # noqa: F401  (re-export)

DEFAULT_SIGNIFICANCE = 0.05
DEFAULT_SP_ALPHA = 0.5


class SpMode(str, Enum):
    FULL = "full"
    SIMPLIFIED_AT_EER = "simplified_at_eer"


@dataclass(frozen=True)
class SpConfig:
    alpha_weight: float = DEFAULT_SP_ALPHA
    mode: SpMode = SpMode.SIMPLIFIED_AT_EER

    def __post_init__(self):
        if not 0.0 <= self.alpha_weight <= 1.0:
            raise InputError(f"SP alpha weight must lie in [0, 1], got {self.alpha_weight}")
        object.__setattr__(self, "mode", SpMode(self.mode))


@dataclass(frozen=True)
class PointwiseResult:
    metric: str
    value: float
    reference: str = ""
    evaluated: str = ""
    operating_point: Optional[str] = None


@dataclass(frozen=True)
class TTestResult:
    z: float
    degrees_of_freedom: float
    p_value: float
    significance: float
    reject_null: bool
    critical_value: float
    degenerate_variance: bool = False


@dataclass(frozen=True)
class NSigmaResult:
    n: float
    mu_ref: float
    mu_eval: float
    sigma_ref: float
    signed_difference: float
    infinite_separation: bool = False


def _values(d):
    return np.asarray(getattr(d, "values", d), dtype=np.float64).reshape(-1)


def _paired(ref, ev):
    r = _values(ref)
    e = _values(ev)
    if r.size != e.size:
        raise InputError(f"pointwise metrics need equal K, got {r.size} and {e.size}")
    if r.size == 0:
        raise InputError("pointwise metrics need K >= 1")
    return r, e


def _one_minus_mean_abs_diff(r, e):
    diff = np.abs(r - e)
    if not diff.any():
        return 1.0
    return float(1.0 - diff.mean())


def sp_simplified(eer_ref, eer_eval, reference="", evaluated=""):
    """SP at the EER threshold: 1 - mean_i |EER_ref[i] - EER_eval[i]|."""
    r, e = _paired(eer_ref, eer_eval)
    return PointwiseResult("SP", _one_minus_mean_abs_diff(r, e), reference, evaluated,
                           "tau_EER")


def sp_full(fmr_diff, fnmr_diff, cfg=SpConfig()):
    """1 - (alpha * A + (1 - alpha) * B) for FMR / FNMR differentials A, B."""
    alpha = cfg.alpha_weight
    return 1.0 - (alpha * fmr_diff + (1.0 - alpha) * fnmr_diff)


def sp_full_subsets(fmr_ref, fnmr_ref, fmr_eval, fnmr_eval, cfg=SpConfig(),
                    reference="", evaluated="", threshold=None):
    """Full SP averaged over K paired subsets evaluated at one fixed threshold."""
    fr, fe = _paired(fmr_ref, fmr_eval)
    nr, ne = _paired(fnmr_ref, fnmr_eval)
    if fr.size != nr.size:
        raise InputError("FMR and FNMR vectors must have equal length")
    a = np.abs(fr - fe)
    b = np.abs(nr - ne)
    if not (a.any() or b.any()):
        value = 1.0
    else:
        value = float(np.mean(sp_full(a, b, cfg)))
    op = None if threshold is None else f"tau={threshold!r}"
    return PointwiseResult("SP", value, reference, evaluated, op)


def eop(tpr_ref, tpr_eval, target_fpr=0.01, reference="", evaluated=""):
    """EOP: 1 - mean_i |TPR_ref[i] - TPR_eval[i]| at the FPR operating point."""
    r, e = _paired(tpr_ref, tpr_eval)
    return PointwiseResult("EOP", _one_minus_mean_abs_diff(r, e), reference, evaluated,
                           f"FPR={target_fpr!r}")


def _moments(d):
    v = _values(d)
    if v.size == 0:
        raise InputError("empty performance distribution")
    mean = getattr(d, "mean", None)
    std = getattr(d, "std", None)
    if mean is None or callable(mean):
        mean = float(v[0]) if np.all(v == v[0]) else float(v.mean())
    if std is None or callable(std):
        std = 0.0 if (v.size < 2 or np.all(v == v[0])) else float(v.std(ddof=1))
    return v, float(mean), float(std)


def welch_t_test(d_ref, d_eval, significance=DEFAULT_SIGNIFICANCE):
    """Two-sided Welch unequal-variance t-test on the two groups' K values."""
    if not 0.0 < significance < 1.0:
        raise InputError(f"significance must lie in (0, 1), got {significance}")
    v1, m1, s1 = _moments(d_ref)
    v2, m2, s2 = _moments(d_eval)
    n1, n2 = v1.size, v2.size
    if n1 < 2 or n2 < 2:
        raise InputError("Welch T-test needs at least 2 values per group")
    q1 = s1 * s1 / n1
    q2 = s2 * s2 / n2
    se2 = q1 + q2
    if se2 == 0.0:
        df = float(n1 + n2 - 2)
        crit = t_ppf(1.0 - significance / 2.0, df)
        if m1 == m2:
            return TTestResult(0.0, df, 1.0, significance, False, crit, True)
        z = math.copysign(math.inf, m1 - m2)
        return TTestResult(z, df, 0.0, significance, True, crit, True)
    z = (m1 - m2) / math.sqrt(se2)
    df = se2 * se2 / (q1 * q1 / (n1 - 1) + q2 * q2 / (n2 - 1))
    p = 1.0 if z == 0.0 else min(1.0, 2.0 * t_sf(abs(z), df))
    crit = t_ppf(1.0 - significance / 2.0, df)
    return TTestResult(float(z), float(df), float(p), significance, bool(p < significance),
                       float(crit))


def n_sigma_from_moments(mu_ref, sigma_ref, mu_eval):
    """N-Sigma from summary values: |mu_eval - mu_ref| / sigma_ref."""
    signed = mu_ref - mu_eval
    if sigma_ref < 0.0:
        raise InputError("reference standard deviation must be non-negative")
    if signed == 0.0:
        return NSigmaResult(0.0, mu_ref, mu_eval, sigma_ref, 0.0)
    if sigma_ref == 0.0:
        return NSigmaResult(math.inf, mu_ref, mu_eval, sigma_ref, signed, True)
    return NSigmaResult(abs(signed) / sigma_ref, mu_ref, mu_eval, sigma_ref, signed)


def n_sigma(d_ref, d_eval):
    """Distance between the two means in units of the reference standard deviation."""
    _, mu_ref, sigma_ref = _moments(d_ref)
    _, mu_eval, _ = _moments(d_eval)
    return n_sigma_from_moments(mu_ref, sigma_ref, mu_eval)
