"""Synthetic biased-score simulator.

Each group draws Gaussian genuine and impostor scores.  Bias is injected as a
shift of a group's genuine mean: a positive ``bias_shift`` widens the
genuine/impostor gap (favoured group, lower EER), a negative one narrows it
(disfavoured group).
"""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import InputError
from .ingest import LabeledScoreSet
from .protocol import AssessmentSettings, batch_distributions, report_from_batches
from .resample import derive_seed, group_key
from .risk import ReferencePolicy, RiskThresholds

DEFAULT_GENUINE_MEAN = 0.50
DEFAULT_GENUINE_STD = 0.10
DEFAULT_IMPOSTOR_MEAN = 0.09
DEFAULT_IMPOSTOR_STD = 0.10
DEFAULT_N = 20000

_PER_GROUP = ("genuine_mean", "genuine_std", "impostor_mean", "impostor_std", "bias_shift")


def _per_group(value, groups, name, default):
    # dicts may be partial; groups they leave out take the default
    if isinstance(value, dict):
        extra = [g for g in value if g not in groups]
        if extra:
            raise InputError(f"{name} names unknown groups {extra}")
        return {g: float(value.get(g, default)) for g in groups}
    return {g: float(value) for g in groups}


@dataclass(frozen=True)
class SyntheticConfig:
    groups: tuple
    genuine_mean: dict = field(default_factory=dict)
    genuine_std: dict = field(default_factory=dict)
    impostor_mean: dict = field(default_factory=dict)
    impostor_std: dict = field(default_factory=dict)
    bias_shift: dict = field(default_factory=dict)
    n_genuine: int = DEFAULT_N
    n_impostor: int = DEFAULT_N
    seed: int = 0

    def __post_init__(self):
        groups = tuple(self.groups)
        if not groups:
            raise InputError("synthetic config needs at least one group")
        if len(set(groups)) != len(groups) or any(not g for g in groups):
            raise InputError("group names must be unique and non-empty")
        object.__setattr__(self, "groups", groups)
        defaults = {"genuine_mean": DEFAULT_GENUINE_MEAN, "genuine_std": DEFAULT_GENUINE_STD,
                    "impostor_mean": DEFAULT_IMPOSTOR_MEAN,
                    "impostor_std": DEFAULT_IMPOSTOR_STD, "bias_shift": 0.0}
        for name in _PER_GROUP:
            object.__setattr__(self, name,
                               _per_group(getattr(self, name), groups, name, defaults[name]))
        for g in groups:
            if not self.genuine_mean[g] > self.impostor_mean[g]:
                raise InputError(f"group {g!r}: genuine mean must exceed impostor mean")
            if not (self.genuine_std[g] > 0 and self.impostor_std[g] > 0):
                raise InputError(f"group {g!r}: standard deviations must be positive")
        if int(self.n_genuine) < 1 or int(self.n_impostor) < 1:
            raise InputError("n_genuine and n_impostor must be positive")
        object.__setattr__(self, "n_genuine", int(self.n_genuine))
        object.__setattr__(self, "n_impostor", int(self.n_impostor))

    @classmethod
    def from_dict(cls, d):
        known = {"groups", "n_genuine", "n_impostor", "seed", *_PER_GROUP}
        unknown = set(d) - known
        if unknown:
            raise InputError(f"unknown synthetic config keys {sorted(unknown)}")
        if "groups" not in d:
            raise InputError("synthetic config needs a 'groups' list")
        kwargs = {k: d[k] for k in known if k in d}
        kwargs["groups"] = tuple(d["groups"])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def to_dict(self):
        out = {"groups": list(self.groups)}
        for name in _PER_GROUP:
            out[name] = dict(getattr(self, name))
        out.update(n_genuine=self.n_genuine, n_impostor=self.n_impostor, seed=self.seed)
        return out

    def effective_genuine_mean(self, group):
        return self.genuine_mean[group] + self.bias_shift[group]


def generate_scores(cfg):
    """One LabeledScoreSet per group; each group uses its own seeded stream."""
    out = []
    for g in cfg.groups:
        rng = np.random.default_rng(np.random.SeedSequence(int(cfg.seed),
                                                           spawn_key=(group_key(g),)))
        gen = rng.normal(cfg.effective_genuine_mean(g), cfg.genuine_std[g], cfg.n_genuine)
        imp = rng.normal(cfg.impostor_mean[g], cfg.impostor_std[g], cfg.n_impostor)
        out.append(LabeledScoreSet(g, gen, imp))
    return out


def batch_scores(cfg, batch):
    """Fresh scores for batch ``batch`` of a multi-batch run."""
    return generate_scores(replace(cfg, seed=derive_seed(cfg.seed, batch)))


def run_protocol_batches(cfg, settings=AssessmentSettings(), m=1, policy=ReferencePolicy(),
                         thresholds=RiskThresholds(), model_label="synthetic", workers=1):
    if m < 1:
        raise InputError(f"m must be at least 1, got {m}")
    batches = [batch_distributions(batch_scores(cfg, b), settings, b, workers)
               for b in range(m)]
    config = {"source": "synthetic", "synthetic": cfg.to_dict()}
    return report_from_batches(batches, settings, policy, thresholds, model_label, config)


def run_protocol(cfg, settings=AssessmentSettings(), m=1, policy=ReferencePolicy(),
                 thresholds=RiskThresholds(), model_label="synthetic", workers=1):
    """Generate -> bootstrap -> distributions -> metrics for M batches, averaged."""
    return run_protocol_batches(cfg, settings, m, policy, thresholds, model_label,
                                workers).mean_report
