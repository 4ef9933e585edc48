"""Bias assessment for score-based verification systems.

Bootstrapped EER / TPR@FPR distributions per demographic group, compared with
Statistical Parity, Equality of Opportunity, a Welch T-test and the N-Sigma
distance, with N-Sigma mapped onto configurable risk tiers.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .biasmetrics import (NSigmaResult, PointwiseResult, SpConfig, SpMode, TTestResult, eop,
                          n_sigma, sp_full, sp_full_subsets, sp_simplified, welch_t_test)
from .errors import (AggregationError, DataError, DegenerateInputError, DimensionError,
                     InputError, InsufficientDataError, ParseError, SigmaBiasError)
from .ingest import (Embedding, LabeledScoreSet, build_score_sets, compute_similarity,
                     parse_embedding_file, parse_pair_file, parse_score_file,
                     write_score_file)
from .normality import NormalityResult, shapiro_wilk
from .perf import (OperatingPoint, PerfKind, PerformanceValue, RocCurve, build_roc,
                   compute_eer, tpr_at_fpr)
from .protocol import AssessmentSettings, assess_score_sets
from .resample import (BatchAggregate, BootstrapConfig, PerfDistribution, VariabilityCurve,
                       aggregate_batches, bootstrap_subsets, calibrate_subset_size,
                       performance_distribution)
from .risk import (BiasReport, GroupComparison, ReferencePolicy, RiskThresholds,
                   assemble_report, map_risk_level, select_reference)
from .special import t_cdf
from .synth import SyntheticConfig, generate_scores, run_protocol

__all__ = [
    '__version__',
    'BACKEND',
    'NSigmaResult',
    'PointwiseResult',
    'SpConfig',
    'SpMode',
    'TTestResult',
    'eop',
    'n_sigma',
    'sp_full',
    'sp_full_subsets',
    'sp_simplified',
    'welch_t_test',
    'AggregationError',
    'DataError',
    'DegenerateInputError',
    'DimensionError',
    'InputError',
    'InsufficientDataError',
    'ParseError',
    'SigmaBiasError',
    'Embedding',
    'LabeledScoreSet',
    'build_score_sets',
    'compute_similarity',
    'parse_embedding_file',
    'parse_pair_file',
    'parse_score_file',
    'write_score_file',
    'NormalityResult',
    'shapiro_wilk',
    'OperatingPoint',
    'PerfKind',
    'PerformanceValue',
    'RocCurve',
    'build_roc',
    'compute_eer',
    'tpr_at_fpr',
    'AssessmentSettings',
    'assess_score_sets',
    'BatchAggregate',
    'BootstrapConfig',
    'PerfDistribution',
    'VariabilityCurve',
    'aggregate_batches',
    'bootstrap_subsets',
    'calibrate_subset_size',
    'performance_distribution',
    'BiasReport',
    'GroupComparison',
    'ReferencePolicy',
    'RiskThresholds',
    'assemble_report',
    'map_risk_level',
    'select_reference',
    't_cdf',
    'SyntheticConfig',
    'generate_scores',
    'run_protocol',
]
