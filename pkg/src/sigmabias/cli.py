"""Command-line interface: ``sigmabias {assess,calibrate,normality,simulate}``.

Diagnostics go to stderr as one JSON object per line.  Exit codes: 0 success,
2 input error, 3 insufficient data, 4 numeric degeneracy.
"""

import argparse
import csv
import io
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .biasmetrics import DEFAULT_SIGNIFICANCE, DEFAULT_SP_ALPHA, SpConfig, SpMode
from .errors import InputError, SigmaBiasError
from .ingest import COSINE, MEASURES, LabeledScoreSet, load_score_sets, write_score_file
from .normality import DEFAULT_NORMALITY_THRESHOLD, MIN_N, shapiro_wilk
from .perf import DEFAULT_TARGET_FPR, PerfKind
from .protocol import AssessmentSettings, assess_score_sets
from .resample import (DEFAULT_CANDIDATE_SIZES, DEFAULT_K, DEFAULT_STABILITY_EPSILON,
                       DEFAULT_SUBSET_COUNTS, DEFAULT_SUBSET_SIZE_EER,
                       DEFAULT_SUBSET_SIZE_TPR, BootstrapConfig, calibrate_subset_size,
                       derive_seed, group_key, performance_distribution)
from .risk import ReferencePolicy, RiskThresholds
from .synth import SyntheticConfig, batch_scores, run_protocol

EXIT_OK = 0
EXIT_INPUT = 2


def diag(level, code, message, **extra):
    record = {"level": level, "code": code, "message": message}
    record.update(extra)
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _seed(value):
    if value is None:
        value = secrets.randbits(63)
        diag("info", "I_SEED", "no --seed given; selected one", seed=value)
    return value


def _write(path, text, inputs=()):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path).resolve()
    if any(target == Path(p).resolve() for p in inputs if p):
        raise InputError(f"refusing to overwrite input file {path}")
    with open(target, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# --------------------------------------------------------------------------
# argument groups

def _add_score_inputs(p, embeddings=True):
    p.add_argument("--scores", help="score CSV (group,label,score)")
    if embeddings:
        p.add_argument("--embeddings", help="embedding CSV (subject_id,group,v0,...)")
        p.add_argument("--pairs", help="pair CSV (id_a,id_b,label)")
        p.add_argument("--measure", choices=MEASURES, default=COSINE)


def _add_protocol_options(p):
    p.add_argument("--k", type=int, default=DEFAULT_K, help="bootstrap subsets per group")
    p.add_argument("--subset-size-eer", type=int, default=DEFAULT_SUBSET_SIZE_EER)
    p.add_argument("--subset-size-tpr", type=int, default=DEFAULT_SUBSET_SIZE_TPR)
    p.add_argument("--target-fpr", type=float, default=DEFAULT_TARGET_FPR)
    p.add_argument("--significance", type=float, default=DEFAULT_SIGNIFICANCE)
    p.add_argument("--sp-alpha", type=float, default=DEFAULT_SP_ALPHA,
                   help="weight of false matches in full-mode SP")
    p.add_argument("--sp-mode", choices=[m.value for m in SpMode],
                   default=SpMode.SIMPLIFIED_AT_EER.value)
    p.add_argument("--risk-thresholds", default="1,2,3",
                   help="ascending N-Sigma cut-points")
    p.add_argument("--risk-labels", default=None,
                   help="comma-separated tier labels (one more than cut-points)")
    p.add_argument("--reference-eer", default=None, help="force the EER reference group")
    p.add_argument("--reference-tpr", default=None, help="force the TPR reference group")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--label", default=None, help="model label in the report")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", default=None, help="report path (default: stdout)")
    p.add_argument("--csv-output", default=None, help="additionally write the CSV flattening")


def _settings(args, seed):
    return AssessmentSettings(
        k=args.k, subset_size_eer=args.subset_size_eer, subset_size_tpr=args.subset_size_tpr,
        target_fpr=args.target_fpr, significance=args.significance,
        sp=SpConfig(args.sp_alpha, SpMode(args.sp_mode)), seed=seed)


def _policy(args):
    return ReferencePolicy(args.reference_eer, args.reference_tpr)


def _thresholds(args):
    return RiskThresholds.parse(args.risk_thresholds, args.risk_labels)


def _load_sets(args):
    if args.scores is None and getattr(args, "embeddings", None) is None:
        raise InputError("give --scores, or --embeddings with --pairs")
    return load_score_sets(args.scores, getattr(args, "embeddings", None),
                           getattr(args, "pairs", None),
                           getattr(args, "measure", COSINE))


def _inputs(args):
    return [getattr(args, n, None) for n in ("scores", "embeddings", "pairs", "config")]


def _emit_report(report, args):
    for c in report.comparisons:
        for flag in c.flags:
            diag("warning", "W_" + flag.upper(), f"group {c.group!r}: {flag.replace('_', ' ')}",
                 group=c.group)
    text = report.to_json() if args.format == "json" else report.to_csv()
    _write(args.output, text, _inputs(args))
    if args.csv_output:
        _write(args.csv_output, report.to_csv(), _inputs(args))


# --------------------------------------------------------------------------
# commands

def cmd_assess(args):
    seed = _seed(args.seed)
    sets = _load_sets(args)
    settings = _settings(args, seed)
    source = {"scores": args.scores} if args.scores else \
        {"embeddings": args.embeddings, "pairs": args.pairs, "measure": args.measure}
    report = assess_score_sets(sets, settings, _policy(args), _thresholds(args),
                               args.label or "assessed", {"source": source},
                               workers=args.threads)
    _emit_report(report, args)
    return EXIT_OK


def _pooled(sets, group):
    if group is not None:
        for s in sets:
            if s.group == group:
                return s
        raise InputError(f"group {group!r} not found")
    if not sets:
        raise InputError("score file has no rows")
    return LabeledScoreSet("all", np.concatenate([s.genuine for s in sets]),
                           np.concatenate([s.impostor for s in sets]))


def cmd_calibrate(args):
    seed = _seed(args.seed)
    score_set = _pooled(_load_sets(args), args.group)
    curve = calibrate_subset_size(score_set, args.sizes, args.subset_counts,
                                  PerfKind.parse(args.kind), args.epsilon, seed,
                                  args.target_fpr, args.threads)
    buf = io.StringIO()
    curve.to_csv(buf)
    _write(args.output, buf.getvalue(), _inputs(args))
    diag("warning" if curve.warning else "info",
         "W_NOT_STABLE" if curve.warning else "I_RECOMMENDED_SIZE",
         f"recommended subset size {curve.recommended_size}",
         recommended_size=curve.recommended_size, kind=curve.kind.value, seed=seed)
    return EXIT_OK


def cmd_normality(args):
    if args.k < MIN_N:
        raise InputError(f"normality check needs K >= {MIN_N}, got {args.k}")
    seed = _seed(args.seed)
    sets = _load_sets(args)
    if not sets:
        raise InputError("score file has no rows")
    rows, values = [], []
    for s in sets:
        cfg = BootstrapConfig(args.k, args.subset_size,
                              derive_seed(seed, 0, group_key(s.group), PerfKind.EER.code))
        dist = performance_distribution(s, cfg, PerfKind.EER, workers=args.threads)
        res = shapiro_wilk(dist.values, args.threshold)
        rows.append((s.group, res))
        values.extend((s.group, i, v) for i, v in enumerate(dist.values))

    if args.format == "json":
        text = json.dumps({"seed": seed, "k": args.k, "subset_size": args.subset_size,
                           "results": [{"group": g, "n": r.n, "w_statistic": r.w_statistic,
                                        "p_value": r.p_value, "is_gaussian": r.is_gaussian,
                                        "threshold": r.threshold} for g, r in rows]},
                          indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("group", "n", "w_statistic", "p_value", "is_gaussian", "threshold"))
        for g, r in rows:
            w.writerow((g, r.n, repr(r.w_statistic), repr(r.p_value),
                        str(r.is_gaussian).lower(), repr(r.threshold)))
        text = buf.getvalue()
    _write(args.output, text, _inputs(args))

    if args.values_output:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("group", "subset", "eer"))
        for g, i, v in values:
            w.writerow((g, i, repr(float(v))))
        _write(args.values_output, buf.getvalue(), _inputs(args))
    return EXIT_OK


def cmd_simulate(args):
    seed = _seed(args.seed)
    cfg = SyntheticConfig.from_json(args.config)
    if args.synth_seed is not None:
        cfg = SyntheticConfig.from_dict({**cfg.to_dict(), "seed": args.synth_seed})
    if args.export_scores:
        buf = io.StringIO()
        write_score_file(batch_scores(cfg, 0), buf)
        _write(args.export_scores, buf.getvalue(), _inputs(args))
    report = run_protocol(cfg, _settings(args, seed), args.m, _policy(args),
                          _thresholds(args), args.label or "synthetic", workers=args.threads)
    _emit_report(report, args)
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="sigmabias",
        description="Bias assessment of verification scores with bootstrapped "
                    "EER/TPR distributions, SP, EOP, Welch T-test and N-Sigma.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="bias report for measured scores")
    _add_score_inputs(p)
    _add_protocol_options(p)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("calibrate", help="bootstrap variability by subset size")
    _add_score_inputs(p)
    p.add_argument("--group", default=None, help="calibrate one group (default: all pooled)")
    p.add_argument("--sizes", type=_int_list, default=list(DEFAULT_CANDIDATE_SIZES))
    p.add_argument("--subset-counts", type=_int_list, default=list(DEFAULT_SUBSET_COUNTS))
    p.add_argument("--kind", choices=("eer", "tpr"), default="eer")
    p.add_argument("--epsilon", type=float, default=DEFAULT_STABILITY_EPSILON)
    p.add_argument("--target-fpr", type=float, default=DEFAULT_TARGET_FPR)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("normality", help="Shapiro-Wilk check of bootstrapped EERs")
    _add_score_inputs(p)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--subset-size", type=int, default=DEFAULT_SUBSET_SIZE_EER)
    p.add_argument("--threshold", "--normality-threshold", dest="threshold", type=float,
                   default=DEFAULT_NORMALITY_THRESHOLD)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--values-output", default=None,
                   help="CSV of the K EER values per group (group,subset,eer)")
    p.set_defaults(func=cmd_normality)

    p = sub.add_parser("simulate", help="run the protocol on synthetic biased scores")
    p.add_argument("--config", required=True, help="synthetic config JSON")
    p.add_argument("--m", type=int, default=20, help="number of batches")
    p.add_argument("--synth-seed", type=int, default=None,
                   help="override the config's score-generation seed")
    p.add_argument("--export-scores", default=None,
                   help="write batch-0 scores as a score CSV")
    _add_protocol_options(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SigmaBiasError as exc:
        diag("error", exc.code, str(exc))
        return exc.exit_status
    except OSError as exc:
        diag("error", "E_IO", f"{exc.strerror or exc}: {exc.filename or ''}".strip())
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
