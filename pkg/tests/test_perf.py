import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from sigmabias.errors import InputError, InsufficientDataError
from sigmabias.ingest import LabeledScoreSet
from sigmabias.perf import PerfKind, build_roc, compute_eer, performance, tpr_at_fpr


def S(gen, imp):
    return LabeledScoreSet("A", gen, imp)


# scores on a coarse grid so ties are common
grid_scores = st.lists(st.integers(0, 20).map(lambda i: i / 20), min_size=1, max_size=50)
real_scores = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=50)
any_scores = st.one_of(grid_scores, real_scores)


class TestBuildRoc:
    def test_separable(self):
        op = build_roc(S([0.9], [0.1])).at(0.5)
        assert (op.fmr, op.fnmr, op.tpr) == (0.0, 0.0, 1.0)

    def test_identical_distributions(self):
        roc = build_roc(S([0.3, 0.7], [0.3, 0.7]))
        np.testing.assert_array_equal(roc.fmr, 1.0 - roc.fnmr)

    def test_endpoints_and_sentinels(self):
        roc = build_roc(S([0.2, 0.4], [0.1, 0.3]))
        assert roc.thresholds[0] < 0.1 and roc.thresholds[-1] > 0.4
        assert (roc.fmr[0], roc.fnmr[0]) == (1.0, 0.0)
        assert (roc.fmr[-1], roc.fnmr[-1]) == (0.0, 1.0)
        np.testing.assert_array_equal(roc.thresholds[1:-1], [0.1, 0.2, 0.3, 0.4])

    def test_empty_side(self):
        with pytest.raises(InsufficientDataError):
            build_roc(S([0.5], []))

    def test_genuine_at_threshold_is_accepted(self):
        op = build_roc(S([0.5], [0.1])).at(0.5)
        assert op.fnmr == 0.0

    @settings(max_examples=200)
    @given(real_scores, real_scores)
    def test_counting_oracle_at_every_threshold(self, gen, imp):
        roc = build_roc(S(gen, imp))
        expected = oracles.sweep_rates(gen, imp)
        assert len(roc) == len(expected)
        for i, (_, fmr, fnmr) in enumerate(expected):
            assert roc.fmr[i] == fmr and roc.fnmr[i] == fnmr

    @given(any_scores, any_scores)
    def test_monotone(self, gen, imp):
        roc = build_roc(S(gen, imp))
        assert np.all(np.diff(roc.thresholds) > 0)
        assert np.all(np.diff(roc.fmr) <= 0)
        assert np.all(np.diff(roc.fnmr) >= 0)

    def test_csv_export(self):
        buf = io.StringIO()
        build_roc(S([0.9], [0.1])).to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "threshold,fmr,fnmr"
        assert len(lines) == 1 + 4


class TestEer:
    def test_one_third(self):
        # exhaustive sweep: fmr = fnmr = 1/3 on (0.6, 0.7]
        v = compute_eer(build_roc(S([0.9, 0.8, 0.6], [0.7, 0.4, 0.3])))
        assert v.value == pytest.approx(1 / 3, abs=1e-15)
        assert v.kind is PerfKind.EER

    def test_perfect_separation(self):
        assert compute_eer(build_roc(S([0.9, 0.8], [0.2, 0.1]))).value == 0.0

    def test_chance(self):
        assert compute_eer(build_roc(S([0.3, 0.7], [0.3, 0.7]))).value == 0.5

    def test_inverted_scores(self):
        assert compute_eer(build_roc(S([0.1, 0.2], [0.8, 0.9]))).value == 1.0

    def test_interpolated_crossing(self):
        # d goes from +1/2 to -1/2 between adjacent points -> midpoint
        v = compute_eer(build_roc(S([0.5, 0.9], [0.1, 0.6])))
        assert v.value == oracles.sweep_eer([0.5, 0.9], [0.1, 0.6])

    @settings(max_examples=300)
    @given(any_scores, any_scores)
    def test_oracle(self, gen, imp):
        v = compute_eer(build_roc(S(gen, imp))).value
        assert abs(v - oracles.sweep_eer(gen, imp)) <= 1e-9
        assert 0.0 <= v <= 1.0

    @given(st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=30),
           st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=30))
    def test_dominance_bounds_eer(self, gen, imp):
        # shifting genuine above every impostor score gives stochastic dominance
        gen = [g + 1.0 + max(imp) for g in gen]
        assert compute_eer(build_roc(S(gen, imp))).value <= 0.5

    @given(any_scores, any_scores, st.sampled_from([-3.0, -0.25, 0.5, 2.0]))
    def test_shift_invariance(self, gen, imp, c):
        a = build_roc(S(gen, imp))
        b = build_roc(S([g + c for g in gen], [i + c for i in imp]))
        # exact when shifting keeps the order of distinct values (true on these scales)
        if len(a) == len(b):
            assert compute_eer(a).value == pytest.approx(compute_eer(b).value, abs=1e-12)
            assert tpr_at_fpr(a, 0.1).value == pytest.approx(tpr_at_fpr(b, 0.1).value,
                                                              abs=1e-12)


class TestTpr:
    def test_perfect_separation(self):
        assert tpr_at_fpr(build_roc(S([0.9, 0.8], [0.2, 0.1])), 0.01).value == 1.0

    def test_chance_level(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=200)
        v = tpr_at_fpr(build_roc(S(x, x)), 0.01)
        assert v.value == pytest.approx(0.01, abs=1e-12)
        assert v.operating_fpr == 0.01

    def test_fifty_scores_target_010(self):
        rng = np.random.default_rng(11)
        gen = rng.normal(1.0, 1.0, 50)
        imp = rng.normal(0.0, 1.0, 50)
        v = tpr_at_fpr(build_roc(S(gen, imp)), 0.10).value
        assert abs(v - oracles.sweep_tpr(gen, imp, 0.10)) <= 1e-9

    @pytest.mark.parametrize("target", [0.0, 1.0, -0.1, 1.5])
    def test_target_out_of_range(self, target):
        with pytest.raises(InputError):
            tpr_at_fpr(build_roc(S([0.9], [0.1])), target)

    @settings(max_examples=300)
    @given(any_scores, any_scores, st.sampled_from([0.01, 0.05, 0.1, 0.25, 0.5, 0.9]))
    def test_oracle(self, gen, imp, target):
        v = tpr_at_fpr(build_roc(S(gen, imp)), target).value
        assert abs(v - oracles.sweep_tpr(gen, imp, target)) <= 1e-9
        assert 0.0 <= v <= 1.0


def test_performance_dispatch():
    s = S([0.9, 0.8, 0.6], [0.7, 0.4, 0.3])
    assert performance(s, "eer").value == pytest.approx(1 / 3)
    assert performance(s, PerfKind.TPR, 0.5).kind is PerfKind.TPR
