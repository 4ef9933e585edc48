import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from sigmabias.biasmetrics import (SpConfig, SpMode, eop, n_sigma, n_sigma_from_moments,
                                   sp_full, sp_full_subsets, sp_simplified, welch_t_test)
from sigmabias.errors import InputError
from sigmabias.resample import PerfDistribution

rates = st.floats(0.0, 1.0, allow_nan=False)


def paired_vectors(min_size=1, max_size=30):
    return st.integers(min_size, max_size).flatmap(
        lambda k: st.tuples(st.lists(rates, min_size=k, max_size=k),
                            st.lists(rates, min_size=k, max_size=k)))


class TestSp:
    def test_identical_is_one(self):
        assert sp_simplified([0.02, 0.03], [0.02, 0.03]).value == 1.0

    def test_example(self):
        assert sp_simplified([0.02, 0.02], [0.03, 0.05]).value == pytest.approx(0.98, abs=1e-12)

    def test_unequal_k(self):
        with pytest.raises(InputError):
            sp_simplified([0.1, 0.2], [0.1])
        with pytest.raises(InputError):
            sp_simplified([], [])

    @pytest.mark.parametrize("alpha, a, b, expected", [
        (1.0, 0.2, 0.9, 0.8),
        (0.5, 0.05, 0.05, 0.95),
        (0.3, 0.1, 0.2, 0.83),
    ])
    def test_full_examples(self, alpha, a, b, expected):
        assert sp_full(a, b, SpConfig(alpha)) == pytest.approx(expected, abs=1e-12)

    def test_alpha_out_of_range(self):
        with pytest.raises(InputError):
            SpConfig(1.5)
        with pytest.raises(ValueError):
            SpConfig(0.5, "bogus")

    def test_mode_parsed(self):
        assert SpConfig(0.5, "full").mode is SpMode.FULL

    def test_full_subsets_average(self):
        res = sp_full_subsets([0.1, 0.2], [0.1, 0.1], [0.2, 0.2], [0.3, 0.1],
                              SpConfig(0.5), threshold=0.4)
        # subset 1: 1 - (0.05 + 0.1); subset 2: 1 - 0
        assert res.value == pytest.approx((0.85 + 1.0) / 2, abs=1e-12)
        assert res.operating_point == "tau=0.4"
        same = sp_full_subsets([0.1], [0.2], [0.1], [0.2])
        assert same.value == 1.0

    @given(paired_vectors())
    def test_bounds_and_symmetry(self, pair):
        r, e = pair
        v = sp_simplified(r, e).value
        assert 0.0 <= v <= 1.0
        assert v == sp_simplified(e, r).value

    @given(paired_vectors(), st.integers(0, 29), st.floats(0.0, 0.5))
    def test_widening_gap_never_raises(self, pair, idx, extra):
        r, e = pair
        idx %= len(r)
        wider = list(e)
        wider[idx] = e[idx] + extra if e[idx] >= r[idx] else e[idx] - extra
        assume(0.0 <= wider[idx] <= 1.0)
        assert sp_simplified(r, wider).value <= sp_simplified(r, e).value + 1e-15


class TestEop:
    def test_example(self):
        res = eop([0.80, 0.82], [0.78, 0.76], target_fpr=0.01, reference="A", evaluated="B")
        assert res.value == pytest.approx(0.96, abs=1e-12)
        assert res.operating_point == "FPR=0.01"
        assert (res.reference, res.evaluated) == ("A", "B")

    def test_identical_is_one(self):
        assert eop([0.9, 0.95], [0.9, 0.95]).value == 1.0

    @given(paired_vectors())
    def test_bounds_and_symmetry(self, pair):
        r, e = pair
        v = eop(r, e).value
        assert 0.0 <= v <= 1.0
        assert v == eop(e, r).value

    def test_accepts_distributions(self):
        a = PerfDistribution("A", "TPR_at_FPR", [0.8, 0.82], 0.01)
        b = PerfDistribution("B", "TPR_at_FPR", [0.78, 0.76], 0.01)
        assert eop(a, b).value == pytest.approx(0.96, abs=1e-12)


class TestWelch:
    def test_identical_constant(self):
        res = welch_t_test([0.02] * 5, [0.02] * 5)
        assert (res.z, res.p_value, res.reject_null) == (0.0, 1.0, False)
        assert res.degenerate_variance

    def test_constant_distinct(self):
        res = welch_t_test([0.02] * 5, [0.03] * 5)
        assert res.p_value == 0.0 and res.reject_null and res.degenerate_variance
        assert res.z == -math.inf

    def test_identical_varied(self):
        res = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert (res.z, res.p_value) == (0.0, 1.0)
        assert not res.degenerate_variance

    def test_small_example(self):
        x, y = [1, 2, 3, 4, 5], [2, 3, 4, 5, 6]
        z, df, p = oracles.welch_mp(x, y)
        res = welch_t_test(x, y)
        assert res.z == pytest.approx(-1.0, abs=1e-12)
        assert res.degrees_of_freedom == pytest.approx(8.0, abs=1e-12)
        assert res.p_value == pytest.approx(p, rel=1e-9)
        assert res.p_value == pytest.approx(0.3465935, abs=1e-6)
        assert not res.reject_null

    def test_critical_value(self):
        res = welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
        assert res.critical_value == pytest.approx(2.306004, abs=1e-6)

    def test_too_few_values(self):
        with pytest.raises(InputError):
            welch_t_test([1.0], [1.0, 2.0])
        with pytest.raises(InputError):
            welch_t_test([1.0, 2.0], [1.0, 2.0], significance=1.0)

    @settings(max_examples=200)
    @given(st.lists(st.floats(0, 1, allow_nan=False), min_size=2, max_size=40),
           st.lists(st.floats(0, 1, allow_nan=False), min_size=2, max_size=40))
    def test_against_mpmath(self, x, y):
        assume(np.std(x) > 1e-6 or np.std(y) > 1e-6)
        res = welch_t_test(x, y)
        z, df, p = oracles.welch_mp(x, y)
        assert res.z == pytest.approx(z, rel=1e-8, abs=1e-10)
        assert res.degrees_of_freedom == pytest.approx(df, rel=1e-8)
        assert res.p_value == pytest.approx(p, rel=1e-6, abs=1e-12)
        assert res.reject_null == (res.p_value < 0.05)

    @given(st.lists(st.floats(0, 1, allow_nan=False), min_size=2, max_size=20),
           st.lists(st.floats(0, 1, allow_nan=False), min_size=2, max_size=20))
    def test_swap_symmetry(self, x, y):
        assume(np.std(x) > 1e-6 or np.std(y) > 1e-6)
        a, b = welch_t_test(x, y), welch_t_test(y, x)
        assert a.z == pytest.approx(-b.z, rel=1e-12, abs=1e-15)
        assert a.p_value == pytest.approx(b.p_value, rel=1e-12)

    def test_scipy_agreement(self):
        stats = pytest.importorskip("scipy.stats")
        rng = np.random.default_rng(4)
        for _ in range(50):
            x = rng.normal(0.02, 0.002, 20)
            y = rng.normal(0.021, 0.004, 20)
            ref = stats.ttest_ind(x, y, equal_var=False)
            assert welch_t_test(x, y).p_value == pytest.approx(ref.pvalue, rel=1e-9)


class TestNSigma:
    def test_example(self):
        res = n_sigma_from_moments(0.02, 0.01, 0.05)
        assert res.n == pytest.approx(3.0, abs=1e-12)
        assert res.signed_difference == pytest.approx(-0.03)

    def test_published_row(self):
        # reference EER 0.0158 (sigma 0.00196), evaluated 0.0207
        assert n_sigma_from_moments(0.0158, 0.00196, 0.0207).n == pytest.approx(2.50, abs=0.01)

    def test_from_distribution(self):
        ref = [0.01, 0.03]
        res = n_sigma(ref, [0.05, 0.05])
        assert res.n == pytest.approx(0.03 / np.std(ref, ddof=1), rel=1e-12)
        assert res.mu_ref == pytest.approx(0.02)

    def test_identical_is_zero(self):
        assert n_sigma([0.1, 0.2, 0.3], [0.1, 0.2, 0.3]).n == 0.0
        assert n_sigma([0.1] * 4, [0.1] * 4).n == 0.0

    def test_zero_reference_spread(self):
        res = n_sigma([0.1] * 4, [0.2, 0.3])
        assert res.n == math.inf and res.infinite_separation

    def test_negative_sigma(self):
        with pytest.raises(InputError):
            n_sigma_from_moments(0.0, -1.0, 1.0)

    @given(st.floats(-1, 1), st.floats(1e-4, 1), st.floats(-1, 1),
           st.floats(1e-3, 1e3), st.floats(-10, 10))
    def test_affine_invariance(self, mr, sr, me, scale, shift):
        base = n_sigma_from_moments(mr, sr, me).n
        moved = n_sigma_from_moments(mr * scale + shift, sr * scale, me * scale + shift).n
        assert moved == pytest.approx(base, rel=1e-9, abs=1e-9)

    @given(st.floats(-1, 1), st.floats(1e-4, 1), st.floats(0, 1), st.floats(0, 1))
    def test_monotone_in_distance(self, mr, sr, d1, d2):
        lo, hi = sorted((d1, d2))
        assert (n_sigma_from_moments(mr, sr, mr + lo).n
                <= n_sigma_from_moments(mr, sr, mr + hi).n + 1e-12)
