from statistics import NormalDist

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigmabias.errors import DegenerateInputError, InputError
from sigmabias.normality import shapiro_coefficients, shapiro_wilk

# Published test vectors (Shapiro & Wilk 1965 example, and two classic
# 20-point samples with their AS R94 reference values).
SW1965 = [0.139, 0.157, 0.175, 0.256, 0.344, 0.413, 0.503, 0.577, 0.614, 0.655, 0.954,
          1.392, 1.557, 1.648, 1.690, 1.994, 2.174, 2.206, 3.245, 3.510, 3.571, 4.354,
          4.980, 6.084, 8.351]
X1 = [0.11, 7.87, 4.61, 10.14, 7.95, 3.14, 0.46, 4.43, 0.21, 4.75, 0.71, 1.52, 3.24,
      0.93, 0.42, 4.97, 9.53, 4.55, 0.47, 6.66]
X2 = [1.36, 1.14, 2.92, 2.55, 1.46, 1.06, 5.27, -1.11, 3.48, 1.10, 0.88, -0.51, 1.46,
      0.52, 6.20, 1.69, 0.08, 3.67, 2.81, 3.49]


@pytest.mark.parametrize("sample, w, p, p_tol", [
    (SW1965, 0.83467, 0.000914, 1e-5),
    (X1, 0.90047299861907959, 0.042089745402336121, 1e-6),
    (X2, 0.9590270, 0.52460, 1e-3),
])
def test_published_vectors(sample, w, p, p_tol):
    res = shapiro_wilk(sample)
    assert res.w_statistic == pytest.approx(w, abs=1e-4)
    assert res.p_value == pytest.approx(p, abs=p_tol)


def test_gaussian_quantile_sample():
    nd = NormalDist()
    x = [nd.inv_cdf((i - 0.5) / 20) for i in range(1, 21)]
    res = shapiro_wilk(x)
    assert res.w_statistic > 0.95
    assert res.p_value > 0.05
    assert res.is_gaussian


def test_uniform_grid_matches_reference():
    # reference implementation gives W = 0.955583, p = 0.058092 for 1..50
    res = shapiro_wilk(np.arange(1, 51))
    assert res.w_statistic == pytest.approx(0.9555826875589973, abs=1e-6)
    assert res.p_value == pytest.approx(0.058091862177350316, abs=1e-5)


def test_against_scipy_reference():
    stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(2024)
    for n in [3, 4, 5, 6, 7, 11, 12, 13, 20, 50, 137, 1000, 5000]:
        for power in (1, 2, 3):
            x = rng.normal(size=n) ** power
            ref = stats.shapiro(x)
            res = shapiro_wilk(x)
            # scipy's swilk runs in single precision
            assert res.w_statistic == pytest.approx(ref.statistic, abs=1e-5)
            assert res.p_value == pytest.approx(ref.pvalue, abs=1e-5)


def test_n3_exact():
    res = shapiro_wilk([1.0, 2.0, 3.0])
    assert res.w_statistic == pytest.approx(1.0)
    assert res.p_value == pytest.approx(1.0)


def test_threshold_rule():
    res = shapiro_wilk(X2, threshold=0.5)
    assert res.is_gaussian == (res.p_value > 0.5)
    assert shapiro_wilk(X2, threshold=0.6).is_gaussian is False


@pytest.mark.parametrize("n", [0, 2, 5001])
def test_size_limits(n):
    with pytest.raises(InputError):
        shapiro_wilk(np.linspace(0, 1, n))


def test_constant_sample():
    with pytest.raises(DegenerateInputError):
        shapiro_wilk([2.0] * 10)


def test_coefficients_normalised():
    for n in (3, 4, 6, 25, 500):
        a = shapiro_coefficients(n)
        full = np.concatenate([a, a])
        assert np.sum(full ** 2) == pytest.approx(1.0, abs=2e-3)
        assert np.all(np.diff(a) <= 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=3, max_size=200))
def test_w_in_unit_interval(sample):
    if max(sample) - min(sample) < 1e-6 * max(1.0, max(abs(v) for v in sample)):
        return
    res = shapiro_wilk(sample)
    assert 0.0 < res.w_statistic <= 1.0
    assert 0.0 <= res.p_value <= 1.0
