import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigmabias import _kernels as K

scores = st.lists(st.one_of(st.integers(0, 10).map(float),
                            st.floats(-3, 3, allow_nan=False)), min_size=1, max_size=60)


@settings(max_examples=200)
@given(scores, scores)
def test_roc_backends_bit_identical(gen, imp):
    g = np.sort(np.array(gen))
    i = np.sort(np.array(imp))
    a = K.loop_roc_arrays(g, i)
    b = K.numpy_roc_arrays(g, i)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)
    assert K.loop_eer_from_curve(*a) == K.numpy_eer_from_curve(*b)
    for target in (0.01, 0.1, 0.5):
        assert K.loop_tpr_from_curve(*a, target) == K.numpy_tpr_from_curve(*b, target)


@pytest.mark.parametrize("kind", [K.KIND_EER, K.KIND_TPR])
def test_subset_kernel_backends_bit_identical(kind):
    rng = np.random.default_rng(0)
    gen = rng.normal(1.0, 0.5, 800)
    imp = rng.normal(0.0, 0.5, 900)
    gi = rng.integers(0, gen.size, (12, 300))
    ii = rng.integers(0, imp.size, (12, 300))
    a = K.loop_subset_performance(gen, imp, gi, ii, kind, 0.01)
    b = K.numpy_subset_performance(gen, imp, gi, ii, kind, 0.01)
    np.testing.assert_array_equal(a, b)


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    if flag is None:
        env.pop("SIGMABIAS_NO_NUMBA", None)
    else:
        env["SIGMABIAS_NO_NUMBA"] = flag
    out = subprocess.run([sys.executable, "-c",
                          "import sigmabias._kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


@pytest.mark.parametrize("flag", ["1", "true", "yes"])
def test_env_flag_forces_numpy(flag):
    assert _backend_in_subprocess(flag) == "numpy"


def test_default_backend_uses_numba_when_available():
    pytest.importorskip("numba")
    assert _backend_in_subprocess(None) == "numba"
    assert _backend_in_subprocess("0") == "numba"


def test_cli_report_identical_across_backends(tmp_path):
    pytest.importorskip("numba")
    from sigmabias.ingest import LabeledScoreSet, write_score_file
    rng = np.random.default_rng(2)
    scores = tmp_path / "s.csv"
    write_score_file([LabeledScoreSet(g, rng.normal(0.5, 0.1, 3000), rng.normal(0.1, 0.1, 3000))
                      for g in ("A", "B", "C")], scores)
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, SIGMABIAS_NO_NUMBA=flag)
        res = subprocess.run([sys.executable, "-m", "sigmabias", "assess", "--scores",
                              str(scores), "--seed", "8", "--k", "10", "--subset-size-eer",
                              "1000", "--subset-size-tpr", "1000"],
                             env=env, capture_output=True, check=True)
        outs.append(res.stdout)
    assert outs[0] == outs[1]
