"""Hot numeric kernels: empirical ROC sweep, EER / TPR@FMR read-out, and the
fused per-subset evaluation used by bootstrapping.

Two implementations of every kernel live here:

* ``loop_*``   explicit loops, compiled with ``numba.njit`` when numba is
  importable (pure Python otherwise, correct but slow);
* ``numpy_*``  vectorised numpy.

The public names (``roc_arrays``, ``eer_from_curve``, ``tpr_from_curve``,
``subset_performance``) are bound to the loop kernels when numba is available
and to the numpy kernels otherwise.  Setting ``SIGMABIAS_NO_NUMBA=1`` in the
environment before import forces the numpy path.  Row sorting always uses
numpy (numba's sort is an order of magnitude slower); only the sweep over
sorted rows is compiled.

Both paths count with integers and divide once, so they return bit-identical
rates.
"""

import os

import numpy as np

KIND_EER = 0
KIND_TPR = 1


def _env_disabled():
    flag = os.environ.get("SIGMABIAS_NO_NUMBA", "").strip().lower()
    return flag not in ("", "0", "false", "no", "off")


try:
    if _env_disabled():
        raise ImportError("numba disabled by SIGMABIAS_NO_NUMBA")
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def _njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


BACKEND = "numba" if HAVE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# loop kernels

@_njit(cache=True, nogil=True)
def loop_roc_arrays(gen_sorted, imp_sorted):
    n_gen = gen_sorted.shape[0]
    n_imp = imp_sorted.shape[0]
    cap = n_gen + n_imp + 2
    thr = np.empty(cap, dtype=np.float64)
    fmr = np.empty(cap, dtype=np.float64)
    fnmr = np.empty(cap, dtype=np.float64)

    lo = min(gen_sorted[0], imp_sorted[0])
    hi = max(gen_sorted[n_gen - 1], imp_sorted[n_imp - 1])
    thr[0] = np.nextafter(lo, -np.inf)
    fmr[0] = n_imp / n_imp
    fnmr[0] = 0 / n_gen

    i = 0  # genuine scores strictly below the current threshold
    j = 0  # impostor scores strictly below the current threshold
    k = 1
    while i < n_gen or j < n_imp:
        if j >= n_imp or (i < n_gen and gen_sorted[i] <= imp_sorted[j]):
            v = gen_sorted[i]
        else:
            v = imp_sorted[j]
        thr[k] = v
        fmr[k] = (n_imp - j) / n_imp
        fnmr[k] = i / n_gen
        k += 1
        while i < n_gen and gen_sorted[i] == v:
            i += 1
        while j < n_imp and imp_sorted[j] == v:
            j += 1

    thr[k] = np.nextafter(hi, np.inf)
    fmr[k] = 0 / n_imp
    fnmr[k] = n_gen / n_gen
    k += 1
    return thr[:k], fmr[:k], fnmr[:k]


@_njit(cache=True, nogil=True)
def loop_eer_from_curve(thr, fmr, fnmr):
    n = fmr.shape[0]
    for idx in range(1, n):
        d = fmr[idx] - fnmr[idx]
        if d == 0.0:
            return fmr[idx], thr[idx]
        if d < 0.0:
            d_prev = fmr[idx - 1] - fnmr[idx - 1]
            t = d_prev / (d_prev - d)
            eer = fmr[idx - 1] + t * (fmr[idx] - fmr[idx - 1])
            tau = thr[idx - 1] + t * (thr[idx] - thr[idx - 1])
            return eer, tau
    return fmr[n - 1], thr[n - 1]


@_njit(cache=True, nogil=True)
def loop_tpr_from_curve(thr, fmr, fnmr, target):
    n = fmr.shape[0]
    for idx in range(n):
        if fmr[idx] <= target:
            tpr = 1.0 - fnmr[idx]
            if idx == 0 or fmr[idx] == target:
                return tpr, thr[idx]
            tpr_prev = 1.0 - fnmr[idx - 1]
            t = (fmr[idx - 1] - target) / (fmr[idx - 1] - fmr[idx])
            return tpr_prev + t * (tpr - tpr_prev), thr[idx]
    return 1.0 - fnmr[n - 1], thr[n - 1]


@_njit(cache=True, nogil=True)
def loop_sorted_performance(gen_rows, imp_rows, kind, target):
    k = gen_rows.shape[0]
    out = np.empty(k, dtype=np.float64)
    for r in range(k):
        thr, fmr, fnmr = loop_roc_arrays(gen_rows[r], imp_rows[r])
        if kind == KIND_EER:
            out[r] = loop_eer_from_curve(thr, fmr, fnmr)[0]
        else:
            out[r] = loop_tpr_from_curve(thr, fmr, fnmr, target)[0]
    return out


def loop_subset_performance(gen_pool, imp_pool, gen_idx, imp_idx, kind, target):
    # numpy's sort is much faster than numba's; only the sweep is compiled
    gen = np.sort(gen_pool[gen_idx], axis=1)
    imp = np.sort(imp_pool[imp_idx], axis=1)
    return loop_sorted_performance(gen, imp, kind, target)


# --------------------------------------------------------------------------
# numpy kernels

def numpy_roc_arrays(gen_sorted, imp_sorted):
    n_gen = gen_sorted.shape[0]
    n_imp = imp_sorted.shape[0]
    lo = min(gen_sorted[0], imp_sorted[0])
    hi = max(gen_sorted[-1], imp_sorted[-1])
    uniq = np.unique(np.concatenate((gen_sorted, imp_sorted)))
    thr = np.empty(uniq.shape[0] + 2, dtype=np.float64)
    thr[0] = np.nextafter(lo, -np.inf)
    thr[1:-1] = uniq
    thr[-1] = np.nextafter(hi, np.inf)
    fmr = (n_imp - np.searchsorted(imp_sorted, thr, side="left")) / n_imp
    fnmr = np.searchsorted(gen_sorted, thr, side="left") / n_gen
    return thr, fmr, fnmr


def numpy_eer_from_curve(thr, fmr, fnmr):
    d = fmr - fnmr
    # d[0] == 1 and d[-1] == -1 by construction
    idx = int(np.argmax(d[1:] <= 0.0)) + 1
    if d[idx] == 0.0:
        return float(fmr[idx]), float(thr[idx])
    t = d[idx - 1] / (d[idx - 1] - d[idx])
    eer = fmr[idx - 1] + t * (fmr[idx] - fmr[idx - 1])
    tau = thr[idx - 1] + t * (thr[idx] - thr[idx - 1])
    return float(eer), float(tau)


def numpy_tpr_from_curve(thr, fmr, fnmr, target):
    idx = int(np.argmax(fmr <= target))
    tpr = 1.0 - fnmr[idx]
    if idx == 0 or fmr[idx] == target:
        return float(tpr), float(thr[idx])
    tpr_prev = 1.0 - fnmr[idx - 1]
    t = (fmr[idx - 1] - target) / (fmr[idx - 1] - fmr[idx])
    return float(tpr_prev + t * (tpr - tpr_prev)), float(thr[idx])


def numpy_subset_performance(gen_pool, imp_pool, gen_idx, imp_idx, kind, target):
    gen = np.sort(gen_pool[gen_idx], axis=1)
    imp = np.sort(imp_pool[imp_idx], axis=1)
    out = np.empty(gen.shape[0], dtype=np.float64)
    for r in range(gen.shape[0]):
        thr, fmr, fnmr = numpy_roc_arrays(gen[r], imp[r])
        if kind == KIND_EER:
            out[r] = numpy_eer_from_curve(thr, fmr, fnmr)[0]
        else:
            out[r] = numpy_tpr_from_curve(thr, fmr, fnmr, target)[0]
    return out


if HAVE_NUMBA:
    roc_arrays = loop_roc_arrays
    eer_from_curve = loop_eer_from_curve
    tpr_from_curve = loop_tpr_from_curve
    subset_performance = loop_subset_performance
else:
    roc_arrays = numpy_roc_arrays
    eer_from_curve = numpy_eer_from_curve
    tpr_from_curve = numpy_tpr_from_curve
    subset_performance = numpy_subset_performance
