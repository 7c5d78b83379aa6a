"""Compiled pairwise kernel sums with a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``RIESZ_EXT_DISABLE_NUMBA`` is unset (or ``0``).  Both paths are
always importable so they can be compared against each other.
"""
from __future__ import annotations

import os

import numpy as np

_CHUNK = 1 << 22


def _env_disabled():
    return os.environ.get("RIESZ_EXT_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disabled()
BACKEND = "numba" if USE_NUMBA else "numpy"


def riesz_sum_numpy(targets, sources, coeffs, power):
    """Return ``out[i] = sum_j coeffs[j] * |targets[i] - sources[j]|**(-power)``.

    Coincident pairs contribute nothing.
    """
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    sources = np.ascontiguousarray(sources, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    m = targets.shape[0]
    k = max(sources.shape[0], 1)
    out = np.empty(m)
    step = max(1, _CHUNK // k)
    for start in range(0, m, step):
        t = targets[start:start + step]
        diff = t[:, None, :] - sources[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", diff, diff)
        with np.errstate(divide="ignore"):
            kern = np.where(r2 > 0.0, r2 ** (-0.5 * power), 0.0)
        out[start:start + step] = kern @ coeffs
    return out


if HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=False)
    def _riesz_sum_jit(targets, sources, coeffs, power):
        m = targets.shape[0]
        k = sources.shape[0]
        d = targets.shape[1]
        half = -0.5 * power
        out = np.empty(m)
        for i in range(m):
            acc = 0.0
            for j in range(k):
                r2 = 0.0
                for c in range(d):
                    diff = targets[i, c] - sources[j, c]
                    r2 += diff * diff
                if r2 > 0.0:
                    acc += coeffs[j] * r2 ** half
            out[i] = acc
        return out

    def riesz_sum_numba(targets, sources, coeffs, power):
        return _riesz_sum_jit(
            np.ascontiguousarray(targets, dtype=np.float64),
            np.ascontiguousarray(sources, dtype=np.float64),
            np.ascontiguousarray(coeffs, dtype=np.float64),
            float(power),
        )

else:  # pragma: no cover
    riesz_sum_numba = None


def riesz_sum(targets, sources, coeffs, power):
    if USE_NUMBA:
        return riesz_sum_numba(targets, sources, coeffs, power)
    return riesz_sum_numpy(targets, sources, coeffs, power)
