"""Hot kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and the environment variable
``DUALCUBE_DISABLE_JIT`` is unset (or ``0``).  Both implementations are
always importable as :mod:`dualcube.kernels._numpy` and (when numba is
present) :mod:`dualcube.kernels._numba`; ``benchmarks/bench_kernels.py``
times one against the other.
"""
import os

import numpy as np

from . import _numpy

DISABLE_JIT = os.environ.get("DUALCUBE_DISABLE_JIT", "0").lower() not in ("", "0", "false", "no")

try:
    if DISABLE_JIT:
        raise ImportError("disabled by DUALCUBE_DISABLE_JIT")
    from . import _numba
except ImportError:
    _numba = None

USE_JIT = _numba is not None
backend = _numba if USE_JIT else _numpy
BACKEND_NAME = "numba" if USE_JIT else "numpy"

# int64 kernels stay exact while |coefficient| <= this bound
INT64_COEF_BOUND = 2000


def transitive_closure(rel):
    return backend.transitive_closure(np.ascontiguousarray(rel, dtype=np.bool_))


def uf2_ok(leq, sides):
    return bool(backend.uf2_ok(leq, np.ascontiguousarray(sides, dtype=np.int64)))


def minimal_mask(lt, sides):
    return backend.minimal_mask(lt, np.ascontiguousarray(sides, dtype=np.int64))


def minimal_mask_batch(lt, sides_matrix):
    return backend.minimal_mask_batch(lt, np.ascontiguousarray(sides_matrix, dtype=np.int64))


def hamming_matrix(X, Y):
    return backend.hamming_matrix(np.ascontiguousarray(X, dtype=np.uint8),
                                  np.ascontiguousarray(Y, dtype=np.uint8))


def bfs_distances(indptr, indices, sources):
    return backend.bfs_distances(np.ascontiguousarray(indptr, dtype=np.int64),
                                 np.ascontiguousarray(indices, dtype=np.int64),
                                 np.ascontiguousarray(sources, dtype=np.int64))


def _small(coef):
    return coef.dtype != object and (coef.size == 0 or int(np.abs(coef).max()) <= INT64_COEF_BOUND)


def halfplanes_feasible(coef):
    coef = np.asarray(coef)
    if _small(coef):
        return bool(backend.halfplanes_feasible(np.ascontiguousarray(coef, dtype=np.int64)))
    return _numpy.halfplanes_feasible(coef.astype(object))


def halfplanes_feasible_batch(side_coef, sides_matrix):
    side_coef = np.asarray(side_coef)
    sides_matrix = np.ascontiguousarray(sides_matrix, dtype=np.int64)
    if _small(side_coef):
        return backend.halfplanes_feasible_batch(
            np.ascontiguousarray(side_coef, dtype=np.int64), sides_matrix)
    return _numpy.halfplanes_feasible_batch(side_coef.astype(object), sides_matrix)


def median_interval_violations(X):
    X = np.ascontiguousarray(X, dtype=np.uint8)
    if X.shape[1] > 64:
        raise ValueError("median_interval_violations packs vertices into 64 bits")
    if X.shape[0] == 0:
        return 0
    return int(backend.median_interval_violations(X))
