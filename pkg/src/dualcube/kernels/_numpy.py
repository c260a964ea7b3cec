"""Pure-numpy implementations of the hot loops.

Every function here has a twin with the same name and signature in
``_numba``; the two are cross-checked by the test-suite.  Integer inputs
may also be ``dtype=object`` arrays of Python ints, in which case the
arithmetic is exact for arbitrarily large coefficients.
"""
import numpy as np


def transitive_closure(rel):
    """Boolean Warshall closure of a square relation (reflexivity untouched)."""
    r = np.array(rel, dtype=bool, copy=True)
    for k in range(r.shape[0]):
        r |= np.outer(r[:, k], r[k, :])
    return r


def uf2_ok(leq, sides):
    """True iff no chosen h, k satisfy h <= k*."""
    sides = np.asarray(sides)
    return not leq[np.ix_(sides, sides ^ 1)].any()


def minimal_mask(lt, sides):
    sides = np.asarray(sides)
    return ~lt[np.ix_(sides, sides)].any(axis=0)


def minimal_mask_batch(lt, sides_matrix):
    S = np.asarray(sides_matrix)
    if S.shape[0] == 0:
        return np.zeros(S.shape, dtype=bool)
    sub = lt[S[:, :, None], S[:, None, :]]
    return ~sub.any(axis=1)


def hamming_matrix(X, Y):
    X = np.asarray(X, dtype=np.float32)
    Y = np.asarray(Y, dtype=np.float32)
    # exact: entries are 0/1 and n < 2**24
    d = X @ (1.0 - Y).T + (1.0 - X) @ Y.T
    return np.rint(d).astype(np.int32)


def bfs_distances(indptr, indices, sources):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    frontier = np.unique(np.asarray(sources, dtype=np.int64))
    dist[frontier] = 0
    level = 0
    while frontier.size:
        level += 1
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        if counts.sum() == 0:
            break
        offs = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(counts.sum())
        nbrs = np.unique(indices[offs])
        nbrs = nbrs[dist[nbrs] < 0]
        dist[nbrs] = level
        frontier = nbrs
    return dist


def _feasible_parallel(coef):
    # all normals parallel: reduce to t = n0 . p
    a0, b0 = coef[0, 0], coef[0, 1]
    w = coef[:, 0] * a0 + coef[:, 1] * b0
    e = coef[:, 2] * (a0 * a0 + b0 * b0)
    lo = np.nonzero(w > 0)[0]
    hi = np.nonzero(w < 0)[0]
    if lo.size == 0 or hi.size == 0:
        return True
    # t >= -e_i/w_i and t <= e_j/(-w_j)  <=>  e_i w_j <= e_j w_i
    lhs = np.multiply.outer(e[lo], w[hi])
    rhs = np.multiply.outer(w[lo], e[hi])
    return bool((lhs <= rhs).all())


def halfplanes_feasible(coef):
    """Exact feasibility of {A x + B y + C >= 0} for integer rows (A, B, C).

    A nonempty intersection whose normals span the plane has a vertex, and
    every vertex is the crossing of two constraint lines; otherwise all
    normals are parallel and the problem is one-dimensional.
    """
    coef = np.asarray(coef)
    m = coef.shape[0]
    if m == 0:
        return True
    A, B, C = coef[:, 0], coef[:, 1], coef[:, 2]
    D = np.multiply.outer(A, B) - np.multiply.outer(B, A)
    iu, ju = np.nonzero(np.triu(D != 0, 1))
    if iu.size == 0:
        return _feasible_parallel(coef)
    d = D[iu, ju]
    nx = B[iu] * C[ju] - B[ju] * C[iu]
    ny = A[ju] * C[iu] - A[iu] * C[ju]
    vals = np.multiply.outer(nx, A) + np.multiply.outer(ny, B) + np.multiply.outer(d, C)
    sgn = np.where(d > 0, 1, -1)
    ok = (vals * sgn[:, None] >= 0).all(axis=1)
    return bool(ok.any())


def halfplanes_feasible_batch(side_coef, sides_matrix):
    S = np.asarray(sides_matrix)
    out = np.empty(S.shape[0], dtype=bool)
    for v in range(S.shape[0]):
        out[v] = halfplanes_feasible(side_coef[S[v]])
    return out


def _pack(X):
    X = np.asarray(X, dtype=np.uint64)
    weights = np.left_shift(np.uint64(1), np.arange(X.shape[1], dtype=np.uint64))
    return (X * weights).sum(axis=1, dtype=np.uint64)


def median_interval_violations(X):
    """Count (alpha, beta) pairs breaking median closure or interval equality.

    For each ordered pair the median set {med(alpha, beta, mu)} over all
    enumerated mu must consist of enumerated vertices and coincide with the
    metric interval.  Requires at most 64 pairs.
    """
    X = np.asarray(X, dtype=np.uint8)
    V, n = X.shape
    if n > 64:
        raise ValueError("median_interval_violations packs vertices into 64 bits")
    keys = _pack(X)
    order = np.argsort(keys)
    skeys = keys[order]
    H = hamming_matrix(X, X)
    bad = 0
    for a in range(V):
        # med over all (beta, mu): majority of X[a], X[beta], X[mu]
        s = X[a][None, None, :].astype(np.int16) + X[:, None, :] + X[None, :, :]
        med = (s >= 2).astype(np.uint8).reshape(V * V, n)
        mk = _pack(med)
        pos = np.searchsorted(skeys, mk)
        pos[pos >= V] = V - 1
        found = skeys[pos] == mk
        idx = np.where(found, order[pos], -1).reshape(V, V)
        closed = found.reshape(V, V).all(axis=1)
        interval = (H[a][None, :] + H) == H[a][:, None]
        med_set = np.zeros((V, V), dtype=bool)
        rows = np.repeat(np.arange(V), V)
        ok = idx.ravel() >= 0
        med_set[rows[ok], idx.ravel()[ok]] = True
        bad += int((~closed | (med_set != interval).any(axis=1)).sum())
    return bad
