"""Numba-compiled twins of the kernels in ``_numpy``.

Only int64/bool/uint8 inputs are supported here; the dispatcher routes
object-dtype (big integer) inputs to the numpy path.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def transitive_closure(rel):
    m = rel.shape[0]
    r = rel.copy()
    for k in range(m):
        for i in range(m):
            if r[i, k]:
                for j in range(m):
                    if r[k, j]:
                        r[i, j] = True
    return r


@njit(cache=True)
def uf2_ok(leq, sides):
    n = sides.shape[0]
    for i in range(n):
        for j in range(n):
            if leq[sides[i], sides[j] ^ 1]:
                return False
    return True


@njit(cache=True)
def minimal_mask(lt, sides):
    n = sides.shape[0]
    out = np.ones(n, dtype=np.bool_)
    for j in range(n):
        sj = sides[j]
        for i in range(n):
            if lt[sides[i], sj]:
                out[j] = False
                break
    return out


@njit(cache=True)
def minimal_mask_batch(lt, sides_matrix):
    V, n = sides_matrix.shape
    out = np.ones((V, n), dtype=np.bool_)
    for v in range(V):
        for j in range(n):
            sj = sides_matrix[v, j]
            for i in range(n):
                if lt[sides_matrix[v, i], sj]:
                    out[v, j] = False
                    break
    return out


@njit(cache=True)
def hamming_matrix(X, Y):
    V1, n = X.shape
    V2 = Y.shape[0]
    out = np.zeros((V1, V2), dtype=np.int32)
    for i in range(V1):
        for j in range(V2):
            c = 0
            for k in range(n):
                if X[i, k] != Y[j, k]:
                    c += 1
            out[i, j] = c
    return out


@njit(cache=True)
def bfs_distances(indptr, indices, sources):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        for p in range(indptr[u], indptr[u + 1]):
            w = indices[p]
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True)
def _feasible_parallel(coef):
    m = coef.shape[0]
    a0 = coef[0, 0]
    b0 = coef[0, 1]
    nn = a0 * a0 + b0 * b0
    for i in range(m):
        wi = coef[i, 0] * a0 + coef[i, 1] * b0
        if wi <= 0:
            continue
        ei = coef[i, 2] * nn
        for j in range(m):
            wj = coef[j, 0] * a0 + coef[j, 1] * b0
            if wj >= 0:
                continue
            ej = coef[j, 2] * nn
            if ei * wj > ej * wi:
                return False
    return True


@njit(cache=True)
def halfplanes_feasible(coef):
    m = coef.shape[0]
    if m == 0:
        return True
    spanning = False
    for i in range(m):
        Ai = coef[i, 0]
        Bi = coef[i, 1]
        Ci = coef[i, 2]
        for j in range(i + 1, m):
            Aj = coef[j, 0]
            Bj = coef[j, 1]
            Cj = coef[j, 2]
            d = Ai * Bj - Aj * Bi
            if d == 0:
                continue
            spanning = True
            nx = Bi * Cj - Bj * Ci
            ny = Aj * Ci - Ai * Cj
            ok = True
            for k in range(m):
                val = coef[k, 0] * nx + coef[k, 1] * ny + coef[k, 2] * d
                if (d > 0 and val < 0) or (d < 0 and val > 0):
                    ok = False
                    break
            if ok:
                return True
    if spanning:
        return False
    return _feasible_parallel(coef)


@njit(cache=True)
def halfplanes_feasible_batch(side_coef, sides_matrix):
    V, n = sides_matrix.shape
    out = np.empty(V, dtype=np.bool_)
    buf = np.empty((n, 3), dtype=np.int64)
    for v in range(V):
        for i in range(n):
            for c in range(3):
                buf[i, c] = side_coef[sides_matrix[v, i], c]
        out[v] = halfplanes_feasible(buf)
    return out


@njit(cache=True)
def _pack_rows(X):
    V, n = X.shape
    keys = np.zeros(V, dtype=np.uint64)
    for v in range(V):
        k = np.uint64(0)
        for i in range(n):
            if X[v, i]:
                k |= np.uint64(1) << np.uint64(i)
        keys[v] = k
    return keys


@njit(cache=True)
def median_interval_violations(X):
    V, n = X.shape
    keys = _pack_rows(X)
    order = np.argsort(keys)
    skeys = keys[order]
    H = hamming_matrix(X, X)
    bad = 0
    in_med = np.zeros(V, dtype=np.bool_)
    for a in range(V):
        for b in range(V):
            in_med[:] = False
            closed = True
            for mu in range(V):
                k = np.uint64(0)
                for i in range(n):
                    if X[a, i] + X[b, i] + X[mu, i] >= 2:
                        k |= np.uint64(1) << np.uint64(i)
                p = np.searchsorted(skeys, k)
                if p < V and skeys[p] == k:
                    in_med[order[p]] = True
                else:
                    closed = False
            ok = closed
            if ok:
                for g in range(V):
                    if in_med[g] != (H[a, g] + H[g, b] == H[a, b]):
                        ok = False
                        break
            if not ok:
                bad += 1
    return bad
