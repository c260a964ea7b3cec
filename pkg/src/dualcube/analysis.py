"""Heights, min-set classification, shadows, gates and the metric reports.

Heights are distances to the consistent vertices.  A vertex is *trusted*
when no enumeration frontier vertex is closer to it than its height, so
truncation cannot have changed its height or its shadow.

Shadows use the reading ``sh(pi) = {sigma consistent : Delta(sigma, pi) = hgt(pi)}``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import kernels
from . import walls2d as W
from .cubing import MedianGraph
from .errors import (CapExceeded, EmptySide, IncompleteGraph, MInPi, NoConsistentVertex,
                     UntrustedHeights, WindowTooSmall)
from .pocset import pair_of, side_of, sides_of

REPORT_VERSION = 1


@dataclass(frozen=True)
class HeightTable:
    height: np.ndarray    # -1 when no consistent vertex is reachable
    trusted: np.ndarray

    @property
    def levels(self) -> dict:
        vals, counts = np.unique(self.height[self.height >= 0], return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def __getitem__(self, v) -> int:
        return int(self.height[v])


def heights(G: MedianGraph) -> HeightTable:
    """Multi-source BFS from the consistent vertices."""
    src = G.consistent_ids()
    if src.size == 0:
        raise NoConsistentVertex("no consistent vertex was enumerated")
    h = G.distances_from(src)
    if G.complete:
        trusted = h >= 0
    else:
        frontier = np.flatnonzero(~G.expanded)
        to_frontier = G.distances_from(frontier)
        trusted = (h >= 0) & ((to_frontier < 0) | (to_frontier >= h))
    h = np.asarray(h, dtype=np.int32)
    h.setflags(write=False)
    trusted.setflags(write=False)
    return HeightTable(h, trusted)


def height_oracle(G: MedianGraph, v: int, cap: int) -> int:
    """Fewest deletions ``A`` from ``pi`` leaving a consistent set."""
    if G.oracle is None:
        raise ValueError("height oracle needs a consistency oracle")
    codes = [int(h) for h in sides_of(G.bits[v])]
    for size in range(0, min(cap, len(codes) - 1) + 1):
        for drop in itertools.combinations(range(len(codes)), size):
            keep = [c for j, c in enumerate(codes) if j not in drop]
            if G.oracle.subset(keep):
                return size
    raise CapExceeded(f"no consistent subset after deleting up to {cap} elements")


class MinClasses(NamedTuple):
    plus: frozenset    # flipping raises the height
    zero: frozenset
    minus: frozenset   # flipping lowers the height


def _min_codes(G: MedianGraph, v: int):
    s = sides_of(G.bits[v])
    return s[kernels.minimal_mask(G.P.lt, s)]


def _flip_id(G: MedianGraph, v: int, code: int) -> int:
    b = G.bits[v].copy()
    b[pair_of(code)] ^= 1
    return G.vertex(b)


def classify_min(G: MedianGraph, H: HeightTable, v: int) -> MinClasses:
    if not G.expanded[v] or not H.trusted[v]:
        raise UntrustedHeights(f"vertex {v} is not trusted")
    out = {1: set(), 0: set(), -1: set()}
    for a in _min_codes(G, v):
        u = _flip_id(G, v, int(a))
        if not H.trusted[u]:
            raise UntrustedHeights(f"neighbour {u} of {v} is not trusted")
        step = int(H.height[u]) - int(H.height[v])
        assert step in out, "height changed by more than one across an edge"
        out[step].add(int(a))
    return MinClasses(frozenset(out[1]), frozenset(out[0]), frozenset(out[-1]))


class ShadowRecord(NamedTuple):
    vertex: int
    shadow: frozenset        # consistent vertex ids
    dual_shadow: frozenset   # halfspace codes shared by the whole shadow
    geometric_shadow: list   # polygon (window square when dual shadow is empty)


def _shadow_ids(G: MedianGraph, H: HeightTable, v: int) -> np.ndarray:
    if not H.trusted[v]:
        raise UntrustedHeights(f"vertex {v} is not trusted")
    cons = G.consistent_ids()
    d = kernels.hamming_matrix(G.bits[v:v + 1], G.bits[cons])[0]
    return cons[d == H.height[v]]


def _common_codes(G: MedianGraph, ids) -> frozenset:
    B = G.bits[np.asarray(ids)]
    same = (B == B[0]).all(axis=0)
    return frozenset(int(2 * i + B[0, i]) for i in np.flatnonzero(same))


def shadow(G: MedianGraph, H: HeightTable, v: int, A: W.Arrangement | None = None) -> ShadowRecord:
    ids = _shadow_ids(G, H, v)
    dual = _common_codes(G, ids)
    geo = []
    if A is not None:
        geo = W.clip_all(W.support_region(A, sorted(dual)), W._window_coefs(A.window)) \
            if dual else A.window.square()
    return ShadowRecord(v, frozenset(int(i) for i in ids), dual, geo)


class Violation(NamedTuple):
    lemma: str
    vertex: int
    detail: str


def window_trusted(A: W.Arrangement, G: MedianGraph, H: HeightTable) -> np.ndarray:
    """Vertices whose nearby chambers are all interior to the window.

    A vertex qualifies when every consistent vertex within ``hgt + 1`` of it
    is a bounded chamber not cut by the window square.  Shadows of such a
    vertex and of its neighbours only involve chambers that the truncation
    left intact.  Boundary chambers are unbounded cells of the finite
    arrangement and do produce genuine counterexamples to the shadow
    lemmas there, which is why the lemma suites quarantine them.  A finite
    arrangement that is not a truncation is trusted everywhere.
    """
    if not A.truncated:
        return H.trusted.copy()
    cons = G.consistent_ids()
    interior = np.zeros(G.n_vertices, dtype=bool)
    for ch in A.chambers:
        v = G.vertex(ch.choice)
        if v >= 0:
            interior[v] = ch.bounded and not ch.clipped
    D = kernels.hamming_matrix(G.bits, G.bits[cons])
    near = D <= (H.height[:, None] + 1)
    return H.trusted & ~(near & ~interior[cons][None, :]).any(axis=1)


def shadow_monotonicity_check(G: MedianGraph, H: HeightTable, only=None) -> dict:
    """Run the shadow lemmas over every vertex whose neighbourhood is trusted.

    Checked per vertex ``pi``: strict growth of shadows along ``min_plus``
    flips (and strict shrinking of dual shadows), both shadow bounds, the
    identity ``dual shadow & min = min_plus | min_zero``, that any two
    elements of ``pi`` lie in a common shadow vertex, that ``min_minus`` is
    inconsistent with at least three elements, and that every element of
    an inconsistent ``pi`` is transverse to some element of ``min_minus``.
    ``only`` optionally restricts the vertices examined (a boolean mask).
    """
    violations = []
    checked = 0
    tr = G.P.transverse
    shadows, duals = {}, {}

    def sh(u):
        if u not in shadows:
            ids = _shadow_ids(G, H, u)
            shadows[u] = frozenset(int(i) for i in ids)
            duals[u] = _common_codes(G, ids)
        return shadows[u], duals[u]

    for v in range(G.n_vertices):
        if only is not None and not only[v]:
            continue
        try:
            cls = classify_min(G, H, v)
        except UntrustedHeights:
            continue
        checked += 1
        pi = frozenset(int(h) for h in sides_of(G.bits[v]))
        mins = cls.plus | cls.zero | cls.minus
        s, d = sh(v)
        for a in sorted(cls.plus):
            u = _flip_id(G, v, a)
            if not H.trusted[u]:
                continue
            su, du = sh(u)
            if not s < su:
                violations.append(Violation("shadows-grow", v, f"flip {a}: shadow not strictly larger"))
            if not du < d:
                violations.append(Violation("shadows-grow", v, f"flip {a}: dual shadow not strictly smaller"))
        if not (cls.plus | cls.zero) <= d:
            violations.append(Violation("shadow-bounds", v, "min_plus | min_zero not in dual shadow"))
        if not d <= pi:
            violations.append(Violation("shadow-bounds", v, "dual shadow not in pi"))
        if d & mins != cls.plus | cls.zero:
            violations.append(Violation("strict-growth", v, "dual shadow & min != min_plus | min_zero"))
        B = G.bits[sorted(s)]
        M = (B == G.bits[v]).astype(np.float64)
        covered = (M.T @ M) > 0
        if not covered.all():
            i, j = (int(x) for x in np.argwhere(~covered)[0])
            violations.append(Violation("going-down", v, f"pairs {i},{j}: no shadow vertex keeps both"))
        if H.height[v] > 0:
            if len(cls.minus) < 3:
                violations.append(Violation("min-minus", v, f"|min_minus| = {len(cls.minus)}"))
            if G.oracle is not None and G.oracle.subset(sorted(cls.minus)):
                violations.append(Violation("min-minus", v, "min_minus is consistent"))
            mpairs = [pair_of(c) for c in cls.minus]
            for a in sorted(pi):
                if not any(tr[pair_of(a), p] for p in mpairs):
                    violations.append(Violation("transverse-min-minus", v, f"{a} transverse to no min_minus element"))
    return {"checked": checked, "violations": violations}


def project_to_side(G: MedianGraph, alpha, m: int) -> np.ndarray:
    """Nearest ultrafilter containing ``m``: flip every ``h in pi`` with ``h <= m*``."""
    cur = np.array(alpha, dtype=np.uint8)
    if cur[pair_of(m)] == side_of(m):
        raise MInPi("m already lies in the ultrafilter")
    leq = G.P.leq
    todo = {pair_of(h) for h in sides_of(cur) if leq[h, m ^ 1]}
    while todo:
        mask = kernels.minimal_mask(G.P.lt, sides_of(cur))
        ready = sorted(i for i in todo if mask[i])
        assert ready, "no minimal element to flip"
        cur[ready[0]] ^= 1
        todo.discard(ready[0])
    assert cur[pair_of(m)] == side_of(m)
    return cur


def side_ids(G: MedianGraph, h: int) -> np.ndarray:
    """Enumerated vertices containing ``h``."""
    return np.flatnonzero(G.bits[:, pair_of(h)] == side_of(h))


def distance_to_side(G: MedianGraph, v: int, h: int) -> int:
    """Graph distance from ``v`` to the vertices containing ``h``."""
    ids = side_ids(G, h)
    if ids.size == 0:
        raise EmptySide("no enumerated vertex contains the halfspace")
    return int(G.distances_from(ids)[v])


class Gate(NamedTuple):
    alpha: int
    beta_star: int
    distance: int
    interval_size: int


def interval_size(G: MedianGraph, a: int, b: int) -> int:
    leq = G.P.leq
    return int((leq[a, :] & leq[:, b]).sum())


def gate(G: MedianGraph, a: int, b: int) -> Gate:
    """Closest pair between the vertices containing ``a`` and those containing ``b*``."""
    if a == b or not G.P.leq[a, b]:
        raise ValueError("gate needs a < b")
    Sa, Sb = side_ids(G, a), side_ids(G, b ^ 1)
    if Sa.size == 0 or Sb.size == 0:
        raise EmptySide("a side set is empty in the enumeration")
    D = kernels.hamming_matrix(G.bits[Sa], G.bits[Sb])
    i, j = np.unravel_index(int(np.argmin(D)), D.shape)
    g = Gate(int(Sa[i]), int(Sb[j]), int(D[i, j]), interval_size(G, a, b))
    assert g.distance == g.interval_size, "gate distance differs from interval size"
    return g


class SpecialPair(NamedTuple):
    a: int
    b: int
    sqwidth: Fraction

    @property
    def width(self) -> float:
        return math.sqrt(self.sqwidth)


def special_pairs(A: W.Arrangement) -> list:
    """Pairs ``a < b`` with nothing strictly between, one per star-symmetric couple."""
    lt = A.pocset.lt
    between = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
    out = []
    for a, b in zip(*np.nonzero(lt & ~between)):
        a, b = int(a), int(b)
        if (a, b) <= (b ^ 1, a ^ 1):
            out.append(SpecialPair(a, b, W.sqwidth(A, a, b)))
    return out


class QiReport(NamedTuple):
    samples: list        # (x, y, d, Delta)
    lam: float
    eps: float           # supremum of the residual over all window point pairs
    eps_sample: float    # largest residual over the sample itself
    long_scale: float    # pairs at least this far apart fix lambda


def sample_generic_points(A: W.Arrangement, count: int, rng, disk: W.Window | None = None,
                          den: int = 997) -> list:
    """Rational points on a ``1/den`` lattice inside ``disk`` and off every wall."""
    disk = disk or A.window
    cx, cy = disk.center
    r = float(disk.radius)
    out = []
    while len(out) < count:
        u, v = rng.uniform(-r, r, size=2)
        p = (cx + Fraction(round(u * den), den), cy + Fraction(round(v * den), den))
        if disk.contains(p) and W.is_generic(A, p):
            out.append(p)
    return out


def _padded_polygons(polys):
    m = max(len(p) for p in polys)
    P = np.empty((len(polys), m, 2))
    for i, poly in enumerate(polys):
        pts = np.array([[float(x), float(y)] for x, y in poly])
        P[i, :len(poly)] = pts
        P[i, len(poly):] = pts[-1]
    return P


def _point_segment_dist(X, A, B):
    """Distances from points ``X[..., 2]`` to segments ``A -> B`` (broadcast)."""
    AB = B - A
    L = (AB ** 2).sum(-1)
    t = np.where(L > 0, ((X - A) * AB).sum(-1) / np.where(L > 0, L, 1), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.sqrt(((A + t[..., None] * AB - X) ** 2).sum(-1))


def _inside(X, P):
    """Points ``X[k, 2]`` inside (or on) convex counter-clockwise polygons ``P[k, m, 2]``."""
    E = np.roll(P, -1, axis=1) - P
    W_ = X[:, None, :] - P
    cross = E[..., 0] * W_[..., 1] - E[..., 1] * W_[..., 0]
    return (cross >= -1e-12).all(axis=1)


def window_additive_constant(A: W.Arrangement, lam: float, chunk: int = 4096) -> float:
    """Supremum over point pairs of the window of ``max(Delta - lam d, d/lam - Delta)``.

    Delta is constant on pairs of chambers, so the supremum is a maximum over
    chamber pairs of ``Delta - lam * dmin`` and ``dmax / lam - Delta``.
    Chambers are taken clipped to the window square, which can only enlarge
    the value.
    """
    chs = [c for c in A.chambers if len(c.polygon) >= 3 and _meets_disk(c.polygon, A.window)]
    polys = [c.polygon if W.area2(c.polygon) > 0 else c.polygon[::-1] for c in chs]
    P = _padded_polygons(polys)
    bits = np.array([c.choice for c in chs], dtype=np.uint8)
    D = kernels.hamming_matrix(bits, bits).astype(np.float64)
    n = len(chs)
    I, J = np.triu_indices(n)
    best = 0.0
    for s in range(0, I.size, chunk):
        i, j = I[s:s + chunk], J[s:s + chunk]
        Pi, Pj = P[i], P[j]
        dmax = np.sqrt(((Pi[:, :, None, :] - Pj[:, None, :, :]) ** 2).sum(-1)).max(axis=(1, 2))
        Ai, Bi = Pi, np.roll(Pi, -1, axis=1)
        Aj, Bj = Pj, np.roll(Pj, -1, axis=1)
        d1 = _point_segment_dist(Pi[:, :, None, :], Aj[:, None, :, :], Bj[:, None, :, :]).min(axis=(1, 2))
        d2 = _point_segment_dist(Pj[:, :, None, :], Ai[:, None, :, :], Bi[:, None, :, :]).min(axis=(1, 2))
        dmin = np.minimum(d1, d2)
        touching = np.zeros(len(i), dtype=bool)
        for v in range(P.shape[1]):
            touching |= _inside(Pi[:, v, :], Pj) | _inside(Pj[:, v, :], Pi)
        dmin[touching] = 0.0
        delta = D[i, j]
        best = max(best, float(np.max(delta - lam * dmin)), float(np.max(dmax / lam - delta)))
    return best


def _meets_disk(poly, w: W.Window) -> bool:
    c = w.center
    if all(_cross(poly[k], poly[(k + 1) % len(poly)], c) >= 0 for k in range(len(poly))) or \
            all(_cross(poly[k], poly[(k + 1) % len(poly)], c) <= 0 for k in range(len(poly))):
        return True
    r2 = w.radius ** 2
    for k in range(len(poly)):
        p, q = poly[k], poly[(k + 1) % len(poly)]
        dx, dy = q[0] - p[0], q[1] - p[1]
        L = dx * dx + dy * dy
        t = min(max(((c[0] - p[0]) * dx + (c[1] - p[1]) * dy) / L, Fraction(0)), Fraction(1))
        if (p[0] + t * dx - c[0]) ** 2 + (p[1] + t * dy - c[1]) ** 2 < r2:
            return True
    return False


def _cross(p, q, c):
    return (q[0] - p[0]) * (c[1] - p[1]) - (q[1] - p[1]) * (c[0] - p[0])


def qi_report(A: W.Arrangement, G: MedianGraph, n_samples: int, seed: int,
              long_scale=None) -> QiReport:
    """Fit ``(1/lam) d - eps <= Delta <= lam d + eps`` from random point pairs.

    ``lam`` is the largest ratio ``Delta/d`` or ``d/Delta`` among sampled
    pairs at least ``long_scale`` apart (default: the window radius), where
    the rounding of Delta to whole walls is small against the distance.
    ``eps`` is the exact supremum of the residual over the whole window at
    that ``lam``, so it bounds every sample; ``eps_sample`` is the sample's
    own maximum.  Points come from the whole window: every wall separating
    two of them crosses the window, so the truncation counts them all.
    """
    rng = np.random.default_rng(seed)
    pts = sample_generic_points(A, 2 * n_samples, rng)
    L = float(A.window.radius) if long_scale is None else float(long_scale)
    samples = []
    for x, y in zip(pts[0::2], pts[1::2]):
        bx, by = W.choice_at(A, x), W.choice_at(A, y)
        if G.vertex(bx) < 0 or G.vertex(by) < 0:
            raise IncompleteGraph("sampled chamber not enumerated")
        d = math.hypot(float(x[0] - y[0]), float(x[1] - y[1]))
        samples.append((x, y, d, int(np.count_nonzero(bx != by))))
    lam = 1.0
    for _, _, d, k in samples:
        if d >= L and k > 0:
            lam = max(lam, k / d, d / k)
    eps_sample = max((max(k - lam * d, d / lam - k, 0.0) for _, _, d, k in samples), default=0.0)
    eps = window_additive_constant(A, lam)
    assert eps >= eps_sample - 1e-9, "window supremum below a sampled residual"
    return QiReport(samples, lam, eps, eps_sample, L)


def f_table(A: W.Arrangement, radii, margin=None) -> list:
    out = []
    for r in radii:
        f = W.f_of_r(A, r, margin)
        out.append((W.frac(r), f, f / float(W.frac(r))))
    return out


class ChainRow(NamedTuple):
    k: int
    to_side: int          # Delta(pi0, S_{k*})
    to_consistent: int    # Delta(pi0, Pi0 & S_{k*})
    holds: bool


def slope_chain(G: MedianGraph, base: int, ks) -> list:
    """``Delta(pi0, S_k*) <= Delta(pi0, Pi0 & S_k*) <= 2 Delta(pi0, S_k*)`` per ``k``."""
    if not G.complete:
        raise IncompleteGraph("slope chain needs a complete enumeration")
    rows = []
    for k in ks:
        k = int(k)
        ids = side_ids(G, k ^ 1)
        cons = ids[G.consistent[ids]]
        if cons.size == 0:
            raise EmptySide("no consistent vertex contains k*")
        d1 = int(G.distances_from(ids)[base])
        d2 = int(G.distances_from(cons)[base])
        rows.append(ChainRow(k, d1, d2, d1 <= d2 <= 2 * d1))
    return rows


def slope_report(A: W.Arrangement, G: MedianGraph, radii, margin=None, qi: QiReport | None = None) -> dict:
    """f(r) table, the distance chain for every ``k`` containing the basepoint,
    and the tail of ``f(r)/r`` against ``[1/(2 lam), lam]`` (empirical only)."""
    table = f_table(A, radii, margin)
    base = G.vertex(W.choice_at(A, A.basepoint))
    ks = sorted(int(h) for h in sides_of(G.bits[base]))
    chain = slope_chain(G, base, ks)
    out = {"f": table, "chain": chain, "chain_holds": all(r.holds for r in chain)}
    if qi is not None:
        tail = [row[2] for row in table[len(table) // 2:]]
        lo, hi = 1 / (2 * qi.lam), qi.lam
        out["tail_window"] = (lo, hi)
        out["tail_in_window"] = all(lo <= s <= hi for s in tail)
    return out


# ---------------------------------------------------------------- reports

def _json_point(p):
    return [W.rat_json(p[0]), W.rat_json(p[1])]


def _finite(x):
    return None if x == math.inf else x


def analysis_report(A: W.Arrangement | None, G: MedianGraph, qi: QiReport | None = None,
                    radii=(), margin=None) -> dict:
    """Versioned JSON-ready summary of heights, shadows, pairs and metric fits."""
    H = heights(G)
    only = window_trusted(A, G, H) if A is not None else None
    shadow_run = shadow_monotonicity_check(G, H, only)
    doc = {
        "version": REPORT_VERSION,
        "vertices": G.n_vertices,
        "complete": G.complete,
        "heights": {str(k): v for k, v in H.levels.items()},
        "untrusted": int((~H.trusted).sum()),
        "shadow_checked": shadow_run["checked"],
        "violations": [
            {"lemma": x.lemma, "bits": "".join(map(str, G.bits[x.vertex])), "detail": x.detail}
            for x in shadow_run["violations"]],
    }
    if A is not None:
        tw = A.trusted(margin)
        doc["trusted"] = None if tw is None else {"center": _json_point(tw.center),
                                                  "radius": W.rat_json(tw.radius)}
        doc["walls_meeting_base_ball"] = W.walls_meeting_ball(A, A.basepoint, A.base_radius)
        sp = special_pairs(A)
        doc["special_pairs"] = [{"a": A.pocset.label(s.a), "b": A.pocset.label(s.b),
                                 "width": s.width} for s in sp]
        doc["max_special_width"] = max((s.width for s in sp), default=0.0)
        if radii:
            rep = slope_report(A, G, radii, margin, qi)
            doc["f"] = [{"r": W.rat_json(r), "f": _finite(f), "ratio": _finite(q)}
                        for r, f, q in rep["f"]]
            doc["chain"] = [{"k": A.pocset.label(r.k), "to_side": r.to_side,
                             "to_consistent": r.to_consistent, "holds": r.holds}
                            for r in rep["chain"]]
            if "tail_in_window" in rep:
                doc["tail_window"] = list(rep["tail_window"])
                doc["tail_in_window"] = rep["tail_in_window"]
    if qi is not None:
        doc["qi"] = {"samples": len(qi.samples), "lambda": qi.lam, "epsilon": qi.eps,
                     "epsilon_sample": qi.eps_sample, "long_scale": qi.long_scale}
    return doc


HEIGHT_COLOURS = ("#9ecae1", "#fdd0a2", "#fd8d3c", "#d94801", "#7f2704")


def shadow_overlay_svg(A: W.Arrangement, G: MedianGraph, H: HeightTable | None = None,
                       max_shadows: int = 12) -> str:
    """Walls and chambers with the geometric shadows of some inconsistent vertices."""
    H = H or heights(G)
    regions = []
    shown = 0
    for v in np.argsort(-H.height, kind="stable"):
        v = int(v)
        if H.height[v] <= 0 or not H.trusted[v] or shown >= max_shadows:
            continue
        rec = shadow(G, H, v, A)
        colour = HEIGHT_COLOURS[min(int(H.height[v]), len(HEIGHT_COLOURS) - 1)]
        regions.append((rec.geometric_shadow, colour, 0.25))
        shown += 1
    return W.to_svg(A, chambers=True, regions=regions)
