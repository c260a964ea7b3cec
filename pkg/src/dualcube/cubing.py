"""The dual cubing of a finite poc-set as an explicit median graph.

Vertices are ultrafilters (bit vectors, one side per pair) reached from a
seed by flipping minimal elements.  Vertex ids follow BFS discovery order.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import kernels
from . import walls2d as W
from .errors import (BudgetExceeded, DegenerateSegment, FrontierClipped, IncompleteGraph,
                     NotGeneric)
from .pocset import PocSet, extend_to_ultrafilter, hid, is_ultrafilter, sides_of

DEFAULT_MAX_VERTICES = 1_000_000


class GeometricOracle:
    """Consistency tests backed by an arrangement's exact LP."""

    def __init__(self, A: W.Arrangement):
        self.A = A

    def batch(self, X: np.ndarray) -> np.ndarray:
        return W.consistent_batch(self.A, X)

    def subset(self, codes) -> bool:
        return W.is_consistent(self.A, codes)


@dataclass
class MedianGraph:
    P: PocSet
    bits: np.ndarray                 # (V, n) uint8
    indptr: np.ndarray               # CSR adjacency
    indices: np.ndarray
    edge_pair: np.ndarray            # flipped pair of each CSR entry
    expanded: np.ndarray             # every neighbour of the vertex is present
    level: np.ndarray                # BFS distance from the seed
    consistent: np.ndarray | None    # None when no geometric oracle was given
    complete: bool
    max_vertices: int
    max_radius: int | None
    oracle: object = None
    source: str = ""
    index: dict = field(default_factory=dict, repr=False)

    @property
    def n_vertices(self) -> int:
        return self.bits.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self.indices.shape[0]) // 2

    def vertex(self, alpha) -> int:
        """Id of an ultrafilter, or ``-1`` when it was not enumerated."""
        return self.index.get(np.asarray(alpha, dtype=np.uint8).tobytes(), -1)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self):
        """Edges ``(u, v, pair)`` with ``u < v`` in CSR order."""
        for u in range(self.n_vertices):
            for p in range(self.indptr[u], self.indptr[u + 1]):
                v = int(self.indices[p])
                if u < v:
                    yield u, v, int(self.edge_pair[p])

    def distances_from(self, sources) -> np.ndarray:
        return kernels.bfs_distances(self.indptr, self.indices, np.asarray(sources, dtype=np.int64))

    def consistent_ids(self) -> np.ndarray:
        if self.consistent is None:
            raise ValueError("graph carries no consistency flags")
        return np.flatnonzero(self.consistent)


def enumerate_pi(P: PocSet, seed=None, oracle=None, max_vertices: int = DEFAULT_MAX_VERTICES,
                 max_radius: int | None = None, strict: bool = True, source: str = "") -> MedianGraph:
    """Breadth-first enumeration of the almost-equality class of ``seed``.

    Vertices beyond ``max_vertices`` or further than ``max_radius`` flips from
    the seed are not added; their would-be neighbours stay unexpanded.  With
    ``strict`` a truncated run raises :class:`BudgetExceeded` carrying the
    partial graph.
    """
    n = P.n_pairs
    if seed is None:
        seed = extend_to_ultrafilter(P, [])
    seed = np.asarray(seed, dtype=np.uint8)
    if not is_ultrafilter(P, seed):
        raise ValueError("seed is not an ultrafilter")
    rows, levels, index, adj, pairs = [], [], {}, [], []
    expanded = []
    if max_vertices > 0:
        index[seed.tobytes()] = 0
        rows.append(seed)
        levels.append(0)
        adj.append([])
        pairs.append([])
        expanded.append(False)
    lt = P.lt
    queue = deque(range(len(rows)))
    while queue:
        v = queue.popleft()
        alpha = rows[v]
        mask = kernels.minimal_mask(lt, sides_of(alpha))
        full = True
        for i in np.flatnonzero(mask):
            beta = alpha.copy()
            beta[i] ^= 1
            key = beta.tobytes()
            u = index.get(key)
            if u is None:
                if len(rows) >= max_vertices or (max_radius is not None and levels[v] + 1 > max_radius):
                    full = False
                    continue
                u = len(rows)
                index[key] = u
                rows.append(beta)
                levels.append(levels[v] + 1)
                adj.append([])
                pairs.append([])
                expanded.append(False)
                queue.append(u)
            if u not in adj[v]:
                adj[v].append(u)
                pairs[v].append(int(i))
                adj[u].append(v)
                pairs[u].append(int(i))
        expanded[v] = full
    V = len(rows)
    bits = np.array(rows, dtype=np.uint8).reshape(V, n)
    order = [np.argsort(a, kind="stable") for a in adj]
    indptr = np.zeros(V + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(a) for a in adj])
    indices = np.array([a[j] for a, o in zip(adj, order) for j in o], dtype=np.int64)
    edge_pair = np.array([p[j] for p, o in zip(pairs, order) for j in o], dtype=np.int64)
    expanded = np.array(expanded, dtype=bool)
    consistent = None
    if oracle is not None:
        consistent = np.asarray(oracle.batch(bits), dtype=bool) if V else np.zeros(0, dtype=bool)
    for arr in (bits, indptr, indices, edge_pair, expanded):
        arr.setflags(write=False)
    G = MedianGraph(P, bits, indptr, indices, edge_pair, expanded,
                    np.array(levels, dtype=np.int32), consistent,
                    complete=bool(V > 0 and expanded.all()), max_vertices=max_vertices,
                    max_radius=max_radius, oracle=oracle, source=source, index=index)
    if strict and not G.complete:
        raise BudgetExceeded(f"enumeration stopped at {V} vertices", graph=G)
    return G


def enumerate_arrangement(A: W.Arrangement, **kw) -> MedianGraph:
    """Enumeration seeded at the basepoint ultrafilter with the LP oracle."""
    return enumerate_pi(A.pocset, seed=W.choice_at(A, A.basepoint), oracle=GeometricOracle(A),
                        source=kw.pop("source", "arrangement"), **kw)


def _require(G: MedianGraph, alpha) -> int:
    v = G.vertex(alpha)
    if v < 0:
        raise IncompleteGraph("vertex not enumerated")
    return v


def geodesic(G: MedianGraph, alpha, beta) -> list:
    """Vertex ids of a shortest path, flipping the lowest eligible pair first."""
    cur = np.array(alpha, dtype=np.uint8)
    beta = np.asarray(beta, dtype=np.uint8)
    path = [_require(G, cur)]
    lt = G.P.lt
    while True:
        diff = cur != beta
        if not diff.any():
            return path
        mask = kernels.minimal_mask(lt, sides_of(cur)) & diff
        i = int(np.flatnonzero(mask)[0])
        cur[i] ^= 1
        path.append(_require(G, cur))


def consistent_geodesic(A: W.Arrangement, G: MedianGraph, a_pt, b_pt) -> list:
    """Path from ``B_a`` to ``B_b`` following the segment ``[a, b]``.

    Separating walls are grouped by their crossing point on the segment; the
    groups are processed in order of the segment parameter and each group is
    emptied by repeatedly flipping its lowest-index minimal element.  Each
    intermediate ultrafilter is checked to be supported at the crossing.
    """
    a_pt, b_pt = W.point(*a_pt), W.point(*b_pt)
    for ln in A.lines:
        va, vb = ln.value(a_pt), ln.value(b_pt)
        if va == 0 and vb == 0:
            raise DegenerateSegment("segment lies inside a wall")
        if va == 0 or vb == 0:
            raise NotGeneric("segment endpoints must avoid the walls")
    cur = W.choice_at(A, a_pt)
    path = [_require(G, cur)]
    groups = {}
    for i, ln in enumerate(A.lines):
        va, vb = ln.value(a_pt), ln.value(b_pt)
        if (va > 0) != (vb > 0):
            groups.setdefault(va / (va - vb), []).append(i)
    lt = G.P.lt
    for t in sorted(groups):
        p = (a_pt[0] + t * (b_pt[0] - a_pt[0]), a_pt[1] + t * (b_pt[1] - a_pt[1]))
        todo = set(groups[t])
        while todo:
            mask = kernels.minimal_mask(lt, sides_of(cur))
            ready = sorted(i for i in todo if mask[i])
            assert ready, "no minimal element in the crossing group"
            i = ready[0]
            cur[i] ^= 1
            todo.discard(i)
            assert W.supported_by(A, sides_of(cur), p), "path left the segment"
            path.append(_require(G, cur))
    return path


class CubeRecord(NamedTuple):
    base: int
    pairs: tuple     # transverse pair indices, all minimal at base
    dim: int


def _min_pairs(G: MedianGraph, v: int) -> np.ndarray:
    return np.flatnonzero(kernels.minimal_mask(G.P.lt, sides_of(G.bits[v])))


def _maximal_cliques(items: list, tr: np.ndarray) -> list:
    """Bron-Kerbosch with pivoting on a small transversality graph."""
    out = []

    def bk(r, p, x):
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: sum(1 for w in p if tr[u, w]))
        for u in sorted(p - {w for w in p if tr[pivot, w]}):
            nb = {w for w in p | x if tr[u, w]}
            bk(r | {u}, p & nb, x & nb)
            p = p - {u}
            x = x | {u}

    bk(set(), set(items), set())
    return sorted(out)


def cubes_at(G: MedianGraph, v: int) -> list:
    """Maximal cubes based at ``v``: maximal transverse subsets of ``min(v)``."""
    if not G.expanded[v]:
        raise FrontierClipped(f"vertex {v} lies on the enumeration frontier")
    items = [int(i) for i in _min_pairs(G, v)]
    if not items:
        return [CubeRecord(v, (), 0)]
    return [CubeRecord(v, c, len(c)) for c in _maximal_cliques(items, G.P.transverse)]


def vertex_degree(G: MedianGraph, v: int) -> int:
    if not G.expanded[v]:
        raise FrontierClipped(f"vertex {v} lies on the enumeration frontier")
    deg = int(G.indptr[v + 1] - G.indptr[v])
    assert deg == len(_min_pairs(G, v)), "edge/flip bijection broken"
    return deg


def complex_dimension(G: MedianGraph) -> int:
    """Largest cube over expanded vertices."""
    best = 0
    for v in np.flatnonzero(G.expanded):
        best = max(best, max(c.dim for c in cubes_at(G, int(v))))
    return best


def cube_corners(G: MedianGraph, cube: CubeRecord) -> list:
    """Ids of the ``2**dim`` corners (``-1`` for a missing corner)."""
    base = G.bits[cube.base]
    out = []
    for mask in range(1 << cube.dim):
        b = base.copy()
        for j, i in enumerate(cube.pairs):
            if mask >> j & 1:
                b[i] ^= 1
        out.append(G.vertex(b))
    return out


def hyperplane_dual(G: MedianGraph) -> PocSet:
    """Poc-set recovered from the graph: ``h <= k`` iff ``S_h`` is inside ``S_k``.

    ``S_h`` is the set of vertices containing ``h``.
    """
    if not G.complete:
        raise IncompleteGraph("roundtrip needs a complete enumeration")
    n = G.P.n_pairs
    M = np.empty((2 * n, G.n_vertices), dtype=np.float64)
    M[0::2] = (G.bits == 0).T
    M[1::2] = (G.bits == 1).T
    outside = M @ (1.0 - M).T
    return PocSet(outside == 0, labels=G.P.labels)


def export_graph(G: MedianGraph, fmt: str = "json", heights=None, cubes: bool = True) -> bytes:
    """Deterministic DOT or JSON rendering of the graph."""
    def bitstr(v):
        return "".join("1" if b else "0" for b in G.bits[v])

    def flag(v):
        return None if G.consistent is None else bool(G.consistent[v])

    def hgt(v):
        if heights is None or heights[v] < 0:
            return None
        return int(heights[v])

    edges = list(G.edges())
    if fmt == "json":
        doc = {
            "version": 1,
            "n_pairs": G.P.n_pairs,
            "labels": list(G.P.labels),
            "complete": G.complete,
            "budget": {"max_vertices": G.max_vertices, "max_radius": G.max_radius},
            "nodes": [{"id": v, "bits": bitstr(v), "consistent": flag(v), "height": hgt(v)}
                      for v in range(G.n_vertices)],
            "edges": [{"u": u, "v": v, "pair": p} for u, v, p in edges],
            "cubes": [{"base": c.base, "pairs": list(c.pairs)}
                      for v in range(G.n_vertices) if cubes and G.expanded[v]
                      for c in cubes_at(G, v) if c.dim >= 2],
        }
        return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode()
    if fmt == "dot":
        lines = ["graph pi {", "  node [shape=circle, style=filled, fontsize=8];"]
        for v in range(G.n_vertices):
            c = flag(v)
            colour = "#9ecae1" if c else ("#fc9272" if c is False else "#dddddd")
            h = hgt(v)
            label = bitstr(v) if h is None else f"{bitstr(v)}\\nh={h}"
            lines.append(f'  {v} [label="{label}", fillcolor="{colour}"];')
        for u, v, p in edges:
            lines.append(f'  {u} -- {v} [label="{G.P.labels[p]}"];')
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown graph format {fmt!r}")


def graph_from_json(P: PocSet, doc: dict) -> np.ndarray:
    """Vertex bit matrix of an exported graph (for reloading into checks)."""
    return np.array([[int(c) for c in node["bits"]] for node in doc["nodes"]],
                    dtype=np.uint8).reshape(len(doc["nodes"]), P.n_pairs)
