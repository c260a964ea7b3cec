"""Named invariant suites returning violation records with reproducers.

Every record carries the instance document and the suite parameters, so
``run_suite`` on the record's ``reproducer`` reproduces it from scratch.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from . import analysis as An
from . import cubing as C
from . import kernels
from . import walls2d as W
from .pocset import PocSet, is_isomorphic, median, pair_of, sides_of

SUITES = ("median-axioms", "shadow-lemmas", "height-oracle", "duality-roundtrip", "pwp",
          "distance-to-wall", "slope-chain")
EXHAUSTIVE_VERTICES = 500


def load_instance(doc: dict):
    """Arrangement documents have ``lines``; anything else is a poc-set."""
    if "lines" in doc:
        return W.Arrangement.from_json(doc)
    return PocSet.from_json(doc)


def instance_doc(inst) -> dict:
    return inst.to_json()


def build_graph(inst, **budget) -> C.MedianGraph:
    if isinstance(inst, W.Arrangement):
        return C.enumerate_arrangement(inst, **budget)
    return C.enumerate_pi(inst, **budget)


def _bits(G, v) -> str:
    return "".join(map(str, G.bits[v]))


class Recorder:
    def __init__(self, suite, inst, params):
        self.suite = suite
        self.base = {"input": instance_doc(inst), "suite": suite, "params": params}
        self.records = []

    def add(self, check, detail, **where):
        self.records.append({"suite": self.suite, "check": check, "detail": detail,
                             "where": where, "reproducer": self.base})


def suite_median_axioms(inst, G, rec: Recorder, seed: int = 0, limit: int = EXHAUSTIVE_VERTICES):
    P = G.P
    V = G.n_vertices
    exhaustive = V <= limit
    rng = np.random.default_rng(seed)
    Hm = kernels.hamming_matrix(G.bits, G.bits)
    sources = range(V) if exhaustive else rng.choice(V, size=min(V, 64), replace=False)
    for s in sources:
        d = G.distances_from([int(s)])
        bad = np.flatnonzero(d != Hm[s])
        if bad.size:
            rec.add("delta-is-path-length", "graph distance differs from Delta",
                    u=_bits(G, int(s)), v=_bits(G, int(bad[0])))
    if G.consistent is not None:
        cons = G.consistent_ids()
        sub = {int(u): j for j, u in enumerate(cons)}
        indptr, indices = [0], []
        for u in cons:
            indices.extend(sub[int(w)] for w in G.neighbors(int(u)) if int(w) in sub)
            indptr.append(len(indices))
        indptr, indices = np.array(indptr), np.array(indices, dtype=np.int64)
        srcs = range(len(cons)) if exhaustive else rng.choice(len(cons), size=min(len(cons), 64), replace=False)
        for j in srcs:
            d = kernels.bfs_distances(indptr, indices, [int(j)])
            bad = np.flatnonzero(d != Hm[cons[j]][cons])
            if bad.size:
                rec.add("consistent-geodesic", "consistent subgraph distance differs from Delta",
                        u=_bits(G, int(cons[j])), v=_bits(G, int(cons[bad[0]])))
    for v in range(V):
        if not G.expanded[v]:
            continue
        mins = An._min_codes(G, v)
        if int(G.indptr[v + 1] - G.indptr[v]) != len(mins):
            rec.add("edge-flip-bijection", "degree differs from |min|", v=_bits(G, v))
        for a in mins:
            u = An._flip_id(G, v, int(a))
            if u < 0:
                rec.add("flip-involution", f"flip of {P.label(int(a))} not enumerated", v=_bits(G, v))
                continue
            if int(a) ^ 1 not in set(int(x) for x in An._min_codes(G, u)) or An._flip_id(G, u, int(a) ^ 1) != v:
                rec.add("flip-involution", f"flipping {P.label(int(a))} back fails", v=_bits(G, v))
        for cube in C.cubes_at(G, v):
            if -1 in C.cube_corners(G, cube):
                rec.add("cube-closure", f"missing corner of cube {cube.pairs}", v=_bits(G, v))
    if exhaustive and P.n_pairs <= 64 and V:
        if kernels.median_interval_violations(G.bits):
            a, b = _first_interval_failure(G, Hm)
            rec.add("interval-equality", "median set differs from the interval",
                    u=_bits(G, a), v=_bits(G, b))
    if V:
        triples = itertools.product(range(V), repeat=3) if V <= 16 else \
            (tuple(int(x) for x in rng.integers(0, V, 3)) for _ in range(2000))
        for a, b, c in triples:
            A_, B_, C_ = G.bits[a], G.bits[b], G.bits[c]
            m = median(P, A_, B_, C_)
            ok = np.array_equal(median(P, A_, A_, B_), A_) and \
                np.array_equal(m, median(P, B_, C_, A_)) and G.vertex(m) >= 0
            if not ok:
                rec.add("majority", "median axiom fails", u=_bits(G, a), v=_bits(G, b), w=_bits(G, c))
        quints = itertools.product(range(V), repeat=5) if V <= 6 else \
            (tuple(int(x) for x in rng.integers(0, V, 5)) for _ in range(2000))
        for a, b, c, d, e in quints:
            X = [G.bits[i] for i in (a, b, c, d, e)]
            lhs = median(P, median(P, X[0], X[1], X[2]), X[3], X[4])
            rhs = median(P, X[0], median(P, X[1], X[3], X[4]), median(P, X[2], X[3], X[4]))
            if not np.array_equal(lhs, rhs):
                rec.add("five-point", "five-point law fails", u=_bits(G, a))


def _first_interval_failure(G, Hm):
    V = G.n_vertices
    for a in range(V):
        for b in range(V):
            meds = {G.vertex((G.bits[a].astype(int) + G.bits[b] + G.bits[m] >= 2).astype(np.uint8))
                    for m in range(V)}
            interval = set(np.flatnonzero(Hm[a] + Hm[b] == Hm[a, b]).tolist())
            if meds != interval:
                return a, b
    return 0, 0


def suite_shadow_lemmas(inst, G, rec: Recorder):
    H = An.heights(G)
    only = An.window_trusted(inst, G, H) if isinstance(inst, W.Arrangement) else None
    run = An.shadow_monotonicity_check(G, H, only)
    for x in run["violations"]:
        rec.add(x.lemma, x.detail, v=_bits(G, x.vertex))
    return run["checked"]


def suite_height_oracle(inst, G, rec: Recorder, cap: int = 2):
    H = An.heights(G)
    cons = G.consistent_ids()
    Hm = kernels.hamming_matrix(G.bits, G.bits[cons]).min(axis=1)
    checked = 0
    for v in range(G.n_vertices):
        if not H.trusted[v] or H.height[v] > cap:
            continue
        checked += 1
        o = An.height_oracle(G, v, cap)
        if o != H.height[v]:
            rec.add("min-deletion", f"oracle {o} vs BFS {H.height[v]}", v=_bits(G, v))
        if G.complete and Hm[v] != H.height[v]:
            rec.add("hamming-height", f"nearest consistent at {Hm[v]} vs BFS {H.height[v]}", v=_bits(G, v))
    return checked


def suite_duality_roundtrip(inst, G, rec: Recorder):
    Q = C.hyperplane_dual(G)
    if is_isomorphic(G.P, Q) is None:
        rec.add("roundtrip", "recovered poc-set is not isomorphic to the input")


def suite_pwp(inst, G, rec: Recorder, C_=None, margin=None):
    if C_ is None:
        raise ValueError("the pwp suite needs a scale C")
    for v in W.check_parallel_walls(inst, C_, margin):
        rec.add("parallel-walls", f"d(x, h*)^2 = {v.sqdist} with nothing in between",
                point=[W.rat_json(v.x[0]), W.rat_json(v.x[1])], h=inst.pocset.label(v.h))


def suite_distance_to_wall(inst, G, rec: Recorder, seed: int = 0, samples: int = 100):
    rng = np.random.default_rng(seed)
    pts = An.sample_generic_points(inst, samples, rng)
    for x in pts:
        pi = W.choice_at(inst, x)
        v = G.vertex(pi)
        ks = [int(h) for h in sides_of(pi)]
        k = ks[int(rng.integers(0, len(ks)))]
        S = W.s_set(inst, x, k)
        d = An.distance_to_side(G, v, k ^ 1)
        proj = An.project_to_side(G, pi, k ^ 1)
        dp = int(np.count_nonzero(proj != pi))
        if d != len(S) or dp != len(S):
            rec.add("distance-to-wall", f"Delta {d}, projection {dp}, |S(x,k)| {len(S)}",
                    point=[W.rat_json(x[0]), W.rat_json(x[1])], k=inst.pocset.label(k))


def suite_slope_chain(inst, G, rec: Recorder, radii=(), margin=None):
    base = G.vertex(W.choice_at(inst, inst.basepoint))
    ks = sorted(int(h) for h in sides_of(G.bits[base]))
    for row in An.slope_chain(G, base, ks):
        if not row.holds:
            rec.add("slope-chain", f"{row.to_side} <= {row.to_consistent} <= 2*{row.to_side} fails",
                    k=inst.pocset.label(row.k))
    for r, f, q in An.f_table(inst, radii, margin):
        if not (0 < q < float("inf")):
            rec.add("f-linear", f"f({r}) = {f}", r=W.rat_json(r))


GEOMETRIC = {"pwp", "distance-to-wall", "slope-chain"}


def run_suite(doc: dict, suite: str, params: dict | None = None) -> list:
    """Run one suite on an instance document; returns violation records."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    params = dict(params or {})
    inst = load_instance(doc)
    if suite in GEOMETRIC | {"shadow-lemmas", "height-oracle"} and not isinstance(inst, W.Arrangement):
        raise ValueError(f"suite {suite} needs an arrangement")
    budget = {k: params[k] for k in ("max_vertices", "max_radius") if params.get(k) is not None}
    strict = suite in ("duality-roundtrip", "slope-chain", "distance-to-wall")
    G = build_graph(inst, strict=strict, **budget)
    rec = Recorder(suite, inst, params)
    margin = params.get("margin")
    if suite == "median-axioms":
        suite_median_axioms(inst, G, rec, seed=params.get("seed", 0))
    elif suite == "shadow-lemmas":
        suite_shadow_lemmas(inst, G, rec)
    elif suite == "height-oracle":
        suite_height_oracle(inst, G, rec, cap=params.get("cap", 2))
    elif suite == "duality-roundtrip":
        suite_duality_roundtrip(inst, G, rec)
    elif suite == "pwp":
        c = params.get("C")
        suite_pwp(inst, G, rec, None if c is None else Fraction(str(c)), margin)
    elif suite == "distance-to-wall":
        suite_distance_to_wall(inst, G, rec, seed=params.get("seed", 0), samples=params.get("samples", 100))
    elif suite == "slope-chain":
        suite_slope_chain(inst, G, rec, [Fraction(str(r)) for r in params.get("radii", [])], margin)
    return rec.records


def replay(record: dict) -> list:
    """Re-run the suite behind a violation record; returns the matching records."""
    rep = record["reproducer"]
    again = run_suite(rep["input"], rep["suite"], rep["params"])
    return [r for r in again if r["check"] == record["check"] and r["where"] == record["where"]]
