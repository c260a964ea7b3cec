"""Acceptance criteria 1-10, one test each.

Each test records a PASS/FAIL line that is printed in the pytest summary.
Run on its own with ``python3 tests/test_acceptance.py``.
"""
import sys
import time
from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest

from dualcube import analysis as An
from dualcube import checks as K
from dualcube import cubing as C
from dualcube import walls2d as W
from dualcube.pocset import (free_pocset, is_isomorphic, roller_chain_example, sides_of,
                             star_tree_example)
from conftest import ACCEPTANCE, arrangement, graph

HEX6_PWP_SQCONSTANT = F(64, 81)
GRID_F_RATIO = (0.5, 2.0)
QI_TOLERANCE = 0.10


def record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def degree_histogram(A, G, radius):
    v0 = G.vertex(W.choice_at(A, A.basepoint))
    d = G.distances_from([v0])
    return Counter(C.vertex_degree(G, int(v)) for v in np.flatnonzero((d >= 0) & (d <= radius)))


def test_criterion_1_triangle():
    t = time.perf_counter()
    A = W.arrangement_triangle()
    G = C.enumerate_arrangement(A)
    H = An.heights(G)
    bad = np.flatnonzero(~G.consistent)
    v = int(bad[0])
    mc = An.classify_min(G, H, v)
    cubes = C.cubes_at(G, v)
    elapsed = time.perf_counter() - t
    ok = (G.n_vertices == 8 and int(G.consistent.sum()) == 7 and bad.size == 1 and H[v] == 1
          and C.vertex_degree(G, v) == 3 and len(cubes) == 1 and cubes[0].dim == 3
          and len(mc.minus) == 3 and W.supports(A, mc.minus) is None and elapsed < 1.0)
    record(1, ok, f"8 vertices, 7 consistent, height {H[v]}, |min-| {len(mc.minus)}, {elapsed:.3f}s")


def test_criterion_2_hex2():
    t = time.perf_counter()
    A = W.arrangement_hex(2)
    G = C.enumerate_arrangement(A)
    chambers = len(W.enumerate_chambers(A))
    dim = C.complex_dimension(G)
    degs = [C.vertex_degree(G, v) for v in range(G.n_vertices)]
    elapsed = time.perf_counter() - t
    h2 = degree_histogram(A, G, 1)
    h3 = degree_histogram(arrangement("hex", 3), graph("hex", 3), 1)
    ok = (G.n_vertices == 216 and int(G.consistent.sum()) == chambers and dim == 3
          and max(degs) < np.inf and h2 == h3 and elapsed < 30)
    record(2, ok, f"{G.n_vertices} vertices, {chambers} chambers, dim {dim}, "
                  f"central degrees N=2 {dict(h2)} N=3 {dict(h3)}, {elapsed:.2f}s")


def test_criterion_3_shadow_suite():
    # hex N=3, 4 widen the trusted region that hex N=2 leaves after quarantine
    t = time.perf_counter()
    parts, violations = [], 0
    for kind, args in (("triangle", ()), ("hex", (2,)), ("hex", (3,)), ("hex", (4,))):
        A, G = arrangement(kind, *args), graph(kind, *args)
        H = An.heights(G)
        only = An.window_trusted(A, G, H)
        run = An.shadow_monotonicity_check(G, H, only)
        top = int(H.height[only].max())
        parts.append(f"{kind}{''.join(map(str, args))} {run['checked']}/{G.n_vertices} (hgt <= {top})")
        violations += len(run["violations"])
    elapsed = time.perf_counter() - t
    record(3, violations == 0 and elapsed < 60,
           f"trusted vertices {', '.join(parts)}; {violations} violations, {elapsed:.2f}s")


def test_criterion_4_height_oracle():
    total, bad = 0, 0
    for kind, args in (("triangle", ()), ("grid", (3,)), ("hex", (2,))):
        A = arrangement(kind, *args)
        G = graph(kind, *args)
        rec = K.Recorder("height-oracle", A, {})
        total += K.suite_height_oracle(A, G, rec, cap=2)
        bad += len(rec.records)
    record(4, bad == 0 and total > 0, f"{total} vertices of height <= 2, {bad} disagreements")


def test_criterion_5_distance_to_wall():
    bad, n = 0, 0
    for kind, args in (("triangle", ()), ("grid", (3,)), ("hex", (2,)), ("hex", (6,))):
        A = arrangement(kind, *args)
        rec = K.Recorder("distance-to-wall", A, {})
        K.suite_distance_to_wall(A, graph(kind, *args), rec, seed=0, samples=100)
        bad += len(rec.records)
        n += 100
    record(5, bad == 0, f"{n} samples over 4 instances, {bad} mismatches")


def test_criterion_6_slope():
    rows = []
    for kind, args in (("triangle", ()), ("grid", (3,)), ("hex", (2,)), ("hex", (6,))):
        A, G = arrangement(kind, *args), graph(kind, *args)
        base = G.vertex(W.choice_at(A, A.basepoint))
        rows += An.slope_chain(G, base, sides_of(G.bits[base]))
    chain_ok = all(r.holds for r in rows)
    A = W.arrangement_grid(24, base_radius=F(1, 10))
    table = An.f_table(A, range(3, 9))
    lo, hi = GRID_F_RATIO
    f_ok = all(f == r + 1 and lo <= q <= hi for r, f, q in table)
    ratios = ", ".join(f"{q:.3f}" for _, _, q in table)
    record(6, chain_ok and f_ok, f"chain holds for {len(rows)} k; grid f(r)/r r=3..8: {ratios}")


def test_criterion_7_parallel_walls():
    H6 = arrangement("hex", 6)
    c2 = W.pwp_sqconstant(H6)
    C = F(8, 9)
    above = W.check_parallel_walls(H6, C)
    below = W.check_parallel_walls(H6, C - F(1, 1000))
    P = W.arrangement_parallel(10)
    control = {c: len(W.check_parallel_walls(P, c)) for c in (F(1, 2), 1, 2, 4, F(499, 100), F(4999, 1000))}
    at_five = W.check_parallel_walls(P, 5)
    ok = (c2 == HEX6_PWP_SQCONSTANT and not above and below and all(control.values())
          and not at_five)
    record(7, ok, f"hex6 C^2 = {c2} (C ~ {float(c2) ** 0.5:.4f}); gap-10 control violations "
                  f"{sorted(control.values())} below 5, {len(at_five)} at 5")


def test_criterion_8_roundtrip():
    cases = {"triangle": arrangement("triangle").pocset, "grid2": arrangement("grid", 2).pocset,
             "hex1": arrangement("hex", 1).pocset}
    cases.update({f"free{k}": free_pocset(k) for k in range(1, 5)})
    cases.update({f"roller{n}": roller_chain_example(n) for n in range(1, 5)})
    cases.update({f"star{n}": star_tree_example(n) for n in range(3, 7)})
    failed = [name for name, P in cases.items()
              if is_isomorphic(P, C.hyperplane_dual(C.enumerate_pi(P))) is None]
    record(8, not failed, f"{len(cases) - len(failed)}/{len(cases)} recovered up to isomorphism")


def test_criterion_9_qi():
    t = time.perf_counter()
    A, G = arrangement("hex", 6), graph("hex", 6)
    a = An.qi_report(A, G, 500, seed=1)
    b = An.qi_report(A, G, 1000, seed=2)
    elapsed = time.perf_counter() - t
    rel_lam = abs(b.lam - a.lam) / a.lam
    rel_eps = abs(b.eps - a.eps) / a.eps
    ok = (np.isfinite([a.lam, a.eps, b.lam, b.eps]).all() and rel_lam <= QI_TOLERANCE
          and rel_eps <= QI_TOLERANCE and elapsed < 120)
    record(9, ok, f"lambda {a.lam:.3f} -> {b.lam:.3f} ({rel_lam:.1%}), "
                  f"eps {a.eps:.3f} -> {b.eps:.3f} ({rel_eps:.1%}), {elapsed:.1f}s")


def test_criterion_10_median_suites():
    docs = {"triangle": arrangement("triangle"), "grid2": arrangement("grid", 2),
            "grid3": arrangement("grid", 3), "hex1": arrangement("hex", 1),
            "hex2": arrangement("hex", 2), "free4": free_pocset(4)}
    docs.update({f"roller{n}": roller_chain_example(n) for n in range(1, 5)})
    docs.update({f"star{n}": star_tree_example(n) for n in range(3, 7)})
    bad = {}
    sizes = {}
    for name, inst in docs.items():
        G = K.build_graph(inst)
        sizes[name] = G.n_vertices
        assert G.n_vertices <= K.EXHAUSTIVE_VERTICES
        recs = K.run_suite(inst.to_json(), "median-axioms", {"seed": 0})
        if recs:
            bad[name] = len(recs)
    record(10, not bad, f"{len(docs)} instances up to {max(sizes.values())} vertices, "
                        f"violations {bad or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
