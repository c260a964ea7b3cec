import json
import math
from fractions import Fraction as F

import numpy as np
import pytest

from dualcube import analysis as An
from dualcube import cubing as C
from dualcube import kernels
from dualcube import walls2d as W
from dualcube.errors import CapExceeded, EmptySide, MInPi, NoConsistentVertex
from dualcube.pocset import MINUS, PLUS, free_pocset, hid, sides_of
from conftest import arrangement, graph


def verticals_graph(xs):
    lines = [W.Line.make(1, 0, -c) for c in xs]
    A = W.Arrangement(lines, [-1] * len(xs), W.Window((0, 0), max(xs) + 2), W.point(0, 0))
    return A, C.enumerate_arrangement(A)


def triangle_bad():
    G = graph("triangle")
    return G, int(np.flatnonzero(~G.consistent)[0])


def test_triangle_heights_and_classes():
    G, v = triangle_bad()
    H = An.heights(G)
    assert H[v] == 1 and H.levels == {0: 7, 1: 1}
    assert An.height_oracle(G, v, 2) == 1
    assert An.height_oracle(G, 0, 2) == 0
    mc = An.classify_min(G, H, v)
    assert mc.minus == {1, 3, 5} and not mc.plus and not mc.zero
    assert W.supports(arrangement("triangle"), mc.minus) is None
    s = An.shadow(G, H, v, arrangement("triangle"))
    assert len(s.shadow) == 3 and s.dual_shadow == frozenset()
    assert s.geometric_shadow == arrangement("triangle").window.square()


def test_consistent_shadow_is_itself():
    A = arrangement("triangle")
    G = graph("triangle")
    H = An.heights(G)
    v = G.vertex(W.choice_at(A, A.basepoint))
    s = An.shadow(G, H, v, A)
    assert s.shadow == {v}
    assert s.dual_shadow == frozenset(int(h) for h in sides_of(G.bits[v]))
    assert W.area2(s.geometric_shadow) == W.area2(W.chamber(A, A.basepoint).polygon)
    assert not An.classify_min(G, H, v).minus


def test_hex_levels():
    assert An.heights(graph("hex", 2)).levels == {0: 91, 1: 49, 2: 36, 3: 25, 4: 13, 5: 2}
    assert An.heights(graph("hex", 3)).levels == {0: 169, 1: 100, 2: 81, 3: 64, 4: 49, 5: 33, 6: 14, 7: 2}


def test_height_flip_law_and_min_minus():
    A = arrangement("hex", 2)
    G = graph("hex", 2)
    H = An.heights(G)
    only = An.window_trusted(A, G, H)
    for v in range(G.n_vertices):
        mc = An.classify_min(G, H, v)
        if G.consistent[v]:
            assert not mc.minus
            continue
        assert mc.minus
        if not only[v]:
            continue
        assert len(mc.minus) >= 3
        assert W.supports(A, mc.minus) is None


def test_height_oracle_matches_bfs():
    G = graph("hex", 2)
    H = An.heights(G)
    rng = np.random.default_rng(0)
    low = np.flatnonzero(H.height <= 2)
    for v in rng.choice(low, size=60, replace=False):
        assert An.height_oracle(G, int(v), 2) == H[int(v)]
    with pytest.raises(CapExceeded):
        An.height_oracle(G, int(np.flatnonzero(H.height == 3)[0]), 2)


def test_no_consistent_vertex():
    G = C.enumerate_pi(free_pocset(2))
    object.__setattr__(G, "consistent", np.zeros(G.n_vertices, dtype=bool))
    with pytest.raises(NoConsistentVertex):
        An.heights(G)


def test_shadow_lemmas():
    G = graph("triangle")
    run = An.shadow_monotonicity_check(G, An.heights(G))
    assert run["violations"] == [] and run["checked"] == 8
    A = arrangement("hex", 2)
    G = graph("hex", 2)
    H = An.heights(G)
    only = An.window_trusted(A, G, H)
    assert only.any()
    run = An.shadow_monotonicity_check(G, H, only)
    assert run["violations"] == []


def test_truncation_counterexamples_sit_at_the_boundary():
    # the finite hex truncation breaks the shadow lemmas only near the window
    # edge; the quarantine must contain every offender
    A = arrangement("hex", 2)
    G = graph("hex", 2)
    H = An.heights(G)
    only = An.window_trusted(A, G, H)
    bad = {x.vertex for x in An.shadow_monotonicity_check(G, H)["violations"]}
    assert bad and not any(only[v] for v in bad)


def test_shadow_matches_bfs_reading():
    G = graph("hex", 2)
    H = An.heights(G)
    cons = G.consistent_ids()
    for v in range(0, G.n_vertices, 5):
        d = G.distances_from([v])
        bfs = {int(u) for u in cons if d[u] == H[v]}
        assert An.shadow(G, H, v).shadow == bfs


def test_project_to_side_chain():
    A, G = verticals_graph([1, 2, 3])
    pi = W.choice_at(A, (0, 0))
    m = hid(2, MINUS)   # {x > 3}
    out = An.project_to_side(G, pi, m)
    assert int(np.count_nonzero(out != pi)) == 3
    v = G.vertex(pi)
    assert An.distance_to_side(G, v, m) == 3
    # single flip across the nearest wall
    assert int(np.count_nonzero(An.project_to_side(G, pi, hid(0, MINUS)) != pi)) == 1
    with pytest.raises(MInPi):
        An.project_to_side(G, pi, hid(0, PLUS))


def test_projection_is_nearest():
    G = graph("hex", 2)
    rng = np.random.default_rng(5)
    for _ in range(100):
        v = int(rng.integers(G.n_vertices))
        m = int(rng.choice([h ^ 1 for h in sides_of(G.bits[v])]))
        out = An.project_to_side(G, G.bits[v], m)
        ids = An.side_ids(G, m)
        best = kernels.hamming_matrix(G.bits[v:v + 1], G.bits[ids]).min()
        assert int(np.count_nonzero(out != G.bits[v])) == best == An.distance_to_side(G, v, m)


def test_distance_to_wall_law_hex():
    A = arrangement("hex", 2)
    G = graph("hex", 2)
    rng = np.random.default_rng(1)
    for x in An.sample_generic_points(A, 100, rng):
        pi = W.choice_at(A, x)
        k = int(rng.choice(sides_of(pi)))
        proj = An.project_to_side(G, pi, k ^ 1)
        assert int(np.count_nonzero(proj != pi)) == len(W.s_set(A, x, k))


def test_gate_and_special_pairs():
    A = arrangement("grid", 4)
    G = graph("grid", 4)
    sp = An.special_pairs(A)
    assert sp and all(p.sqwidth == 1 for p in sp)
    g = An.gate(G, sp[0].a, sp[0].b)
    assert g.distance == g.interval_size == 2
    xs = [i for i, l in enumerate(A.labels) if l[0] == "x"]
    lt = A.pocset.lt
    chain = [(a, b) for a in range(2 * A.n_pairs) for b in range(2 * A.n_pairs)
             if a // 2 in xs and b // 2 in xs and lt[a, b] and An.interval_size(G, a, b) == 3]
    assert chain
    g = An.gate(G, *chain[0])
    assert g.distance == 3
    with pytest.raises(ValueError):
        An.gate(G, sp[0].b, sp[0].a)
    P = W.arrangement_parallel(10)
    sp = An.special_pairs(P)
    assert len(sp) == 1 and sp[0].width == 10


def test_gate_empty_side():
    A = arrangement("grid", 4)
    G = C.enumerate_arrangement(A, max_vertices=1, strict=False)
    sp = An.special_pairs(A)[0]
    with pytest.raises(EmptySide):
        An.gate(G, sp.a, sp.b)


def test_grid_delta_counts_separating_walls():
    A = arrangement("grid", 6)
    rng = np.random.default_rng(2)
    pts = An.sample_generic_points(A, 40, rng)
    for x, y in zip(pts[0::2], pts[1::2]):
        crossed = sum(1 for ln in A.lines if (ln.value(x) > 0) != (ln.value(y) > 0))
        assert int(np.count_nonzero(W.choice_at(A, x) != W.choice_at(A, y))) == crossed


def test_qi_report_bounds_every_pair():
    A = arrangement("hex", 2)
    G = graph("hex", 2)
    q = An.qi_report(A, G, 200, seed=4)
    assert q.lam >= 1 and q.eps >= q.eps_sample
    for _, _, d, k in q.samples:
        assert d / q.lam - q.eps - 1e-9 <= k <= q.lam * d + q.eps + 1e-9
    # a denser independent sample never beats the window supremum
    pts = An.sample_generic_points(A, 2000, np.random.default_rng(9))
    for x, y in zip(pts[0::2], pts[1::2]):
        d = math.hypot(float(x[0] - y[0]), float(x[1] - y[1]))
        k = int(np.count_nonzero(W.choice_at(A, x) != W.choice_at(A, y)))
        assert max(k - q.lam * d, d / q.lam - k) <= q.eps + 1e-9
    same = [(d, k) for x, y, d, k in q.samples if k == 0]
    assert all(d / q.lam <= q.eps + 1e-9 for d, _ in same)


def test_slope_chain_and_report():
    A = arrangement("triangle")
    G = graph("triangle")
    base = G.vertex(W.choice_at(A, A.basepoint))
    rows = An.slope_chain(G, base, sides_of(G.bits[base]))
    assert rows and all(r.holds for r in rows)
    A = arrangement("grid", 24)
    G = graph("grid", 24)
    rep = An.slope_report(A, G, [3, 4, 5, 6])
    assert rep["chain_holds"]
    assert [row[1] for row in rep["f"]] == [4, 5, 6, 7]


def test_analysis_report_is_json():
    A = arrangement("hex", 2)
    G = graph("hex", 2)
    doc = An.analysis_report(A, G)
    again = json.loads(json.dumps(doc))
    assert again["version"] == An.REPORT_VERSION
    svg = An.shadow_overlay_svg(A, G)
    assert svg.lstrip().startswith("<svg") or svg.lstrip().startswith("<?xml")
