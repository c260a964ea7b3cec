"""Finite poc-sets, their ultrafilters and the median structure on them.

Halfspaces are encoded as integer codes ``2*pair + side`` with side 0 for
the *plus* element of a pair and 1 for its complement, so ``h ^ 1`` is
the involution.  The trivial elements are never stored.

An ultrafilter is a ``uint8`` vector with one entry per pair: entry ``i``
is the side of pair ``i`` it contains.  Ultrafilters are treated as
immutable; every operation returns a fresh array.
"""
from __future__ import annotations

import itertools
from typing import Iterable, NamedTuple

import numpy as np

from . import kernels
from .errors import NotFilterBase, NotMinimal, PocViolation, SchemaError

PLUS = 0
MINUS = 1


def hid(pair: int, side: int = PLUS) -> int:
    return 2 * pair + side


def star(h: int) -> int:
    return h ^ 1


def pair_of(h: int) -> int:
    return h >> 1


def side_of(h: int) -> int:
    return h & 1


def sides_of(choice) -> np.ndarray:
    """Halfspace codes contained in an ultrafilter."""
    choice = np.asarray(choice, dtype=np.int64)
    return 2 * np.arange(choice.shape[-1]) + choice


class PocSet:
    """A finite poc-set stored as a dense order matrix on proper elements.

    ``leq[h, k]`` is true iff ``h <= k``.  The constructor verifies the
    order axioms, star reversal and ``h <= h*`` never holding.
    """

    def __init__(self, leq, labels=None, relations=None, check=True):
        leq = np.array(leq, dtype=bool)
        m = leq.shape[0]
        if leq.shape != (m, m) or m % 2:
            raise PocViolation("order matrix must be square with an even side")
        self.n_pairs = m // 2
        if check:
            check_axioms(leq)
        leq.setflags(write=False)
        self.leq = leq
        lt = leq & ~np.eye(m, dtype=bool)
        lt.setflags(write=False)
        self.lt = lt
        if labels is None:
            labels = [f"h{i}" for i in range(self.n_pairs)]
        if len(labels) != self.n_pairs:
            raise SchemaError("one label per pair is required")
        self.labels = tuple(str(x) for x in labels)
        self.relations = None if relations is None else tuple(relations)
        # pairs i, j nested iff any of the four sides relations holds
        blocks = leq.reshape(self.n_pairs, 2, self.n_pairs, 2).any(axis=(1, 3))
        tr = ~blocks
        np.fill_diagonal(tr, False)
        tr.setflags(write=False)
        self.transverse = tr

    def __repr__(self):
        return f"PocSet(n_pairs={self.n_pairs})"

    def __eq__(self, other):
        return isinstance(other, PocSet) and np.array_equal(self.leq, other.leq)

    __hash__ = None

    def label(self, h: int) -> str:
        return self.labels[pair_of(h)] + ("*" if side_of(h) else "")

    def code(self, name: str) -> int:
        """Inverse of :meth:`label`: ``"a"`` or ``"a*"``."""
        minus = name.endswith("*")
        base = name[:-1] if minus else name
        return hid(self.labels.index(base), MINUS if minus else PLUS)

    def hasse(self) -> list:
        """Covering relations, one representative per star-symmetric pair."""
        lt = self.lt
        cover = lt & ~((lt.astype(np.uint8) @ lt.astype(np.uint8)) > 0)
        out = []
        for a, b in zip(*np.nonzero(cover)):
            a, b = int(a), int(b)
            if (a, b) <= (b ^ 1, a ^ 1):
                out.append((a, b))
        return out

    def to_json(self) -> dict:
        return {
            "n_pairs": self.n_pairs,
            "labels": list(self.labels),
            "relations": [list(r) for r in self.hasse()],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PocSet":
        try:
            n = int(doc["n_pairs"])
            rels = [(int(a), int(b)) for a, b in doc.get("relations", [])]
            labels = doc.get("labels")
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad poc-set document: {exc}") from exc
        return build_pocset(n, rels, labels=labels)


def check_axioms(leq):
    m = leq.shape[0]
    if not leq.diagonal().all():
        raise PocViolation("order is not reflexive")
    idx = np.arange(m)
    if leq[idx, idx ^ 1].any():
        h = int(np.nonzero(leq[idx, idx ^ 1])[0][0])
        raise PocViolation(f"proper element {h} satisfies h <= h*")
    anti = leq & leq.T & ~np.eye(m, dtype=bool)
    if anti.any():
        a, b = (int(x) for x in np.argwhere(anti)[0])
        raise PocViolation(f"antisymmetry fails for {a}, {b}")
    # star reversal: leq[a, b] == leq[b*, a*]
    if not np.array_equal(leq, leq[np.ix_(idx ^ 1, idx ^ 1)].T):
        raise PocViolation("order is not reversed by the involution")
    li = leq.astype(np.uint8)
    if (((li @ li) > 0) & ~leq).any():
        raise PocViolation("order is not transitive")


def build_pocset(n_pairs: int, relations: Iterable, labels=None) -> PocSet:
    """Smallest poc-set order on ``n_pairs`` pairs containing ``relations``."""
    m = 2 * n_pairs
    rel = np.eye(m, dtype=bool)
    relations = [(int(a), int(b)) for a, b in relations]
    for a, b in relations:
        if not (0 <= a < m and 0 <= b < m):
            raise PocViolation(f"relation ({a}, {b}) names an unknown halfspace")
        rel[a, b] = True
    idx = np.arange(m)
    while True:
        closed = kernels.transitive_closure(rel | rel[np.ix_(idx ^ 1, idx ^ 1)].T)
        if np.array_equal(closed, rel):
            break
        rel = closed
    check_axioms(rel)
    return PocSet(rel, labels=labels, relations=relations, check=False)


def free_pocset(n: int) -> PocSet:
    return build_pocset(n, [], labels=[chr(ord("a") + i) if n <= 26 else f"h{i}" for i in range(n)])


def roller_chain_example(n: int) -> PocSet:
    """Truncation of the poc-set generated by ``b_i <= a_i``, ``b_i <= b_{i+1}``.

    Pairs ``0..n-1`` are ``a_1..a_n`` and pairs ``n..2n-1`` are ``b_1..b_n``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rels = [(hid(n + i), hid(i)) for i in range(n)]
    rels += [(hid(n + i), hid(n + i + 1)) for i in range(n - 1)]
    labels = [f"a{i + 1}" for i in range(n)] + [f"b{i + 1}" for i in range(n)]
    return build_pocset(2 * n, rels, labels=labels)


def star_tree_example(n: int) -> PocSet:
    """Halfspaces of a star with ``n`` leaves: ``leaf_i <= leaf_j*`` for i != j."""
    if n < 3:
        raise ValueError("n must be at least 3")
    rels = [(hid(i), hid(j, MINUS)) for i in range(n) for j in range(n) if i != j]
    return build_pocset(n, rels, labels=[f"leaf{i + 1}" for i in range(n)])


class Relation(NamedTuple):
    kind: str  # "equal", "nested" or "transverse"
    holds: tuple = ()


def relation_of(P: PocSet, h: int, k: int) -> Relation:
    if h == k:
        return Relation("equal")
    tests = (("h<=k", h, k), ("h*<=k", h ^ 1, k), ("h<=k*", h, k ^ 1), ("h*<=k*", h ^ 1, k ^ 1))
    holds = tuple(name for name, a, b in tests if P.leq[a, b])
    return Relation("nested", holds) if holds else Relation("transverse")


def as_choice(P: PocSet, sides) -> np.ndarray:
    """Ultrafilter bit vector from a collection of halfspace codes (UF1 checked)."""
    choice = np.full(P.n_pairs, 255, dtype=np.uint8)
    for h in sides:
        i = pair_of(h)
        if choice[i] != 255:
            raise ValueError(f"pair {i} chosen twice")
        choice[i] = side_of(h)
    if (choice == 255).any():
        raise ValueError("not every pair is oriented")
    return choice


def is_filter_base(P: PocSet, members) -> bool:
    members = np.fromiter(members, dtype=np.int64)
    if members.size == 0:
        return True
    return kernels.uf2_ok(P.leq, members)


def is_ultrafilter(P: PocSet, choice) -> bool:
    """UF2 for a bit vector; UF1 and UF2 for a raw set of halfspace codes."""
    if isinstance(choice, (set, frozenset)):
        pairs = [pair_of(h) for h in choice]
        if len(set(pairs)) != len(pairs) or len(pairs) != P.n_pairs:
            return False
        return is_filter_base(P, choice)
    choice = np.asarray(choice)
    if choice.shape != (P.n_pairs,) or not np.isin(choice, (0, 1)).all():
        return False
    return kernels.uf2_ok(P.leq, sides_of(choice))


def extend_to_ultrafilter(P: PocSet, base) -> np.ndarray:
    """Greedy extension of a filter base, ascending pair index, plus preferred.

    Both sides of a pair can never be forbidden at once: ``p <= d1*`` and
    ``p* <= d2*`` give ``d2 <= d1*`` inside the current filter base.  So the
    greedy pass never needs to backtrack.
    """
    base = set(int(h) for h in base)
    if not is_filter_base(P, base):
        raise NotFilterBase("base violates UF2")
    choice = np.full(P.n_pairs, 255, dtype=np.uint8)
    for h in base:
        choice[pair_of(h)] = side_of(h)
    decided = np.zeros(2 * P.n_pairs, dtype=bool)
    decided[list(base)] = True
    for i in range(P.n_pairs):
        if choice[i] != 255:
            continue
        plus_bad = (P.leq[hid(i), :] & decided[np.arange(2 * P.n_pairs) ^ 1]).any()
        side = MINUS if plus_bad else PLUS
        choice[i] = side
        decided[hid(i, side)] = True
    return choice


def min_set(P: PocSet, alpha) -> frozenset:
    s = sides_of(alpha)
    return frozenset(int(h) for h in s[kernels.minimal_mask(P.lt, s)])


def flip(P: PocSet, alpha, a: int) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=np.uint8)
    if alpha[pair_of(a)] != side_of(a) or a not in min_set(P, alpha):
        raise NotMinimal(f"{P.label(a)} is not a minimal element of the ultrafilter")
    out = alpha.copy()
    out[pair_of(a)] ^= 1
    return out


def median(P: PocSet, alpha, beta, gamma) -> np.ndarray:
    s = np.asarray(alpha, dtype=np.int16) + np.asarray(beta) + np.asarray(gamma)
    out = (s >= 2).astype(np.uint8)
    assert is_ultrafilter(P, out), "median left the ultrafilters: poc-set invariant broken"
    return out


def delta(P: PocSet, alpha, beta) -> int:
    return int(np.count_nonzero(np.asarray(alpha) != np.asarray(beta)))


class TransverseResult(NamedTuple):
    size: int
    witness: frozenset  # pair indices
    exact: bool


def max_transverse(P: PocSet, budget: int = 1_000_000) -> TransverseResult:
    """Largest pairwise-transverse set of pairs (a maximum clique).

    Branch and bound over bitsets with a greedy-colouring bound, vertices
    taken in degeneracy order.  If more than ``budget`` search nodes are
    needed the best clique found so far is returned with ``exact=False``.
    """
    n = P.n_pairs
    if n == 0:
        return TransverseResult(0, frozenset(), True)
    adj = [0] * n
    for i, j in zip(*np.nonzero(P.transverse)):
        adj[int(i)] |= 1 << int(j)
    order = _degeneracy_order(adj, n)
    rank = {v: r for r, v in enumerate(order)}
    best = _greedy_clique(adj, order[::-1])
    nodes = 0
    exact = True

    def colour_bound(cand):
        # greedy colouring of cand; returns vertices with their colour numbers
        out = []
        colour = 0
        rest = cand
        while rest:
            colour += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~adj[v] & ~(1 << v)
                rest &= ~(1 << v)
                out.append((v, colour))
        return out

    def expand(clique, cand):
        nonlocal best, nodes, exact
        nodes += 1
        if nodes > budget:
            exact = False
            return
        coloured = colour_bound(cand)
        for v, c in reversed(coloured):
            if len(clique) + c <= len(best):
                return
            expand(clique + [v], cand & adj[v])
            if not exact:
                return
            cand &= ~(1 << v)
        if len(clique) > len(best):
            best = list(clique)

    # root: every vertex with its later neighbours in degeneracy order
    for v in reversed(order):
        later = 0
        for u in range(n):
            if adj[v] >> u & 1 and rank[u] > rank[v]:
                later |= 1 << u
        if 1 + bin(later).count("1") <= len(best):
            continue
        expand([v], later)
        if not exact:
            break
    return TransverseResult(len(best), frozenset(best), exact)


def _degeneracy_order(adj, n):
    deg = {v: bin(adj[v]).count("1") for v in range(n)}
    alive = set(range(n))
    order = []
    while alive:
        v = min(alive, key=lambda u: (deg[u], u))
        order.append(v)
        alive.discard(v)
        for u in alive:
            if adj[v] >> u & 1:
                deg[u] -= 1
    return order


def _greedy_clique(adj, order):
    best = []
    for start in order:
        clique = [start]
        cand = adj[start]
        for v in order:
            if cand >> v & 1:
                clique.append(v)
                cand &= adj[v]
        if len(clique) > len(best):
            best = clique
    return best


def is_isomorphic(P: PocSet, Q: PocSet, max_pairs: int = 64):
    """Brute-force poc-set isomorphism; returns a map on codes or ``None``.

    Each pair of ``P`` is sent to a pair of ``Q`` with an optional side swap;
    the search backtracks on the first order relation that fails.
    """
    n = P.n_pairs
    if n != Q.n_pairs:
        return None
    if n > max_pairs:
        raise ValueError(f"isomorphism search limited to {max_pairs} pairs")
    if n == 0:
        return {}

    def sig(R, h):
        return (int(R.leq[:, h].sum()), int(R.leq[h, :].sum()))

    p_sig = [sig(P, hid(i)) for i in range(n)]
    q_sides = [(j, s) for j in range(n) for s in (PLUS, MINUS)]
    cands = []
    for i in range(n):
        want = (p_sig[i], sig(P, hid(i, MINUS)))
        cands.append([(j, s) for j, s in q_sides
                      if (sig(Q, hid(j, s)), sig(Q, hid(j, 1 - s))) == want])
        if not cands[-1]:
            return None
    order = sorted(range(n), key=lambda i: (len(cands[i]), i))
    image = {}
    used = set()

    def compatible(i, j, s):
        for i2, (j2, s2) in image.items():
            for a, b in itertools.product((0, 1), repeat=2):
                if P.leq[hid(i, a), hid(i2, b)] != Q.leq[hid(j, a ^ s), hid(j2, b ^ s2)]:
                    return False
                if P.leq[hid(i2, b), hid(i, a)] != Q.leq[hid(j2, b ^ s2), hid(j, a ^ s)]:
                    return False
        return True

    def search(t):
        if t == n:
            return True
        i = order[t]
        for j, s in cands[i]:
            if j in used or not compatible(i, j, s):
                continue
            image[i] = (j, s)
            used.add(j)
            if search(t + 1):
                return True
            del image[i]
            used.discard(j)
        return False

    if not search(0):
        return None
    return {hid(i, a): hid(j, a ^ s) for i, (j, s) in image.items() for a in (0, 1)}
