"""Exact rational line arrangements in the plane as halfspace systems.

Lines are canonical integer triples ``(a, b, c)`` for ``ax + by + c = 0``.
Each pair of the poc-set is one line; its *plus* side is the open halfplane
``side * (ax + by + c) > 0`` with ``side`` stored per line, the minus side
is the complementary open halfplane.  Points are pairs of ``Fraction``.

The :class:`Window` is a disk inside which the arrangement is meant to be
complete: every wall of the idealised infinite system that meets the
window is present.  Answers that depend on truncation are restricted to
the *trusted* disk, the window shrunk by a margin.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import (GenerationFailed, InvalidArrangement, NotGeneric, SchemaError,
                     WindowTooSmall, XNotInK, ZeroDirection)
from .pocset import MINUS, PLUS, PocSet, hid, pair_of, side_of

Point = tuple  # (Fraction, Fraction)


def frac(x) -> Fraction:
    """Exact rational from an int, a Fraction, a string ``"p/q"`` or a float's repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as a rational")


def point(x, y) -> Point:
    return (frac(x), frac(y))


def rat_json(q: Fraction):
    q = frac(q)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Line:
    a: int
    b: int
    c: int

    @classmethod
    def make(cls, a, b, c) -> "Line":
        """Canonical line through rational coefficients."""
        a, b, c = frac(a), frac(b), frac(c)
        if a == 0 and b == 0:
            raise InvalidArrangement("degenerate line: a = b = 0")
        den = math.lcm(a.denominator, b.denominator, c.denominator)
        ia, ib, ic = int(a * den), int(b * den), int(c * den)
        g = gcd(gcd(ia, ib), ic)
        ia, ib, ic = ia // g, ib // g, ic // g
        if ia < 0 or (ia == 0 and ib < 0):
            ia, ib, ic = -ia, -ib, -ic
        return cls(ia, ib, ic)

    def value(self, p: Point) -> Fraction:
        return self.a * p[0] + self.b * p[1] + self.c

    @property
    def sqnorm(self) -> int:
        return self.a * self.a + self.b * self.b

    def parallel_to(self, other: "Line") -> bool:
        return self.a * other.b == self.b * other.a


@dataclass(frozen=True)
class HalfPlane:
    line: Line
    side: int  # +1 or -1

    @property
    def coef(self) -> tuple:
        s = self.side
        return (s * self.line.a, s * self.line.b, s * self.line.c)

    @property
    def star(self) -> "HalfPlane":
        return HalfPlane(self.line, -self.side)

    def value(self, p: Point) -> Fraction:
        return self.side * self.line.value(p)

    def contains(self, p: Point) -> bool:
        return self.value(p) > 0

    def closure_contains(self, p: Point) -> bool:
        return self.value(p) >= 0


@dataclass(frozen=True)
class Window:
    center: Point
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", point(*self.center))
        object.__setattr__(self, "radius", frac(self.radius))
        if self.radius <= 0:
            raise InvalidArrangement("window radius must be positive")

    def sqdist(self, p: Point) -> Fraction:
        return (p[0] - self.center[0]) ** 2 + (p[1] - self.center[1]) ** 2

    def contains(self, p: Point) -> bool:
        return self.sqdist(p) < self.radius ** 2

    def square(self) -> list:
        cx, cy = self.center
        r = self.radius
        return [(cx - r, cy - r), (cx + r, cy - r), (cx + r, cy + r), (cx - r, cy + r)]

    def shrunk(self, by) -> "Window | None":
        r = self.radius - frac(by)
        return Window(self.center, r) if r > 0 else None


def _in_disk(center, radius, p) -> bool:
    return (p[0] - center[0]) ** 2 + (p[1] - center[1]) ** 2 <= radius ** 2


class Arrangement:
    """A finite system of open halfplane pairs with window and basepoint."""

    def __init__(self, lines: Sequence[Line], sides: Sequence[int], window: Window,
                 basepoint: Point, base_radius=0, labels=None, truncated: bool = False):
        # truncated: the lines are a window of an infinite periodic system
        self.truncated = bool(truncated)
        self.lines = tuple(lines)
        self.sides = tuple(int(s) for s in sides)
        self.window = window
        self.basepoint = point(*basepoint)
        self.base_radius = frac(base_radius)
        n = len(self.lines)
        if len(self.sides) != n:
            raise InvalidArrangement("one side per line is required")
        if any(s not in (1, -1) for s in self.sides):
            raise InvalidArrangement("sides must be +1 or -1")
        if len(set(self.lines)) != n:
            raise InvalidArrangement("duplicate walls")
        if self.base_radius < 0:
            raise InvalidArrangement("base radius must be nonnegative")
        for i, ln in enumerate(self.lines):
            v = ln.value(window.center)
            if v * v >= window.radius ** 2 * ln.sqnorm:
                raise InvalidArrangement(f"line {i} misses the open window")
            if ln.value(self.basepoint) == 0:
                raise InvalidArrangement("basepoint lies on a wall")
        self.labels = tuple(labels) if labels is not None else tuple(f"w{i}" for i in range(n))
        pc = np.array([[s * ln.a, s * ln.b, s * ln.c] for ln, s in zip(self.lines, self.sides)],
                      dtype=np.int64 if n == 0 or _fits(self.lines) else object).reshape(n, 3)
        sc = np.empty((2 * n, 3), dtype=pc.dtype)
        sc[0::2] = pc
        sc[1::2] = -pc
        pc.setflags(write=False)
        sc.setflags(write=False)
        self.pair_coef = pc
        self.side_coef = sc

    @property
    def n_pairs(self) -> int:
        return len(self.lines)

    def __repr__(self):
        return f"Arrangement(n_pairs={self.n_pairs}, window={self.window})"

    def halfplane(self, h: int) -> HalfPlane:
        i = pair_of(h)
        s = self.sides[i] if side_of(h) == PLUS else -self.sides[i]
        return HalfPlane(self.lines[i], s)

    def value(self, h: int, p: Point) -> Fraction:
        A, B, C = (int(x) for x in self.side_coef[h])
        return A * p[0] + B * p[1] + C

    def side_sqnorm(self, h: int) -> int:
        return self.lines[pair_of(h)].sqnorm

    @cached_property
    def pocset(self) -> PocSet:
        return pocset_of(self)[0]

    @cached_property
    def big_box(self) -> list:
        """Axis box containing every crossing point and the window square."""
        xs = [p[0] for p in self.window.square()]
        ys = [p[1] for p in self.window.square()]
        for p in _crossings(self.lines):
            xs.append(p[0])
            ys.append(p[1])
        lo_x, hi_x, lo_y, hi_y = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1
        return [(lo_x, lo_y), (hi_x, lo_y), (hi_x, hi_y), (lo_x, hi_y)]

    @cached_property
    def chambers(self) -> list:
        return enumerate_chambers(self)

    @cached_property
    def default_margin(self) -> Fraction:
        """Twice a rational upper bound on the largest chamber diameter.

        Only bounded chambers lying inside the window square count, so the
        huge cells cut out by the outermost walls do not inflate the margin.
        """
        inner = [c for c in self.chambers if c.bounded and not c.clipped] or \
            [c for c in self.chambers if c.bounded]
        d2 = max((c.sqdiameter for c in inner), default=Fraction(0))
        q = Fraction(math.ceil(math.sqrt(d2) * 1000), 1000)
        while q * q < d2:
            q += Fraction(1, 1000)
        return 2 * q

    def trusted(self, margin=None) -> Window | None:
        """The trusted disk, or ``None`` when the margin eats the window."""
        m = self.default_margin if margin is None else frac(margin)
        return self.window.shrunk(m)

    def to_json(self) -> dict:
        return {
            "lines": [[ln.a, ln.b, ln.c] for ln in self.lines],
            "sides": list(self.sides),
            "window": {"center": [rat_json(self.window.center[0]), rat_json(self.window.center[1])],
                       "radius": rat_json(self.window.radius)},
            "basepoint": [rat_json(self.basepoint[0]), rat_json(self.basepoint[1])],
            "base_radius": rat_json(self.base_radius),
            "labels": list(self.labels),
            "truncated": self.truncated,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Arrangement":
        try:
            lines = [Line.make(*row) for row in doc["lines"]]
            sides = doc.get("sides", [1] * len(lines))
            w = doc["window"]
            window = Window(point(*w["center"]), frac(w["radius"]))
            base = point(*doc["basepoint"])
            r0 = frac(doc.get("base_radius", 0))
            labels = doc.get("labels")
            truncated = bool(doc.get("truncated", False))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad arrangement document: {exc}") from exc
        return cls(lines, sides, window, base, r0, labels=labels, truncated=truncated)


def _fits(lines) -> bool:
    return all(max(abs(ln.a), abs(ln.b), abs(ln.c)) <= kernels.INT64_COEF_BOUND for ln in lines)


def _crossing(l1: Line, l2: Line):
    d = l1.a * l2.b - l2.a * l1.b
    if d == 0:
        return None
    return (Fraction(l1.b * l2.c - l2.b * l1.c, d), Fraction(l2.a * l1.c - l1.a * l2.c, d))


def _crossings(lines):
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            p = _crossing(lines[i], lines[j])
            if p is not None:
                yield p


# ---------------------------------------------------------------- generators

def _oriented(lines, labels, window, basepoint, base_radius=0, truncated=False) -> Arrangement:
    sides = [1 if ln.value(basepoint) > 0 else -1 for ln in lines]
    return Arrangement(lines, sides, window, basepoint, base_radius, labels=labels, truncated=truncated)


HEX_SHEAR = Fraction(7, 4)


def arrangement_hex(N: int, window: Window | None = None, base_radius=0) -> Arrangement:
    """Three families of parallels in the sheared hexagonal model.

    ``r_n: y = n + 1/3``, ``s_n: 7x - 4y = 8n`` and ``t_n: 7x + 4y = 8n``
    for ``-N <= n <= N``, i.e. directions (1, 0), (1, 7/4), (-1, 7/4).  The
    1/3 offset keeps every crossing a double point.  Plus sides contain the
    basepoint (0, 1/6), which sits in the small central triangle.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    lines, labels = [], []
    for n in range(-N, N + 1):
        lines.append(Line.make(0, 3, -3 * n - 1))
        labels.append(f"r{n}")
    for n in range(-N, N + 1):
        lines.append(Line.make(7, -4, -8 * n))
        labels.append(f"s{n}")
    for n in range(-N, N + 1):
        lines.append(Line.make(7, 4, -8 * n))
        labels.append(f"t{n}")
    if window is None:
        # nearest missing walls: r at N + 2/3, s/t at 8(N+1)/sqrt(65) > 63(N+1)/64
        window = Window((0, 0), min(Fraction(3 * N + 2, 3), Fraction(63 * (N + 1), 64)))
    return _oriented(lines, labels, window, point(0, Fraction(1, 6)), base_radius, truncated=True)


def arrangement_triangle(window: Window | None = None, base_radius=0) -> Arrangement:
    lines = [Line.make(0, 1, 0), Line.make(1, 0, 0), Line.make(1, 1, -4)]
    base = point(Fraction(4, 3), Fraction(4, 3))
    if window is None:
        window = Window(base, 4)
    return _oriented(lines, ["y0", "x0", "x+y4"], window, base, base_radius)


def arrangement_grid(N: int, window: Window | None = None, base_radius=0) -> Arrangement:
    """``N`` vertical and ``N`` horizontal unit-spaced lines, centred.

    Lines sit at integers ``lo .. lo + N - 1`` with ``lo = -floor((N - 1)/2)``;
    the default window is the largest centred disk missing the next lattice
    lines, and the basepoint is (1/2, 1/2).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    lo = -((N - 1) // 2)
    vals = range(lo, lo + N)
    lines = [Line.make(1, 0, -v) for v in vals] + [Line.make(0, 1, -v) for v in vals]
    labels = [f"x{v}" for v in vals] + [f"y{v}" for v in vals]
    if window is None:
        c = Fraction(2 * lo + N - 1, 2)
        window = Window((c, c), Fraction(N + 1, 2))
    return _oriented(lines, labels, window, point(Fraction(1, 2), Fraction(1, 2)), base_radius,
                     truncated=True)


def arrangement_parallel(gap=10, window: Window | None = None) -> Arrangement:
    """Two parallel vertical walls ``gap`` apart (the PWP negative control)."""
    gap = frac(gap)
    lines = [Line.make(1, 0, 0), Line.make(1, 0, -gap)]
    base = point(gap / 2, 0)
    if window is None:
        window = Window(base, gap / 2 + 1)
    return _oriented(lines, ["left", "right"], window, base)


def arrangement_random(n: int, seed: int, window: Window | None = None,
                       max_coef: int = 6, retries: int = 1000) -> Arrangement:
    """``n`` random lines through random rational points of the window."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if window is None:
        window = Window((0, 0), 4)
    rng = np.random.default_rng(seed)

    def rand_point():
        for _ in range(retries):
            den = int(rng.integers(1, 5))
            r = window.radius
            p = (window.center[0] + Fraction(int(rng.integers(-4 * den, 4 * den + 1)), 4 * den) * r,
                 window.center[1] + Fraction(int(rng.integers(-4 * den, 4 * den + 1)), 4 * den) * r)
            if window.contains(p):
                return p
        raise GenerationFailed("could not sample a window point")

    lines = []
    tries = 0
    while len(lines) < n:
        tries += 1
        if tries > retries:
            raise GenerationFailed(f"gave up after {retries} rejected lines")
        a, b = (int(v) for v in rng.integers(-max_coef, max_coef + 1, size=2))
        if a == 0 and b == 0:
            continue
        p = rand_point()
        ln = Line.make(a, b, -(a * p[0] + b * p[1]))
        if ln in lines:
            continue
        lines.append(ln)
    for _ in range(retries):
        base = rand_point()
        if all(ln.value(base) != 0 for ln in lines):
            return _oriented(lines, [f"w{i}" for i in range(n)], window, base)
    raise GenerationFailed("could not find a generic basepoint")


# ---------------------------------------------------------------- order

def pocset_of(A: Arrangement):
    """Containment order of the open halfplanes; returns (PocSet, code -> HalfPlane).

    Crossing lines give transverse pairs.  For parallel lines write each side
    as an open ray ``t > u`` or ``t < u`` of ``t = n . p`` for a common
    normal ``n``; rays of the same direction nest by their endpoints.
    """
    n = A.n_pairs
    leq = np.eye(2 * n, dtype=bool)
    # per side: (group key, direction, endpoint) in units of a shared normal
    rays = []
    for h in range(2 * n):
        hp = A.halfplane(h)
        ln = hp.line
        g = gcd(ln.a, ln.b)
        base = (ln.a // g, ln.b // g)
        # ln = g * base . p + c, so the side is s*(t + c/g) > 0
        u = Fraction(-ln.c, g)
        rays.append((base, hp.side, u))
    for h in range(2 * n):
        bh, dh, uh = rays[h]
        for k in range(2 * n):
            if h == k:
                continue
            bk, dk, uk = rays[k]
            if bh != bk or dh != dk or pair_of(h) == pair_of(k):
                continue
            # {t > uh} in {t > uk} iff uh >= uk; {t < uh} in {t < uk} iff uh <= uk
            if (dh > 0 and uh >= uk) or (dh < 0 and uh <= uk):
                leq[h, k] = True
    P = PocSet(leq, labels=A.labels)
    return P, {h: A.halfplane(h) for h in range(2 * n)}


# ---------------------------------------------------------------- polygons

def clip(poly: list, coef) -> list:
    """Sutherland-Hodgman clip of a convex polygon by ``A x + B y + C >= 0``."""
    A, B, C = (int(x) for x in coef)
    out = []
    m = len(poly)
    for i in range(m):
        p, q = poly[i], poly[(i + 1) % m]
        vp = A * p[0] + B * p[1] + C
        vq = A * q[0] + B * q[1] + C
        if vp >= 0:
            out.append(p)
        if (vp > 0 and vq < 0) or (vp < 0 and vq > 0):
            t = vp / (vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    dedup = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    while len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def clip_all(poly: list, coefs) -> list:
    for c in coefs:
        poly = clip(poly, c)
        if not poly:
            break
    return poly


def area2(poly: list) -> Fraction:
    """Twice the signed area."""
    s = Fraction(0)
    for i in range(len(poly)):
        p, q = poly[i], poly[(i + 1) % len(poly)]
        s += p[0] * q[1] - q[0] * p[1]
    return s


def vertex_average(poly: list) -> Point:
    m = len(poly)
    return (sum((p[0] for p in poly), Fraction(0)) / m, sum((p[1] for p in poly), Fraction(0)) / m)


def sqdiameter(poly: list) -> Fraction:
    best = Fraction(0)
    for i in range(len(poly)):
        for j in range(i + 1, len(poly)):
            d = (poly[i][0] - poly[j][0]) ** 2 + (poly[i][1] - poly[j][1]) ** 2
            best = max(best, d)
    return best


def _recession_trivial(normals) -> bool:
    """True iff {d : n . d >= 0 for all normals} is {0}."""
    normals = [(int(a), int(b)) for a, b in normals]
    if not normals:
        return False
    for a, b in normals:
        for d in ((-b, a), (b, -a)):
            if all(x * d[0] + y * d[1] >= 0 for x, y in normals):
                return False
    return True


def _window_coefs(w: Window) -> list:
    cx, cy = w.center
    r = w.radius
    out = []
    for A, B, C in ((1, 0, r - cx), (-1, 0, r + cx), (0, 1, r - cy), (0, -1, r + cy)):
        den = math.lcm(frac(C).denominator, 1)
        out.append((A * den, B * den, int(frac(C) * den)))
    return out


# ---------------------------------------------------------------- consistency

def _codes(S) -> np.ndarray:
    return np.fromiter((int(h) for h in S), dtype=np.int64)


def is_consistent(A: Arrangement, S) -> bool:
    """Closed halfplanes of ``S`` share a point; the empty set is inconsistent."""
    codes = _codes(S)
    if codes.size == 0:
        return False
    return kernels.halfplanes_feasible(A.side_coef[codes])


def consistent_batch(A: Arrangement, choices: np.ndarray) -> np.ndarray:
    choices = np.asarray(choices, dtype=np.int64)
    if choices.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    sides = 2 * np.arange(choices.shape[1]) + choices
    if choices.shape[1] == 0:
        return np.zeros(choices.shape[0], dtype=bool)
    return np.asarray(kernels.halfplanes_feasible_batch(A.side_coef, sides), dtype=bool)


def support_region(A: Arrangement, S) -> list:
    """Polygon of ``\\bigcap cl(h)`` intersected with the big box (may be degenerate)."""
    return clip_all(list(A.big_box), [A.side_coef[h] for h in _codes(S)])


def supports(A: Arrangement, S):
    """A rational point of ``\\bigcap_{h in S} cl(h)``, or ``None``.

    The witness lies in the window whenever the region meets it: it is the
    point of the region nearest to the window centre.
    """
    codes = _codes(S)
    if codes.size == 0 or not kernels.halfplanes_feasible(A.side_coef[codes]):
        return None
    region = support_region(A, codes)
    assert region, "feasible constraints must meet the big box"
    c = A.window.center
    if all(A.value(int(h), c) >= 0 for h in codes):
        return c
    best, best_d = None, None
    m = len(region)
    for i in range(m):
        p, q = region[i], region[(i + 1) % m]
        dx, dy = q[0] - p[0], q[1] - p[1]
        L = dx * dx + dy * dy
        t = Fraction(0) if L == 0 else min(max(((c[0] - p[0]) * dx + (c[1] - p[1]) * dy) / L, Fraction(0)), Fraction(1))
        f = (p[0] + t * dx, p[1] + t * dy)
        d = A.window.sqdist(f)
        if best_d is None or d < best_d:
            best, best_d = f, d
    if A.window.contains(best):
        return best
    return vertex_average(region)


def supported_by(A: Arrangement, S, x: Point) -> bool:
    return all(A.value(int(h), x) >= 0 for h in S)


# ---------------------------------------------------------------- points

def is_generic(A: Arrangement, x: Point) -> bool:
    return all(ln.value(x) != 0 for ln in A.lines)


def b_x(A: Arrangement, x: Point) -> frozenset:
    """Halfspaces strictly containing ``x``; pairs through ``x`` stay undecided."""
    x = point(*x)
    out = set()
    for i in range(A.n_pairs):
        v = A.value(hid(i), x)
        if v > 0:
            out.add(hid(i))
        elif v < 0:
            out.add(hid(i, MINUS))
    return frozenset(out)


def choice_at(A: Arrangement, x: Point) -> np.ndarray:
    """``B_x`` as an ultrafilter bit vector; ``x`` must be generic."""
    x = point(*x)
    out = np.empty(A.n_pairs, dtype=np.uint8)
    for i in range(A.n_pairs):
        v = A.value(hid(i), x)
        if v == 0:
            raise NotGeneric(f"point lies on wall {A.labels[i]}")
        out[i] = PLUS if v > 0 else MINUS
    return out


class Chamber(NamedTuple):
    choice: np.ndarray   # the ultrafilter B_x
    region: list         # exact polygon, clipped only by the big box
    polygon: list        # region clipped to the window square
    bounded: bool
    clipped: bool
    rep: Point           # deterministic interior point

    @property
    def sqdiameter(self) -> Fraction:
        return sqdiameter(self.region)


def _chamber_from_choice(A: Arrangement, choice) -> Chamber:
    codes = 2 * np.arange(A.n_pairs) + np.asarray(choice, dtype=np.int64)
    coefs = [A.side_coef[h] for h in codes]
    region = clip_all(list(A.big_box), coefs)
    bounded = _recession_trivial([(c[0], c[1]) for c in coefs])
    poly = clip_all(list(region), _window_coefs(A.window))
    clipped = len(poly) != len(region) or any(p not in region for p in poly)
    rep = vertex_average(poly) if len(poly) >= 3 and area2(poly) != 0 else vertex_average(region)
    ch = np.asarray(choice, dtype=np.uint8).copy()
    ch.setflags(write=False)
    return Chamber(ch, region, poly, bounded, clipped, rep)


def chamber(A: Arrangement, x: Point) -> Chamber:
    return _chamber_from_choice(A, choice_at(A, x))


def enumerate_chambers(A: Arrangement) -> list:
    """All chambers, by walking across chamber edges from the basepoint."""
    start = choice_at(A, A.basepoint)
    seen = {start.tobytes()}
    out = []
    queue = deque([start])
    while queue:
        choice = queue.popleft()
        ch = _chamber_from_choice(A, choice)
        out.append(ch)
        reg = ch.region
        for e in range(len(reg)):
            p, q = reg[e], reg[(e + 1) % len(reg)]
            if p == q:
                continue
            for i, ln in enumerate(A.lines):
                if ln.value(p) == 0 and ln.value(q) == 0:
                    nxt = choice.copy()
                    nxt[i] ^= 1
                    key = nxt.tobytes()
                    if key not in seen:
                        seen.add(key)
                        queue.append(nxt)
                    break
    return out


def count_chambers(A: Arrangement) -> int:
    """Face count ``1 + L + sum_p (m_p - 1)`` over crossing points ``p``."""
    through = {}
    for i in range(A.n_pairs):
        for j in range(i + 1, A.n_pairs):
            p = _crossing(A.lines[i], A.lines[j])
            if p is not None:
                through.setdefault(p, set()).update((i, j))
    return 1 + A.n_pairs + sum(len(s) - 1 for s in through.values())


# ---------------------------------------------------------------- distances

def sqdist_to_complement(A: Arrangement, x: Point, h: int) -> Fraction:
    x = point(*x)
    v = A.value(h, x)
    if v <= 0:
        return Fraction(0)
    return v * v / A.side_sqnorm(h)


def dist_to_complement(A: Arrangement, x: Point, h: int) -> float:
    return math.sqrt(sqdist_to_complement(A, x, h))


def sqwidth(A: Arrangement, a: int, b: int) -> Fraction:
    """Squared distance between the walls of ``a`` and ``b*`` (0 if they cross)."""
    la, lb = A.lines[pair_of(a)], A.lines[pair_of(b)]
    if not la.parallel_to(lb):
        return Fraction(0)
    p = _foot(la, A.window.center)
    return lb.value(p) ** 2 / lb.sqnorm


def width(A: Arrangement, a: int, b: int) -> float:
    return math.sqrt(sqwidth(A, a, b))


def _foot(ln: Line, x: Point) -> Point:
    t = ln.value(x) / ln.sqnorm
    return (x[0] - t * ln.a, x[1] - t * ln.b)


def s_set(A: Arrangement, x: Point, k: int) -> frozenset:
    """``S(x, k) = {h : x in h <= k}``."""
    x = point(*x)
    if A.value(k, x) <= 0:
        raise XNotInK(f"point is not in {A.pocset.label(k)}")
    leq = A.pocset.leq
    return frozenset(h for h in range(2 * A.n_pairs) if leq[h, k] and A.value(h, x) > 0)


def ball_inside(A: Arrangement, h: int, center: Point, radius) -> bool:
    """Closed ball inside the open halfplane ``h``."""
    v = A.value(h, center)
    r = frac(radius)
    return v > 0 and v * v > r * r * A.side_sqnorm(h)


def f_of_r(A: Arrangement, r, margin=None):
    """Fewest ``h`` with ``B0 <= h <= k`` over ``k`` containing ``B(x0, r)``.

    Returns ``math.inf`` when no halfspace contains the ball.
    """
    r = frac(r)
    if r <= 0:
        raise ValueError("r must be positive")
    tw = A.trusted(margin)
    x0 = A.basepoint
    if tw is None or (math.sqrt(tw.sqdist(x0)) + r > tw.radius):
        raise WindowTooSmall(f"B(x0, {r}) leaves the trusted disk")
    leq = A.pocset.leq
    m = 2 * A.n_pairs
    around_b0 = np.array([ball_inside(A, h, x0, A.base_radius) for h in range(m)], dtype=bool)
    best = math.inf
    for k in range(m):
        if ball_inside(A, k, x0, r):
            best = min(best, int((around_b0 & leq[:, k]).sum()))
    return best


def walls_meeting_ball(A: Arrangement, center: Point, radius) -> int:
    """Number of walls meeting the closed ball (``T0`` for the base ball)."""
    r = frac(radius)
    return sum(1 for ln in A.lines if ln.value(center) ** 2 <= r * r * ln.sqnorm)


class PWPViolation(NamedTuple):
    x: Point
    h: int
    sqdist: Fraction


def _pwp_candidates(A: Arrangement, margin=None):
    """(rep, h, d^2) for chamber reps and h with no k between, within the trusted disk."""
    tw = A.trusted(margin)
    if tw is None:
        return []
    lt = A.pocset.lt
    out = []
    for ch in A.chambers:
        x = ch.rep
        if not _in_disk(tw.center, tw.radius, x):
            continue
        inside = [h for h in range(2 * A.n_pairs) if A.value(h, x) > 0]
        inside_mask = np.zeros(2 * A.n_pairs, dtype=bool)
        inside_mask[inside] = True
        for h in inside:
            if (lt[:, h] & inside_mask).any():
                continue
            ln = A.lines[pair_of(h)]
            if not _in_disk(tw.center, tw.radius, _foot(ln, x)):
                continue
            out.append(PWPViolation(x, h, sqdist_to_complement(A, x, h)))
    return out


def check_parallel_walls(A: Arrangement, C, margin=None) -> list:
    """Chamber representatives ``x`` and ``h`` with ``d(x, h*) > C`` but no ``x in k < h``.

    Only pairs whose perpendicular from ``x`` to the wall stays in the
    trusted disk are examined, so every reported violation is genuine for
    the idealised infinite system.
    """
    C = frac(C)
    if C <= 0:
        raise ValueError("C must be positive")
    return [v for v in _pwp_candidates(A, margin) if v.sqdist > C * C]


def pwp_sqconstant(A: Arrangement, margin=None) -> Fraction:
    """Smallest ``C**2`` for which :func:`check_parallel_walls` reports nothing."""
    return max((v.sqdist for v in _pwp_candidates(A, margin)), default=Fraction(0))


def boundary_T(A: Arrangement, xi) -> frozenset:
    """Halfplanes whose inward normal has positive inner product with ``xi``."""
    xi = point(*xi)
    if xi[0] == 0 and xi[1] == 0:
        raise ZeroDirection("direction must be nonzero")
    sc = A.side_coef
    return frozenset(h for h in range(2 * A.n_pairs) if sc[h][0] * xi[0] + sc[h][1] * xi[1] > 0)


def conical_depth(A: Arrangement, xi) -> int:
    """Length of the longest strictly descending chain inside ``T(xi)``."""
    T = sorted(boundary_T(A, xi))
    if not T:
        return 0
    lt = A.pocset.lt
    T.sort(key=lambda h: int(lt[:, h].sum()))
    depth = {}
    for h in T:
        depth[h] = 1 + max((depth[k] for k in depth if lt[k, h]), default=0)
    return max(depth.values())


# ---------------------------------------------------------------- svg

def to_svg(A: Arrangement, chambers=True, regions=(), size=480) -> str:
    """SVG of walls and chambers in the window; ``regions`` are (polygon, colour, opacity)."""
    w = A.window
    cx, cy, R = (float(v) for v in (*w.center, w.radius))
    s = size / (2 * R)

    def tx(p):
        return (float(p[0]) - cx + R) * s, (cy + R - float(p[1])) * s

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<circle cx="{size / 2:.3f}" cy="{size / 2:.3f}" r="{size / 2:.3f}" fill="none" stroke="#bbb"/>']
    if chambers:
        for ch in A.chambers:
            if len(ch.polygon) >= 3:
                pts = " ".join("%.3f,%.3f" % tx(p) for p in ch.polygon)
                parts.append(f'<polygon points="{pts}" fill="#f4f4f4" stroke="none"/>')
    for poly, colour, opacity in regions:
        if len(poly) >= 3:
            pts = " ".join("%.3f,%.3f" % tx(p) for p in poly)
            parts.append(f'<polygon points="{pts}" fill="{colour}" fill-opacity="{opacity}" stroke="{colour}"/>')
    sq = A.window.square()
    for i, ln in enumerate(A.lines):
        seg = _clip_line(ln, sq)
        if seg:
            (x1, y1), (x2, y2) = tx(seg[0]), tx(seg[1])
            parts.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                         f'stroke="#333" stroke-width="1"><title>{A.labels[i]}</title></line>')
    bx, by = tx(A.basepoint)
    parts.append(f'<circle cx="{bx:.3f}" cy="{by:.3f}" r="3" fill="#c00"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _clip_line(ln: Line, square: list):
    pts = []
    for i in range(4):
        p, q = square[i], square[(i + 1) % 4]
        vp, vq = ln.value(p), ln.value(q)
        if vp == 0:
            pts.append(p)
        if (vp > 0 > vq) or (vp < 0 < vq):
            t = vp / (vp - vq)
            pts.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    pts = sorted(set(pts))
    return (pts[0], pts[-1]) if len(pts) >= 2 else None
