"""Body-centred cubic lattice geometry.

Vertices are plain tuples of ints whose coordinates share a parity; an edge
joins two vertices that differ by exactly one in every coordinate.  Regions
are logical (possibly unbounded) vertex sets; a :class:`Window` is the finite
box every computation is truncated to.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Vertex = tuple[int, ...]
SignStep = tuple[int, ...]
Bound = tuple[float, float]

MIN_DIM = 2
MAX_DIM = 6


def _check_dim(d: int) -> None:
    if not MIN_DIM <= d <= MAX_DIM:
        raise ValueError(f"dimension must be in [{MIN_DIM}, {MAX_DIM}], got {d}")


def is_vertex(coords: Sequence[int], d: int | None = None) -> bool:
    """Return True iff all coordinates are congruent mod 2."""
    if d is not None and len(coords) != d:
        raise ValueError(f"expected {d} coordinates, got {len(coords)}")
    if len(coords) < MIN_DIM:
        raise ValueError(f"dimension must be at least {MIN_DIM}")
    first = coords[0] & 1
    return all((c & 1) == first for c in coords)


def as_vertex(coords: Iterable[int], d: int | None = None) -> Vertex:
    v = tuple(int(c) for c in coords)
    if not is_vertex(v, d):
        raise ValueError(f"{v} is not a BCC vertex (mixed parity)")
    return v


def sign_steps(d: int) -> list[SignStep]:
    """All 2^d sign vectors, lexicographic with -1 before +1."""
    return list(itertools.product((-1, 1), repeat=d))


def neighbors(v: Vertex) -> list[Vertex]:
    """The 2^d neighbours of ``v`` in lexicographic step order."""
    return [tuple(a + s for a, s in zip(v, step)) for step in sign_steps(len(v))]


def are_adjacent(x: Vertex, y: Vertex) -> bool:
    return len(x) == len(y) and all(abs(a - b) == 1 for a, b in zip(x, y))


def linf_distance(x: Vertex, y: Vertex) -> int:
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    return max(abs(a - b) for a, b in zip(x, y))


# -- edges -----------------------------------------------------------------

EdgeKey = tuple[Vertex, SignStep]


def canonical_edge(x: Vertex, y: Vertex) -> EdgeKey:
    """Canonical ``(lower, up_signs)`` form of the edge between ``x`` and ``y``.

    ``lower`` is the endpoint with the smaller last coordinate and
    ``up_signs`` the signs of the first d-1 coordinates of ``upper - lower``.
    """
    if not are_adjacent(x, y):
        raise ValueError(f"{x} and {y} are not adjacent")
    lower, upper = (x, y) if x[-1] < y[-1] else (y, x)
    return lower, tuple(b - a for a, b in zip(lower[:-1], upper[:-1]))


def edge_endpoints(key: EdgeKey) -> tuple[Vertex, Vertex]:
    lower, up = key
    upper = tuple(a + s for a, s in zip(lower[:-1], up)) + (lower[-1] + 1,)
    return lower, upper


# -- windows ---------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """Finite coordinate box ``lo <= x <= hi`` (componentwise, inclusive)."""

    lo: Vertex
    hi: Vertex

    def __post_init__(self) -> None:
        lo = tuple(int(c) for c in self.lo)
        hi = tuple(int(c) for c in self.hi)
        if len(lo) != len(hi):
            raise ValueError("lo and hi differ in length")
        _check_dim(len(lo))
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"empty window lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    def contains(self, v: Sequence[int]) -> bool:
        return all(a <= c <= b for a, c, b in zip(self.lo, v, self.hi))

    def vertices(self) -> Iterator[Vertex]:
        """Lattice vertices inside the window, in lexicographic order."""
        return _box_vertices(self.lo, self.hi)

    def edges(self) -> list[EdgeKey]:
        """Edges with both endpoints in the window, in EdgeId index order."""
        d = self.dim
        ups = list(itertools.product((-1, 1), repeat=d - 1))
        out = []
        for v in self.vertices():
            if v[-1] + 1 > self.hi[-1]:
                continue
            for up in ups:
                if all(self.lo[i] <= v[i] + up[i] <= self.hi[i] for i in range(d - 1)):
                    out.append((v, up))
        return out

    def edge_index(self) -> dict[EdgeKey, int]:
        return {e: i for i, e in enumerate(self.edges())}

    def intersect(self, region: "Region") -> "Window | None":
        """The box ``window ∩ region`` or None when it is empty."""
        lo, hi = [], []
        for (a, b), (ra, rb) in zip(zip(self.lo, self.hi), region.bounds(self.dim)):
            a2 = a if ra == -math.inf else max(a, int(ra))
            b2 = b if rb == math.inf else min(b, int(rb))
            if a2 > b2:
                return None
            lo.append(a2)
            hi.append(b2)
        return Window(tuple(lo), tuple(hi))

    def translate(self, x: Vertex) -> "Window":
        return Window(
            tuple(a + c for a, c in zip(self.lo, x)),
            tuple(b + c for b, c in zip(self.hi, x)),
        )

    def to_text(self) -> str:
        return "x".join(f"{a}..{b}" for a, b in zip(self.lo, self.hi))

    @classmethod
    def parse(cls, text: str) -> "Window":
        """Parse ``lo1..hi1xlo2..hi2x...``."""
        lo, hi = [], []
        for part in text.split("x"):
            a, sep, b = part.partition("..")
            if not sep:
                raise ValueError(f"bad window interval {part!r}")
            lo.append(int(a))
            hi.append(int(b))
        return cls(tuple(lo), tuple(hi))


def _box_vertices(lo: Sequence[int], hi: Sequence[int]) -> Iterator[Vertex]:
    # merge the two parity classes so the output is lexicographically sorted
    classes = []
    for parity in (0, 1):
        axes = []
        for a, b in zip(lo, hi):
            start = a if (a & 1) == parity else a + 1
            axes.append(range(start, b + 1, 2))
        classes.append(itertools.product(*axes))
    return iter(sorted(itertools.chain(*classes)))


# -- regions ---------------------------------------------------------------

_INF = math.inf


@dataclass(frozen=True)
class Region:
    """A logical sublattice.

    ``kind`` is one of ``"V"`` (full space), ``"H"`` (half-space),
    ``"halfslab"`` (params ``(l, e)``), ``"slab"`` (params ``(t,)``) or
    ``"box"`` (params: one ``(lo, hi)`` pair per axis, ``±inf`` allowed).
    """

    kind: str
    params: tuple = ()

    def __post_init__(self) -> None:
        k, p = self.kind, self.params
        if k in ("V", "H"):
            if p:
                raise ValueError(f"region {k} takes no parameters")
        elif k == "slab":
            if len(p) != 1 or int(p[0]) < 1:
                raise ValueError("slab needs t >= 1")
        elif k == "halfslab":
            if len(p) != 2 or int(p[0]) < 1 or int(p[1]) < 2:
                raise ValueError("halfslab needs l >= 1 and e >= 2")
        elif k == "box":
            if not p or any(len(iv) != 2 or iv[0] > iv[1] for iv in p):
                raise ValueError("box needs (lo, hi) pairs with lo <= hi")
        else:
            raise ValueError(f"unknown region kind {k!r}")

    @classmethod
    def full_space(cls) -> "Region":
        return cls("V")

    @classmethod
    def half_space(cls) -> "Region":
        return cls("H")

    @classmethod
    def slab(cls, t: int) -> "Region":
        return cls("slab", (int(t),))

    @classmethod
    def half_slab(cls, l: int, e: int) -> "Region":
        return cls("halfslab", (int(l), int(e)))

    @classmethod
    def box(cls, intervals: Sequence[tuple[float, float]]) -> "Region":
        return cls("box", tuple((_bound(a), _bound(b)) for a, b in intervals))

    def bounds(self, d: int) -> list[Bound]:
        """Per-axis closed coordinate bounds (``±inf`` when unbounded)."""
        free = [(-_INF, _INF)] * d
        if self.kind == "V":
            return free
        if self.kind == "H":
            return free[:-1] + [(0, _INF)]
        if self.kind == "slab":
            return free[:-1] + [(0, self.params[0])]
        if self.kind == "halfslab":
            l, e = self.params
            if e > d:
                raise ValueError(f"half-slab dimension e={e} exceeds d={d}")
            return [(-l, l)] * (d - e) + free[d - e : -1] + [(0, _INF)]
        if len(self.params) != d:
            raise ValueError(f"box has {len(self.params)} intervals, d={d}")
        return list(self.params)

    def contains(self, v: Vertex) -> bool:
        if not is_vertex(v):
            return False
        return all(a <= c <= b for c, (a, b) in zip(v, self.bounds(len(v))))

    def as_box(self, d: int) -> "Region":
        return Region.box(self.bounds(d))

    def to_text(self) -> str:
        if self.kind in ("V", "H"):
            return self.kind
        if self.kind == "slab":
            return f"slab:{self.params[0]}"
        if self.kind == "halfslab":
            return f"halfslab:{self.params[0]},{self.params[1]}"
        return "box:" + "x".join(f"{_fmt(a)}..{_fmt(b)}" for a, b in self.params)

    @classmethod
    def parse(cls, text: str) -> "Region":
        """Parse ``H | V | slab:<t> | halfslab:<l>,<e> | box:<lo..hi>x...``."""
        text = text.strip()
        if text in ("H", "V"):
            return cls(text)
        kind, sep, rest = text.partition(":")
        if not sep:
            raise ValueError(f"bad region {text!r}")
        try:
            if kind == "slab":
                return cls.slab(int(rest))
            if kind == "halfslab":
                l, e = rest.split(",")
                return cls.half_slab(int(l), int(e))
            if kind == "box":
                ivs = []
                for part in rest.split("x"):
                    a, sep2, b = part.partition("..")
                    if not sep2:
                        raise ValueError(part)
                    ivs.append((_parse_bound(a), _parse_bound(b)))
                return cls.box(ivs)
        except ValueError as exc:
            raise ValueError(f"bad region {text!r}") from exc
        raise ValueError(f"unknown region kind {kind!r}")


def _bound(x: float) -> float:
    if x in (_INF, -_INF):
        return x
    return int(x)


def _parse_bound(s: str) -> float:
    s = s.strip()
    if s in ("inf", "+inf"):
        return _INF
    if s == "-inf":
        return -_INF
    return int(s)


def _fmt(x: float) -> str:
    if x == _INF:
        return "inf"
    if x == -_INF:
        return "-inf"
    return str(int(x))


def region_contains(region: Region, v: Vertex) -> bool:
    return region.contains(v)


def box_set(intervals: Sequence[tuple[int, int]]) -> set[Vertex]:
    """Vertices of the finite box ``B(prod [l_i, r_i])``."""
    lo = [a for a, _ in intervals]
    hi = [b for _, b in intervals]
    if any(a > b for a, b in zip(lo, hi)):
        return set()
    return set(_box_vertices(lo, hi))


def seed_block(r: int, d: int, level: int = 0) -> set[Vertex]:
    """``B([-r, r]^{d-1} x level)``."""
    return box_set([(-r, r)] * (d - 1) + [(level, level)])


# -- boundary sets of the block construction ---------------------------------


def boundary_set(
    kind: str,
    l: int,
    t: int,
    d: int,
    orthant: Sequence[int] | None = None,
) -> set[Vertex]:
    """Boundary sets of the box ``B([-l, l]^{d-1} x [0, t])``.

    kind
        ``"T"``: top layer ``x_d = t``; ``"F"``: side faces (``|x_i| = l``
        for some ``i < d``); ``"F+"``: the face ``x_{d-1} = l``;
        ``"T_orthant"``: points of T in the closed orthant given by
        ``orthant`` (d-1 signs); ``"F_face_orthant"``: points of ``F+`` in
        the orthant given by ``orthant`` (d-2 signs).
    """
    _check_dim(d)
    if l < 1 or t < 0:
        raise ValueError("need l >= 1 and t >= 0")
    box = box_set([(-l, l)] * (d - 1) + [(0, t)])
    if kind == "T":
        return {x for x in box if x[-1] == t}
    if kind == "F":
        return {x for x in box if any(abs(c) == l for c in x[:-1])}
    if kind == "F+":
        return {x for x in box if x[d - 2] == l}
    if kind == "T_orthant":
        u = _signs(orthant, d - 1)
        return {x for x in box if x[-1] == t and all(0 <= c * s <= l for c, s in zip(x[:-1], u))}
    if kind == "F_face_orthant":
        w = _signs(orthant, d - 2)
        return {x for x in box if x[d - 2] == l and all(0 <= c * s <= l for c, s in zip(x[: d - 2], w))}
    raise ValueError(f"unknown boundary set kind {kind!r}")


def _signs(orthant: Sequence[int] | None, n: int) -> tuple[int, ...]:
    if orthant is None or len(orthant) != n or any(s not in (-1, 1) for s in orthant):
        raise ValueError(f"orthant must be {n} signs in {{-1, +1}}")
    return tuple(orthant)


def translate(obj, x: Vertex):
    """Shift a vertex set, a box region or a window by the vertex ``x``."""
    if not is_vertex(x):
        raise ValueError(f"translation {x} is not a lattice vertex")
    if isinstance(obj, Window):
        return obj.translate(x)
    if isinstance(obj, Region):
        ivs = obj.bounds(len(x))
        return Region.box([(a + c, b + c) for (a, b), c in zip(ivs, x)])
    shifted = {tuple(a + c for a, c in zip(v, x)) for v in obj}
    return frozenset(shifted) if isinstance(obj, frozenset) else shifted
