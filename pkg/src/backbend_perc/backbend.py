"""Backbend sequences and path-level semantics.

A backbend sequence assigns to every record level ``h`` the number of levels
a path may retreat below ``h``.  Sequences are stored as a finite prefix
followed by a cyclically repeated tail, which covers constant, periodic and
eventually periodic sequences; ``math.inf`` stands for an unbounded retreat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .lattice import Region, Vertex, are_adjacent, is_vertex

INF = math.inf


def _entry(x) -> float:
    if x == INF:
        return INF
    if isinstance(x, float) and not x.is_integer():
        raise ValueError(f"backbend values must be integers or inf, got {x}")
    x = int(x)
    if x < 0:
        raise ValueError(f"backbend values must be nonnegative, got {x}")
    return x


@dataclass(frozen=True)
class BackbendSpec:
    prefix: tuple = ()
    tail: tuple = (0,)

    def __post_init__(self) -> None:
        if not self.tail:
            raise ValueError("tail must be nonempty")
        object.__setattr__(self, "prefix", tuple(_entry(x) for x in self.prefix))
        object.__setattr__(self, "tail", tuple(_entry(x) for x in self.tail))

    @classmethod
    def constant(cls, b) -> "BackbendSpec":
        return cls((), (b,))

    @classmethod
    def cyclic(cls, values: Sequence) -> "BackbendSpec":
        return cls((), tuple(values))

    def __getitem__(self, h: int) -> float:
        return beta_at(self, h)

    @property
    def horizon(self) -> int:
        """Levels ``0..horizon`` determine every relation between two specs."""
        return len(self.prefix) + 2 * len(self.tail)

    def values(self, n: int) -> list[float]:
        return [beta_at(self, h) for h in range(n)]

    def to_text(self) -> str:
        tail = _tail_text(self.tail)
        if self.prefix:
            return "prefix:" + ",".join(_val_text(v) for v in self.prefix) + ";" + tail
        return tail

    @classmethod
    def parse(cls, text: str) -> "BackbendSpec":
        """Parse ``const:<n> | inf | cyclic:<v0>,... | prefix:<a0>,...;<tail>``."""
        text = text.strip()
        try:
            if text.startswith("prefix:"):
                head, sep, rest = text[len("prefix:") :].partition(";")
                if not sep:
                    raise ValueError("prefix needs ';<tail-spec>'")
                inner = cls.parse(rest)
                return cls(_vals(head) + inner.prefix, inner.tail)
            if text == "inf":
                return cls((), (INF,))
            if text.startswith("const:"):
                (v,) = _vals(text[len("const:") :])
                return cls((), (v,))
            if text.startswith("cyclic:"):
                return cls((), _vals(text[len("cyclic:") :]))
        except ValueError as exc:
            raise ValueError(f"bad backbend spec {text!r}: {exc}") from exc
        raise ValueError(f"bad backbend spec {text!r}")


def _vals(s: str) -> tuple:
    out = []
    for tok in s.split(","):
        tok = tok.strip()
        if tok == "inf":
            out.append(INF)
        elif tok.isdigit():
            out.append(int(tok))
        else:
            raise ValueError(f"bad value {tok!r}")
    if not out:
        raise ValueError("empty value list")
    return tuple(out)


def _val_text(v: float) -> str:
    return "inf" if v == INF else str(int(v))


def _tail_text(tail: tuple) -> str:
    if len(tail) == 1:
        return "inf" if tail[0] == INF else f"const:{int(tail[0])}"
    return "cyclic:" + ",".join(_val_text(v) for v in tail)


def beta_at(spec: BackbendSpec, h: int) -> float:
    if h < 0:
        raise ValueError("level must be nonnegative")
    n = len(spec.prefix)
    if h < n:
        return spec.prefix[h]
    return spec.tail[(h - n) % len(spec.tail)]


def floor_at(spec: BackbendSpec, h: int) -> float:
    """Lowest admissible level ``h - beta_h`` at record level ``h``."""
    b = beta_at(spec, h)
    return -INF if b == INF else h - b


def floor_table(spec: BackbendSpec, top: int) -> list[float]:
    return [floor_at(spec, h) for h in range(top + 1)]


def has_monotone_floor(spec: BackbendSpec) -> bool:
    """True iff ``beta_{h+1} <= beta_h + 1`` for every level ``h``.

    Equivalent to ``h - beta_h`` being nondecreasing; checking the first
    ``|prefix| + 2|tail|`` transitions covers the wrap of the cyclic tail.
    """
    return all(
        beta_at(spec, h + 1) <= beta_at(spec, h) + 1 for h in range(spec.horizon)
    )


def dominated(a: BackbendSpec, b: BackbendSpec) -> bool:
    """True iff ``a_h <= b_h`` for every level."""
    n = max(a.horizon, b.horizon) + len(a.tail) * len(b.tail)
    return all(beta_at(a, h) <= beta_at(b, h) for h in range(n))


# -- classification -----------------------------------------------------------


@dataclass(frozen=True)
class SequenceClass:
    """Label plus its integer parameter (``b`` or ``k``; 0 when unused).

    Labels: ``oriented``, ``b_backbend``, ``unoriented``, ``k_cyclic``,
    ``cyclic_limit_from_below``, ``cyclic_limit`` (converges to a k-cyclic
    sequence, not from below) and ``general``.
    """

    label: str
    param: int = 0

    def __str__(self) -> str:
        return f"{self.label}({self.param})" if self.param else self.label


def normalize(spec: BackbendSpec) -> BackbendSpec:
    """Shortest prefix and minimal-period tail describing the same sequence."""
    tail = spec.tail
    k = len(tail)
    for p in range(1, k + 1):
        if k % p == 0 and tail == tail[:p] * (k // p):
            tail = tail[:p]
            break
    prefix = list(spec.prefix)
    while prefix and prefix[-1] == tail[-1]:
        prefix.pop()
        tail = (tail[-1],) + tail[:-1]
    return BackbendSpec(tuple(prefix), tail)


def cyclic_target(spec: BackbendSpec) -> tuple:
    """The k-cyclic limit ``(beta_0, ..., beta_{k-1})`` aligned to phase 0."""
    s = normalize(spec)
    m, k = len(s.prefix), len(s.tail)
    return tuple(s.tail[(i - m) % k] for i in range(k))


def classify(spec: BackbendSpec) -> SequenceClass:
    s = normalize(spec)
    entries = set(s.prefix) | set(s.tail)
    if len(entries) == 1:
        (v,) = entries
        if v == INF:
            return SequenceClass("unoriented")
        if v == 0:
            return SequenceClass("oriented")
        return SequenceClass("b_backbend", int(v))
    if INF in s.tail:
        return SequenceClass("general")
    k = len(s.tail)
    if not s.prefix:
        return SequenceClass("k_cyclic", k)
    target = cyclic_target(s)
    if all(v <= target[h % k] for h, v in enumerate(s.prefix)):
        return SequenceClass("cyclic_limit_from_below", k)
    return SequenceClass("cyclic_limit", k)


# -- paths ----------------------------------------------------------------------


def record_levels(path: Sequence[Vertex]) -> list[int]:
    out, h = [], None
    for v in path:
        h = v[-1] if h is None else max(h, v[-1])
        out.append(h)
    return out


@dataclass(frozen=True)
class PathCheck:
    valid: bool
    index: int = -1
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


def validate_path(
    spec: BackbendSpec, path: Sequence[Vertex], region: Region | None = None
) -> PathCheck:
    """Check that ``path`` is a backbend path for ``spec`` inside ``region``.

    Reports the first offending index with one of the reasons ``region``,
    ``start-level``, ``repeat``, ``not-adjacent`` or ``backbend``.
    """
    if len(path) == 0:
        raise ValueError("empty path")
    region = region or Region.full_space()
    seen: set[Vertex] = set()
    h = None
    for i, v in enumerate(path):
        v = tuple(v)
        if not is_vertex(v) or not region.contains(v):
            return PathCheck(False, i, "region")
        if i == 0 and v[-1] < 0:
            return PathCheck(False, 0, "start-level")
        if v in seen:
            return PathCheck(False, i, "repeat")
        if i > 0 and not are_adjacent(tuple(path[i - 1]), v):
            return PathCheck(False, i, "not-adjacent")
        seen.add(v)
        h = v[-1] if h is None else max(h, v[-1])
        if v[-1] < floor_at(spec, h):
            return PathCheck(False, i, "backbend")
    return PathCheck(True)


def is_oriented(path: Sequence[Vertex]) -> bool:
    return all(b[-1] == a[-1] + 1 for a, b in zip(path, path[1:]))


def splice(prefix: Sequence[Vertex], suffix: Sequence[Vertex]) -> list[Vertex]:
    """Join ``prefix`` (ending at the junction) to ``suffix`` (starting there).

    Where the two share a vertex besides the junction, cut at the first such
    vertex ``z`` of ``prefix`` and continue along ``suffix`` from ``z``.
    """
    prefix = [tuple(v) for v in prefix]
    suffix = [tuple(v) for v in suffix]
    if not prefix or not suffix or prefix[-1] != suffix[0]:
        raise ValueError("prefix must end where suffix begins")
    pos = {v: j for j, v in enumerate(suffix)}
    for i, v in enumerate(prefix):
        if v in pos:
            return prefix[:i] + suffix[pos[v] :]
    raise AssertionError("unreachable: junction is shared")


def concatenation_preserves(
    spec: BackbendSpec,
    oriented_prefix: Sequence[Vertex],
    suffix: Sequence[Vertex],
    region: Region | None = None,
) -> bool:
    if not is_oriented(oriented_prefix):
        raise ValueError("prefix is not oriented")
    return validate_path(spec, splice(oriented_prefix, suffix), region).valid
