"""Backbend clusters: which vertices open backbend paths reach from a source set.

Two engines compute the cluster of a configuration:

``reach_walk``
    breadth-first closure over (vertex, record level) states.  It follows
    walks rather than self-avoiding paths; the two coincide whenever the
    floor ``h - beta_h`` is nondecreasing over the levels of the window,
    which is reported through ``ClusterResult.exact``.
``reach_saw_oracle``
    exhaustive depth-first enumeration of self-avoiding open paths, for
    tiny windows only.

:func:`threshold_batch` runs a minimax search that yields, for many trials at
once, the smallest ``p`` at which each finite-window event happens.
"""

from __future__ import annotations

import csv
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .backbend import INF, BackbendSpec, floor_at
from .config import EdgeConfig, RngKey, check_p, edge_uniform, seed_word, up_bits_of
from .lattice import Region, Vertex, Window, canonical_edge, is_vertex, seed_block, translate

ORACLE_GUARD = 30
FULL_MODE_LIMIT = 50_000_000


@dataclass(frozen=True, order=True)
class RecordState:
    vertex: Vertex
    record: int


@dataclass(frozen=True)
class ClusterResult:
    reached: frozenset
    reached_states: frozenset
    max_level: int
    source: frozenset
    exact: bool
    max_extent: int = 0

    def __len__(self) -> int:
        return len(self.reached)

    def __contains__(self, v) -> bool:
        return tuple(v) in self.reached


class SearchGrid:
    """Dense indexing of ``window ∩ region`` plus the floor table for ``spec``.

    Building one allocates the scratch buffers used by the kernels, so reuse
    it across trials.  Not safe to share between threads.
    """

    def __init__(self, region: Region, window: Window, spec: BackbendSpec):
        box = window.intersect(region)
        if box is None:
            raise ValueError("window does not meet the region")
        self.region, self.window, self.spec, self.box = region, window, spec, box
        d = self.dim = window.dim
        self.lo = np.array(box.lo, dtype=np.int64)
        self.shape = np.array(box.shape, dtype=np.int64)
        strides = np.ones(d, dtype=np.int64)
        for i in range(d - 2, -1, -1):
            strides[i] = strides[i + 1] * self.shape[i + 1]
        self.strides = strides
        self.size = int(np.prod(self.shape))
        steps = list(itertools.product((-1, 1), repeat=d))
        self.steps = np.array(steps, dtype=np.int64)
        self.self_lower = np.array([s[-1] == 1 for s in steps], dtype=np.bool_)
        self.upb = np.array(
            [up_bits_of(s[:-1] if s[-1] == 1 else tuple(-x for x in s[:-1])) for s in steps],
            dtype=np.int64,
        )
        top = max(box.hi[-1], 0)
        fl = [floor_at(spec, h) for h in range(top + 1)]
        self.floor = np.array([K.NEG if f == -INF else int(f) for f in fl], dtype=np.int64)
        if all(f == -INF for f in fl):
            self.mode = K.MODE_PLAIN
        elif all(a <= b for a, b in zip(fl, fl[1:])):
            self.mode = K.MODE_MIN
        else:
            self.mode = K.MODE_FULL
        self.exact = self.mode != K.MODE_FULL
        self.nlev = top + 1
        self.vbest = np.full(self.size, K.BIG, dtype=np.int64)
        if self.mode == K.MODE_FULL:
            if self.size * self.nlev > FULL_MODE_LIMIT:
                raise ValueError("window too large for a non-monotone backbend floor")
            self.seen = np.zeros(self.size * self.nlev, dtype=np.uint8)
        else:
            self.seen = np.zeros(1, dtype=np.uint8)
        self._no_target = np.zeros(self.size, dtype=np.bool_)

    def index(self, v: Sequence[int]) -> int:
        return int(sum((c - a) * s for c, a, s in zip(v, self.lo, self.strides)))

    def vertex(self, idx: int) -> Vertex:
        return tuple(int((idx // s) % n + a) for s, n, a in zip(self.strides, self.shape, self.lo))

    def contains(self, v: Sequence[int]) -> bool:
        return is_vertex(v) and self.box.contains(v)

    def source_indices(self, sources: Iterable[Vertex]) -> np.ndarray:
        idx = []
        for v in sorted(set(tuple(int(c) for c in s) for s in sources)):
            if len(v) != self.dim or not self.contains(v):
                raise ValueError(f"source {v} lies outside region ∩ window")
            if v[-1] < 0:
                raise ValueError(f"source {v} starts below level 0")
            idx.append(self.index(v))
        if not idx:
            raise ValueError("no sources")
        return np.array(idx, dtype=np.int64)

    def target_mask(self, target: Iterable[Vertex]) -> tuple[np.ndarray, int]:
        mask = np.zeros(self.size, dtype=np.bool_)
        n = 0
        for v in set(tuple(t) for t in target):
            if self.contains(v):
                mask[self.index(v)] = True
                n += 1
        return mask, n

    def args(self):
        return (self.lo, self.shape, self.strides, self.steps, self.self_lower, self.upb,
                self.floor, self.mode)


def _default_center(sources: np.ndarray, grid: SearchGrid) -> np.ndarray:
    return np.array(grid.vertex(int(sources[0])), dtype=np.int64)


def reach_walk(
    region: Region,
    window: Window,
    spec: BackbendSpec,
    sources: Iterable[Vertex],
    config: EdgeConfig | RngKey,
    p: float,
    *,
    grid: SearchGrid | None = None,
) -> ClusterResult:
    """Walk-reachable cluster of ``sources`` at level ``p``."""
    p = check_p(p)
    key = config.key if isinstance(config, EdgeConfig) else config
    grid = grid or SearchGrid(region, window, spec)
    src = grid.source_indices(sources)
    center = _default_center(src, grid)
    ext_axes = np.ones(grid.dim, dtype=np.bool_)
    verts, recs, max_level, max_ext, _ = K.walk(
        *grid.args(), src, key.word, p, grid.vbest, grid.seen, grid._no_target, center, ext_axes
    )
    reached = frozenset(grid.vertex(int(i)) for i in verts)
    states = frozenset(RecordState(grid.vertex(int(i)), int(h)) for i, h in zip(verts, recs))
    return ClusterResult(
        reached=reached,
        reached_states=states,
        max_level=int(max_level),
        source=frozenset(grid.vertex(int(i)) for i in src),
        exact=grid.exact,
        max_extent=int(max_ext),
    )


def open_edge_set(box: Window, key: RngKey, p: float) -> set:
    """Open edges of the box ``box`` as a set of canonical edge keys."""
    return {e for e in box.edges() if edge_uniform(key, e) < p}


def reach_saw_oracle(
    region: Region,
    window: Window,
    spec: BackbendSpec,
    sources: Iterable[Vertex],
    config: EdgeConfig | RngKey | set,
    p: float = 1.0,
    *,
    guard: int = ORACLE_GUARD,
    force: bool = False,
) -> ClusterResult:
    """Exact cluster by enumerating self-avoiding open backbend paths.

    ``config`` may also be an explicit set of open canonical edges, in which
    case ``p`` is ignored.
    """
    p = check_p(p)
    box = window.intersect(region)
    if box is None:
        raise ValueError("window does not meet the region")
    verts = list(box.vertices())
    if len(verts) > guard and not force:
        raise ValueError(f"oracle refused: {len(verts)} vertices > guard {guard}")
    if isinstance(config, (set, frozenset)):
        open_edges = config
    else:
        key = config.key if isinstance(config, EdgeConfig) else config
        open_edges = open_edge_set(box, key, p)
    inside = set(verts)
    adj: dict[Vertex, list[Vertex]] = {v: [] for v in verts}
    for v in verts:
        for s in itertools.product((-1, 1), repeat=len(v)):
            w = tuple(a + b for a, b in zip(v, s))
            if w in inside and canonical_edge(v, w) in open_edges:
                adj[v].append(w)
    src = set()
    for s in sources:
        s = tuple(s)
        if s not in inside:
            raise ValueError(f"source {s} lies outside region ∩ window")
        if s[-1] < 0:
            raise ValueError(f"source {s} starts below level 0")
        src.add(s)
    floors = {}

    def fl(h):
        if h not in floors:
            floors[h] = floor_at(spec, h)
        return floors[h]

    reached: set[Vertex] = set()
    states: set[RecordState] = set()
    on_path: set[Vertex] = set()

    def dfs(v: Vertex, h: int) -> None:
        reached.add(v)
        states.add(RecordState(v, h))
        on_path.add(v)
        for w in adj[v]:
            if w in on_path:
                continue
            h2 = max(h, w[-1])
            if w[-1] >= fl(h2):
                dfs(w, h2)
        on_path.discard(v)

    for s in sorted(src):
        dfs(s, s[-1])
    return ClusterResult(
        reached=frozenset(reached),
        reached_states=frozenset(states),
        max_level=max(v[-1] for v in reached),
        source=frozenset(src),
        exact=True,
        max_extent=0,
    )


def survives(result: ClusterResult, level: int) -> bool:
    return result.max_level >= level


def count_in_set(result: ClusterResult, target: Iterable[Vertex]) -> int:
    return sum(1 for v in set(map(tuple, target)) if v in result.reached)


def block_sets(r: int, x: Vertex, z: Vertex) -> tuple[set, set]:
    """The seed block translated to ``x`` (sources) and to ``z`` (target)."""
    d = len(x)
    if not (is_vertex(x) and is_vertex(z)) or len(z) != d:
        raise ValueError("x and z must be lattice vertices of equal dimension")
    if r < 0:
        raise ValueError("seed radius must be nonnegative")
    if z[-1] < x[-1]:
        raise ValueError("block event needs z_d >= x_d")
    d_star = seed_block(r, d)
    return translate(d_star, x), translate(d_star, z)


def block_event(
    config: EdgeConfig | RngKey,
    p: float,
    spec: BackbendSpec,
    r: int,
    x: Vertex,
    z: Vertex,
    region: Region,
    window: Window,
    *,
    grid: SearchGrid | None = None,
) -> bool:
    """True iff every vertex of ``D* + z`` is reached from ``D* + x``."""
    src, tgt = block_sets(r, tuple(x), tuple(z))
    res = reach_walk(region, window, spec, src, config, p, grid=grid)
    return tgt <= res.reached


def write_cluster_csv(result: ClusterResult, path) -> None:
    """Dump reached vertices, one coordinate row each, with their least record."""
    best: dict[Vertex, int] = {}
    for s in result.reached_states:
        best[s.vertex] = min(s.record, best.get(s.vertex, s.record))
    d = len(next(iter(result.reached))) if result.reached else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i + 1}" for i in range(d)] + ["record"])
        for v in sorted(result.reached):
            w.writerow(list(v) + [best[v]])


# -- thresholds over many trials -------------------------------------------------


@dataclass
class ThresholdRequest:
    """Which per-trial thresholds to compute.

    ``level`` / ``extent``: largest radius needed (``-1`` to skip);
    ``target``: vertex set for hit thresholds; ``size``: cluster-size bound
    (0 to skip); ``center`` / ``extent_axes``: how extent is measured.
    """

    level: int = -1
    extent: int = -1
    target: frozenset = field(default_factory=frozenset)
    size: int = 0
    center: Vertex | None = None
    extent_axes: tuple[bool, ...] | None = None


@dataclass
class Thresholds:
    level: np.ndarray  # (trials, level+1)
    extent: np.ndarray  # (trials, extent+1)
    target_any: np.ndarray
    target_all: np.ndarray
    size: np.ndarray
    n_target: int


def threshold_batch(
    region: Region,
    window: Window,
    spec: BackbendSpec,
    sources: Iterable[Vertex],
    seed: int,
    trials: Sequence[int] | np.ndarray,
    request: ThresholdRequest,
    *,
    p_max: float = 1.0,
    threads: int = 1,
) -> Thresholds:
    """Minimax event thresholds for each trial index in ``trials``.

    Entry ``t`` of an output is the infimum of the ``p`` at which trial ``t``
    has the event; the event holds at ``p`` iff threshold ``< p``.  Searches
    stop at ``p_max`` and report ``2.0`` for events not reached by then.
    Results do not depend on ``threads``.
    """
    trials = np.asarray(trials, dtype=np.int64)
    sources = list(sources)
    chunks = np.array_split(trials, max(1, min(int(threads), len(trials)))) if len(trials) else [trials]

    def run(chunk):
        grid = SearchGrid(region, window, spec)
        src = grid.source_indices(sources)
        center = np.array(
            request.center if request.center is not None else grid.vertex(int(src[0])),
            dtype=np.int64,
        )
        axes = np.array(
            request.extent_axes if request.extent_axes is not None else (True,) * grid.dim,
            dtype=np.bool_,
        )
        mask, n_target = grid.target_mask(request.target)
        out = K.thresholds_batch(
            *grid.args(), src, seed_word(seed), chunk, float(p_max), grid.vbest, grid.seen,
            mask, n_target, center, axes, int(request.level), int(request.extent),
            int(request.size),
        )
        return out, n_target

    if len(chunks) == 1:
        results = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(len(chunks)) as pool:
            results = list(pool.map(run, chunks))
    lev = np.concatenate([r[0][0] for r in results])
    ext = np.concatenate([r[0][1] for r in results])
    misc = np.concatenate([r[0][2] for r in results])
    return Thresholds(lev, ext, misc[:, 0], misc[:, 1], misc[:, 2], results[0][1])
