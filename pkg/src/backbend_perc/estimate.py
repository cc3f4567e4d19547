"""Monte Carlo estimators built on the per-trial threshold search.

Every estimate here is driven by exact per-trial thresholds: for trial ``t``
and event ``E`` the search returns the infimum ``p`` at which ``E`` holds in
the coupled configuration, so the success indicator at any ``p`` is
``threshold < p``.  Curves over a ``p`` grid are therefore coupled and
monotone per trial, and bisection only needs to count.

Two crossing statistics are available to :func:`bisect_pc`:

``crossing``
    the success frequency, compared with ``target`` (default 0.5).
``scaling``
    ``log P(R/4) + log P(R) - 2 log P(R/2)`` with ``P(r)`` the probability of
    the event at scale ``r``.  It is negative when ``P`` decays exponentially,
    positive when ``P`` tends to a positive limit, and zero for a pure power
    law, so its root tracks the critical point without knowing any exponent.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import json
import math
import platform
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numba
import numpy as np
from scipy.stats import binomtest

from .backbend import BackbendSpec, dominated
from .config import PRF_NAME, PRF_VERSION, RngKey, check_p
from .lattice import Region, Vertex, Window
from .reach import (
    SearchGrid,
    ThresholdRequest,
    block_sets,
    reach_saw_oracle,
    reach_walk,
    threshold_batch,
)

SCHEMA_VERSION = 1
PREDICATES = ("top", "escape", "size", "block")
STATISTICS = ("crossing", "scaling")
Z95 = 1.959963984540054


# -- plans ------------------------------------------------------------------------


def default_window(region: Region, dim: int, radius: int) -> Window:
    """``[-R, R]^(d-1) x [0, R]`` clipped to ``region`` (``[-R, R]^d`` for V)."""
    radius = int(radius)
    if radius < 1:
        raise ValueError("window radius must be positive")
    bottom = -radius if region.kind == "V" else 0
    box = Window((-radius,) * (dim - 1) + (bottom,), (radius,) * dim)
    clipped = box.intersect(region)
    if clipped is None:
        raise ValueError(f"radius {radius} window misses region {region.to_text()}")
    return clipped


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything needed to reproduce one estimate.

    ``window`` wins over ``radius`` when both are given.  The success event
    is chosen by ``predicate``:

    ``top``      cluster reaches the top level of region ∩ window
    ``escape``   cluster reaches sup-distance ``R`` from the first source
                 along ``extent_axes`` (default: the axes the region leaves
                 unbounded), ``R`` the room the window leaves
    ``size``     cluster has at least ``size`` vertices
    ``block``    every vertex of ``D* + z`` is reached from ``D* + x``
    """

    dim: int
    region: Region
    spec: BackbendSpec = field(default_factory=BackbendSpec)
    trials: int = 1000
    seed: int = 0
    radius: int | None = None
    window: Window | None = None
    predicate: str = "top"
    size: int = 0
    sources: tuple[Vertex, ...] | None = None
    extent_axes: tuple[bool, ...] | None = None
    block: tuple[int, Vertex, Vertex] | None = None
    statistic: str = "crossing"
    max_trials: int | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.predicate not in PREDICATES:
            raise ValueError(f"unknown predicate {self.predicate!r}")
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if self.window is None and self.radius is None:
            raise ValueError("plan needs a window or a radius")
        if self.window is not None and self.window.dim != self.dim:
            raise ValueError("window dimension does not match plan dimension")
        if self.window is not None and self.window.intersect(self.region) is None:
            raise ValueError("window does not meet the region")
        if self.predicate == "size" and self.size < 1:
            raise ValueError("size predicate needs size >= 1")
        if self.predicate == "block" and self.block is None:
            raise ValueError("block predicate needs (r, x, z)")
        if self.statistic == "scaling" and self.predicate not in ("top", "escape"):
            raise ValueError("the scaling statistic needs a top or escape predicate")

    def replace(self, **changes) -> "ExperimentPlan":
        return dataclasses.replace(self, **changes)

    @property
    def trial_cap(self) -> int:
        return max(self.trials, self.max_trials or self.trials)

    def box(self) -> Window:
        win = self.window or default_window(self.region, self.dim, self.radius)
        box = win.intersect(self.region)
        if box is None:
            raise ValueError("window does not meet the region")
        return box

    def source_set(self) -> tuple[Vertex, ...]:
        if self.predicate == "block":
            src, _ = block_sets(*self.block)
            return tuple(sorted(src))
        if self.sources:
            return tuple(tuple(s) for s in self.sources)
        return ((0,) * self.dim,)

    def axes(self) -> tuple[bool, ...]:
        if self.extent_axes is not None:
            return tuple(bool(a) for a in self.extent_axes)
        return tuple(not (math.isfinite(a) and math.isfinite(b)) for a, b in self.region.bounds(self.dim))

    def scale(self) -> int:
        """Largest event scale the window supports for this predicate."""
        box = self.box()
        if self.predicate == "top":
            return int(box.hi[-1])
        if self.predicate == "escape":
            c = self.source_set()[0]
            room = [min(c[i] - box.lo[i], box.hi[i] - c[i]) for i, a in enumerate(self.axes()) if a]
            if not room:
                raise ValueError("escape predicate has no extent axes")
            return int(min(room))
        return int(self.size)

    def to_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "region": self.region.to_text(),
            "spec": self.spec.to_text(),
            "trials": self.trials,
            "max_trials": self.trial_cap,
            "seed": int(self.seed),
            "window": self.box().to_text(),
            "predicate": self.predicate,
            "statistic": self.statistic,
            "sources": [list(s) for s in self.source_set()],
        }
        if self.predicate == "size":
            out["size"] = self.size
        if self.predicate == "escape":
            out["extent_axes"] = list(self.axes())
        if self.predicate == "block":
            r, x, z = self.block
            out["block"] = {"r": r, "x": list(x), "z": list(z)}
        return out


# -- estimates --------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(int(successes), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class ThetaEstimate:
    p: float
    successes: int
    trials: int
    estimate: float
    ci_lo: float
    ci_hi: float

    @classmethod
    def from_counts(cls, p: float, successes: int, trials: int) -> "ThetaEstimate":
        lo, hi = wilson_interval(successes, trials)
        est = successes / trials
        return cls(float(p), int(successes), int(trials), est, min(lo, est), max(hi, est))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class PcEstimate:
    lo: float
    hi: float
    iterations: int
    history: list[dict]
    window: str
    statistic: str
    target: float
    status: str
    trials: int
    per_window: list["PcEstimate"] = field(default_factory=list)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def to_dict(self) -> dict:
        return {
            "bracket": [self.lo, self.hi],
            "midpoint": self.midpoint,
            "iterations": self.iterations,
            "status": self.status,
            "statistic": self.statistic,
            "target": self.target,
            "window": self.window,
            "trials": self.trials,
            "history": self.history,
            "per_window": [w.to_dict() for w in self.per_window],
        }


class NonBracketingError(ValueError):
    """Raised when the statistic does not straddle the target on ``[lo, hi]``."""

    def __init__(self, lo: float, hi: float, value_lo: float, value_hi: float, target: float):
        self.lo, self.hi = lo, hi
        self.value_lo, self.value_hi = value_lo, value_hi
        self.target = target
        super().__init__(
            f"[{lo}, {hi}] does not bracket target {target}: "
            f"statistic {value_lo:.6g} at {lo}, {value_hi:.6g} at {hi}"
        )


# -- threshold sampling -----------------------------------------------------------


class ThresholdSampler:
    """Per-trial event thresholds, grown on demand in trial-index order.

    Column ``j`` of :attr:`table` is the threshold of the event at
    ``scales[j]``; trials are always ``0 .. n-1`` so results only depend on
    the plan.
    """

    def __init__(self, plan: ExperimentPlan, scales: Sequence[int] | None = None, p_max: float = 1.0):
        self.plan = plan
        self.scales = tuple(int(s) for s in (scales if scales is not None else (plan.scale(),)))
        self.p_max = float(p_max)
        self.table = np.empty((0, len(self.scales)))
        box = plan.box()
        self._window = box
        src = plan.source_set()
        if plan.predicate == "top":
            req = ThresholdRequest(level=max(self.scales))
        elif plan.predicate == "escape":
            req = ThresholdRequest(extent=max(self.scales), center=src[0], extent_axes=plan.axes())
        elif plan.predicate == "size":
            req = ThresholdRequest(size=max(self.scales))
        else:
            _, tgt = block_sets(*plan.block)
            req = ThresholdRequest(target=frozenset(tgt))
        self._request = req
        self._sources = src

    def _compute(self, start: int, stop: int) -> np.ndarray:
        plan = self.plan
        th = threshold_batch(
            plan.region, self._window, plan.spec, self._sources, plan.seed,
            np.arange(start, stop), self._request, p_max=self.p_max, threads=plan.threads,
        )
        if plan.predicate == "top":
            return th.level[:, list(self.scales)]
        if plan.predicate == "escape":
            return th.extent[:, list(self.scales)]
        if plan.predicate == "size":
            return th.size[:, None].repeat(len(self.scales), axis=1)
        if th.n_target == 0:
            return np.full((stop - start, 1), -1.0)
        return th.target_all[:, None]

    def ensure(self, n: int) -> np.ndarray:
        have = self.table.shape[0]
        if n > have:
            self.table = np.vstack([self.table, self._compute(have, n)])
        return self.table[:n]

    def successes(self, p: float, n: int) -> np.ndarray:
        return self.ensure(n) < p


class SyntheticSampler:
    """Deterministic process: every trial succeeds iff ``p > threshold``."""

    def __init__(self, threshold: float, scales: Sequence[int] = (1,)):
        self.threshold = float(threshold)
        self.scales = tuple(scales)

    def ensure(self, n: int) -> np.ndarray:
        return np.full((n, len(self.scales)), self.threshold)

    def successes(self, p: float, n: int) -> np.ndarray:
        return self.ensure(n) < p


def scaling_scales(scale: int) -> tuple[int, int, int]:
    if scale < 4:
        raise ValueError(f"scaling statistic needs scale >= 4, got {scale}")
    return (scale // 4, scale // 2, scale)


def scaling_statistic(hits: np.ndarray) -> tuple[float, float]:
    """Value and delta-method standard error of the log-curvature statistic.

    ``hits`` is the ``(n, 3)`` success matrix at scales ``R/4, R/2, R``.
    """
    n = hits.shape[0]
    probs = hits.mean(axis=0)
    if np.any(probs == 0):
        return -math.inf, 0.0
    grad = np.array([1.0, -2.0, 1.0]) / probs
    cov = np.cov(hits.T.astype(np.float64), bias=True) / n
    value = float(np.log(probs) @ np.array([1.0, -2.0, 1.0]))
    return value, float(math.sqrt(max(grad @ cov @ grad, 0.0)))


def _statistic(sampler, statistic: str, p: float, n: int) -> dict:
    hits = sampler.successes(p, n)
    if statistic == "crossing":
        k = int(hits[:, -1].sum())
        lo, hi = wilson_interval(k, n)
        est = k / n
        return {"p": p, "estimate": est, "ci_lo": min(lo, est), "ci_hi": max(hi, est), "trials": n}
    value, se = scaling_statistic(hits)
    probs = hits.mean(axis=0)
    return {
        "p": p, "estimate": value, "ci_lo": value - Z95 * se, "ci_hi": value + Z95 * se,
        "trials": n, "probabilities": [float(x) for x in probs],
        # no trial reached R/4 without reaching R: no decay at all, read as supercritical
        "saturated": bool(probs[0] > 0 and probs[0] == probs[-1]),
    }


def _finite(row: dict) -> dict:
    # JSON has no infinities; an empty scale reports None instead of -inf
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in row.items()}


# -- operations -------------------------------------------------------------------


def estimate_theta(plan: ExperimentPlan, p: float, *, engine: str = "threshold") -> ThetaEstimate:
    """Success frequency over trials ``0 .. trials-1`` at edge density ``p``.

    ``engine="walk"`` runs the breadth-first cluster search per trial instead
    of the threshold search (same answer, slower).
    """
    p = check_p(p)
    if engine == "walk":
        return ThetaEstimate.from_counts(p, _walk_successes(plan, p), plan.trials)
    sampler = ThresholdSampler(plan, p_max=p)
    k = int(sampler.successes(p, plan.trials)[:, -1].sum())
    return ThetaEstimate.from_counts(p, k, plan.trials)


def _walk_successes(plan: ExperimentPlan, p: float) -> int:
    box = plan.box()
    grid = SearchGrid(plan.region, box, plan.spec)
    src = plan.source_set()
    scale = plan.scale()
    target = None
    if plan.predicate == "block":
        _, target = block_sets(*plan.block)
    axes = plan.axes()
    hits = 0
    for t in range(plan.trials):
        res = reach_walk(plan.region, box, plan.spec, src, RngKey(plan.seed, t), p, grid=grid)
        if plan.predicate == "top":
            ok = res.max_level >= scale
        elif plan.predicate == "size":
            ok = len(res.reached) >= scale
        elif plan.predicate == "block":
            ok = target <= res.reached
        else:
            c = src[0]
            ok = any(
                max(abs(v[i] - c[i]) for i in range(plan.dim) if axes[i]) >= scale for v in res.reached
            )
        hits += bool(ok)
    return hits


def crossing_curve(plan: ExperimentPlan, p_grid: Sequence[float]) -> list[ThetaEstimate]:
    """Coupled estimates along ``p_grid``; nondecreasing in ``p`` by construction."""
    grid = [check_p(p) for p in p_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("p grid must be sorted ascending")
    if not grid:
        return []
    sampler = ThresholdSampler(plan, p_max=grid[-1])
    table = sampler.ensure(plan.trials)[:, -1]
    return [ThetaEstimate.from_counts(p, int((table < p).sum()), plan.trials) for p in grid]


def _bisect_one(sampler, plan: ExperimentPlan, target: float, tol: float, lo: float, hi: float,
                max_iter: int, window_text: str) -> PcEstimate:
    statistic = plan.statistic
    n = plan.trials
    cap = plan.trial_cap
    history = []
    v_lo = _statistic(sampler, statistic, lo, n)
    v_hi = _statistic(sampler, statistic, hi, n)
    if not (v_lo["estimate"] < target and (target < v_hi["estimate"] or v_hi.get("saturated"))):
        raise NonBracketingError(lo, hi, v_lo["estimate"], v_hi["estimate"], target)
    status = "converged"
    iterations = 0
    while hi - lo > tol:
        if iterations >= max_iter:
            status = "max_iterations"
            break
        mid = 0.5 * (lo + hi)
        while True:
            row = _statistic(sampler, statistic, mid, n)
            if row["ci_hi"] < target:
                decision = "below"
            elif row["ci_lo"] > target or row.get("saturated"):
                decision = "above"
            elif n < cap:
                n = min(2 * n, cap)
                continue
            else:
                decision = "undecided"
            break
        iterations += 1
        row["decision"] = decision
        history.append(_finite(row))
        if decision == "below":
            lo = mid
        elif decision == "above":
            hi = mid
        else:
            status = "ci_overlap"
            break
    return PcEstimate(lo, hi, iterations, history, window_text, statistic, target, status, n)


def bisect_pc(
    plan: ExperimentPlan,
    target: float | None = None,
    tol: float = 0.01,
    *,
    lo: float = 0.0,
    hi: float = 1.0,
    radii: Sequence[int] | None = None,
    windows: Sequence[Window] | None = None,
    synthetic_threshold: float | None = None,
    max_iter: int = 60,
) -> PcEstimate:
    """Bracket the ``p`` at which the plan's statistic crosses ``target``.

    ``target`` defaults to 0.5 for the crossing statistic and 0 for the
    scaling statistic.  Each bisection step is decided only when the 95%
    interval of the statistic excludes the target; otherwise the trial count
    doubles up to ``plan.max_trials``, after which the search stops with
    status ``ci_overlap``.  With a window ladder (``radii`` or ``windows``)
    each window is bisected separately and the hull of the brackets is
    returned, reported against the largest window.
    """
    if synthetic_threshold is not None:
        # a step process has no scale dependence; only the frequency is meaningful
        plan = plan.replace(statistic="crossing")
    if target is None:
        target = 0.0 if plan.statistic == "scaling" else 0.5
    if plan.statistic == "crossing" and not 0.0 < target < 1.0:
        raise ValueError("target must lie strictly between 0 and 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = check_p(lo), check_p(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    if synthetic_threshold is not None:
        sampler = SyntheticSampler(synthetic_threshold)
        return _bisect_one(sampler, plan, target, tol, lo, hi, max_iter, "synthetic")

    plans = [plan]
    if windows:
        plans = [plan.replace(window=w) for w in windows]
    elif radii:
        plans = [plan.replace(window=None, radius=int(r)) for r in radii]
    results = []
    for sub in plans:
        scale = sub.scale()
        scales = scaling_scales(scale) if sub.statistic == "scaling" else (scale,)
        sampler = ThresholdSampler(sub, scales, p_max=hi)
        results.append(_bisect_one(sampler, sub, target, tol, lo, hi, max_iter, sub.box().to_text()))
    if len(results) == 1:
        return results[0]
    last = results[-1]
    status = "converged" if all(r.status == "converged" for r in results) else "partial"
    return PcEstimate(
        min(r.lo for r in results), max(r.hi for r in results),
        sum(r.iterations for r in results), last.history, last.window, plan.statistic,
        target, status, last.trials, per_window=results,
    )


@dataclass
class CouplingReport:
    p: float
    trials: int
    contained: int
    equal: int
    dominated: bool
    survival_a: ThetaEstimate
    survival_b: ThetaEstimate

    @property
    def exploratory(self) -> bool:
        return not self.dominated

    def to_dict(self) -> dict:
        return {
            "p": self.p, "trials": self.trials, "contained": self.contained, "equal": self.equal,
            "dominated": self.dominated, "exploratory": self.exploratory,
            "survival_a": self.survival_a.to_dict(), "survival_b": self.survival_b.to_dict(),
        }


def compare_specs_coupled(plan: ExperimentPlan, spec_a: BackbendSpec, spec_b: BackbendSpec,
                          p: float) -> CouplingReport:
    """Per-trial comparison of the ``spec_a`` and ``spec_b`` clusters on one config.

    When ``spec_a`` is pointwise below ``spec_b`` every ``spec_a`` path is a
    ``spec_b`` path, so containment must hold in every trial; otherwise the
    run is flagged exploratory.
    """
    p = check_p(p)
    box = plan.box()
    src = plan.source_set()
    ga = SearchGrid(plan.region, box, spec_a)
    gb = SearchGrid(plan.region, box, spec_b)
    top = int(box.hi[-1])
    contained = equal = hits_a = hits_b = 0
    for t in range(plan.trials):
        key = RngKey(plan.seed, t)
        ra = reach_walk(plan.region, box, spec_a, src, key, p, grid=ga)
        rb = reach_walk(plan.region, box, spec_b, src, key, p, grid=gb)
        contained += ra.reached <= rb.reached
        equal += ra.reached == rb.reached
        hits_a += ra.max_level >= top
        hits_b += rb.max_level >= top
    n = plan.trials
    return CouplingReport(
        p, n, contained, equal, dominated(spec_a, spec_b),
        ThetaEstimate.from_counts(p, hits_a, n), ThetaEstimate.from_counts(p, hits_b, n),
    )


@dataclass
class LadderResult:
    e: int
    rows: list[tuple[int, PcEstimate]]
    nonincreasing: bool

    def to_dict(self) -> dict:
        return {
            "e": self.e,
            "nonincreasing": self.nonincreasing,
            "rows": [{"l": l, **est.to_dict()} for l, est in self.rows],
        }


def slab_ladder(plan: ExperimentPlan, e: int, ls: Sequence[int], **bisect_kw) -> LadderResult:
    """One :func:`bisect_pc` bracket per half-slab width ``l`` (ascending).

    ``nonincreasing`` is False when some midpoint exceeds its predecessor by
    more than the two half-widths combined.
    """
    ls = [int(l) for l in ls]
    if any(b <= a for a, b in zip(ls, ls[1:])):
        raise ValueError("half-slab widths must be strictly ascending")
    if not 2 <= e <= plan.dim:
        raise ValueError("need 2 <= e <= d")
    rows = []
    for l in ls:
        sub = plan.replace(region=Region.half_slab(l, e), window=None if plan.radius else plan.window)
        rows.append((l, bisect_pc(sub, **bisect_kw)))
    ok = all(
        b.midpoint <= a.midpoint + a.half_width + b.half_width
        for (_, a), (_, b) in zip(rows, rows[1:])
    )
    return LadderResult(e, rows, ok)


def estimate_block_event(plan: ExperimentPlan, r: int, x: Vertex, z: Vertex, p: float) -> ThetaEstimate:
    """Frequency of ``D* + z`` being reached entirely from ``D* + x``."""
    block_sets(r, tuple(x), tuple(z))
    sub = plan.replace(predicate="block", block=(int(r), tuple(x), tuple(z)), statistic="crossing")
    return estimate_theta(sub, p)


# -- exhaustive enumeration -------------------------------------------------------


def exhaustive_probability(
    region: Region,
    window: Window,
    spec: BackbendSpec,
    sources: Iterable[Vertex],
    event: Callable[[frozenset], bool],
    ps: Sequence[float],
    *,
    max_edges: int = 20,
) -> list[float]:
    """Exact event probability by summing over all open-edge subsets.

    ``event`` receives the self-avoiding-path cluster (a vertex set).  The
    count ``N_k`` of event configurations with ``k`` open edges gives
    ``P(p) = sum_k N_k p^k (1-p)^(E-k)``.
    """
    box = window.intersect(region)
    if box is None:
        raise ValueError("window does not meet the region")
    edges = box.edges()
    n_edges = len(edges)
    if n_edges > max_edges:
        raise ValueError(f"{n_edges} edges exceed the enumeration limit {max_edges}")
    sources = [tuple(s) for s in sources]
    counts = [0] * (n_edges + 1)
    for mask in range(1 << n_edges):
        open_edges = {edges[i] for i in range(n_edges) if mask >> i & 1}
        res = reach_saw_oracle(region, box, spec, sources, open_edges, force=True)
        if event(res.reached):
            counts[len(open_edges)] += 1
    return [
        sum(c * p**k * (1 - p) ** (n_edges - k) for k, c in enumerate(counts)) for p in ps
    ]


# -- records ----------------------------------------------------------------------


def metadata(seed: int, *, reproducible: bool = False) -> dict:
    from . import __version__

    meta = {
        "schema": "backbend-perc/result",
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "master_seed": int(seed),
        "prf": PRF_NAME,
        "prf_version": PRF_VERSION,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "numba": numba.__version__,
    }
    if not reproducible:
        meta["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return meta


def result_record(kind: str, plan: ExperimentPlan | dict, result, *, reproducible: bool = False) -> dict:
    plan_dict = plan.to_dict() if isinstance(plan, ExperimentPlan) else dict(plan)
    if hasattr(result, "to_dict"):
        result = result.to_dict()
    elif isinstance(result, list):
        result = [r.to_dict() if hasattr(r, "to_dict") else r for r in result]
    return {
        "kind": kind,
        "metadata": metadata(plan_dict.get("seed", 0), reproducible=reproducible),
        "plan": plan_dict,
        "result": result,
    }


def dumps_record(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


CURVE_COLUMNS = ("p", "estimate", "ci_lo", "ci_hi", "trials")


def write_curve_csv(curve: Sequence[ThetaEstimate], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    for est in curve:
        w.writerow([repr(est.p), repr(est.estimate), repr(est.ci_lo), repr(est.ci_hi), est.trials])
