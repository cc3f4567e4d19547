"""Deterministic edge configurations with monotone coupling in ``p``.

Every edge carries a uniform in ``[0, 1)`` obtained by hashing
``(master_seed, trial, lower endpoint, up_signs)``; the edge is open at
level ``p`` iff its uniform is below ``p``.  Keying on the edge's geometry
(rather than a window-local index) keeps configurations identical across
nested windows.

The hash is a chain of SplitMix64 finalizers::

    k = mix(mix(seed ^ SEED_SALT) + GAMMA * (trial + 1))
    h = k; for c in coords(lower): h = mix(h + GAMMA + c)
    u = (mix(h + GAMMA + up_bits) >> 11) * 2**-53

with coordinates taken as two's-complement 64-bit words and ``up_bits`` the
up_signs read as a binary number (first axis most significant, -1 -> 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .lattice import EdgeKey, Window

PRF_NAME = "splitmix64-chain"
PRF_VERSION = 1

_M64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
SEED_SALT = 0x5851F42D4C957F2D
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB

_U_GAMMA = np.uint64(GAMMA)
_U_SALT = np.uint64(SEED_SALT)
_U_C1 = np.uint64(_C1)
_U_C2 = np.uint64(_C2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _U_C1
    z = (z ^ (z >> _S27)) * _U_C2
    return z ^ (z >> _S31)


@njit(cache=True)
def trial_key(seed, trial):
    """64-bit key for one ``(seed, trial)`` pair; ``seed`` is a uint64."""
    return mix64(mix64(seed ^ _U_SALT) + _U_GAMMA * np.uint64(trial + 1))


@njit(cache=True, inline="always")
def edge_uniform_raw(tkey, lower, up_bits):
    h = np.uint64(tkey)
    for i in range(lower.shape[0]):
        h = mix64(h + _U_GAMMA + np.uint64(lower[i]))
    h = mix64(h + _U_GAMMA + np.uint64(up_bits))
    return np.float64(h >> _S11) * _INV53


@njit(cache=True)
def _uniform_batch(tkey, lowers, up_bits):
    n = lowers.shape[0]
    out = np.empty(n, np.float64)
    for j in range(n):
        out[j] = edge_uniform_raw(tkey, lowers[j], up_bits[j])
    return out


def up_bits_of(up_signs) -> int:
    b = 0
    for s in up_signs:
        b = (b << 1) | (1 if s > 0 else 0)
    return b


def seed_word(seed: int) -> np.uint64:
    if not 0 <= int(seed) <= _M64:
        raise ValueError("master seed must be a 64-bit unsigned integer")
    return np.uint64(int(seed))


@dataclass(frozen=True)
class RngKey:
    master_seed: int
    trial: int = 0

    def __post_init__(self) -> None:
        seed_word(self.master_seed)
        if self.trial < 0:
            raise ValueError("trial index must be nonnegative")

    @property
    def word(self) -> np.uint64:
        return np.uint64(trial_key(seed_word(self.master_seed), np.int64(self.trial)))


def edge_uniform(key: RngKey, edge: EdgeKey) -> float:
    """Uniform in ``[0, 1)`` attached to the canonical edge ``(lower, up_signs)``."""
    lower, up = edge
    return float(
        edge_uniform_raw(key.word, np.asarray(lower, dtype=np.int64), np.int64(up_bits_of(up)))
    )


def edge_uniforms(key: RngKey, edges: list[EdgeKey]) -> np.ndarray:
    if not edges:
        return np.empty(0)
    lowers = np.array([e[0] for e in edges], dtype=np.int64)
    bits = np.array([up_bits_of(e[1]) for e in edges], dtype=np.int64)
    return _uniform_batch(key.word, lowers, bits)


def is_open(u: float, p: float) -> bool:
    check_p(p)
    return u < p


def check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class EdgeConfig:
    """Uniforms for every edge of ``window`` under ``key``.

    ``index`` positions follow :meth:`Window.edges` (lexicographic by lower
    endpoint, then up_signs).
    """

    key: RngKey
    window: Window

    def edges(self) -> list[EdgeKey]:
        return self.window.edges()

    def uniforms(self) -> np.ndarray:
        return edge_uniforms(self.key, self.edges())

    def uniform(self, edge: EdgeKey | int) -> float:
        if isinstance(edge, (int, np.integer)):
            edge = self.edges()[int(edge)]
        return edge_uniform(self.key, edge)

    def is_open(self, edge: EdgeKey | int, p: float) -> bool:
        return is_open(self.uniform(edge), p)

    def open_edges(self, p: float) -> set[EdgeKey]:
        check_p(p)
        edges = self.edges()
        u = edge_uniforms(self.key, edges)
        return {e for e, x in zip(edges, u) if x < p}


def open_edge_count(config: EdgeConfig, p: float) -> int:
    check_p(p)
    return int(np.count_nonzero(config.uniforms() < p))


def metadata(seed: int) -> dict:
    return {"master_seed": int(seed), "prf": PRF_NAME, "prf_version": PRF_VERSION}


# Pure-integer twin of the jitted hash, used to cross-check uint64 semantics.


def _mix64_py(z: int) -> int:
    z = ((z ^ (z >> 30)) * _C1) & _M64
    z = ((z ^ (z >> 27)) * _C2) & _M64
    return z ^ (z >> 31)


def edge_uniform_reference(seed: int, trial: int, lower, up_signs) -> float:
    k = _mix64_py((_mix64_py(seed ^ SEED_SALT) + GAMMA * (trial + 1)) & _M64)
    h = k
    for c in lower:
        h = _mix64_py((h + GAMMA + (c & _M64)) & _M64)
    h = _mix64_py((h + GAMMA + up_bits_of(up_signs)) & _M64)
    return (h >> 11) * _INV53
