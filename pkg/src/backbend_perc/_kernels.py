"""Jitted search kernels over (vertex, record level) states.

All kernels work on a dense row-major box (the intersection of the window
with the region).  ``floor[h]`` is the lowest admissible level at record
``h``; ``NEG`` encodes an unbounded retreat.  Modes:

* ``MODE_MIN``: floor nondecreasing on the box, keep the least record per vertex;
* ``MODE_FULL``: arbitrary floor, keep every (vertex, record) pair;
* ``MODE_PLAIN``: no floor at all, records are irrelevant.
"""

import numpy as np
from numba import njit

from .config import edge_uniform_raw, trial_key

NEG = -(1 << 60)
BIG = 1 << 60
MODE_MIN = 0
MODE_FULL = 1
MODE_PLAIN = 2
NEVER = 2.0  # threshold sentinel: event not seen below the search cap


@njit(cache=True, inline="always")
def _decode(idx, lo, shape, strides, out):
    for i in range(lo.shape[0]):
        out[i] = (idx // strides[i]) % shape[i] + lo[i]


@njit(cache=True)
def _grow(a, n):
    b = np.empty(max(2 * a.shape[0], n), a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True)
def _extent(c, center, ext_axes):
    m = 0
    for i in range(c.shape[0]):
        if ext_axes[i]:
            x = abs(c[i] - center[i])
            if x > m:
                m = x
    return m


@njit(cache=True, nogil=True)
def walk(
    lo, shape, strides, steps, self_lower, upb, floor, mode, sources, tkey, p,
    vbest, seen, target, center, ext_axes,
):
    """Breadth-first closure at a fixed ``p``.

    Returns ``(reached, records, max_level, max_extent, target_hits)`` where
    ``reached`` lists vertex indices in discovery order and ``records`` holds
    the corresponding least record (MIN/PLAIN) or, in FULL mode, one entry
    per distinct state (``reached`` then repeats vertices).  ``vbest`` and
    ``seen`` are scratch buffers and are left reset.
    """
    d = lo.shape[0]
    nlev = floor.shape[0]
    nsteps = steps.shape[0]
    qv = np.empty(1024, np.int64)
    qh = np.empty(1024, np.int64)
    head = 0
    tail = 0
    out_v = np.empty(256, np.int64)
    out_h = np.empty(256, np.int64)
    n_out = 0
    touched = np.empty(256, np.int64)
    n_touched = 0
    cv = np.empty(d, np.int64)
    cw = np.empty(d, np.int64)
    lower = np.empty(d, np.int64)
    max_level = NEG
    max_ext = 0
    hits = 0
    for s in sources:
        _decode(s, lo, shape, strides, cv)
        h = cv[d - 1]
        if mode == MODE_FULL:
            if seen[s * nlev + h]:
                continue
            seen[s * nlev + h] = 1
        elif vbest[s] <= h:
            continue
        if vbest[s] == BIG:
            if n_touched == touched.shape[0]:
                touched = _grow(touched, n_touched + 1)
            touched[n_touched] = s
            n_touched += 1
        if h < vbest[s]:
            vbest[s] = h
        if tail == qv.shape[0]:
            qv = _grow(qv, tail + 1)
            qh = _grow(qh, tail + 1)
        qv[tail] = s
        qh[tail] = h
        tail += 1
    while head < tail:
        v = qv[head]
        h = qh[head]
        head += 1
        if mode == MODE_MIN and h > vbest[v]:
            continue
        _decode(v, lo, shape, strides, cv)
        for j in range(nsteps):
            inside = True
            off = 0
            for i in range(d):
                c = cv[i] + steps[j, i]
                if c < lo[i] or c >= lo[i] + shape[i]:
                    inside = False
                    break
                cw[i] = c
                off += (c - lo[i]) * strides[i]
            if not inside:
                continue
            wd = cw[d - 1]
            h2 = h if h > wd else wd
            if wd < floor[h2]:
                continue
            if mode == MODE_MIN:
                if h2 >= vbest[off]:
                    continue
            elif mode == MODE_PLAIN:
                if vbest[off] != BIG:
                    continue
            else:
                if seen[off * nlev + h2]:
                    continue
            if self_lower[j]:
                for i in range(d):
                    lower[i] = cv[i]
            else:
                for i in range(d):
                    lower[i] = cw[i]
            if not edge_uniform_raw(tkey, lower, upb[j]) < p:
                continue
            if mode == MODE_FULL:
                seen[off * nlev + h2] = 1
            if vbest[off] == BIG:
                if n_touched == touched.shape[0]:
                    touched = _grow(touched, n_touched + 1)
                touched[n_touched] = off
                n_touched += 1
            if h2 < vbest[off]:
                vbest[off] = h2
            if tail == qv.shape[0]:
                qv = _grow(qv, tail + 1)
                qh = _grow(qh, tail + 1)
            qv[tail] = off
            qh[tail] = h2
            tail += 1
    # summarize
    if mode == MODE_FULL:
        for k in range(tail):
            v = qv[k]
            if n_out == out_v.shape[0]:
                out_v = _grow(out_v, n_out + 1)
                out_h = _grow(out_h, n_out + 1)
            out_v[n_out] = v
            out_h[n_out] = qh[k]
            n_out += 1
            seen[v * nlev + qh[k]] = 0
    else:
        out_v = touched[:n_touched].copy()
        out_h = np.empty(n_touched, np.int64)
        n_out = n_touched
    for k in range(n_touched):
        v = touched[k]
        if mode != MODE_FULL:
            out_h[k] = vbest[v]
        vbest[v] = BIG
        _decode(v, lo, shape, strides, cv)
        if cv[d - 1] > max_level:
            max_level = cv[d - 1]
        e = _extent(cv, center, ext_axes)
        if e > max_ext:
            max_ext = e
        if target[v]:
            hits += 1
    return out_v[:n_out], out_h[:n_out], max_level, max_ext, hits


# -- minimax thresholds ------------------------------------------------------


@njit(cache=True, inline="always")
def _less(hk, hv, hh, a, b):
    if hk[a] != hk[b]:
        return hk[a] < hk[b]
    if hv[a] != hv[b]:
        return hv[a] < hv[b]
    return hh[a] < hh[b]


@njit(cache=True)
def _swap(hk, hv, hh, a, b):
    t = hk[a]
    hk[a] = hk[b]
    hk[b] = t
    u = hv[a]
    hv[a] = hv[b]
    hv[b] = u
    u = hh[a]
    hh[a] = hh[b]
    hh[b] = u


@njit(cache=True)
def _sift_up(hk, hv, hh, i):
    while i > 0:
        parent = (i - 1) >> 1
        if _less(hk, hv, hh, i, parent):
            _swap(hk, hv, hh, i, parent)
            i = parent
        else:
            break


@njit(cache=True)
def _sift_down(hk, hv, hh, n):
    i = 0
    while True:
        a = 2 * i + 1
        if a >= n:
            break
        b = a + 1
        m = a
        if b < n and _less(hk, hv, hh, b, a):
            m = b
        if _less(hk, hv, hh, m, i):
            _swap(hk, hv, hh, m, i)
            i = m
        else:
            break


@njit(cache=True, nogil=True)
def thresholds(
    lo, shape, strides, steps, self_lower, upb, floor, mode, sources, tkey, p_max,
    vbest, seen, target, n_target, center, ext_axes, level_req, ext_req, size_req,
    thr_level, thr_ext, thr_misc,
):
    """Per-event percolation thresholds of one configuration.

    Pops states in order of their minimax key (largest uniform on the best
    walk, -1 for sources), so an event that first holds when key ``k`` is
    popped holds at ``p`` iff ``k < p``.  Fills ``thr_level[r]`` (max level
    >= r, r <= level_req), ``thr_ext[r]`` (extent >= r, r <= ext_req) and
    ``thr_misc = [any target hit, all targets hit, size >= size_req]``;
    unresolved entries stay at ``NEVER``.  Stops once every requested event
    is resolved or the next key reaches ``p_max``.
    """
    d = lo.shape[0]
    nlev = floor.shape[0]
    nsteps = steps.shape[0]
    thr_level[:] = NEVER
    thr_ext[:] = NEVER
    thr_misc[:] = NEVER
    hk = np.empty(1024, np.float64)
    hv = np.empty(1024, np.int64)
    hh = np.empty(1024, np.int64)
    n = 0
    touched = np.empty(256, np.int64)
    n_touched = 0
    fin_states = np.empty(256, np.int64)
    n_fin = 0
    cv = np.empty(d, np.int64)
    cw = np.empty(d, np.int64)
    lower = np.empty(d, np.int64)
    cur_level = -1
    cur_ext = -1
    n_hits = 0
    n_reached = 0
    pending = 0
    if level_req >= 0:
        pending += 1
    if ext_req >= 0:
        pending += 1
    if n_target > 0:
        pending += 2
    if size_req > 0:
        pending += 1
    for s in sources:
        _decode(s, lo, shape, strides, cv)
        if n == hk.shape[0]:
            hk = _grow(hk, n + 1)
            hv = _grow(hv, n + 1)
            hh = _grow(hh, n + 1)
        hk[n] = -1.0
        hv[n] = s
        hh[n] = cv[d - 1]
        n += 1
        _sift_up(hk, hv, hh, n - 1)
    # vbest holds the least record among *settled* states of each vertex
    while n > 0 and pending > 0:
        key = hk[0]
        v = hv[0]
        h = hh[0]
        if key >= p_max:
            break
        n -= 1
        if n > 0:
            hk[0] = hk[n]
            hv[0] = hv[n]
            hh[0] = hh[n]
            _sift_down(hk, hv, hh, n)
        if mode == MODE_FULL:
            if seen[v * nlev + h]:
                continue
            seen[v * nlev + h] = 1
            if n_fin == fin_states.shape[0]:
                fin_states = _grow(fin_states, n_fin + 1)
            fin_states[n_fin] = v * nlev + h
            n_fin += 1
        elif mode == MODE_MIN:
            if h >= vbest[v]:
                continue
        elif vbest[v] != BIG:
            continue
        first = vbest[v] == BIG
        if first:
            if n_touched == touched.shape[0]:
                touched = _grow(touched, n_touched + 1)
            touched[n_touched] = v
            n_touched += 1
        if h < vbest[v]:
            vbest[v] = h
        _decode(v, lo, shape, strides, cv)
        if first:
            n_reached += 1
            lev = cv[d - 1]
            if level_req >= 0 and lev > cur_level and cur_level < level_req:
                top = lev if lev < level_req else level_req
                for r in range(max(cur_level + 1, 0), top + 1):
                    thr_level[r] = key
                if top == level_req:
                    pending -= 1
            if lev > cur_level:
                cur_level = lev
            e = _extent(cv, center, ext_axes)
            if ext_req >= 0 and e > cur_ext and cur_ext < ext_req:
                top = e if e < ext_req else ext_req
                for r in range(cur_ext + 1, top + 1):
                    thr_ext[r] = key
                if top == ext_req:
                    pending -= 1
            if e > cur_ext:
                cur_ext = e
            if n_target > 0 and target[v]:
                n_hits += 1
                if n_hits == 1:
                    thr_misc[0] = key
                    pending -= 1
                if n_hits == n_target:
                    thr_misc[1] = key
                    pending -= 1
            if size_req > 0 and n_reached == size_req:
                thr_misc[2] = key
                pending -= 1
        for j in range(nsteps):
            inside = True
            off = 0
            for i in range(d):
                c = cv[i] + steps[j, i]
                if c < lo[i] or c >= lo[i] + shape[i]:
                    inside = False
                    break
                cw[i] = c
                off += (c - lo[i]) * strides[i]
            if not inside:
                continue
            wd = cw[d - 1]
            h2 = h if h > wd else wd
            if wd < floor[h2]:
                continue
            if mode == MODE_MIN:
                if h2 >= vbest[off]:
                    continue
            elif mode == MODE_PLAIN:
                if vbest[off] != BIG:
                    continue
            else:
                if seen[off * nlev + h2]:
                    continue
            if self_lower[j]:
                for i in range(d):
                    lower[i] = cv[i]
            else:
                for i in range(d):
                    lower[i] = cw[i]
            u = edge_uniform_raw(tkey, lower, upb[j])
            k2 = key if key > u else u
            if k2 >= p_max:
                continue
            if n == hk.shape[0]:
                hk = _grow(hk, n + 1)
                hv = _grow(hv, n + 1)
                hh = _grow(hh, n + 1)
            hk[n] = k2
            hv[n] = off
            hh[n] = h2
            n += 1
            _sift_up(hk, hv, hh, n - 1)
    for k in range(n_touched):
        vbest[touched[k]] = BIG
    for k in range(n_fin):
        seen[fin_states[k]] = 0
    return n_reached


@njit(cache=True, nogil=True)
def thresholds_batch(
    lo, shape, strides, steps, self_lower, upb, floor, mode, sources, seed, trials,
    p_max, vbest, seen, target, n_target, center, ext_axes, level_req, ext_req, size_req,
):
    nt = trials.shape[0]
    out_level = np.empty((nt, max(level_req + 1, 1)), np.float64)
    out_ext = np.empty((nt, max(ext_req + 1, 1)), np.float64)
    out_misc = np.empty((nt, 3), np.float64)
    tl = np.empty(max(level_req + 1, 1), np.float64)
    te = np.empty(max(ext_req + 1, 1), np.float64)
    tm = np.empty(3, np.float64)
    for t in range(nt):
        tkey = trial_key(seed, trials[t])
        thresholds(
            lo, shape, strides, steps, self_lower, upb, floor, mode, sources, tkey, p_max,
            vbest, seen, target, n_target, center, ext_axes, level_req, ext_req, size_req,
            tl, te, tm,
        )
        out_level[t] = tl
        out_ext[t] = te
        out_misc[t] = tm
    return out_level, out_ext, out_misc
