"""Pure-Python/numpy kernel backend.

Reference implementation of the hot loops. The compiled backend mirrors
these semantics operation for operation; any change here must be made there
as well, and the cross-backend equality tests will catch drift. Scalar RNG
consumption order is part of the contract:

* spontaneous phase: one uniform per undeployed agent, ascending node id;
* BA growth: degree-proportional index draws with rejection on duplicates;
* SIR sweep: Fisher-Yates over the spreader list, then per spreader one
  bounded neighbor draw plus one uniform.
"""

from __future__ import annotations

import numpy as np

from ..rng import MASK32, MASK64, PCG_MULT, Pcg32


def _scalar_rng(state):
    """Local PCG32 continuing from a (state, inc) array; returns closures."""
    rng = Pcg32.__new__(Pcg32)
    rng.load_state(state)
    return rng


def _batch_uniforms(state, count: int) -> np.ndarray:
    rng = _scalar_rng(state)
    out = rng.uniform_batch(count)
    state[0] = rng.state
    state[1] = rng.inc
    return out


# ---------------------------------------------------------------------------
# Barabasi-Albert growth
# ---------------------------------------------------------------------------

def ba_edges(n: int, m: int, state) -> tuple[np.ndarray, np.ndarray]:
    """Edge endpoints of a BA graph grown from a complete seed on m+1 nodes.

    Preferential attachment samples uniformly from the repeated-endpoint
    list (one entry per degree unit), rejecting duplicates within a single
    node's m attachments.
    """
    s = int(state[0])
    inc = int(state[1])

    n_edges = m * (m + 1) // 2 + (n - m - 1) * m
    edge_u = np.empty(n_edges, dtype=np.int32)
    edge_v = np.empty(n_edges, dtype=np.int32)
    repeated = np.empty(2 * n_edges, dtype=np.int32)

    e = 0
    cur = 0
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            edge_u[e] = i
            edge_v[e] = j
            e += 1
            repeated[cur] = i
            repeated[cur + 1] = j
            cur += 2

    targets = [0] * m
    for v in range(m + 1, n):
        k = 0
        while k < m:
            old = s
            s = (old * PCG_MULT + inc) & MASK64
            xs = (((old >> 18) ^ old) >> 27) & MASK32
            rot = old >> 59
            u32 = ((xs >> rot) | (xs << ((-rot) & 31))) & MASK32
            t = int(repeated[(u32 * cur) >> 32])
            duplicate = False
            for kk in range(k):
                if targets[kk] == t:
                    duplicate = True
                    break
            if duplicate:
                continue
            targets[k] = t
            k += 1
        for k in range(m):
            edge_u[e] = v
            edge_v[e] = targets[k]
            e += 1
        for k in range(m):
            repeated[cur] = targets[k]
            repeated[cur + 1] = v
            cur += 2

    state[0] = s
    state[1] = inc
    return edge_u, edge_v


# ---------------------------------------------------------------------------
# Diffusion cycle phases
# ---------------------------------------------------------------------------

def spontaneous(a, t: int, r: float, v: float, debunk_enabled: bool,
                margin: float) -> tuple[int, int]:
    """Visualization draws for every undeployed agent; direct activation."""
    und = np.flatnonzero(a.color == 0)
    us = _batch_uniforms(a.rng_state, und.size)
    vis = us < v
    th_u = a.th[und]
    act = vis & (r > th_u)
    idx = und[act]
    a.color[idx] = 1
    a.activated_at[idx] = t
    a.last_color[idx] = 1
    n_deb = 0
    if debunk_enabled:
        deb = vis & ((th_u - r) >= margin)
        idx = und[deb]
        a.color[idx] = 4
        a.activated_at[idx] = t
        a.last_color[idx] = 4
        n_deb = int(idx.size)
    return int(np.count_nonzero(act)), n_deb


def influence(a, t: int, r: float, frac: float, delta: float) -> int:
    """Neighborhood-pressure decrement (one-shot per agent) and activation."""
    spreader = (a.color >= 1) & (a.color <= 3)
    und = a.color == 0
    sp_edge = spreader[a.indices]
    n = a.color.shape[0]
    cnt = np.bincount(a.row_of_slot[sp_edge], minlength=n)
    hub_hit = np.bincount(
        a.row_of_slot[sp_edge & (a.hub[a.indices] != 0)], minlength=n
    ) > 0
    trigger = und & (
        (cnt.astype(np.float64) > frac * a.deg.astype(np.float64)) | hub_hit
    )
    dec = trigger & (a.infl_used == 0)
    a.th[dec] = np.maximum(0.0, a.th[dec] - delta)
    a.infl_used[dec] = 1
    act = trigger & (r > a.th)
    a.color[act] = 2
    a.activated_at[act] = t
    a.last_color[act] = 2
    return int(np.count_nonzero(act))


def persuasion(a, t: int, r: float, eps: float, delta: float) -> int:
    """Spreaders message undeployed neighbors; similarity gates the decrement."""
    spreader = (a.color >= 1) & (a.color <= 3)
    und = a.color == 0
    msg = spreader[a.indices] & und[a.row_of_slot]
    a.contacted[msg] = 1
    sim = msg & (np.abs(a.th[a.indices] - a.th[a.row_of_slot]) <= eps)
    n = a.color.shape[0]
    has_sim = np.bincount(a.row_of_slot[sim], minlength=n) > 0
    dec = has_sim & (a.pers_used == 0)
    a.th[dec] = np.maximum(0.0, a.th[dec] - delta)
    a.pers_used[dec] = 1
    act = has_sim & (r > a.th)
    a.color[act] = 3
    a.activated_at[act] = t
    a.last_color[act] = 3
    return int(np.count_nonzero(act))


def debunk(a, t: int, eps: float) -> int:
    """Debunkers correct their past contacters; similar spreaders convert."""
    deb = a.color == 4
    spr = (a.color >= 1) & (a.color <= 3)
    sl = (a.contacted != 0) & deb[a.row_of_slot]
    targets = a.indices[sl]
    owners = a.row_of_slot[sl]
    ok = spr[targets] & (np.abs(a.th[targets] - a.th[owners]) <= eps)
    conv = np.unique(targets[ok])
    a.color[conv] = 4
    a.activated_at[conv] = t
    a.last_color[conv] = 4
    return int(conv.size)


def deactivate(a, t: int, t_active: int) -> int:
    off = (a.color >= 1) & (a.color <= 4) & ((t - a.activated_at) >= t_active)
    a.color[off] = 5
    return int(np.count_nonzero(off))


# ---------------------------------------------------------------------------
# SIR sweep
# ---------------------------------------------------------------------------

def sir_sweep(status, indptr, indices, state, alpha: float, lam: float) -> None:
    """One synchronous cycle: every current spreader acts once, random order."""
    s = int(state[0])
    inc = int(state[1])

    def nxt():
        nonlocal s
        old = s
        s = (old * PCG_MULT + inc) & MASK64
        xs = (((old >> 18) ^ old) >> 27) & MASK32
        rot = old >> 59
        return ((xs >> rot) | (xs << ((-rot) & 31))) & MASK32

    order = [int(i) for i in np.flatnonzero(status == 1)]
    for i in range(len(order) - 1, 0, -1):
        j = (nxt() * (i + 1)) >> 32
        order[i], order[j] = order[j], order[i]

    for i in order:
        lo = int(indptr[i])
        hi = int(indptr[i + 1])
        if hi == lo:
            continue
        j = int(indices[lo + ((nxt() * (hi - lo)) >> 32)])
        u = nxt() * 2.0**-32
        if status[j] == 0:
            if u < lam:
                status[j] = 1
        else:
            if u < alpha:
                status[i] = 2

    state[0] = s
    state[1] = inc
