# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel backend.

Mirrors ``_pykernels`` operation for operation. The RNG step, draw order and
floating point expressions are kept identical so that traces are
bit-for-bit equal across backends.
"""

import numpy as np

from libc.math cimport fabs
from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t, uint32_t, uint64_t

cdef uint64_t PCG_MULT = 6364136223846793005UL
cdef double U32_TO_DOUBLE = 1.0 / 4294967296.0


cdef inline uint32_t _next_u32(uint64_t *s, uint64_t inc) nogil:
    cdef uint64_t old = s[0]
    s[0] = old * PCG_MULT + inc
    cdef uint32_t xs = <uint32_t>(((old >> 18) ^ old) >> 27)
    cdef uint32_t rot = <uint32_t>(old >> 59)
    return (xs >> rot) | (xs << ((<uint32_t>0 - rot) & <uint32_t>31))


cdef inline uint32_t _next_below(uint64_t *s, uint64_t inc, uint32_t bound) nogil:
    return <uint32_t>((<uint64_t>_next_u32(s, inc) * <uint64_t>bound) >> 32)


# ---------------------------------------------------------------------------
# Barabasi-Albert growth
# ---------------------------------------------------------------------------

def ba_edges(int n, int m, uint64_t[::1] state):
    cdef uint64_t s = state[0]
    cdef uint64_t inc = state[1]

    cdef int64_t n_edges = m * (m + 1) // 2 + <int64_t>(n - m - 1) * m
    edge_u_arr = np.empty(n_edges, dtype=np.int32)
    edge_v_arr = np.empty(n_edges, dtype=np.int32)
    repeated_arr = np.empty(2 * n_edges, dtype=np.int32)
    cdef int32_t[::1] edge_u = edge_u_arr
    cdef int32_t[::1] edge_v = edge_v_arr
    cdef int32_t[::1] repeated = repeated_arr

    cdef int64_t e = 0, cur = 0
    cdef int i, j, v, k, kk
    cdef int32_t t
    cdef bint duplicate
    cdef int32_t targets[64]

    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            edge_u[e] = i
            edge_v[e] = j
            e += 1
            repeated[cur] = i
            repeated[cur + 1] = j
            cur += 2

    for v in range(m + 1, n):
        k = 0
        while k < m:
            t = repeated[_next_below(&s, inc, <uint32_t>cur)]
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
    return edge_u_arr, edge_v_arr


# ---------------------------------------------------------------------------
# Diffusion cycle phases
# ---------------------------------------------------------------------------

def spontaneous(a, int t, double r, double v, bint debunk_enabled, double margin):
    cdef int8_t[::1] color = a.color
    cdef double[::1] th = a.th
    cdef int32_t[::1] activated_at = a.activated_at
    cdef int8_t[::1] last_color = a.last_color
    cdef uint64_t[::1] rng = a.rng_state

    cdef uint64_t s = rng[0]
    cdef uint64_t inc = rng[1]
    cdef Py_ssize_t n = color.shape[0]
    cdef Py_ssize_t i
    cdef double u
    cdef int n_act = 0, n_deb = 0

    for i in range(n):
        if color[i] == 0:
            u = <double>_next_u32(&s, inc) * U32_TO_DOUBLE
            if u < v:
                if r > th[i]:
                    color[i] = 1
                    activated_at[i] = t
                    last_color[i] = 1
                    n_act += 1
                elif debunk_enabled and (th[i] - r) >= margin:
                    color[i] = 4
                    activated_at[i] = t
                    last_color[i] = 4
                    n_deb += 1

    rng[0] = s
    rng[1] = inc
    return n_act, n_deb


def influence(a, int t, double r, double frac, double delta):
    cdef int8_t[::1] color = a.color
    cdef double[::1] th = a.th
    cdef int32_t[::1] activated_at = a.activated_at
    cdef int8_t[::1] last_color = a.last_color
    cdef int64_t[::1] indptr = a.indptr
    cdef int32_t[::1] indices = a.indices
    cdef int32_t[::1] deg = a.deg
    cdef uint8_t[::1] hub = a.hub
    cdef uint8_t[::1] infl_used = a.infl_used
    cdef uint8_t[::1] spreader = a.work_a

    cdef Py_ssize_t n = color.shape[0]
    cdef Py_ssize_t i
    cdef int64_t sl
    cdef int32_t nb
    cdef long cnt
    cdef bint hub_hit, trigger
    cdef double tmp
    cdef int n_act = 0

    for i in range(n):
        spreader[i] = 1 if (color[i] >= 1 and color[i] <= 3) else 0

    for i in range(n):
        if color[i] != 0:
            continue
        cnt = 0
        hub_hit = False
        for sl in range(indptr[i], indptr[i + 1]):
            nb = indices[sl]
            if spreader[nb]:
                cnt += 1
                if hub[nb]:
                    hub_hit = True
        trigger = hub_hit or (<double>cnt > frac * <double>deg[i])
        if trigger:
            if not infl_used[i]:
                tmp = th[i] - delta
                th[i] = tmp if tmp > 0.0 else 0.0
                infl_used[i] = 1
            if r > th[i]:
                color[i] = 2
                activated_at[i] = t
                last_color[i] = 2
                n_act += 1
    return n_act


def persuasion(a, int t, double r, double eps, double delta):
    cdef int8_t[::1] color = a.color
    cdef double[::1] th = a.th
    cdef int32_t[::1] activated_at = a.activated_at
    cdef int8_t[::1] last_color = a.last_color
    cdef int64_t[::1] indptr = a.indptr
    cdef int32_t[::1] indices = a.indices
    cdef uint8_t[::1] contacted = a.contacted
    cdef uint8_t[::1] pers_used = a.pers_used
    cdef uint8_t[::1] spreader = a.work_a

    cdef Py_ssize_t n = color.shape[0]
    cdef Py_ssize_t i
    cdef int64_t sl
    cdef int32_t nb
    cdef bint has_sim
    cdef double tmp
    cdef int n_act = 0

    for i in range(n):
        spreader[i] = 1 if (color[i] >= 1 and color[i] <= 3) else 0

    for i in range(n):
        if color[i] != 0:
            continue
        has_sim = False
        for sl in range(indptr[i], indptr[i + 1]):
            nb = indices[sl]
            if spreader[nb]:
                contacted[sl] = 1
                if fabs(th[nb] - th[i]) <= eps:
                    has_sim = True
        if has_sim:
            if not pers_used[i]:
                tmp = th[i] - delta
                th[i] = tmp if tmp > 0.0 else 0.0
                pers_used[i] = 1
            if r > th[i]:
                color[i] = 3
                activated_at[i] = t
                last_color[i] = 3
                n_act += 1
    return n_act


def debunk(a, int t, double eps):
    cdef int8_t[::1] color = a.color
    cdef double[::1] th = a.th
    cdef int32_t[::1] activated_at = a.activated_at
    cdef int8_t[::1] last_color = a.last_color
    cdef int64_t[::1] indptr = a.indptr
    cdef int32_t[::1] indices = a.indices
    cdef uint8_t[::1] contacted = a.contacted
    cdef uint8_t[::1] was_debunker = a.work_a
    cdef uint8_t[::1] was_spreader = a.work_b

    cdef Py_ssize_t n = color.shape[0]
    cdef Py_ssize_t d
    cdef int64_t sl
    cdef int32_t tgt
    cdef int n_conv = 0

    for d in range(n):
        was_debunker[d] = 1 if color[d] == 4 else 0
        was_spreader[d] = 1 if (color[d] >= 1 and color[d] <= 3) else 0

    for d in range(n):
        if not was_debunker[d]:
            continue
        for sl in range(indptr[d], indptr[d + 1]):
            if not contacted[sl]:
                continue
            tgt = indices[sl]
            if was_spreader[tgt] and color[tgt] != 4:
                if fabs(th[tgt] - th[d]) <= eps:
                    color[tgt] = 4
                    activated_at[tgt] = t
                    last_color[tgt] = 4
                    n_conv += 1
    return n_conv


def deactivate(a, int t, int t_active):
    cdef int8_t[::1] color = a.color
    cdef int32_t[::1] activated_at = a.activated_at

    cdef Py_ssize_t n = color.shape[0]
    cdef Py_ssize_t i
    cdef int n_off = 0

    for i in range(n):
        if color[i] >= 1 and color[i] <= 4:
            if t - activated_at[i] >= t_active:
                color[i] = 5
                n_off += 1
    return n_off


# ---------------------------------------------------------------------------
# SIR sweep
# ---------------------------------------------------------------------------

def sir_sweep(int8_t[::1] status, int64_t[::1] indptr, int32_t[::1] indices,
              uint64_t[::1] state, double alpha, double lam):
    cdef uint64_t s = state[0]
    cdef uint64_t inc = state[1]
    cdef Py_ssize_t n = status.shape[0]
    cdef Py_ssize_t i, k
    cdef int32_t tmp
    cdef int64_t lo, hi
    cdef int32_t j
    cdef double u

    order_arr = np.flatnonzero(np.asarray(status) == 1).astype(np.int32)
    cdef int32_t[::1] order = order_arr
    cdef Py_ssize_t n_spread = order.shape[0]

    for k in range(n_spread - 1, 0, -1):
        i = _next_below(&s, inc, <uint32_t>(k + 1))
        tmp = order[k]
        order[k] = order[i]
        order[i] = tmp

    for k in range(n_spread):
        i = order[k]
        lo = indptr[i]
        hi = indptr[i + 1]
        if hi == lo:
            continue
        j = indices[lo + _next_below(&s, inc, <uint32_t>(hi - lo))]
        u = <double>_next_u32(&s, inc) * U32_TO_DOUBLE
        if status[j] == 0:
            if u < lam:
                status[j] = 1
        else:
            if u < alpha:
                status[i] = 2

    state[0] = s
    state[1] = inc
