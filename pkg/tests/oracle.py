"""Independent brute-force evaluator of the diffusion rules.

Written straight from the three mechanism descriptions (spontaneous
visualization, collective influence, communication persuasion) plus the
debunking and deactivation rules, using plain dicts and sets and no shared
code with the engine except the PCG32 draw protocol, which is part of the
reproducibility contract. Used to cross-check the engine trace cycle by
cycle.
"""

from __future__ import annotations

import numpy as np

from rumornet.rng import STREAM_AGENTS, Pcg32

UNDEPLOYED, SPONTANEOUS, INFLUENCED, PERSUADED, DEBUNKER, INACTIVE = range(6)
SPREADERS = (SPONTANEOUS, INFLUENCED, PERSUADED)


class OracleAgent:
    def __init__(self, th):
        self.th = th
        self.color = UNDEPLOYED
        self.activated_at = None
        self.contacted_by = set()
        self.infl_used = False
        self.pers_used = False


def hub_cutoff(adj, quantile):
    if quantile <= 0.0:
        return float("inf")
    degrees = np.array([float(len(adj[i])) for i in sorted(adj)])
    if quantile >= 1.0:
        return float(degrees.min())
    return float(np.quantile(degrees, 1.0 - quantile))


def oracle_run(adj, schedule, params, max_cycles, seed, threshold_dist=("uniform", 0.0, 1.0)):
    """Full naive simulation; returns (per-cycle count rows, agents, terminated).

    ``adj`` is a dict node -> set of neighbors. Draw order: thresholds for
    all nodes first, then one visualization uniform per undeployed agent in
    ascending node order each cycle.
    """
    n = len(adj)
    rng = Pcg32(seed, STREAM_AGENTS)
    if threshold_dist[0] == "uniform":
        lo, hi = threshold_dist[1], threshold_dist[2]
        agents = [OracleAgent(rng.next_double() * (hi - lo) + lo) for _ in range(n)]
    elif threshold_dist[0] == "constant":
        agents = [OracleAgent(threshold_dist[1]) for _ in range(n)]
    else:
        raise ValueError(threshold_dist)

    cutoff = hub_cutoff(adj, params.hub_degree_quantile)
    rows = []
    terminated = False
    for t in range(max_cycles):
        r, v = schedule.at(t)
        oracle_cycle(agents, adj, r, v, params, t, rng, cutoff)
        counts = [0] * 6
        for a in agents:
            counts[a.color] += 1
        rows.append(counts)
        active = counts[SPONTANEOUS] + counts[INFLUENCED] + counts[PERSUADED] + counts[DEBUNKER]
        if active == 0:
            if counts[UNDEPLOYED] == 0 or counts[INACTIVE] == n:
                terminated = True
                break
            if not _activatable(agents, schedule, params, t + 1):
                terminated = True
                break
    return rows, agents, terminated


def _activatable(agents, schedule, params, t_next):
    bounds = schedule.visible_r_bounds_from(t_next)
    if bounds is None:
        return False
    r_max, r_min = bounds
    for a in agents:
        if a.color != UNDEPLOYED:
            continue
        if r_max > a.th:
            return True
        if params.debunking_enabled and a.th - r_min >= params.debunk_margin:
            return True
    return False


def oracle_cycle(agents, adj, r, v, params, t, rng, cutoff):
    # phase 1: spontaneous visualization
    for i in range(len(agents)):
        a = agents[i]
        if a.color != UNDEPLOYED:
            continue
        u = rng.next_double()
        if u < v:
            if r > a.th:
                a.color = SPONTANEOUS
                a.activated_at = t
            elif params.debunking_enabled and a.th - r >= params.debunk_margin:
                a.color = DEBUNKER
                a.activated_at = t

    # phase 2: collective influence
    spreader_now = [a.color in SPREADERS for a in agents]
    for i, a in enumerate(agents):
        if a.color != UNDEPLOYED:
            continue
        nbrs = adj[i]
        if not nbrs:
            continue
        sp = [j for j in nbrs if spreader_now[j]]
        frac_trigger = float(len(sp)) > params.influence_fraction * float(len(nbrs))
        hub_trigger = any(float(len(adj[j])) >= cutoff for j in sp)
        if frac_trigger or hub_trigger:
            if not a.infl_used:
                a.th = max(0.0, a.th - params.delta_influence)
                a.infl_used = True
            if r > a.th:
                a.color = INFLUENCED
                a.activated_at = t

    # phase 3: communication persuasion
    spreader_now = [a.color in SPREADERS for a in agents]
    for i, a in enumerate(agents):
        if a.color != UNDEPLOYED:
            continue
        senders = [j for j in adj[i] if spreader_now[j]]
        a.contacted_by.update(senders)
        if any(abs(agents[j].th - a.th) <= params.epsilon_similarity for j in senders):
            if not a.pers_used:
                a.th = max(0.0, a.th - params.delta_persuasion)
                a.pers_used = True
            if r > a.th:
                a.color = PERSUADED
                a.activated_at = t

    # phase 4: debunking
    if params.debunking_enabled:
        debunker_now = [a.color == DEBUNKER for a in agents]
        spreader_now = [a.color in SPREADERS for a in agents]
        for d, a in enumerate(agents):
            if not debunker_now[d]:
                continue
            for s in sorted(a.contacted_by):
                target = agents[s]
                if spreader_now[s] and target.color != DEBUNKER:
                    if abs(target.th - a.th) <= params.epsilon_similarity:
                        target.color = DEBUNKER
                        target.activated_at = t

    # phase 5: deactivation
    for a in agents:
        if a.color in (SPONTANEOUS, INFLUENCED, PERSUADED, DEBUNKER):
            if t - a.activated_at >= params.t_active:
                a.color = INACTIVE


def graph_to_adj(graph):
    return {i: set(int(j) for j in graph.neighbors(i)) for i in range(graph.n)}
