"""Engine vs brute-force rule evaluator, cycle by cycle."""

import numpy as np
import pytest

from rumornet.engine import run
from rumornet.graph import Graph, generate_ba
from rumornet.model import ModelParams, NewsSchedule

from .oracle import graph_to_adj, oracle_run

MICRO_GRAPHS = {
    "path5": [(0, 1), (1, 2), (2, 3), (3, 4)],
    "star5": [(0, 1), (0, 2), (0, 3), (0, 4)],
    "triangle_tail": [(0, 1), (1, 2), (0, 2), (2, 3)],
    "k4": [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    "chord6": [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)],
}

PARAM_SETS = {
    "defaults": ModelParams(),
    "debunk": ModelParams(debunking_enabled=True, debunk_margin=0.1, t_active=4),
    "touchy": ModelParams(influence_fraction=0.25, delta_influence=0.2,
                          delta_persuasion=0.05, epsilon_similarity=0.5,
                          t_active=3, debunking_enabled=True),
    "hubs": ModelParams(hub_degree_quantile=0.5, t_active=6),
}

SCHEDULES = {
    "constant": NewsSchedule.constant(0.55, 0.4),
    "two_phase": NewsSchedule(segments=((0, 0.3, 0.5), (4, 0.9, 0.5))),
    "drop": NewsSchedule(segments=((0, 0.67, 0.5), (3, 0.35, 0.8))),
}


def compare(graph: Graph, schedule, params, max_cycles, seed):
    trace = run(graph, schedule, params, max_cycles, seed)
    rows, agents, terminated = oracle_run(
        graph_to_adj(graph), schedule, params, max_cycles, seed
    )
    assert trace.n_cycles == len(rows), "cycle count differs"
    assert np.array_equal(trace.counts, np.asarray(rows, dtype=np.int64))
    assert trace.terminated == terminated
    snap = trace.snapshot
    for i, a in enumerate(agents):
        assert snap.color[i] == a.color, f"agent {i} color"
        assert snap.threshold_final[i] == a.th, f"agent {i} threshold"
        expected_at = -1 if a.activated_at is None else a.activated_at
        assert snap.activated_at[i] == expected_at, f"agent {i} timestamp"


@pytest.mark.parametrize("graph_name", sorted(MICRO_GRAPHS))
@pytest.mark.parametrize("param_name", sorted(PARAM_SETS))
def test_micro_graphs_match_oracle(graph_name, param_name):
    edges = MICRO_GRAPHS[graph_name]
    n = max(max(e) for e in edges) + 1
    graph = Graph.from_edges(n, [e[0] for e in edges], [e[1] for e in edges])
    for sched_name, sched in SCHEDULES.items():
        for seed in (1, 2, 3):
            compare(graph, sched, PARAM_SETS[param_name], 12, seed)


def test_ba_graph_matches_oracle():
    graph = generate_ba(60, 2, seed=5)
    compare(graph, SCHEDULES["drop"], PARAM_SETS["touchy"], 25, seed=8)
    compare(graph, SCHEDULES["constant"], PARAM_SETS["defaults"], 25, seed=9)


def test_contact_sets_match_oracle():
    from rumornet.engine import SimulationState, step
    from rumornet.model import Population
    from rumornet.rng import STREAM_AGENTS, Pcg32
    from .oracle import OracleAgent, hub_cutoff, oracle_cycle

    edges = MICRO_GRAPHS["chord6"]
    graph = Graph.from_edges(6, [e[0] for e in edges], [e[1] for e in edges])
    params = PARAM_SETS["debunk"]
    sched = SCHEDULES["drop"]

    seed = 4
    rng = Pcg32(seed, STREAM_AGENTS)
    ths = [rng.next_double() for _ in range(6)]
    pop = Population.fresh(np.asarray(ths))
    state = SimulationState.create(graph, pop, params, rng)

    adj = graph_to_adj(graph)
    rng2 = Pcg32(seed, STREAM_AGENTS)
    agents = [OracleAgent(rng2.next_double()) for _ in range(6)]
    cutoff = hub_cutoff(adj, params.hub_degree_quantile)

    for t in range(10):
        step(state, sched)
        r, v = sched.at(t)
        oracle_cycle(agents, adj, r, v, params, t, rng2, cutoff)
        for i in range(6):
            assert state.agent(i).contacted_by == agents[i].contacted_by
            assert int(state.population.color[i]) == agents[i].color
