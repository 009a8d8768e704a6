import itertools

import numpy as np
import pytest

from rumornet.graph import Graph, generate_ba
from rumornet.rng import STREAM_SIR, Pcg32
from rumornet.sir import (
    IGNORANT,
    SPREADER,
    STIFLER,
    SirParams,
    SirState,
    initial_state,
    run_sir,
    sir_step,
)

TWO_NODES = Graph.from_edges(2, [0], [1])
K3 = Graph.from_edges(3, [0, 0, 1], [1, 2, 2])


def state_of(*statuses) -> SirState:
    return SirState(status=np.array(statuses, dtype=np.int8))


class TestStepRules:
    def test_certain_infection(self):
        st = state_of(SPREADER, IGNORANT)
        sir_step(st, TWO_NODES, SirParams(alpha=0.0, lam=1.0), Pcg32(1, STREAM_SIR))
        assert list(st.status) == [SPREADER, SPREADER]

    def test_mutual_spreaders_stifle(self):
        st = state_of(SPREADER, SPREADER)
        sir_step(st, TWO_NODES, SirParams(alpha=1.0, lam=0.0), Pcg32(1, STREAM_SIR))
        assert np.count_nonzero(st.status == STIFLER) >= 1

    def test_lambda_zero_never_converts_ignorants(self):
        g = generate_ba(100, 2, seed=1)
        trace = run_sir(g, SirParams(alpha=0.3, lam=0.0, n_initial_spreaders=10),
                        500, seed=4)
        assert trace.n_ignorant.min() == trace.n_ignorant[0]  # non-increasing-but-constant
        assert trace.terminated
        final = trace.counts[-1]
        assert final[1] == 0 and final[0] + final[2] == 100

    def test_k3_lambda_zero_single_spreader_is_frozen(self):
        # the lone spreader only ever contacts ignorants: nothing can happen
        st = state_of(SPREADER, IGNORANT, IGNORANT)
        for t in range(50):
            sir_step(st, K3, SirParams(alpha=1.0, lam=0.0), Pcg32(t, STREAM_SIR))
        assert list(st.status) == [SPREADER, IGNORANT, IGNORANT]

    def test_degree_zero_spreader_is_skipped(self):
        g = Graph.from_edges(3, [0], [1])  # node 2 isolated
        st = state_of(IGNORANT, IGNORANT, SPREADER)
        sir_step(st, g, SirParams(alpha=1.0, lam=1.0), Pcg32(9, STREAM_SIR))
        assert list(st.status) == [IGNORANT, IGNORANT, SPREADER]


def exact_k3_distribution(start, alpha, lam):
    """Exact end-of-cycle distribution of the synchronous sweep on K3.

    Enumerates spreader orders, neighbor choices and coin outcomes with
    their probabilities; the per-branch dynamics follow the written rules
    only (independent of the engine code).
    """
    dist = {}

    def visit(status, order, idx, prob):
        if idx == len(order):
            dist[tuple(status)] = dist.get(tuple(status), 0.0) + prob
            return
        i = order[idx]
        neighbors = [j for j in range(3) if j != i]
        for j in neighbors:
            p_branch = prob / len(neighbors)
            if status[j] == IGNORANT:
                if lam > 0.0:
                    s2 = list(status)
                    s2[j] = SPREADER
                    visit(s2, order, idx + 1, p_branch * lam)
                if lam < 1.0:
                    visit(list(status), order, idx + 1, p_branch * (1.0 - lam))
            else:
                if alpha > 0.0:
                    s2 = list(status)
                    s2[i] = STIFLER
                    visit(s2, order, idx + 1, p_branch * alpha)
                if alpha < 1.0:
                    visit(list(status), order, idx + 1, p_branch * (1.0 - alpha))

    spreaders = [i for i, s in enumerate(start) if s == SPREADER]
    orders = list(itertools.permutations(spreaders))
    for order in orders:
        visit(list(start), order, 0, 1.0 / len(orders))
    return dist


@pytest.mark.parametrize("start,alpha,lam", [
    ((SPREADER, IGNORANT, IGNORANT), 0.5, 0.5),
    ((SPREADER, SPREADER, IGNORANT), 0.7, 0.6),
    ((SPREADER, SPREADER, STIFLER), 0.4, 0.9),
])
def test_k3_exact_markov_chain(start, alpha, lam, backend):
    expected = exact_k3_distribution(start, alpha, lam)
    counts = {}
    n_samples = 40_000
    params = SirParams(alpha=alpha, lam=lam)
    for seed in range(n_samples):
        st = state_of(*start)
        sir_step(st, K3, params, Pcg32(seed, STREAM_SIR), backend=backend)
        key = tuple(int(x) for x in st.status)
        counts[key] = counts.get(key, 0) + 1
    tv = 0.5 * sum(
        abs(expected.get(k, 0.0) - counts.get(k, 0) / n_samples)
        for k in set(expected) | set(counts)
    )
    assert tv < 0.02, f"total variation {tv:.4f} vs exact chain"


class TestRun:
    def test_compartments_partition_and_monotone(self):
        g = generate_ba(300, 2, seed=2)
        trace = run_sir(g, SirParams(), 400, seed=3)
        assert np.all(trace.counts.sum(axis=1) == 300)
        assert np.all(np.diff(trace.n_stifler) >= 0)
        assert np.all(np.diff(trace.n_ignorant) <= 0)

    def test_empty_spreaders_terminates(self):
        g = generate_ba(300, 2, seed=2)
        trace = run_sir(g, SirParams(alpha=0.5, lam=0.1), 2_000, seed=3)
        assert trace.terminated
        assert trace.n_spreader[-1] == 0

    def test_no_stifling_path_saturates(self):
        g = generate_ba(200, 2, seed=6)
        trace = run_sir(g, SirParams(alpha=0.0, lam=1.0), 300, seed=7)
        assert trace.n_spreader[-1] == 200  # connected graph, R unreachable
        assert not trace.terminated

    def test_determinism(self, backend):
        g = generate_ba(250, 2, seed=4)
        a = run_sir(g, SirParams(), 200, seed=10, backend=backend)
        b = run_sir(g, SirParams(), 200, seed=10, backend=backend)
        assert a.equals(b)

    def test_single_peak_shape_at_paper_parameters(self):
        g = generate_ba(2_000, 2, seed=5)
        trace = run_sir(g, SirParams(alpha=0.05, lam=0.27), 1_000, seed=6)
        peak = trace.n_spreader.max()
        assert peak > 0.1 * 2_000
        assert trace.terminated and trace.n_spreader[-1] == 0

    def test_initial_spreaders_distinct(self):
        g = generate_ba(50, 2, seed=1)
        st = initial_state(g, SirParams(n_initial_spreaders=20), Pcg32(3, STREAM_SIR))
        assert int(np.count_nonzero(st.status == SPREADER)) == 20

    def test_csv_schema(self, tmp_path):
        g = generate_ba(50, 2, seed=1)
        trace = run_sir(g, SirParams(), 50, seed=2)
        path = tmp_path / "sir.csv"
        trace.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "cycle,n_I,n_S,n_R"

    def test_json_roundtrip(self, tmp_path):
        from rumornet.sir import SirTrace

        g = generate_ba(50, 2, seed=1)
        trace = run_sir(g, SirParams(), 50, seed=2)
        path = tmp_path / "sir.json"
        trace.to_json(path)
        assert SirTrace.from_json(path).equals(trace)
