"""The diffusion engine: synchronous cycles over a shared graph.

Phase order within one cycle is fixed: spontaneous visualization, then
collective influence, then communication persuasion, then debunking (when
enabled), then deactivation. Each phase reads the population as of its own
start, so a cycle is a pipeline of five snapshots, and a run is fully
deterministic given (graph, schedule, params, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import backend_name, get_backend
from .graph import Graph
from .model import (
    AgentColor,
    AgentState,
    ModelParams,
    NewsSchedule,
    Population,
    SimulationTrace,
    Snapshot,
    StepReport,
    normalize_distribution,
    sample_thresholds,
)
from .rng import STREAM_AGENTS, Pcg32


def hub_degree_cutoff(graph: Graph, quantile: float) -> float:
    """Degree at or above which a node counts as a very influential hub.

    ``quantile`` is the top fraction of the degree distribution; 0 disables
    the hub rule entirely.
    """
    if quantile <= 0.0:
        return float("inf")
    deg = graph.degrees.astype(np.float64)
    if quantile >= 1.0:
        return float(deg.min())
    return float(np.quantile(deg, 1.0 - quantile))


class _EngineArrays:
    """Flat array bundle handed to the cycle kernels."""

    __slots__ = (
        "color", "th", "activated_at", "last_color", "indptr", "indices",
        "row_of_slot", "deg", "hub", "contacted", "infl_used", "pers_used",
        "work_a", "work_b", "rng_state",
    )

    def __init__(self, graph: Graph, pop: Population, hub_cutoff: float,
                 rng_state: np.ndarray):
        n = graph.n
        deg = graph.degrees
        self.color = pop.color
        self.th = pop.thresholds
        self.activated_at = pop.activated_at
        self.last_color = pop.last_active_color
        self.indptr = graph.indptr
        self.indices = graph.indices
        self.row_of_slot = np.repeat(
            np.arange(n, dtype=np.int64), np.diff(graph.indptr)
        )
        self.deg = deg
        self.hub = (deg.astype(np.float64) >= hub_cutoff).astype(np.uint8)
        self.contacted = np.zeros(graph.indices.shape[0], dtype=np.uint8)
        self.infl_used = np.zeros(n, dtype=np.uint8)
        self.pers_used = np.zeros(n, dtype=np.uint8)
        self.work_a = np.empty(n, dtype=np.uint8)
        self.work_b = np.empty(n, dtype=np.uint8)
        self.rng_state = rng_state


@dataclass
class SimulationState:
    """Mutable state of one running simulation."""

    graph: Graph
    params: ModelParams
    population: Population
    arrays: _EngineArrays
    kernels: object
    t: int = 0

    @classmethod
    def create(
        cls,
        graph: Graph,
        population: Population,
        params: ModelParams,
        rng: Pcg32,
        backend: str | None = None,
    ) -> "SimulationState":
        kern = get_backend(backend)
        arrays = _EngineArrays(
            graph,
            population,
            hub_degree_cutoff(graph, params.hub_degree_quantile),
            rng.state_array(),
        )
        return cls(graph=graph, params=params, population=population,
                   arrays=arrays, kernels=kern)

    def color_counts(self) -> np.ndarray:
        return np.bincount(self.population.color, minlength=6).astype(np.int64)

    def agent(self, i: int) -> AgentState:
        a = self.arrays
        lo, hi = int(a.indptr[i]), int(a.indptr[i + 1])
        senders = a.indices[lo:hi][a.contacted[lo:hi] != 0]
        act = int(a.activated_at[i])
        return AgentState(
            threshold=float(a.th[i]),
            threshold_initial=float(self.population.initial_thresholds[i]),
            color=AgentColor(int(a.color[i])),
            activated_at=None if act < 0 else act,
            contacted_by=frozenset(int(s) for s in senders),
        )

    def _sync_rng(self, rng: Pcg32 | None):
        if rng is not None:
            self.arrays.rng_state[0] = rng.state
            self.arrays.rng_state[1] = rng.inc

    def _writeback_rng(self, rng: Pcg32 | None):
        if rng is not None:
            rng.load_state(self.arrays.rng_state)


def _new_ids(before: np.ndarray, after: np.ndarray, color: int) -> np.ndarray:
    return np.flatnonzero((after == color) & (before != color))


def apply_spontaneous(state: SimulationState, r: float, v: float,
                      rng: Pcg32 | None = None, t: int | None = None
                      ) -> tuple[np.ndarray, np.ndarray]:
    """Visualization phase. Returns (new spontaneous ids, new debunker ids).

    Every undeployed agent visualizes with probability v; a visualizing
    agent activates when r exceeds its threshold, or turns debunker when
    its threshold exceeds r by at least the debunk margin.
    """
    t = state.t if t is None else t
    state._sync_rng(rng)
    before = state.population.color.copy()
    state.kernels.spontaneous(
        state.arrays, t, r, v,
        state.params.debunking_enabled, state.params.debunk_margin,
    )
    state._writeback_rng(rng)
    after = state.population.color
    return _new_ids(before, after, 1), _new_ids(before, after, 4)


def apply_collective_influence(state: SimulationState, r: float,
                               rng: Pcg32 | None = None,
                               t: int | None = None) -> np.ndarray:
    """Neighborhood pressure phase. Returns newly influenced ids.

    An undeployed agent is pressured when more than ``influence_fraction``
    of its friends are spreaders, or when any spreading friend is a hub.
    Pressure lowers the threshold once per agent lifetime, and the agent
    activates when r exceeds the (possibly lowered) threshold.
    """
    t = state.t if t is None else t
    before = state.population.color.copy()
    state.kernels.influence(
        state.arrays, t, r,
        state.params.influence_fraction, state.params.delta_influence,
    )
    return _new_ids(before, state.population.color, 2)


def apply_persuasion(state: SimulationState, r: float,
                     rng: Pcg32 | None = None,
                     t: int | None = None) -> np.ndarray:
    """Messaging phase. Returns newly persuaded ids.

    Every spreader messages each undeployed neighbor (recorded in the
    recipient's contact set). A recipient with at least one sender of
    similar preparation takes a one-time threshold cut and activates when
    r exceeds its threshold.
    """
    t = state.t if t is None else t
    before = state.population.color.copy()
    state.kernels.persuasion(
        state.arrays, t, r,
        state.params.epsilon_similarity, state.params.delta_persuasion,
    )
    return _new_ids(before, state.population.color, 3)


def apply_debunking(state: SimulationState, rng: Pcg32 | None = None,
                    t: int | None = None) -> np.ndarray:
    """Correction phase. Returns ids of spreaders converted to debunkers.

    Debunkers answer exactly the agents that messaged them earlier; a
    contacter that is still an active spreader converts when the two
    thresholds are similar, and gets a fresh activation timestamp.
    """
    if not state.params.debunking_enabled:
        raise ValueError("debunking is disabled in these parameters")
    t = state.t if t is None else t
    before = state.population.color.copy()
    state.kernels.debunk(state.arrays, t, state.params.epsilon_similarity)
    return _new_ids(before, state.population.color, 4)


def apply_deactivation(state: SimulationState, t: int | None = None) -> np.ndarray:
    """Turn off every agent active for at least ``t_active`` cycles."""
    t = state.t if t is None else t
    before = state.population.color.copy()
    state.kernels.deactivate(state.arrays, t, state.params.t_active)
    return _new_ids(before, state.population.color, 5)


def _cycle(state: SimulationState, r: float, v: float, t: int) -> tuple[int, ...]:
    """One full cycle, fast path (no id materialization)."""
    a = state.arrays
    p = state.params
    k = state.kernels
    n_spont, n_deb = k.spontaneous(a, t, r, v, p.debunking_enabled, p.debunk_margin)
    n_infl = k.influence(a, t, r, p.influence_fraction, p.delta_influence)
    n_pers = k.persuasion(a, t, r, p.epsilon_similarity, p.delta_persuasion)
    n_conv = k.debunk(a, t, p.epsilon_similarity) if p.debunking_enabled else 0
    n_off = k.deactivate(a, t, p.t_active)
    return n_spont, n_deb, n_infl, n_pers, n_conv, n_off


def step(state: SimulationState, schedule: NewsSchedule,
         t: int | None = None, rng: Pcg32 | None = None) -> StepReport:
    """Apply one synchronous cycle at time ``t`` and advance the clock."""
    t = state.t if t is None else t
    r, v = schedule.at(t)
    state._sync_rng(rng)
    n_spont, n_deb, n_infl, n_pers, n_conv, n_off = _cycle(state, r, v, t)
    state._writeback_rng(rng)
    state.t = t + 1
    return StepReport(
        cycle=t, r=r, v=v,
        n_spontaneous=n_spont, n_debunkers_spawned=n_deb,
        n_influenced=n_infl, n_persuaded=n_pers,
        n_converted=n_conv, n_deactivated=n_off,
    )


def _can_still_activate(state: SimulationState, schedule: NewsSchedule,
                        t_next: int) -> bool:
    """Whether any undeployed agent could ever activate again, assuming no
    spreader is active (thresholds are then frozen)."""
    bounds = schedule.visible_r_bounds_from(t_next)
    if bounds is None:
        return False
    r_max, r_min = bounds
    th = state.population.thresholds[state.population.color == 0]
    if th.size == 0:
        return False
    if float(th.min()) < r_max:
        return True
    if state.params.debunking_enabled and float(th.max()) - r_min >= state.params.debunk_margin:
        return True
    return False


def run(
    graph: Graph,
    schedule: NewsSchedule,
    params: ModelParams,
    max_cycles: int,
    seed: int,
    threshold_dist="uniform",
    backend: str | None = None,
) -> SimulationTrace:
    """Full simulation: fresh population, cycles until frozen or max_cycles.

    The run stops early once no spreader or debunker is active and no
    current or future schedule segment can activate any remaining
    undeployed agent.
    """
    if max_cycles < 1:
        raise ValueError("max_cycles must be >= 1")
    threshold_dist = normalize_distribution(threshold_dist)
    rng = Pcg32(seed, STREAM_AGENTS)
    thresholds = sample_thresholds(threshold_dist, graph.n, rng)
    pop = Population.fresh(thresholds)
    state = SimulationState.create(graph, pop, params, rng, backend=backend)

    counts_rows = []
    r_rows = []
    v_rows = []
    transition_rows = []
    terminated = False
    for t in range(max_cycles):
        r, v = schedule.at(t)
        transition_rows.append(_cycle(state, r, v, t))
        counts = np.bincount(pop.color, minlength=6).astype(np.int64)
        counts_rows.append(counts)
        r_rows.append(r)
        v_rows.append(v)
        active = int(counts[1] + counts[2] + counts[3] + counts[4])
        if active == 0:
            if counts[0] == 0 or counts[5] == graph.n:
                terminated = True
                break
            if not _can_still_activate(state, schedule, t + 1):
                terminated = True
                break
    state.t = len(counts_rows)

    snapshot = Snapshot(
        threshold_initial=pop.initial_thresholds,
        threshold_final=pop.thresholds.copy(),
        color=pop.color.copy(),
        last_active_color=pop.last_active_color.copy(),
        activated_at=pop.activated_at.copy(),
        degree=graph.degrees,
    )
    return SimulationTrace(
        n=graph.n,
        seed=seed,
        params=params,
        schedule=schedule,
        threshold_dist=threshold_dist,
        counts=np.vstack(counts_rows),
        r=np.asarray(r_rows, dtype=np.float64),
        v=np.asarray(v_rows, dtype=np.float64),
        transitions=np.asarray(transition_rows, dtype=np.int64),
        snapshot=snapshot,
        terminated=terminated,
    )


def engine_backend_name(backend: str | None = None) -> str:
    return backend_name(get_backend(backend))
