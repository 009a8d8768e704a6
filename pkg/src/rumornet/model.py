"""Core domain types of the diffusion model.

Agent state lives in flat numpy arrays (one entry per node) so the cycle
kernels can run over them directly; the dataclasses here are the typed
surface around those arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from .rng import STREAM_AGENTS, Pcg32


class AgentColor(IntEnum):
    """Node display colors; INACTIVE is absorbing, no reactivation."""

    UNDEPLOYED = 0   # red: has not shared anything
    SPONTANEOUS = 1  # blue: believed after direct visualization
    INFLUENCED = 2   # green: neighborhood pressure
    PERSUADED = 3    # yellow: one-to-one messages
    DEBUNKER = 4     # orange: spreads the correction
    INACTIVE = 5     # grey: switched off for good


COLOR_NAMES = tuple(c.name.lower() for c in AgentColor)

SPREADER_COLORS = (AgentColor.SPONTANEOUS, AgentColor.INFLUENCED, AgentColor.PERSUADED)


class UnknownDistributionError(ValueError):
    """Threshold distribution name not recognized."""


@dataclass(frozen=True)
class ModelParams:
    """All knobs of the diffusion mechanics.

    Threshold decrements apply at most once per mechanism over an agent's
    lifetime; repeated unbounded decrements would drag every threshold to
    zero whenever spreading is widespread, which erases both the two-phase
    activation shape and the surviving high-skepticism population.
    """

    influence_fraction: float = 0.30
    hub_degree_quantile: float = 0.01
    delta_influence: float = 0.10
    delta_persuasion: float = 0.10
    epsilon_similarity: float = 0.30
    t_active: int = 15
    debunk_margin: float = 0.20
    debunking_enabled: bool = False

    def __post_init__(self):
        for name in (
            "hub_degree_quantile",
            "delta_influence",
            "delta_persuasion",
            "epsilon_similarity",
            "debunk_margin",
        ):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {val}")
        if not 0.0 < self.influence_fraction <= 1.0:
            raise ValueError("influence_fraction must be in (0, 1]")
        if self.t_active < 1:
            raise ValueError("t_active must be >= 1")

    def as_dict(self) -> dict:
        return {
            "influence_fraction": self.influence_fraction,
            "hub_degree_quantile": self.hub_degree_quantile,
            "delta_influence": self.delta_influence,
            "delta_persuasion": self.delta_persuasion,
            "epsilon_similarity": self.epsilon_similarity,
            "t_active": self.t_active,
            "debunk_margin": self.debunk_margin,
            "debunking_enabled": self.debunking_enabled,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(**d)

    def with_overrides(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class NewsSchedule:
    """Piecewise-constant reliability r(t) and visualization probability v(t).

    ``segments`` is an ordered tuple of (start_cycle, r, v); the first
    segment starts at cycle 0.
    """

    segments: tuple[tuple[int, float, float], ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        norm = tuple((int(s), float(r), float(v)) for s, r, v in self.segments)
        object.__setattr__(self, "segments", norm)
        if norm[0][0] != 0:
            raise ValueError("first segment must start at cycle 0")
        starts = [s for s, _, _ in norm]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("segment start cycles must be strictly increasing")
        for _, r, v in norm:
            if not (0.0 <= r <= 1.0 and 0.0 <= v <= 1.0):
                raise ValueError("r and v must be in [0, 1]")

    @classmethod
    def constant(cls, r: float, v: float) -> "NewsSchedule":
        return cls(segments=((0, r, v),))

    def segment_index(self, t: int) -> int:
        idx = 0
        for i, (start, _, _) in enumerate(self.segments):
            if start <= t:
                idx = i
            else:
                break
        return idx

    def at(self, t: int) -> tuple[float, float]:
        """(r, v) of the last segment whose start cycle is <= t."""
        if t < 0:
            raise ValueError("t must be >= 0")
        _, r, v = self.segments[self.segment_index(t)]
        return r, v

    def visible_r_bounds_from(self, t: int) -> tuple[float, float] | None:
        """(max r, min r) over segments active at >= t that have v > 0.

        None when the news is never visible again; used by the run loop to
        detect that nothing can activate anymore.
        """
        idx = self.segment_index(max(t, 0))
        rs = [r for _, r, v in self.segments[idx:] if v > 0.0]
        if not rs:
            return None
        return max(rs), min(rs)


def reliability_at(schedule: NewsSchedule, t: int) -> tuple[float, float]:
    return schedule.at(t)


# ---------------------------------------------------------------------------
# Threshold distributions
# ---------------------------------------------------------------------------

def normalize_distribution(dist) -> tuple:
    """Accepts "uniform", ("uniform", lo, hi), ("constant", x), or the
    string form "name:arg:arg" used in scenario files."""
    if isinstance(dist, str):
        parts = dist.split(":")
        dist = (parts[0], *[float(p) for p in parts[1:]])
    name = dist[0]
    args = tuple(float(a) for a in dist[1:])
    if name == "uniform":
        if not args:
            args = (0.0, 1.0)
        if len(args) != 2 or not (0.0 <= args[0] <= args[1] <= 1.0):
            raise UnknownDistributionError(f"bad uniform bounds {args}")
        return ("uniform", *args)
    if name == "constant":
        if len(args) != 1 or not 0.0 <= args[0] <= 1.0:
            raise UnknownDistributionError(f"bad constant value {args}")
        return ("constant", args[0])
    raise UnknownDistributionError(f"unknown threshold distribution {name!r}")


def distribution_to_string(dist) -> str:
    dist = normalize_distribution(dist)
    return ":".join([dist[0]] + [repr(a) for a in dist[1:]])


def sample_thresholds(dist, n: int, rng: Pcg32) -> np.ndarray:
    """Draw n i.i.d. skepticism thresholds; draw count is part of the
    reproducibility contract (uniform: n draws, constant: none)."""
    dist = normalize_distribution(dist)
    if dist[0] == "uniform":
        lo, hi = dist[1], dist[2]
        return rng.uniform_batch(n) * (hi - lo) + lo
    return np.full(n, dist[1], dtype=np.float64)


# ---------------------------------------------------------------------------
# Population
# ---------------------------------------------------------------------------

@dataclass
class Population:
    """Per-node agent state as flat arrays."""

    thresholds: np.ndarray       # float64, current skepticism in [0, 1]
    initial_thresholds: np.ndarray
    color: np.ndarray            # int8 AgentColor values
    activated_at: np.ndarray     # int32, -1 while undeployed
    last_active_color: np.ndarray  # int8, color held while active; -1 if never

    @property
    def n(self) -> int:
        return self.color.shape[0]

    @classmethod
    def fresh(cls, thresholds: np.ndarray) -> "Population":
        n = thresholds.shape[0]
        return cls(
            thresholds=thresholds.astype(np.float64),
            initial_thresholds=thresholds.astype(np.float64).copy(),
            color=np.zeros(n, dtype=np.int8),
            activated_at=np.full(n, -1, dtype=np.int32),
            last_active_color=np.full(n, -1, dtype=np.int8),
        )


def init_population(graph, threshold_distribution, seed: int) -> Population:
    """One undeployed agent per node, thresholds i.i.d. per the named
    distribution, deterministic per seed."""
    rng = Pcg32(seed, STREAM_AGENTS)
    thresholds = sample_thresholds(threshold_distribution, graph.n, rng)
    return Population.fresh(thresholds)


@dataclass(frozen=True)
class AgentState:
    """Read-only view of one agent, mostly for tests and debugging."""

    threshold: float
    threshold_initial: float
    color: AgentColor
    activated_at: int | None
    contacted_by: frozenset[int]


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepReport:
    """Transition counts of one synchronous cycle."""

    cycle: int
    r: float
    v: float
    n_spontaneous: int
    n_debunkers_spawned: int
    n_influenced: int
    n_persuaded: int
    n_converted: int
    n_deactivated: int

    @property
    def total_transitions(self) -> int:
        return (
            self.n_spontaneous
            + self.n_debunkers_spawned
            + self.n_influenced
            + self.n_persuaded
            + self.n_converted
            + self.n_deactivated
        )


@dataclass
class Snapshot:
    """Final per-agent state of one run."""

    threshold_initial: np.ndarray
    threshold_final: np.ndarray
    color: np.ndarray
    last_active_color: np.ndarray
    activated_at: np.ndarray
    degree: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("agent_id,degree,threshold_initial,threshold_final,color,activated_at\n")
            for i in range(self.color.shape[0]):
                fh.write(
                    f"{i},{int(self.degree[i])},{self.threshold_initial[i]!r},"
                    f"{self.threshold_final[i]!r},{COLOR_NAMES[self.color[i]]},"
                    f"{int(self.activated_at[i])}\n"
                )

    def as_dict(self) -> dict:
        return {
            "threshold_initial": self.threshold_initial.tolist(),
            "threshold_final": self.threshold_final.tolist(),
            "color": self.color.tolist(),
            "last_active_color": self.last_active_color.tolist(),
            "activated_at": self.activated_at.tolist(),
            "degree": self.degree.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Snapshot":
        return cls(
            threshold_initial=np.asarray(d["threshold_initial"], dtype=np.float64),
            threshold_final=np.asarray(d["threshold_final"], dtype=np.float64),
            color=np.asarray(d["color"], dtype=np.int8),
            last_active_color=np.asarray(d["last_active_color"], dtype=np.int8),
            activated_at=np.asarray(d["activated_at"], dtype=np.int32),
            degree=np.asarray(d["degree"], dtype=np.int32),
        )


@dataclass
class SimulationTrace:
    """Per-cycle class counts plus the final snapshot of one run.

    ``transitions`` columns: spontaneous, debunker spawned, influenced,
    persuaded, converted to debunker, deactivated (per cycle).
    """

    n: int
    seed: int
    params: ModelParams
    schedule: NewsSchedule
    threshold_dist: tuple
    counts: np.ndarray   # int64 [cycles, 6], one column per AgentColor
    r: np.ndarray        # float64 [cycles]
    v: np.ndarray        # float64 [cycles]
    transitions: np.ndarray  # int64 [cycles, 6]
    snapshot: Snapshot
    terminated: bool     # True if the run ended before max_cycles

    kind = "mas"

    @property
    def n_cycles(self) -> int:
        return self.counts.shape[0]

    def class_counts(self, color: AgentColor) -> np.ndarray:
        return self.counts[:, int(color)]

    @property
    def active_spreaders(self) -> np.ndarray:
        return self.counts[:, 1:4].sum(axis=1)

    @property
    def active_debunkers(self) -> np.ndarray:
        return self.counts[:, 4]

    @property
    def ever_activated(self) -> np.ndarray:
        return self.n - self.counts[:, 0]

    @property
    def total_spreader_activations(self) -> int:
        """Agents that ever activated as spreaders (blue/green/yellow)."""
        return int(self.transitions[:, [0, 2, 3]].sum())

    @property
    def total_debunker_activations(self) -> int:
        """Agents that ever turned debunker (spawned or converted)."""
        return int(self.transitions[:, [1, 4]].sum())

    def density_series(self, which: str = "active") -> np.ndarray:
        """Per-cycle density in [0, 1] of a class selector.

        ``active`` counts the spreading colors (blue/green/yellow);
        ``active_all`` adds debunkers; ``ever_activated`` is cumulative;
        otherwise a single color name.
        """
        if which == "active":
            series = self.active_spreaders
        elif which == "active_all":
            series = self.counts[:, 1:5].sum(axis=1)
        elif which == "ever_activated":
            series = self.ever_activated
        else:
            series = self.class_counts(AgentColor[which.upper()])
        return series / float(self.n)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(
                "cycle,n_undeployed,n_spontaneous,n_influenced,n_persuaded,"
                "n_debunker,n_inactive,r,v\n"
            )
            for t in range(self.n_cycles):
                c = self.counts[t]
                fh.write(
                    f"{t},{c[0]},{c[1]},{c[2]},{c[3]},{c[4]},{c[5]},"
                    f"{self.r[t]!r},{self.v[t]!r}\n"
                )

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "seed": self.seed,
            "params": self.params.as_dict(),
            "schedule": [list(s) for s in self.schedule.segments],
            "threshold_dist": distribution_to_string(self.threshold_dist),
            "counts": self.counts.tolist(),
            "r": self.r.tolist(),
            "v": self.v.tolist(),
            "transitions": self.transitions.tolist(),
            "terminated": self.terminated,
            "snapshot": self.snapshot.as_dict(),
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationTrace":
        return cls(
            n=d["n"],
            seed=d["seed"],
            params=ModelParams.from_dict(d["params"]),
            schedule=NewsSchedule(segments=tuple(tuple(s) for s in d["schedule"])),
            threshold_dist=normalize_distribution(d["threshold_dist"]),
            counts=np.asarray(d["counts"], dtype=np.int64),
            r=np.asarray(d["r"], dtype=np.float64),
            v=np.asarray(d["v"], dtype=np.float64),
            transitions=np.asarray(d["transitions"], dtype=np.int64),
            snapshot=Snapshot.from_dict(d["snapshot"]),
            terminated=d["terminated"],
        )

    @classmethod
    def from_json(cls, path) -> "SimulationTrace":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def equals(self, other: "SimulationTrace") -> bool:
        return (
            self.n == other.n
            and self.seed == other.seed
            and self.params == other.params
            and self.schedule == other.schedule
            and self.terminated == other.terminated
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.r, other.r)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.transitions, other.transitions)
            and np.array_equal(self.snapshot.threshold_final, other.snapshot.threshold_final)
            and np.array_equal(self.snapshot.color, other.snapshot.color)
            and np.array_equal(self.snapshot.activated_at, other.snapshot.activated_at)
            and np.array_equal(self.snapshot.last_active_color, other.snapshot.last_active_color)
        )
