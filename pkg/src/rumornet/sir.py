"""SIR-type rumor model run on the same graphs, for head-to-head comparison.

Per cycle, every current spreader (in randomized order) contacts one
uniformly chosen neighbor: an ignorant contact turns spreader with
probability lambda; contacting a spreader or stifler turns the initiator
into a stifler with probability alpha. Stiflers are absorbing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._kernels import get_backend
from .graph import Graph
from .rng import STREAM_SIR, Pcg32

IGNORANT, SPREADER, STIFLER = 0, 1, 2


@dataclass(frozen=True)
class SirParams:
    alpha: float = 0.05
    lam: float = 0.27
    n_initial_spreaders: int = 1

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must be in [0, 1]")
        if self.n_initial_spreaders < 1:
            raise ValueError("need at least one initial spreader")

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "lambda": self.lam,
            "n_initial_spreaders": self.n_initial_spreaders,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SirParams":
        return cls(
            alpha=d["alpha"],
            lam=d["lambda"],
            n_initial_spreaders=d["n_initial_spreaders"],
        )


@dataclass
class SirState:
    """Per-node compartments plus the cycle clock."""

    status: np.ndarray  # int8: 0 ignorant, 1 spreader, 2 stifler
    cycle: int = 0

    def counts(self) -> np.ndarray:
        return np.bincount(self.status, minlength=3).astype(np.int64)


def initial_state(graph: Graph, params: SirParams, rng: Pcg32) -> SirState:
    """Uniformly random distinct initial spreaders, rejection on repeats."""
    if params.n_initial_spreaders > graph.n:
        raise ValueError("more initial spreaders than nodes")
    status = np.zeros(graph.n, dtype=np.int8)
    placed = 0
    while placed < params.n_initial_spreaders:
        i = rng.next_below(graph.n)
        if status[i] == IGNORANT:
            status[i] = SPREADER
            placed += 1
    return SirState(status=status, cycle=0)


def sir_step(state: SirState, graph: Graph, params: SirParams, rng: Pcg32,
             backend: str | None = None) -> SirState:
    """One synchronous sweep over the current spreaders, randomized order."""
    kern = get_backend(backend)
    arr = rng.state_array()
    kern.sir_sweep(state.status, graph.indptr, graph.indices, arr,
                   params.alpha, params.lam)
    rng.load_state(arr)
    state.cycle += 1
    return state


@dataclass
class SirTrace:
    """Compartment counts per cycle."""

    n: int
    seed: int
    params: SirParams
    counts: np.ndarray  # int64 [cycles, 3]: I, S, R
    terminated: bool

    kind = "sir"

    @property
    def n_cycles(self) -> int:
        return self.counts.shape[0]

    @property
    def n_ignorant(self) -> np.ndarray:
        return self.counts[:, 0]

    @property
    def n_spreader(self) -> np.ndarray:
        return self.counts[:, 1]

    @property
    def n_stifler(self) -> np.ndarray:
        return self.counts[:, 2]

    def density_series(self, which: str = "S") -> np.ndarray:
        col = {"I": 0, "S": 1, "R": 2}[which]
        return self.counts[:, col] / float(self.n)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("cycle,n_I,n_S,n_R\n")
            for t in range(self.n_cycles):
                c = self.counts[t]
                fh.write(f"{t},{c[0]},{c[1]},{c[2]}\n")

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "seed": self.seed,
            "params": self.params.as_dict(),
            "counts": self.counts.tolist(),
            "terminated": self.terminated,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "SirTrace":
        return cls(
            n=d["n"],
            seed=d["seed"],
            params=SirParams.from_dict(d["params"]),
            counts=np.asarray(d["counts"], dtype=np.int64),
            terminated=d["terminated"],
        )

    @classmethod
    def from_json(cls, path) -> "SirTrace":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def equals(self, other: "SirTrace") -> bool:
        return (
            self.n == other.n
            and self.seed == other.seed
            and self.params == other.params
            and self.terminated == other.terminated
            and np.array_equal(self.counts, other.counts)
        )


def run_sir(graph: Graph, params: SirParams, max_cycles: int, seed: int,
            backend: str | None = None) -> SirTrace:
    """Trace until the spreader compartment empties or max_cycles."""
    if max_cycles < 1:
        raise ValueError("max_cycles must be >= 1")
    rng = Pcg32(seed, STREAM_SIR)
    state = initial_state(graph, params, rng)
    kern = get_backend(backend)
    arr = rng.state_array()

    rows = []
    terminated = False
    for _ in range(max_cycles):
        kern.sir_sweep(state.status, graph.indptr, graph.indices, arr,
                       params.alpha, params.lam)
        state.cycle += 1
        counts = state.counts()
        rows.append(counts)
        if counts[SPREADER] == 0:
            terminated = True
            break
    rng.load_state(arr)
    return SirTrace(
        n=graph.n,
        seed=seed,
        params=params,
        counts=np.vstack(rows),
        terminated=terminated,
    )
