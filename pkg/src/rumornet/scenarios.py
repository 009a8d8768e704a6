"""Declarative scenario definitions and the seed-reproducible batch runner.

A scenario bundles the network recipe, the news schedule, the model
parameters and the run protocol. Built-ins reproduce the three experiments
of the study (true news, two-phase confirmation, hoax plus correction) plus
the echo-chamber measurement families. Scenario files are a flat INI
format, round-tripping losslessly; see ``ScenarioConfig.to_file``.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
from dataclasses import dataclass, replace

from .engine import run
from .graph import Graph, generate_ba
from .model import (
    ModelParams,
    NewsSchedule,
    SimulationTrace,
    distribution_to_string,
    normalize_distribution,
)
from .rng import derive_subseed
from .sir import SirParams, SirTrace, run_sir

HOAX_SUPPORTED_SIZES = (5_000, 10_000, 20_000, 50_000)

# Index used to derive the shared graph seed under the "fixed" policy.
_FIXED_GRAPH_INDEX = 2**32


class ConfigError(ValueError):
    """Scenario cannot be resolved or is semantically invalid."""


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    n: int
    m: int
    graph_policy: str  # "fresh": brand new network per run; "fixed": shared
    schedule: NewsSchedule
    params: ModelParams
    threshold_dist: tuple
    n_runs: int
    max_cycles: int
    sir: SirParams | None = None

    def __post_init__(self):
        if self.graph_policy not in ("fresh", "fixed"):
            raise ConfigError(f"unknown graph policy {self.graph_policy!r}")
        if self.n_runs < 1:
            raise ConfigError("n_runs must be >= 1")
        if self.max_cycles < 1:
            raise ConfigError("max_cycles must be >= 1")
        object.__setattr__(
            self, "threshold_dist", normalize_distribution(self.threshold_dist)
        )

    # -- identity -----------------------------------------------------------

    def canonical_string(self) -> str:
        parts = [
            f"name={self.name}",
            f"n={self.n}",
            f"m={self.m}",
            f"graph_policy={self.graph_policy}",
            "schedule=" + ";".join(f"{s}:{r!r}:{v!r}" for s, r, v in self.schedule.segments),
            "params=" + ";".join(
                f"{k}={v!r}" for k, v in sorted(self.params.as_dict().items())
            ),
            f"threshold_dist={distribution_to_string(self.threshold_dist)}",
            f"n_runs={self.n_runs}",
            f"max_cycles={self.max_cycles}",
        ]
        if self.sir is not None:
            parts.append(
                "sir=" + ";".join(f"{k}={v!r}" for k, v in sorted(self.sir.as_dict().items()))
            )
        return "\n".join(parts)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_string().encode()).hexdigest()

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)

    # -- file format ----------------------------------------------------------

    def to_file(self, path) -> None:
        cp = configparser.ConfigParser()
        cp["scenario"] = {
            "name": self.name,
            "n_runs": str(self.n_runs),
            "max_cycles": str(self.max_cycles),
            "graph_policy": self.graph_policy,
        }
        cp["network"] = {"nodes": str(self.n), "m": str(self.m)}
        cp["schedule"] = {
            "segments": ", ".join(
                f"{s}:{r!r}:{v!r}" for s, r, v in self.schedule.segments
            )
        }
        p = self.params.as_dict()
        cp["params"] = {k: repr(v) if not isinstance(v, bool) else str(v).lower()
                        for k, v in p.items()}
        cp["population"] = {"threshold_dist": distribution_to_string(self.threshold_dist)}
        if self.sir is not None:
            cp["sir"] = {
                "alpha": repr(self.sir.alpha),
                "lambda": repr(self.sir.lam),
                "initial_spreaders": str(self.sir.n_initial_spreaders),
            }
        with open(path, "w") as fh:
            cp.write(fh)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        cp = configparser.ConfigParser()
        read = cp.read(path)
        if not read:
            raise ConfigError(f"cannot read scenario file {path}")
        try:
            sc = cp["scenario"]
            net = cp["network"]
            segments = []
            for part in cp["schedule"]["segments"].split(","):
                s, r, v = part.strip().split(":")
                segments.append((int(s), float(r), float(v)))
            pd = dict(cp["params"])
            params = ModelParams(
                influence_fraction=float(pd["influence_fraction"]),
                hub_degree_quantile=float(pd["hub_degree_quantile"]),
                delta_influence=float(pd["delta_influence"]),
                delta_persuasion=float(pd["delta_persuasion"]),
                epsilon_similarity=float(pd["epsilon_similarity"]),
                t_active=int(pd["t_active"]),
                debunk_margin=float(pd["debunk_margin"]),
                debunking_enabled=pd["debunking_enabled"] == "true",
            )
            sir = None
            if cp.has_section("sir"):
                sir = SirParams(
                    alpha=float(cp["sir"]["alpha"]),
                    lam=float(cp["sir"]["lambda"]),
                    n_initial_spreaders=int(cp["sir"]["initial_spreaders"]),
                )
            return cls(
                name=sc["name"],
                n=int(net["nodes"]),
                m=int(net["m"]),
                graph_policy=sc["graph_policy"],
                schedule=NewsSchedule(segments=tuple(segments)),
                params=params,
                threshold_dist=cp["population"]["threshold_dist"],
                n_runs=int(sc["n_runs"]),
                max_cycles=int(sc["max_cycles"]),
                sir=sir,
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad scenario file {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Built-in scenarios
# ---------------------------------------------------------------------------

def scenario_true_news() -> ScenarioConfig:
    """Fully reliable news on 10^4 nodes with 10% visualization, averaged
    over ten runs, with the SIR baseline for the same graphs."""
    return ScenarioConfig(
        name="true_news",
        n=10_000,
        m=2,
        graph_policy="fresh",
        schedule=NewsSchedule.constant(r=0.99, v=0.10),
        params=ModelParams(),
        threshold_dist="uniform",
        n_runs=10,
        max_cycles=500,
        sir=SirParams(alpha=0.05, lam=0.27, n_initial_spreaders=1),
    )


def scenario_higgs(v1: float = 0.10) -> ScenarioConfig:
    """Two-phase announcement: weak rumor (r=0.45) until the official
    confirmation at cycle 20 lifts the reliability to 0.99."""
    if not 0.0 < v1 <= 1.0:
        raise ConfigError(f"v1 must be in (0, 1], got {v1}")
    return ScenarioConfig(
        name="higgs",
        n=10_000,
        m=2,
        graph_policy="fresh",
        schedule=NewsSchedule(segments=((0, 0.45, v1), (20, 0.99, v1))),
        params=ModelParams(),
        threshold_dist="uniform",
        n_runs=10,
        max_cycles=500,
    )


def scenario_hoax_debunk(n: int = 10_000) -> ScenarioConfig:
    """Misinformation (r=0.67) exposed after three cycles (r=0.48) with the
    visualization jumping to 0.6; debunkers enabled."""
    if n not in HOAX_SUPPORTED_SIZES:
        raise ConfigError(
            f"hoax scenario supports sizes {HOAX_SUPPORTED_SIZES}, got {n}"
        )
    return ScenarioConfig(
        name="hoax_debunk",
        n=n,
        m=2,
        graph_policy="fresh",
        schedule=NewsSchedule(segments=((0, 0.67, 0.15), (3, 0.48, 0.60))),
        params=ModelParams(debunking_enabled=True),
        threshold_dist="uniform",
        n_runs=10,
        max_cycles=500,
    )


def scenario_polarization(reliability: float = 0.55, n: int = 1_000) -> ScenarioConfig:
    """Final-threshold-distribution family (ten runs per reliability).

    Debunking on with the default margin: at mid reliabilities the
    skepticism distribution polarizes, at high reliabilities it does not.
    """
    return ScenarioConfig(
        name="polarization",
        n=n,
        m=2,
        graph_policy="fresh",
        schedule=NewsSchedule.constant(r=reliability, v=0.10),
        params=ModelParams(debunking_enabled=True),
        threshold_dist="uniform",
        n_runs=10,
        max_cycles=500,
    )


def scenario_echo_chamber(reliability: float = 0.50, n: int = 1_000) -> ScenarioConfig:
    """Color-assortativity family (twenty runs per reliability).

    Uses a small debunk margin so critics arise across the whole swept
    reliability range; with the default margin no threshold can exceed
    r + margin once r passes 0.8 and the two-class measurement would be
    undefined there.
    """
    return ScenarioConfig(
        name="echo_chamber",
        n=n,
        m=2,
        graph_policy="fresh",
        schedule=NewsSchedule.constant(r=reliability, v=0.10),
        params=ModelParams(debunking_enabled=True, debunk_margin=0.05),
        threshold_dist="uniform",
        n_runs=20,
        max_cycles=500,
    )


BUILTIN_SCENARIOS = {
    "true_news": scenario_true_news,
    "higgs": scenario_higgs,
    "hoax_debunk": scenario_hoax_debunk,
    "polarization": scenario_polarization,
    "echo_chamber": scenario_echo_chamber,
}

_BUILTIN_ARG_TYPES = {
    "v1": float,
    "n": int,
    "reliability": float,
}


def resolve_scenario(spec: str) -> ScenarioConfig:
    """Builtin name (optionally ``name:key=value,...``) or a file path."""
    base, _, argstr = spec.partition(":")
    if base in BUILTIN_SCENARIOS:
        kwargs = {}
        if argstr:
            for item in argstr.split(","):
                key, _, val = item.partition("=")
                key = key.strip()
                if key not in _BUILTIN_ARG_TYPES:
                    raise ConfigError(f"unknown scenario argument {key!r}")
                try:
                    kwargs[key] = _BUILTIN_ARG_TYPES[key](val)
                except ValueError as exc:
                    raise ConfigError(f"bad value for {key}: {val!r}") from exc
        try:
            return BUILTIN_SCENARIOS[base](**kwargs)
        except TypeError as exc:
            raise ConfigError(f"bad arguments for scenario {base}: {exc}") from exc
    import os

    if os.path.exists(spec):
        return ScenarioConfig.from_file(spec)
    raise ConfigError(f"no builtin scenario or file named {spec!r}")


# ---------------------------------------------------------------------------
# Overrides
# ---------------------------------------------------------------------------

_PARAM_FIELDS = {f.name for f in dataclasses.fields(ModelParams)}


def apply_overrides(config: ScenarioConfig, overrides: dict[str, str]) -> ScenarioConfig:
    """Apply ``key=value`` style overrides.

    Keys: any model parameter, ``n``, ``m``, ``n_runs``, ``max_cycles``,
    ``threshold_dist``, ``graph_policy``, plus ``reliability`` and
    ``visualization`` which replace r (resp. v) in every schedule segment.
    """
    cfg = config
    for key, raw in overrides.items():
        try:
            if key in _PARAM_FIELDS:
                if key == "debunking_enabled":
                    val = raw.lower() in ("1", "true", "yes", "on")
                elif key == "t_active":
                    val = int(raw)
                else:
                    val = float(raw)
                cfg = cfg.with_overrides(params=cfg.params.with_overrides(**{key: val}))
            elif key in ("n", "m", "n_runs", "max_cycles"):
                cfg = cfg.with_overrides(**{key: int(raw)})
            elif key == "threshold_dist":
                cfg = cfg.with_overrides(threshold_dist=raw)
            elif key == "graph_policy":
                cfg = cfg.with_overrides(graph_policy=raw)
            elif key == "reliability":
                r = float(raw)
                cfg = cfg.with_overrides(schedule=NewsSchedule(
                    segments=tuple((s, r, v) for s, _, v in cfg.schedule.segments)
                ))
            elif key == "visualization":
                v = float(raw)
                cfg = cfg.with_overrides(schedule=NewsSchedule(
                    segments=tuple((s, r, v) for s, r, _ in cfg.schedule.segments)
                ))
            else:
                raise ConfigError(f"unknown override key {key!r}")
        except (ValueError, TypeError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad override {key}={raw}: {exc}") from exc
    return cfg


# ---------------------------------------------------------------------------
# Batch running
# ---------------------------------------------------------------------------

class BatchRunError(RuntimeError):
    """A run inside a batch failed; carries the offending sub-seed."""


@dataclass
class RunResult:
    index: int
    run_seed: int
    graph_seed: int
    graph: Graph
    trace: SimulationTrace
    sir_trace: SirTrace | None


@dataclass
class AggregateResult:
    config: ScenarioConfig
    config_hash: str
    master_seed: int
    run_seeds: list[int]
    graph_seeds: list[int]
    graphs: list[Graph]
    traces: list[SimulationTrace]
    sir_traces: list[SirTrace] | None
    failures: list[dict]


def _run_seeds(config: ScenarioConfig, master_seed: int, index: int) -> tuple[int, int, int, int]:
    run_key = derive_subseed(master_seed, index)
    if config.graph_policy == "fresh":
        graph_seed = derive_subseed(run_key, 0)
    else:
        graph_seed = derive_subseed(master_seed, _FIXED_GRAPH_INDEX)
    return run_key, graph_seed, derive_subseed(run_key, 1), derive_subseed(run_key, 2)


def execute_run(config: ScenarioConfig, master_seed: int, index: int,
                backend: str | None = None) -> RunResult:
    """One fully seeded run of a scenario (graph, diffusion, optional SIR)."""
    run_key, graph_seed, mas_seed, sir_seed = _run_seeds(config, master_seed, index)
    graph = generate_ba(config.n, config.m, graph_seed, backend=backend)
    trace = run(
        graph,
        config.schedule,
        config.params,
        config.max_cycles,
        mas_seed,
        threshold_dist=config.threshold_dist,
        backend=backend,
    )
    sir_trace = None
    if config.sir is not None:
        sir_trace = run_sir(graph, config.sir, config.max_cycles, sir_seed,
                            backend=backend)
    return RunResult(
        index=index, run_seed=run_key, graph_seed=graph_seed,
        graph=graph, trace=trace, sir_trace=sir_trace,
    )


def _execute_run_star(args) -> "RunResult | Exception":
    try:
        return execute_run(*args)
    except Exception as exc:  # noqa: BLE001 - classified by the caller
        return exc


def batch_run(config: ScenarioConfig, master_seed: int, jobs: int = 1,
              backend: str | None = None, strict: bool = True) -> AggregateResult:
    """Run the scenario ``n_runs`` times with derived sub-seeds.

    Deterministic end-to-end for a fixed master seed, independent of the
    number of worker processes. With ``strict`` a failing run aborts the
    batch (the sub-seed is named); otherwise it is recorded and skipped.
    """
    arglist = [(config, master_seed, i, backend) for i in range(config.n_runs)]
    if jobs > 1 and config.n_runs > 1:
        import multiprocessing

        with multiprocessing.Pool(min(jobs, config.n_runs)) as pool:
            results = pool.map(_execute_run_star, arglist)
    else:
        results = [_execute_run_star(args) for args in arglist]

    if strict:
        for i, res in enumerate(results):
            if isinstance(res, Exception):
                raise BatchRunError(
                    f"run {i} (sub-seed {derive_subseed(master_seed, i)}) "
                    f"failed: {res}"
                ) from res

    agg = AggregateResult(
        config=config,
        config_hash=config.config_hash(),
        master_seed=master_seed,
        run_seeds=[], graph_seeds=[], graphs=[], traces=[],
        sir_traces=[] if config.sir is not None else None,
        failures=[],
    )
    for i, res in enumerate(results):
        if isinstance(res, Exception):
            agg.failures.append({"index": i,
                                 "run_seed": derive_subseed(master_seed, i),
                                 "error": str(res)})
            continue
        agg.run_seeds.append(res.run_seed)
        agg.graph_seeds.append(res.graph_seed)
        agg.graphs.append(res.graph)
        agg.traces.append(res.trace)
        if agg.sir_traces is not None:
            agg.sir_traces.append(res.sir_trace)
    return agg
