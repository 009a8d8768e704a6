"""Command-line interface.

Subcommands: ``generate``, ``run``, ``batch``, ``sweep``, ``analyze``,
``dump-scenario``. Every output is reproducible byte-for-byte from the
arguments; batch/sweep manifests record the config hash and all derived
sub-seeds needed to replay a run. ``RUMORNET_OUT`` sets the default output
directory. Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, analysis
from ._kernels import backend_name, get_backend
from .graph import (
    InvalidParameterError,
    degree_histogram,
    generate_ba,
    write_edge_list,
)
from .model import UnknownDistributionError
from .powerlaw import InsufficientDataError, fit_power_law
from .scenarios import (
    AggregateResult,
    ConfigError,
    apply_overrides,
    batch_run,
    execute_run,
    resolve_scenario,
)

_CONFIG_ERRORS = (ConfigError, InvalidParameterError, UnknownDistributionError, ValueError)


def _cli_errors(fn):
    """Map config problems to exit 1 and runtime failures to exit 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.exceptions.Exit:
            raise
        except _CONFIG_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except Exception as exc:  # noqa: BLE001 - CLI boundary
            click.echo(f"runtime error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _out_dir(out: str | None) -> Path:
    if out is None:
        out = os.environ.get("RUMORNET_OUT")
    if out is None:
        raise ConfigError("no output directory: pass --out or set RUMORNET_OUT")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_overrides(pairs: tuple[str, ...]) -> dict[str, str]:
    overrides = {}
    for pair in pairs:
        key, sep, val = pair.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        overrides[key.strip()] = val.strip()
    return overrides


@click.group()
@click.version_option(version=__version__)
def main():
    """Rumor diffusion on scale-free networks: generate, simulate, analyze."""


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

@main.command()
@click.option("--nodes", "-n", type=int, required=True, help="Node count.")
@click.option("--m", type=int, default=2, show_default=True,
              help="Edges attached by each new node.")
@click.option("--seed", type=int, required=True)
@click.option("--out", type=str, default=None, help="Output directory.")
@click.option("--k-min", type=int, default=None,
              help="Smallest degree class used by the tail fit (default m+1).")
@_cli_errors
def generate(nodes, m, seed, out, k_min):
    """Generate a scale-free graph and verify its power-law tail."""
    outdir = _out_dir(out)
    g = generate_ba(nodes, m, seed)
    write_edge_list(g, outdir / "edges.txt")
    hist = degree_histogram(g)
    hist.to_csv(outdir / "degree_histogram.csv")
    report = {
        "n": nodes, "m": m, "seed": seed,
        "edge_count": g.edge_count,
        "max_degree": int(g.degrees.max()),
    }
    try:
        fit = fit_power_law(hist, m + 1 if k_min is None else k_min)
        report["fit"] = fit.as_dict()
        click.echo(
            f"generated n={nodes} m={m} edges={g.edge_count} "
            f"gamma={fit.gamma:.3f}+-{fit.gamma_stat_err:.3f}"
        )
    except InsufficientDataError as exc:
        report["fit"] = None
        report["fit_error"] = str(exc)
        click.echo(f"generated n={nodes} m={m} edges={g.edge_count}; fit skipped: {exc}")
    with open(outdir / "power_law_fit.json", "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

@main.command(name="run")
@click.option("--scenario", required=True,
              help="Builtin name (optionally name:key=value,...) or scenario file.")
@click.option("--seed", type=int, required=True)
@click.option("--out", type=str, default=None)
@click.option("--set", "overrides", multiple=True,
              help="Parameter override key=value; repeatable.")
@_cli_errors
def run_cmd(scenario, seed, out, overrides):
    """One full simulation with trace and snapshot artifacts."""
    outdir = _out_dir(out)
    config = apply_overrides(resolve_scenario(scenario), _parse_overrides(overrides))
    result = execute_run(config, seed, 0)
    result.trace.to_csv(outdir / "trace.csv")
    result.trace.to_json(outdir / "trace.json")
    result.trace.snapshot.to_csv(outdir / "snapshot.csv")
    if result.sir_trace is not None:
        result.sir_trace.to_csv(outdir / "sir_trace.csv")
        result.sir_trace.to_json(outdir / "sir_trace.json")
    tr = result.trace
    click.echo(
        f"scenario={config.name} n={config.n} cycles={tr.n_cycles} "
        f"ever_activated={int(tr.ever_activated[-1])} terminated={tr.terminated}"
    )


# ---------------------------------------------------------------------------
# shared writers
# ---------------------------------------------------------------------------

_SERIES_CLASSES = ("active", "spontaneous", "influenced", "persuaded",
                   "debunker", "inactive", "ever_activated")


def _write_aggregates(outdir: Path, agg: AggregateResult) -> dict:
    aggdir = outdir / "aggregate"
    aggdir.mkdir(exist_ok=True)
    summary: dict = {}
    if agg.traces:
        for which in _SERIES_CLASSES:
            series = analysis.activation_density_series(agg.traces, which)
            series.to_csv(aggdir / f"{which}_density.csv")
        analysis.density_by_degree(agg.traces).to_csv(aggdir / "degree_density.csv")
        hist = analysis.threshold_histogram(agg.traces)
        hist.to_csv(aggdir / "threshold_hist.csv")
        values = []
        excluded = 0
        with open(aggdir / "assortativity.csv", "w") as fh:
            fh.write("run,r_c,status\n")
            for i, (tr, g) in enumerate(zip(agg.traces, agg.graphs)):
                try:
                    rc = analysis.final_state_assortativity(g, tr.snapshot).r_c
                    values.append(rc)
                    fh.write(f"{i},{rc!r},ok\n")
                except (analysis.DegenerateLabelsError, analysis.EmptySubgraphError) as exc:
                    excluded += 1
                    fh.write(f"{i},,excluded: {exc}\n")
        if values:
            vals = np.asarray(values)
            summary["assortativity"] = {
                "mean_r_c": float(vals.mean()),
                "stderr": float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0,
                "n_used": int(vals.size),
                "n_excluded": excluded,
            }
        else:
            summary["assortativity"] = {"n_used": 0, "n_excluded": excluded}
    if agg.sir_traces:
        analysis.activation_density_series(agg.sir_traces, "S").to_csv(
            aggdir / "sir_spreader_density.csv"
        )
    return summary


def _write_batch(outdir: Path, agg: AggregateResult, backend: str | None) -> None:
    runsdir = outdir / "runs"
    runsdir.mkdir(exist_ok=True)
    for i, tr in enumerate(agg.traces):
        tr.to_json(runsdir / f"run_{i:03d}.trace.json")
        tr.to_csv(runsdir / f"run_{i:03d}.trace.csv")
        tr.snapshot.to_csv(runsdir / f"run_{i:03d}.snapshot.csv")
    if agg.sir_traces:
        for i, tr in enumerate(agg.sir_traces):
            tr.to_json(runsdir / f"sir_{i:03d}.trace.json")
            tr.to_csv(runsdir / f"sir_{i:03d}.trace.csv")
    agg.config.to_file(outdir / "scenario.ini")
    summary = _write_aggregates(outdir, agg)
    manifest = {
        "scenario": agg.config.name,
        "config_hash": agg.config_hash,
        "master_seed": agg.master_seed,
        "n_runs": agg.config.n_runs,
        "run_seeds": agg.run_seeds,
        "graph_seeds": agg.graph_seeds,
        "n_completed": len(agg.traces),
        "failures": agg.failures,
        "backend": backend_name(get_backend(backend)),
        "version": __version__,
        "summary": summary,
    }
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------

@main.command()
@click.option("--scenario", required=True)
@click.option("--runs", type=int, default=None,
              help="Override the scenario's run count.")
@click.option("--seed", type=int, required=True, help="Master seed.")
@click.option("--out", type=str, default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--set", "overrides", multiple=True)
@_cli_errors
def batch(scenario, runs, seed, out, jobs, overrides):
    """Multi-run experiment with averaged reports and a replay manifest."""
    outdir = _out_dir(out)
    config = apply_overrides(resolve_scenario(scenario), _parse_overrides(overrides))
    if runs is not None:
        config = config.with_overrides(n_runs=runs)
    agg = batch_run(config, seed, jobs=jobs, strict=False)
    _write_batch(outdir, agg, None)
    click.echo(
        f"batch scenario={config.name} runs={len(agg.traces)}/{config.n_runs} "
        f"hash={agg.config_hash[:12]} out={outdir}"
    )
    if agg.failures:
        click.echo(f"warning: {len(agg.failures)} run(s) failed; see manifest", err=True)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

@main.command()
@click.option("--scenario", required=True)
@click.option("--param", required=True,
              help="Grid spec name=start:stop:count, e.g. reliability=0.45:0.90:9.")
@click.option("--runs", type=int, default=None)
@click.option("--seed", type=int, required=True)
@click.option("--out", type=str, default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--set", "overrides", multiple=True)
@_cli_errors
def sweep(scenario, param, runs, seed, out, jobs, overrides):
    """Run a scenario across a parameter grid; per-point reports plus a
    summary table (assortativity and histogram per point)."""
    outdir = _out_dir(out)
    name, sep, rng_spec = param.partition("=")
    if not sep:
        raise ConfigError(f"--param expects name=start:stop:count, got {param!r}")
    try:
        lo, hi, k = rng_spec.split(":")
        values = np.linspace(float(lo), float(hi), int(k))
    except ValueError as exc:
        raise ConfigError(f"bad grid {rng_spec!r}: {exc}") from exc
    base = apply_overrides(resolve_scenario(scenario), _parse_overrides(overrides))
    if runs is not None:
        base = base.with_overrides(n_runs=runs)

    from .rng import derive_subseed

    rows = []
    for idx, val in enumerate(values):
        config = apply_overrides(base, {name: repr(float(val))})
        point_seed = derive_subseed(seed, idx)
        agg = batch_run(config, point_seed, jobs=jobs, strict=False)
        pdir = outdir / f"point_{idx:02d}_{name}_{float(val)!r}"
        pdir.mkdir(parents=True, exist_ok=True)
        _write_batch(pdir, agg, None)
        with open(pdir / "manifest.json") as fh:
            summary = json.load(fh)["summary"]
        arow = summary.get("assortativity", {})
        rows.append((float(val), arow))
    with open(outdir / "sweep_summary.csv", "w") as fh:
        fh.write(f"{name},mean_r_c,stderr,n_used,n_excluded\n")
        for val, arow in rows:
            fh.write(
                f"{val!r},{arow.get('mean_r_c', '')!r},{arow.get('stderr', '')!r},"
                f"{arow.get('n_used', 0)},{arow.get('n_excluded', 0)}\n"
            )
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(
            {
                "scenario": base.name,
                "param": name,
                "values": [float(v) for v in values],
                "master_seed": seed,
                "runs_per_point": base.n_runs,
                "version": __version__,
            },
            fh, sort_keys=True, indent=2,
        )
    click.echo(f"sweep {name} over {len(values)} points -> {outdir}")


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

@main.command()
@click.option("--trace-dir", required=True,
              help="A batch output directory (manifest.json + runs/).")
@click.option("--out", type=str, default=None)
@click.option("--echo-delta", type=float, default=None,
              help="Also export per-run echo subgraphs (GEXF) at this threshold gap.")
@_cli_errors
def analyze(trace_dir, out, echo_delta):
    """Recompute aggregate reports from stored run traces."""
    from .model import SimulationTrace
    from .scenarios import ScenarioConfig
    from .sir import SirTrace

    tdir = Path(trace_dir)
    outdir = _out_dir(out)
    runsdir = tdir / "runs"
    if not runsdir.is_dir():
        raise ConfigError(f"{trace_dir} has no runs/ directory")
    traces = [SimulationTrace.from_json(p) for p in sorted(runsdir.glob("run_*.trace.json"))]
    sirs = [SirTrace.from_json(p) for p in sorted(runsdir.glob("sir_*.trace.json"))]
    if not traces:
        raise ConfigError(f"no run_*.trace.json files under {runsdir}")

    manifest_path = tdir / "manifest.json"
    scenario_path = tdir / "scenario.ini"
    graphs = []
    if manifest_path.exists() and scenario_path.exists():
        with open(manifest_path) as fh:
            manifest = json.load(fh)
        config = ScenarioConfig.from_file(scenario_path)
        graphs = [generate_ba(config.n, config.m, gs) for gs in manifest["graph_seeds"]]

    agg = AggregateResult(
        config=ScenarioConfig.from_file(scenario_path) if scenario_path.exists() else None,
        config_hash="", master_seed=0,
        run_seeds=[], graph_seeds=[],
        graphs=graphs, traces=traces,
        sir_traces=sirs or None, failures=[],
    )
    if not graphs:
        # without regenerated graphs only trace-level reports are possible
        aggdir = outdir / "aggregate"
        aggdir.mkdir(exist_ok=True)
        for which in _SERIES_CLASSES:
            analysis.activation_density_series(traces, which).to_csv(
                aggdir / f"{which}_density.csv"
            )
        analysis.density_by_degree(traces).to_csv(aggdir / "degree_density.csv")
        analysis.threshold_histogram(traces).to_csv(aggdir / "threshold_hist.csv")
        click.echo(f"analyzed {len(traces)} runs (no manifest: assortativity skipped)")
        return
    summary = _write_aggregates(outdir, agg)
    if echo_delta is not None:
        for i, (tr, g) in enumerate(zip(traces, graphs)):
            sub = analysis.echo_subgraph(g, tr.snapshot, echo_delta)
            sub.export_gexf(outdir / f"echo_{i:03d}.gexf")
    with open(outdir / "analysis_summary.json", "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
    click.echo(f"analyzed {len(traces)} runs -> {outdir}")


# ---------------------------------------------------------------------------
# dump-scenario
# ---------------------------------------------------------------------------

@main.command(name="dump-scenario")
@click.option("--name", required=True,
              help="Builtin scenario, e.g. true_news or hoax_debunk:n=20000.")
@click.option("--out", type=str, default=None)
@_cli_errors
def dump_scenario(name, out):
    """Write a builtin scenario as an editable file."""
    outdir = _out_dir(out)
    config = resolve_scenario(name)
    path = outdir / f"{config.name}.ini"
    config.to_file(path)
    click.echo(str(path))


if __name__ == "__main__":
    main()
