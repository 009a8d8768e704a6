"""Measurements over simulation traces.

Everything here is a pure function over immutable inputs: multi-run
averaged time series, per-degree-class activation densities, final
threshold histograms with a bimodality probe, Newman attribute
assortativity, and the threshold-similarity echo subgraph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, write_gexf
from .model import COLOR_NAMES, AgentColor, Snapshot


class DegenerateLabelsError(ValueError):
    """Assortativity undefined: all edges connect one single label class."""


class EmptySubgraphError(ValueError):
    """Assortativity undefined: no edges between labeled nodes."""


# ---------------------------------------------------------------------------
# Averaged time series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AveragedSeries:
    mean: np.ndarray    # per-cycle mean density
    stderr: np.ndarray  # sample stddev / sqrt(n_runs)
    n_runs: int

    @property
    def n_cycles(self) -> int:
        return self.mean.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("cycle,mean,stderr\n")
            for t in range(self.n_cycles):
                fh.write(f"{t},{self.mean[t]!r},{self.stderr[t]!r}\n")


def _pad_terminal(series: np.ndarray, length: int) -> np.ndarray:
    """Extend a finished run by holding its terminal state."""
    if series.shape[0] >= length:
        return series[:length]
    pad = np.full(length - series.shape[0], series[-1])
    return np.concatenate([series, pad])


def _stack_mean(stack: np.ndarray) -> AveragedSeries:
    k = stack.shape[0]
    mean = stack.mean(axis=0)
    if k > 1:
        stderr = stack.std(axis=0, ddof=1) / np.sqrt(k)
    else:
        stderr = np.zeros_like(mean)
    return AveragedSeries(mean=mean, stderr=stderr, n_runs=k)


def activation_density_series(traces, which: str = "active") -> AveragedSeries:
    """Per-cycle mean density over runs, shorter runs padded with their
    terminal state. ``which`` is any trace class selector (default: the
    currently spreading agents)."""
    if not traces:
        raise ValueError("need at least one trace")
    n = traces[0].n
    if any(t.n != n for t in traces):
        raise ValueError("traces come from differently sized graphs")
    length = max(t.n_cycles for t in traces)
    stack = np.vstack([_pad_terminal(t.density_series(which), length) for t in traces])
    return _stack_mean(stack)


def time_to_half_peak(series: np.ndarray) -> int:
    """First cycle at which a curve reaches half of its own maximum."""
    peak = float(np.max(series))
    if peak <= 0.0:
        raise ValueError("series never becomes positive")
    return int(np.argmax(series >= peak / 2.0))


def is_single_peaked(series: np.ndarray, rel_tol: float = 0.02) -> bool:
    """One maximal plateau: no rise after the argmax and no fall before it
    larger than ``rel_tol`` of the peak value."""
    peak_idx = int(np.argmax(series))
    peak = float(series[peak_idx])
    if peak <= 0.0:
        return False
    tol = rel_tol * peak
    diffs = np.diff(series)
    rises_after = diffs[peak_idx:]
    falls_before = -diffs[:peak_idx]
    ok_after = rises_after.size == 0 or float(rises_after.max()) <= tol
    ok_before = falls_before.size == 0 or float(falls_before.max()) <= tol
    return ok_after and ok_before


# ---------------------------------------------------------------------------
# Degree-class densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeClassDensity:
    ks: np.ndarray            # degree classes present in at least one run
    mean: np.ndarray          # mean activated fraction per class
    stderr: np.ndarray
    n_occurrences: np.ndarray  # in how many runs the class appeared

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("k,mean,stderr\n")
            for i in range(self.ks.shape[0]):
                fh.write(f"{int(self.ks[i])},{self.mean[i]!r},{self.stderr[i]!r}\n")

    def mean_over(self, k_lo: int | None = None, k_hi: int | None = None) -> float:
        """Average class density over a degree range (inclusive bounds)."""
        mask = np.ones(self.ks.shape[0], dtype=bool)
        if k_lo is not None:
            mask &= self.ks >= k_lo
        if k_hi is not None:
            mask &= self.ks <= k_hi
        if not mask.any():
            raise ValueError("no degree classes in range")
        return float(self.mean[mask].mean())


def density_by_degree(traces) -> DegreeClassDensity:
    """Fraction of each degree class ever activated, averaged over runs.

    Classes enter the average only for the runs in which they appear, so
    traces from fresh graphs per run aggregate cleanly.
    """
    per_run: dict[int, list[float]] = {}
    for tr in traces:
        deg = tr.snapshot.degree
        activated = tr.snapshot.color != int(AgentColor.UNDEPLOYED)
        for k in np.unique(deg):
            mask = deg == k
            per_run.setdefault(int(k), []).append(
                float(np.count_nonzero(activated & mask) / np.count_nonzero(mask))
            )
    ks = np.array(sorted(per_run), dtype=np.int64)
    mean = np.empty(ks.shape[0])
    stderr = np.empty(ks.shape[0])
    occ = np.empty(ks.shape[0], dtype=np.int64)
    for i, k in enumerate(ks):
        vals = np.asarray(per_run[int(k)])
        occ[i] = vals.size
        mean[i] = vals.mean()
        stderr[i] = vals.std(ddof=1) / np.sqrt(vals.size) if vals.size > 1 else 0.0
    return DegreeClassDensity(ks=ks, mean=mean, stderr=stderr, n_occurrences=occ)


# ---------------------------------------------------------------------------
# Threshold histogram and polarization probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdHistogram:
    bin_edges: np.ndarray   # len bins+1, covers [0, 1]
    frequencies: np.ndarray  # normalized to sum 1
    reliability: float | None
    n_runs: int

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("bin_low,bin_high,frequency\n")
            for i in range(self.frequencies.shape[0]):
                fh.write(
                    f"{self.bin_edges[i]!r},{self.bin_edges[i + 1]!r},"
                    f"{self.frequencies[i]!r}\n"
                )


def threshold_histogram(traces, bins: int = 20,
                        reliability: float | None = None) -> ThresholdHistogram:
    """Pooled, normalized histogram of final thresholds across runs."""
    if not traces:
        raise ValueError("need at least one snapshot")
    if bins < 10:
        raise ValueError("need at least 10 bins")
    pooled = np.concatenate([tr.snapshot.threshold_final for tr in traces])
    counts, edges = np.histogram(pooled, bins=bins, range=(0.0, 1.0))
    freq = counts / counts.sum()
    return ThresholdHistogram(
        bin_edges=edges, frequencies=freq,
        reliability=reliability, n_runs=len(traces),
    )


def smooth_3bin(freq: np.ndarray) -> np.ndarray:
    """Moving average with window 3, shrunk at the edges."""
    out = np.empty_like(freq)
    for i in range(freq.shape[0]):
        lo = max(0, i - 1)
        hi = min(freq.shape[0], i + 2)
        out[i] = freq[lo:hi].mean()
    return out


def is_bimodal(hist: ThresholdHistogram, dip: float = 0.2) -> bool:
    """Polarization probe: two local maxima of the smoothed histogram with
    a trough between them at least ``dip`` below the smaller peak.

    A local maximum needs two neighbors (interior bins only, the usual
    peak definition); the clamp pileup in the first bin is not a mode.
    """
    s = smooth_3bin(hist.frequencies)
    peaks = [
        i
        for i in range(1, s.shape[0] - 1)
        if s[i] > s[i - 1] and s[i] > s[i + 1]
    ]
    for a in range(len(peaks)):
        for b in range(a + 1, len(peaks)):
            i, j = peaks[a], peaks[b]
            trough = float(s[i + 1:j].min()) if j > i + 1 else float("inf")
            smaller = min(float(s[i]), float(s[j]))
            if smaller > 0 and trough <= (1.0 - dip) * smaller:
                return True
    return False


# ---------------------------------------------------------------------------
# Assortativity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AssortativityResult:
    r_c: float
    n_edges_used: int
    classes: tuple


def attribute_assortativity(graph: Graph, labels) -> AssortativityResult:
    """Newman's discrete attribute assortativity coefficient.

    ``labels`` holds one discrete label per node; entries below 0 exclude
    the node. Each undirected edge between two labeled nodes enters the
    mixing matrix once per direction (normalization 2E).
    """
    labels = np.asarray(labels)
    edges = graph.edges()
    if edges.size:
        keep = (labels[edges[:, 0]] >= 0) & (labels[edges[:, 1]] >= 0)
        edges = edges[keep]
    if edges.shape[0] == 0:
        raise EmptySubgraphError("no edges between labeled nodes")
    lu = labels[edges[:, 0]]
    lv = labels[edges[:, 1]]
    classes, inv = np.unique(np.concatenate([lu, lv]), return_inverse=True)
    k = classes.shape[0]
    if k < 2:
        raise DegenerateLabelsError("all edges connect a single label class")
    cu = inv[: edges.shape[0]]
    cv = inv[edges.shape[0]:]
    e = np.zeros((k, k), dtype=np.float64)
    np.add.at(e, (cu, cv), 1.0)
    np.add.at(e, (cv, cu), 1.0)
    e /= 2.0 * edges.shape[0]
    a = e.sum(axis=1)
    b = e.sum(axis=0)
    trace = float(np.trace(e))
    ab = float(np.dot(a, b))
    r_c = (trace - ab) / (1.0 - ab)
    return AssortativityResult(
        r_c=r_c,
        n_edges_used=int(edges.shape[0]),
        classes=tuple(int(c) for c in classes),
    )


def spreader_debunker_labels(snapshot: Snapshot) -> np.ndarray:
    """0 = spread the news, 1 = debunked it, -1 = never activated.

    Uses the color held while active, so agents that later turned inactive
    keep the class they spread under.
    """
    last = snapshot.last_active_color
    labels = np.full(last.shape[0], -1, dtype=np.int64)
    labels[(last >= 1) & (last <= 3)] = 0
    labels[last == 4] = 1
    return labels


def final_state_assortativity(graph: Graph, snapshot: Snapshot) -> AssortativityResult:
    """Color assortativity of the spreader/debunker-induced final state."""
    return attribute_assortativity(graph, spreader_debunker_labels(snapshot))


# ---------------------------------------------------------------------------
# Echo-chamber subgraph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EchoSubgraph:
    graph: Graph            # induced subgraph, reindexed 0..n_sel-1
    node_ids: np.ndarray    # original node id per subgraph node
    labels: np.ndarray      # 0 spreader, 1 debunker, per subgraph node
    thresholds: np.ndarray  # final thresholds per subgraph node

    def export_gexf(self, path) -> None:
        color = np.where(self.labels == 1, "debunker", "spreader")
        write_gexf(self.graph, path, {"color": color, "threshold": self.thresholds})


def echo_subgraph(graph: Graph, snapshot: Snapshot, delta_th: float) -> EchoSubgraph:
    """Induced subgraph of the agents who spread or debunked, keeping only
    edges between thresholds that differ by at most ``delta_th``."""
    labels_full = spreader_debunker_labels(snapshot)
    selected = np.flatnonzero(labels_full >= 0)
    remap = np.full(graph.n, -1, dtype=np.int64)
    remap[selected] = np.arange(selected.shape[0])
    th = snapshot.threshold_final
    edges = graph.edges()
    if edges.size:
        keep = (
            (labels_full[edges[:, 0]] >= 0)
            & (labels_full[edges[:, 1]] >= 0)
            & (np.abs(th[edges[:, 0]] - th[edges[:, 1]]) <= delta_th)
        )
        edges = edges[keep]
    sub = Graph.from_edges(
        selected.shape[0], remap[edges[:, 0]], remap[edges[:, 1]]
    ) if edges.size else Graph.from_edges(selected.shape[0], [], [])
    return EchoSubgraph(
        graph=sub,
        node_ids=selected,
        labels=labels_full[selected],
        thresholds=th[selected],
    )


# ---------------------------------------------------------------------------
# Assortativity sweep over news reliabilities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    reliability: float
    mean_r_c: float
    stderr: float
    n_used: int
    n_excluded: int
    degenerate_statistics: bool  # fewer than 2 defined runs behind the mean


def assortativity_sweep(scenario_family, reliabilities, n_runs: int,
                        seed: int, jobs: int = 1,
                        backend: str | None = None) -> list[SweepPoint]:
    """Mean spreader/debunker assortativity per reliability.

    ``scenario_family`` maps a reliability to a ScenarioConfig (debunking
    enabled); runs whose final state has a single class or no edges are
    excluded and counted.
    """
    from .rng import derive_subseed
    from .scenarios import batch_run

    if len(reliabilities) < 2:
        raise ValueError("sweep needs at least 2 reliabilities")
    points = []
    for idx, r in enumerate(reliabilities):
        config = scenario_family(r)
        config = config.with_overrides(n_runs=n_runs)
        agg = batch_run(config, derive_subseed(seed, idx), jobs=jobs, backend=backend)
        values = []
        excluded = 0
        for tr, g in zip(agg.traces, agg.graphs):
            try:
                values.append(final_state_assortativity(g, tr.snapshot).r_c)
            except (DegenerateLabelsError, EmptySubgraphError):
                excluded += 1
        vals = np.asarray(values)
        if vals.size == 0:
            points.append(SweepPoint(r, float("nan"), 0.0, 0, excluded, True))
            continue
        stderr = vals.std(ddof=1) / np.sqrt(vals.size) if vals.size > 1 else 0.0
        points.append(
            SweepPoint(
                reliability=float(r),
                mean_r_c=float(vals.mean()),
                stderr=float(stderr),
                n_used=int(vals.size),
                n_excluded=excluded,
                degenerate_statistics=vals.size < 2,
            )
        )
    return points


def sweep_to_csv(points: list[SweepPoint], path) -> None:
    with open(path, "w") as fh:
        fh.write("reliability,mean_r_c,stderr,n_used,n_excluded\n")
        for p in points:
            fh.write(
                f"{p.reliability!r},{p.mean_r_c!r},{p.stderr!r},"
                f"{p.n_used},{p.n_excluded}\n"
            )
