"""Scale-free graph generation and basic degree statistics.

Graphs are undirected, unweighted, immutable after construction, and stored
in CSR form (``indptr``/``indices`` with each row sorted) so the simulation
kernels can walk neighborhoods without indirection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from ._kernels import get_backend
from .rng import STREAM_GRAPH, Pcg32

# The compiled growth kernel keeps one node's attachment targets on the
# stack; 64 is far above any sensible edges-per-node setting.
MAX_ATTACH = 64


class InvalidParameterError(ValueError):
    """Graph generator called with parameters outside its contract."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph over nodes ``0 .. n-1``.

    ``indices[indptr[i]:indptr[i+1]]`` is the sorted neighbor list of ``i``.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    edge_count: int

    @classmethod
    def from_edges(cls, n: int, edge_u, edge_v) -> "Graph":
        edge_u = np.asarray(edge_u, dtype=np.int32)
        edge_v = np.asarray(edge_v, dtype=np.int32)
        if edge_u.shape != edge_v.shape:
            raise InvalidParameterError("edge endpoint arrays differ in length")
        if edge_u.size:
            if edge_u.min() < 0 or edge_v.min() < 0 or max(edge_u.max(), edge_v.max()) >= n:
                raise InvalidParameterError("edge endpoint outside [0, n)")
            if np.any(edge_u == edge_v):
                raise InvalidParameterError("self-loop in edge list")
        both_u = np.concatenate([edge_u, edge_v])
        both_v = np.concatenate([edge_v, edge_u])
        order = np.lexsort((both_v, both_u))
        both_u = both_u[order]
        both_v = both_v[order]
        dup = (both_u[1:] == both_u[:-1]) & (both_v[1:] == both_v[:-1])
        if np.any(dup):
            raise InvalidParameterError("duplicate edge in edge list")
        deg = np.bincount(both_u, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        return cls(
            n=n,
            indptr=indptr,
            indices=both_v.astype(np.int32),
            edge_count=int(edge_u.size),
        )

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr).astype(np.int32)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(i).tolist() for i in range(self.n)]

    def edges(self) -> np.ndarray:
        """All edges as an (edge_count, 2) array with u < v, lexicographic."""
        rows = np.repeat(np.arange(self.n, dtype=np.int32), np.diff(self.indptr))
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def has_edge(self, i: int, j: int) -> bool:
        row = self.neighbors(i)
        pos = np.searchsorted(row, j)
        return pos < row.size and row[pos] == j

    def validate(self) -> None:
        """Recheck the structural invariants (tests and imports use this)."""
        deg = np.diff(self.indptr)
        if int(deg.sum()) != 2 * self.edge_count:
            raise InvalidParameterError("degree sum != 2 * edge_count")
        rows = np.repeat(np.arange(self.n, dtype=np.int64), deg)
        if np.any(rows == self.indices):
            raise InvalidParameterError("self-loop")
        for i in range(self.n):
            row = self.neighbors(i)
            if row.size > 1 and np.any(row[1:] <= row[:-1]):
                raise InvalidParameterError("adjacency row not strictly sorted")
        # symmetry: the reversed edge multiset must match
        order_fwd = np.lexsort((self.indices, rows))
        order_rev = np.lexsort((rows, self.indices))
        if not (
            np.array_equal(rows[order_fwd], self.indices[order_rev])
            and np.array_equal(self.indices[order_fwd], rows[order_rev])
        ):
            raise InvalidParameterError("adjacency not symmetric")


def generate_ba(n: int, m: int, seed: int, backend: str | None = None) -> Graph:
    """Grow a Barabasi-Albert graph: complete seed on m+1 nodes, then each
    new node attaches to m distinct existing nodes with probability
    proportional to current degree. Deterministic per (n, m, seed).
    """
    if m < 1 or n <= m:
        raise InvalidParameterError(
            f"need n >= m+1 and m >= 1, got n={n}, m={m}"
        )
    if m > MAX_ATTACH:
        raise InvalidParameterError(f"m is capped at {MAX_ATTACH}")
    kern = get_backend(backend)
    state = Pcg32(seed, STREAM_GRAPH).state_array()
    edge_u, edge_v = kern.ba_edges(n, m, state)
    return Graph.from_edges(n, edge_u, edge_v)


@dataclass(frozen=True)
class DegreeHistogram:
    """Exact frequency count per degree class."""

    entries: dict[int, int]
    n_nodes: int

    def sorted_items(self) -> list[tuple[int, int]]:
        return sorted(self.entries.items())

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("k,count\n")
            for k, c in self.sorted_items():
                fh.write(f"{k},{c}\n")


def degree_histogram(g: Graph) -> DegreeHistogram:
    deg = g.degrees
    counts = np.bincount(deg)
    entries = {int(k): int(c) for k, c in enumerate(counts) if c > 0}
    return DegreeHistogram(entries=entries, n_nodes=g.n)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def write_edge_list(g: Graph, path) -> None:
    """One ``i j`` pair per line, 0-based, i < j."""
    with open(path, "w") as fh:
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def read_edge_list(path, n: int | None = None) -> Graph:
    """Inverse of :func:`write_edge_list`.

    ``n`` defaults to ``max node id + 1``; pass it explicitly when trailing
    isolated nodes matter.
    """
    us: list[int] = []
    vs: list[int] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b = line.split()
            us.append(int(a))
            vs.append(int(b))
    if n is None:
        n = (max(max(us), max(vs)) + 1) if us else 0
    return Graph.from_edges(n, us, vs)


def write_gexf(g: Graph, path, node_attributes: dict[str, "np.ndarray"] | None = None) -> None:
    """Minimal GEXF 1.2 export for external layout/visualization tools.

    ``node_attributes`` maps attribute names to per-node value arrays
    (floats or strings).
    """
    attrs = node_attributes or {}
    names = sorted(attrs)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2">',
        '  <graph mode="static" defaultedgetype="undirected">',
    ]
    if names:
        lines.append('    <attributes class="node">')
        for aid, name in enumerate(names):
            kind = "double" if np.issubdtype(np.asarray(attrs[name]).dtype, np.number) else "string"
            lines.append(f'      <attribute id="{aid}" title="{escape(name)}" type="{kind}"/>')
        lines.append("    </attributes>")
    lines.append("    <nodes>")
    for i in range(g.n):
        if names:
            lines.append(f'      <node id="{i}" label="{i}">')
            lines.append("        <attvalues>")
            for aid, name in enumerate(names):
                val = attrs[name][i]
                sval = repr(float(val)) if isinstance(val, (float, np.floating)) else escape(str(val))
                lines.append(f'          <attvalue for="{aid}" value="{sval}"/>')
            lines.append("        </attvalues>")
            lines.append("      </node>")
        else:
            lines.append(f'      <node id="{i}" label="{i}"/>')
    lines.append("    </nodes>")
    lines.append("    <edges>")
    for eid, (u, v) in enumerate(g.edges()):
        lines.append(f'      <edge id="{eid}" source="{u}" target="{v}"/>')
    lines.append("    </edges>")
    lines.append("  </graph>")
    lines.append("</gexf>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
