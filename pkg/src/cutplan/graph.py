"""Undirected graph container, random generators, edge-list I/O, spectral utilities."""
from __future__ import annotations

import logging
import math
from collections.abc import Iterable

import numpy as np
import scipy.sparse as sp

from ._util import atomic_write_text

__all__ = [
    "Graph",
    "gen_erdos_renyi",
    "gen_preferential_attachment",
    "gen_small_world",
    "gen_geometric",
    "gen_grid",
    "load_edge_list",
    "save_edge_list",
    "spectral_radius",
    "connected_components",
]

logger = logging.getLogger(__name__)


class Graph:
    """Simple undirected graph on dense node ids 0..n_nodes-1.

    Edges are stored canonically (u < v, lexicographically sorted, deduplicated)
    plus a CSR adjacency with neighbor lists sorted ascending. Instances are
    treated as immutable.

    Parameters
    ----------
    n_nodes : int
        Number of nodes, >= 0.
    edges : iterable of (int, int)
        Undirected edges. Duplicates (in either orientation) collapse to one
        edge. Self loops and out-of-range ids raise ValueError.
    """

    __slots__ = ("n_nodes", "edges", "indptr", "indices", "degree", "_csr")

    def __init__(self, n_nodes: int, edges: Iterable[tuple[int, int]] = ()):
        n = int(n_nodes)
        if n < 0:
            raise ValueError(f"n_nodes must be >= 0, got {n_nodes}")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise ValueError("edges must be pairs of node ids")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        if e.size and np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self loops are not allowed")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        e = np.unique(np.column_stack([lo, hi]), axis=0)

        self.n_nodes = n
        self.edges = e
        self.degree = (np.bincount(e[:, 0], minlength=n)
                       + np.bincount(e[:, 1], minlength=n)).astype(np.int64)
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        self.indices = dst[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.indptr[1:])
        self._csr = None

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n_nodes else 0

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of node v (a view, do not mutate)."""
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def adjacency_matrix(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency as a scipy CSR matrix (cached)."""
        if self._csr is None:
            data = np.ones(self.indices.size, dtype=np.float64)
            self._csr = sp.csr_matrix(
                (data, self.indices.copy(), self.indptr.copy()),
                shape=(self.n_nodes, self.n_nodes))
        return self._csr

    def induced_subgraph(self, nodes: np.ndarray) -> tuple["Graph", np.ndarray]:
        """Subgraph induced by ``nodes``; returns (subgraph, original_ids).

        original_ids[i] is the id in this graph of subgraph node i; ids are
        compacted in ascending order of the originals.
        """
        ids = np.unique(np.asarray(nodes, dtype=np.int64))
        if ids.size and (ids[0] < 0 or ids[-1] >= self.n_nodes):
            raise ValueError("node id out of range")
        remap = np.full(self.n_nodes, -1, dtype=np.int64)
        remap[ids] = np.arange(ids.size)
        keep = (remap[self.edges[:, 0]] >= 0) & (remap[self.edges[:, 1]] >= 0)
        sub_edges = remap[self.edges[keep]]
        return Graph(ids.size, sub_edges), ids

    def validate(self) -> "Graph":
        """Recheck structural invariants; returns self. For tests."""
        e = self.edges
        assert np.all(e[:, 0] < e[:, 1]), "edges not canonical"
        assert np.unique(e, axis=0).shape[0] == e.shape[0], "duplicate edges"
        assert int(self.degree.sum()) == 2 * self.n_edges, "degree sum mismatch"
        for v in range(self.n_nodes):
            nb = self.neighbors(v)
            assert np.all(np.diff(nb) > 0), "neighbors not strictly sorted"
            assert nb.size == self.degree[v], "degree/CSR mismatch"
            for w in nb:
                assert self.has_edge(int(w), v), "adjacency not symmetric"
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n_nodes == other.n_nodes
                and self.edges.shape == other.edges.shape
                and bool(np.all(self.edges == other.edges)))

    def __hash__(self):
        return hash((self.n_nodes, self.n_edges))

    def __repr__(self) -> str:
        return f"Graph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def gen_erdos_renyi(n_nodes: int, p: float, seed: int = 0) -> Graph:
    """Erdos-Renyi G(n, p): each of the n(n-1)/2 pairs is an edge with prob p."""
    n = int(n_nodes)
    if n < 1:
        raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    rng = _rng(seed)
    chunks = []
    for i in range(n - 1):
        mask = rng.random(n - 1 - i) < p
        js = np.nonzero(mask)[0]
        if js.size:
            chunks.append(np.column_stack([np.full(js.size, i, dtype=np.int64),
                                           i + 1 + js]))
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return Graph(n, edges)


def gen_preferential_attachment(n_nodes: int, m: int, seed: int = 0) -> Graph:
    """Preferential attachment: start from an (m+1)-clique, then each new node
    attaches to m distinct existing nodes chosen proportionally to degree."""
    n, m = int(n_nodes), int(m)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n <= m:
        raise ValueError(f"n_nodes must be > m, got n_nodes={n_nodes}, m={m}")
    rng = _rng(seed)
    edges = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    # one list entry per unit of degree
    repeated = [v for v in range(m + 1) for _ in range(m)]
    for v in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(repeated[int(rng.integers(len(repeated)))])
        for t in sorted(targets):
            edges.append((t, v))
            repeated.append(t)
        repeated.extend([v] * m)
    return Graph(n, edges)


def gen_small_world(n_nodes: int, k: int, rewire_p: float, seed: int = 0) -> Graph:
    """Watts-Strogatz ring lattice (each node joined to its k nearest neighbors)
    with each ring edge rewired to a uniform target with probability rewire_p.

    Rewiring rejects self loops and duplicate edges; a node already connected
    to everyone keeps its ring edge. rewire_p = 0 returns the exact lattice.
    """
    n, k = int(n_nodes), int(k)
    if n < 1:
        raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
    if k % 2 != 0 or k < 0:
        raise ValueError(f"k must be even and >= 0, got {k}")
    if k >= n and n > 1:
        raise ValueError(f"k must be < n_nodes, got k={k}, n_nodes={n_nodes}")
    rng = _rng(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if rng.random() < rewire_p:
                w = int(rng.integers(n))
                while w == u or w in adj[u]:
                    if len(adj[u]) >= n - 1:
                        break
                    w = int(rng.integers(n))
                else:
                    adj[u].discard(v)
                    adj[v].discard(u)
                    adj[u].add(w)
                    adj[w].add(u)
    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    return Graph(n, edges)


def gen_geometric(n_nodes: int, radius: float, seed: int = 0,
                  return_points: bool = False):
    """Random geometric graph: n points uniform in the unit square, edge iff
    Euclidean distance <= radius. With return_points=True also returns the
    (n, 2) coordinate array."""
    n = int(n_nodes)
    if n < 1:
        raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    rng = _rng(seed)
    pts = rng.random((n, 2))
    r2 = float(radius) ** 2
    chunks = []
    for i in range(n - 1):
        d2 = ((pts[i + 1:] - pts[i]) ** 2).sum(axis=1)
        js = np.nonzero(d2 <= r2)[0]
        if js.size:
            chunks.append(np.column_stack([np.full(js.size, i, dtype=np.int64),
                                           i + 1 + js]))
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    g = Graph(n, edges)
    return (g, pts) if return_points else g


def gen_grid(rows: int, cols: int) -> Graph:
    """Rectangular lattice; node (r, c) has id r*cols + c."""
    rows, cols = int(rows), int(cols)
    if rows < 1 or cols < 1:
        raise ValueError(f"rows and cols must be >= 1, got {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def load_edge_list(path: str) -> Graph:
    """Load a whitespace-separated edge list.

    Blank lines and lines starting with '#' are skipped. Self loops are
    dropped (logged as one warning with a count). Duplicate edges collapse.
    Node ids are arbitrary nonnegative integers and are compacted to
    0..n-1 in ascending order; n is the number of distinct endpoint ids,
    so isolated nodes are not representable in this format.
    """
    pairs: list[tuple[int, int]] = []
    n_self = 0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            s = raw.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two node ids, got {s!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer node id in {s!r}") from None
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative node id in {s!r}")
            if u == v:
                n_self += 1
                continue
            pairs.append((u, v))
    if n_self:
        logger.warning("%s: dropped %d self loop(s)", path, n_self)
    if not pairs:
        return Graph(0)
    arr = np.asarray(pairs, dtype=np.int64)
    ids = np.unique(arr)
    remap = {int(x): i for i, x in enumerate(ids)}
    compact = np.array([[remap[int(u)], remap[int(v)]] for u, v in arr], dtype=np.int64)
    return Graph(ids.size, compact)


def save_edge_list(graph: Graph, path: str, header: Iterable[str] = ()) -> None:
    """Write the canonical edge list; header lines are emitted as '#' comments."""
    lines = [f"# {h}" for h in header]
    lines.extend(f"{u} {v}" for u, v in graph.edges)
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def spectral_radius(graph: Graph, tol: float = 1e-10,
                    max_iter: int = 10000) -> tuple[float, np.ndarray]:
    """Largest adjacency eigenvalue and its nonnegative unit eigenvector.

    Power iteration from the uniform positive vector, converged when the
    residual ||A x - lam x|| <= tol * max(lam, 1). Bipartite-type
    oscillation (plus/minus eigenvalue pair) stalls the plain iteration, so
    a diagonally shifted pass (A + I) is tried before giving up.

    Raises RuntimeError if neither pass converges within max_iter.
    """
    n = graph.n_nodes
    if n < 1:
        raise ValueError("graph must have at least one node")
    start = np.full(n, 1.0 / math.sqrt(n))
    if graph.n_edges == 0:
        return 0.0, start
    a = graph.adjacency_matrix()
    for shift in (0.0, 1.0):
        x = start.copy()
        for _ in range(max_iter):
            y = a @ x
            if shift:
                y = y + shift * x
            lam = float(x @ y)
            if np.linalg.norm(y - lam * x) <= tol * max(abs(lam), 1.0):
                return lam - shift, x
            nrm = float(np.linalg.norm(y))
            x = y / nrm
    raise RuntimeError(f"power iteration did not converge in {max_iter} iterations")


def connected_components(graph: Graph) -> list[np.ndarray]:
    """Connected components as sorted id arrays, ordered by smallest member id."""
    n = graph.n_nodes
    seen = np.zeros(n, dtype=bool)
    comps: list[np.ndarray] = []
    for s in range(n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        comp = [s]
        while stack:
            v = stack.pop()
            for w in graph.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    comp.append(int(w))
                    stack.append(int(w))
        comps.append(np.array(sorted(comp), dtype=np.int64))
    return comps
