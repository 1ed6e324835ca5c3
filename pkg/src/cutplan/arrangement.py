"""Linear arrangements of graph nodes: costs, orderings, and cutwidth search."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from numba import njit

from ._util import atomic_write_text
from .graph import Graph

__all__ = [
    "LinearArrangement",
    "CutwidthProfile",
    "cutwidth_profile",
    "p_sum_cost",
    "order_random",
    "order_most_neighbors",
    "order_least_neighbors",
    "order_lrsr",
    "spectral_sequencing",
    "spectral_clustering",
    "AnnealConfig",
    "local_search_swaps",
    "MCMConfig",
    "order_mcm",
    "order_exact_min_cutwidth",
    "save_arrangement",
    "load_arrangement",
]


class LinearArrangement:
    """Bijection between nodes 0..n-1 and positions 1..n.

    ``positions[v]`` is the 1-based position of node v; ``order[i]`` is the
    node occupying position i+1. Instances are treated as immutable.
    """

    __slots__ = ("positions", "order")

    def __init__(self, positions):
        p = np.array(positions, dtype=np.int64, copy=True)
        n = p.size
        if n and (p.min() < 1 or p.max() > n
                  or np.bincount(p - 1, minlength=n).max() != 1):
            raise ValueError("positions must be a bijection onto 1..n")
        order = np.empty(n, dtype=np.int64)
        order[p - 1] = np.arange(n)
        self.positions = p
        self.order = order

    @classmethod
    def identity(cls, n: int) -> "LinearArrangement":
        return cls(np.arange(1, n + 1))

    @classmethod
    def from_order(cls, order) -> "LinearArrangement":
        """Build from a node sequence: order[i] is the node at position i+1."""
        o = np.asarray(order, dtype=np.int64)
        n = o.size
        pos = np.full(n, -1, dtype=np.int64)
        if n and (o.min(initial=0) < 0 or o.max(initial=0) >= n):
            raise ValueError("order must be a permutation of 0..n-1")
        pos[o] = np.arange(1, n + 1)
        if np.any(pos < 0):
            raise ValueError("order must be a permutation of 0..n-1")
        return cls(pos)

    @property
    def n(self) -> int:
        return int(self.positions.size)

    def reversed(self) -> "LinearArrangement":
        return LinearArrangement(self.n + 1 - self.positions)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearArrangement):
            return NotImplemented
        return self.positions.shape == other.positions.shape and bool(
            np.all(self.positions == other.positions))

    def __repr__(self) -> str:
        return f"LinearArrangement(order={self.order.tolist()!r})"


@dataclass(frozen=True, eq=False)
class CutwidthProfile:
    """Edge cuts of an arrangement: cuts[c-1] counts edges crossing the gap
    between positions c and c+1. argmax_location is the smallest c attaining
    max_cut (None when there are no gaps)."""

    cuts: np.ndarray
    max_cut: int
    argmax_location: int | None


def _profile(graph: Graph, arrangement: LinearArrangement) -> CutwidthProfile:
    n = graph.n_nodes
    if n < 2:
        return CutwidthProfile(np.empty(0, dtype=np.int64), 0, None)
    pos = arrangement.positions
    e = graph.edges
    d = np.zeros(n + 1, dtype=np.int64)
    if e.size:
        a = pos[e[:, 0]]
        b = pos[e[:, 1]]
        np.add.at(d, np.minimum(a, b), 1)
        np.add.at(d, np.maximum(a, b), -1)
    cuts = np.cumsum(d)[1:n]
    return CutwidthProfile(cuts, int(cuts.max()), int(np.argmax(cuts)) + 1)


def cutwidth_profile(graph: Graph, arrangement: LinearArrangement) -> CutwidthProfile:
    """Cut profile of an arrangement; requires at least two nodes."""
    if graph.n_nodes < 2:
        raise ValueError("cutwidth profile requires at least 2 nodes")
    if arrangement.n != graph.n_nodes:
        raise ValueError("arrangement size does not match graph")
    return _profile(graph, arrangement)


def p_sum_cost(graph: Graph, arrangement: LinearArrangement, p: int = 1) -> float:
    """(sum over edges of |pos(u) - pos(v)|**p) ** (1/p), each edge counted once."""
    if arrangement.n != graph.n_nodes:
        raise ValueError("arrangement size does not match graph")
    p = int(p)
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    e = graph.edges
    if e.size == 0:
        return 0.0
    d = np.abs(arrangement.positions[e[:, 0]] - arrangement.positions[e[:, 1]])
    if p == 1:
        return float(d.sum())
    return float(np.sum(d.astype(np.float64) ** p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# degree and random orderings

def order_random(graph: Graph, seed: int = 0) -> LinearArrangement:
    """Uniformly random arrangement."""
    rng = np.random.default_rng(seed)
    return LinearArrangement.from_order(rng.permutation(graph.n_nodes))


def order_most_neighbors(graph: Graph) -> LinearArrangement:
    """Nodes by descending degree, ties by ascending id."""
    n = graph.n_nodes
    return LinearArrangement.from_order(np.lexsort((np.arange(n), -graph.degree)))


def order_least_neighbors(graph: Graph) -> LinearArrangement:
    """Nodes by ascending degree, ties by ascending id."""
    n = graph.n_nodes
    return LinearArrangement.from_order(np.lexsort((np.arange(n), graph.degree)))


# ---------------------------------------------------------------------------
# eigen-score ordering

def _principal_vector(a: sp.csr_matrix) -> np.ndarray:
    """Eigenvector of the largest adjacency eigenvalue; dense for small
    matrices, Lanczos with a deterministic start beyond."""
    m = a.shape[0]
    if m <= 64:
        _, vecs = np.linalg.eigh(a.toarray())
        return vecs[:, -1]
    v0 = np.full(m, 1.0 / math.sqrt(m))
    try:
        _, vecs = sp.linalg.eigsh(a, k=1, which="LA", v0=v0)
    except sp.linalg.ArpackNoConvergence as exc:
        raise RuntimeError("principal eigenvector did not converge") from exc
    return vecs[:, 0]


def order_lrsr(graph: Graph, recompute_every: int | None = None) -> LinearArrangement:
    """Greedy eigen-score ordering: repeatedly rank remaining nodes by the
    squared principal-eigenvector entry of the residual graph and remove the
    highest. Between recomputations the stale scores are reused; once the
    residual is edgeless the remaining ids are appended ascending. Ties break
    by ascending id.

    recompute_every defaults to 1 for n <= 2000, else ceil(n / 100).
    """
    n = graph.n_nodes
    if n == 0:
        raise ValueError("graph must be nonempty")
    if recompute_every is None:
        recompute_every = 1 if n <= 2000 else math.ceil(n / 100)
    if recompute_every < 1:
        raise ValueError(f"recompute_every must be >= 1, got {recompute_every}")
    a = graph.adjacency_matrix()
    active = np.ones(n, dtype=bool)
    ids = np.arange(n)
    out: list[int] = []
    remaining = n
    while remaining > 0:
        act_ids = ids[active]
        sub = a[act_ids][:, act_ids].tocsr()
        if sub.nnz == 0:
            out.extend(int(v) for v in act_ids)
            break
        # rounding collapses solver jitter so symmetric nodes tie exactly
        scores = np.round(_principal_vector(sub) ** 2, 12)
        rank = act_ids[np.lexsort((act_ids, -scores))]
        for v in rank[:min(recompute_every, remaining)]:
            active[v] = False
            out.append(int(v))
            remaining -= 1
    return LinearArrangement.from_order(out)


# ---------------------------------------------------------------------------
# spectral sequencing and clustering

def _laplacian(graph: Graph) -> sp.csr_matrix:
    a = graph.adjacency_matrix()
    return sp.diags(graph.degree.astype(np.float64)) - a


def _fiedler_vector(lap: sp.csr_matrix, tol: float = 1e-10,
                    max_iter: int = 50000) -> np.ndarray:
    """Eigenvector of the second-smallest Laplacian eigenvalue of a connected
    graph, by inverse power iteration (sparse LU of L + sigma*I) deflated
    against the constant vector. Deterministic start; one perturbed retry
    before giving up."""
    n = lap.shape[0]
    sigma = 1e-8 * max(float(lap.diagonal().max()), 1.0)
    lu = sp.linalg.splu((lap + sigma * sp.identity(n, format="csr")).tocsc())
    for attempt in range(2):
        x = np.arange(n, dtype=np.float64)
        if attempt:
            x[0] += n
        x -= x.mean()
        x /= np.linalg.norm(x)
        for _ in range(max_iter):
            y = lu.solve(x)
            y -= y.mean()
            nrm = float(np.linalg.norm(y))
            if nrm == 0.0:
                break
            y /= nrm
            ly = lap @ y
            theta = float(y @ ly)
            if np.linalg.norm(ly - theta * y) <= tol * max(abs(theta), 1.0):
                return y
            x = y
    raise RuntimeError(f"Fiedler iteration did not converge in {max_iter} iterations")


def _csr_components(lap: sp.csr_matrix) -> list[np.ndarray]:
    """Connected components of a Laplacian's off-diagonal pattern, ordered by
    smallest member id."""
    n = lap.shape[0]
    indptr, indices, data = lap.indptr, lap.indices, lap.data
    seen = np.zeros(n, dtype=bool)
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        comp = [s]
        while stack:
            v = stack.pop()
            for j in range(indptr[v], indptr[v + 1]):
                w = int(indices[j])
                if w != v and data[j] != 0.0 and not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        comps.append(np.array(sorted(comp), dtype=np.int64))
    return comps


def _spectral_order(lap: sp.csr_matrix) -> np.ndarray:
    """Order nodes of a weighted Laplacian by Fiedler value per component.

    Components are laid out by smallest member id. Within a component nodes
    sort by (Fiedler value, id); the orientation is normalized so the first
    node has the smaller id of the two ends."""
    out: list[int] = []
    for comp in _csr_components(lap):
        if comp.size <= 2:
            out.extend(int(v) for v in comp)
            continue
        sub = lap[comp][:, comp].tocsr()
        f = _fiedler_vector(sub)
        seq = comp[np.lexsort((comp, f))]
        if seq[0] > seq[-1]:
            seq = seq[::-1]
        out.extend(int(v) for v in seq)
    return np.array(out, dtype=np.int64)


def spectral_sequencing(graph: Graph) -> LinearArrangement:
    """Arrangement by ascending Fiedler-vector value, per connected component.

    Ties break by ascending id and each component's orientation is normalized
    so its first node id is smaller than its last."""
    if graph.n_nodes == 0:
        raise ValueError("graph must be nonempty")
    return LinearArrangement.from_order(_spectral_order(_laplacian(graph)))


def _kmeans_once(x: np.ndarray, k: int, rng: np.random.Generator,
                 n_iter: int) -> tuple[np.ndarray, float]:
    """One k-means run with k-means++ init; empty clusters are repaired by
    reseeding them on the farthest point of the largest cluster. Returns
    (labels, inertia)."""
    n = x.shape[0]
    cent = np.empty((k, x.shape[1]), dtype=np.float64)
    cent[0] = x[int(rng.integers(n))]
    d2 = ((x - cent[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        s = float(d2.sum())
        if s > 0.0:
            idx = int(rng.choice(n, p=d2 / s))
        else:
            idx = int(rng.integers(n))
        cent[c] = x[idx]
        d2 = np.minimum(d2, ((x - cent[c]) ** 2).sum(axis=1))
    labels = None
    for _ in range(n_iter):
        dist = ((x[:, None, :] - cent[None, :, :]) ** 2).sum(axis=2)
        new = dist.argmin(axis=1)
        counts = np.bincount(new, minlength=k)
        for c in np.nonzero(counts == 0)[0]:
            donor = int(counts.argmax())
            members = np.nonzero(new == donor)[0]
            far = members[int(((x[members] - cent[donor]) ** 2).sum(axis=1).argmax())]
            new[far] = c
            counts = np.bincount(new, minlength=k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for c in range(k):
            cent[c] = x[labels == c].mean(axis=0)
    dist = ((x[:, None, :] - cent[None, :, :]) ** 2).sum(axis=2)
    inertia = float(dist[np.arange(n), labels].sum())
    return labels.astype(np.int64), inertia


def _kmeans(x: np.ndarray, k: int, rng: np.random.Generator,
            n_iter: int = 100, n_init: int = 4) -> np.ndarray:
    """Best of n_init seeded k-means runs by within-cluster sum of squares.
    A single unlucky init can split along a high-variance noise direction,
    so restarts are cheap insurance."""
    best_labels, best_inertia = _kmeans_once(x, k, rng, n_iter)
    for _ in range(n_init - 1):
        labels, inertia = _kmeans_once(x, k, rng, n_iter)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels


def spectral_clustering(graph: Graph, k: int, seed: int = 0) -> np.ndarray:
    """Cluster labels 0..k-1 from k-means on the bottom-k Laplacian
    eigenvectors. Every cluster is nonempty. Dense solver up to 2000 nodes,
    shift-invert Lanczos beyond."""
    n = graph.n_nodes
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    if k == 1:
        return np.zeros(n, dtype=np.int64)
    if k == n:
        return np.arange(n, dtype=np.int64)
    lap = _laplacian(graph)
    # the full k-dimensional bottom eigenspace is required when the graph is
    # disconnected (the nullspace holds the component indicators); the
    # constant direction adds nothing to pairwise distances
    if n <= 2000:
        _, vecs = np.linalg.eigh(lap.toarray())
        emb = vecs[:, :k]
    else:
        vals, vecs = sp.linalg.eigsh(lap, k=k, sigma=-1e-3, which="LM")
        emb = vecs[:, np.argsort(vals)]
    return _kmeans(emb, k, np.random.default_rng(seed))


# ---------------------------------------------------------------------------
# annealing search

@njit(cache=True, nogil=True)
def _max_cut_kernel(edges_u, edges_v, pos, diff):
    n = pos.shape[0]
    for i in range(n + 1):
        diff[i] = 0
    for k in range(edges_u.shape[0]):
        a = pos[edges_u[k]]
        b = pos[edges_v[k]]
        if a < b:
            diff[a] += 1
            diff[b] -= 1
        else:
            diff[b] += 1
            diff[a] -= 1
    best = np.int64(0)
    run = np.int64(0)
    for c in range(1, n):
        run += diff[c]
        if run > best:
            best = run
    return best


@njit(cache=True, nogil=True)
def _psum1_kernel(edges_u, edges_v, pos):
    total = np.int64(0)
    for k in range(edges_u.shape[0]):
        d = pos[edges_u[k]] - pos[edges_v[k]]
        total += d if d > 0 else -d
    return total


@njit(cache=True, nogil=True)
def _anneal_psum1(indptr, indices, edges_u, edges_v, pos, t0, cooling, t_floor,
                  steps_per_temp, max_steps, rng):
    n = pos.shape[0]
    diff = np.zeros(n + 1, dtype=np.int64)
    cost = _psum1_kernel(edges_u, edges_v, pos)
    best_cost = cost
    best_pos = pos.copy()
    best_max = _max_cut_kernel(edges_u, edges_v, pos, diff)
    temp = t0
    steps = 0
    while temp > t_floor:
        for _ in range(steps_per_temp):
            if max_steps >= 0 and steps >= max_steps:
                return best_pos, best_cost, best_max
            steps += 1
            u = int(rng.integers(0, n))
            v = int(rng.integers(0, n))
            if u == v:
                continue
            pu = pos[u]
            pv = pos[v]
            delta = np.int64(0)
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if w == v:
                    continue
                pw = pos[w]
                a = pv - pw
                b = pu - pw
                delta += (a if a > 0 else -a) - (b if b > 0 else -b)
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if w == u:
                    continue
                pw = pos[w]
                a = pu - pw
                b = pv - pw
                delta += (a if a > 0 else -a) - (b if b > 0 else -b)
            if delta <= 0 or rng.random() < np.exp(-delta / temp):
                pos[u] = pv
                pos[v] = pu
                cost += delta
                if cost < best_cost:
                    best_cost = cost
                    best_pos[:] = pos
                    best_max = _max_cut_kernel(edges_u, edges_v, pos, diff)
                elif cost == best_cost:
                    mc = _max_cut_kernel(edges_u, edges_v, pos, diff)
                    if mc < best_max:
                        best_max = mc
                        best_pos[:] = pos
        temp *= cooling
    return best_pos, best_cost, best_max


@njit(cache=True, nogil=True)
def _anneal_psum_p(indptr, indices, edges_u, edges_v, pos, p, t0, cooling,
                   t_floor, steps_per_temp, max_steps, rng):
    n = pos.shape[0]
    cost = 0.0
    for k in range(edges_u.shape[0]):
        d = pos[edges_u[k]] - pos[edges_v[k]]
        cost += float(d if d > 0 else -d) ** p
    best_cost = cost
    best_pos = pos.copy()
    temp = t0
    steps = 0
    while temp > t_floor:
        for _ in range(steps_per_temp):
            if max_steps >= 0 and steps >= max_steps:
                return best_pos, best_cost
            steps += 1
            u = int(rng.integers(0, n))
            v = int(rng.integers(0, n))
            if u == v:
                continue
            pu = pos[u]
            pv = pos[v]
            delta = 0.0
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if w == v:
                    continue
                pw = pos[w]
                a = pv - pw
                b = pu - pw
                delta += float(a if a > 0 else -a) ** p - float(b if b > 0 else -b) ** p
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if w == u:
                    continue
                pw = pos[w]
                a = pu - pw
                b = pv - pw
                delta += float(a if a > 0 else -a) ** p - float(b if b > 0 else -b) ** p
            if delta <= 0.0 or rng.random() < np.exp(-delta / temp):
                pos[u] = pv
                pos[v] = pu
                cost += delta
                if cost < best_cost:
                    best_cost = cost
                    best_pos[:] = pos
        temp *= cooling
    return best_pos, best_cost


@njit(cache=True, nogil=True)
def _anneal_maxcut(edges_u, edges_v, pos, t0, cooling, t_floor, steps_per_temp,
                   max_steps, rng):
    n = pos.shape[0]
    diff = np.zeros(n + 1, dtype=np.int64)
    cur = _max_cut_kernel(edges_u, edges_v, pos, diff)
    best = cur
    best_pos = pos.copy()
    temp = t0
    steps = 0
    while temp > t_floor:
        for _ in range(steps_per_temp):
            if max_steps >= 0 and steps >= max_steps:
                return best_pos, best
            steps += 1
            u = int(rng.integers(0, n))
            v = int(rng.integers(0, n))
            if u == v:
                continue
            pu = pos[u]
            pv = pos[v]
            pos[u] = pv
            pos[v] = pu
            cand = _max_cut_kernel(edges_u, edges_v, pos, diff)
            delta = cand - cur
            if delta <= 0 or rng.random() < np.exp(-delta / temp):
                cur = cand
                if cur < best:
                    best = cur
                    best_pos[:] = pos
            else:
                pos[u] = pu
                pos[v] = pv
        temp *= cooling
    return best_pos, best


@dataclass(frozen=True)
class AnnealConfig:
    """Simulated-annealing swap search settings.

    objective 'p_sum' minimizes the sum of |position differences|**p
    (incremental delta per swap); 'max_cutwidth' minimizes the profile
    maximum directly (full recount per proposal, much slower). t0 defaults
    to the mean edge length of the input arrangement, steps_per_temp to
    100 * n_nodes, t_floor to 1e-3 * t0. max_steps caps total proposals.
    """

    objective: str = "p_sum"
    p: int = 1
    t0: float | None = None
    cooling: float = 0.97
    steps_per_temp: int | None = None
    t_floor: float | None = None
    max_steps: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.objective not in ("p_sum", "max_cutwidth"):
            raise ValueError(f"unknown objective {self.objective!r}")
        if int(self.p) < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not 0.0 < self.cooling < 1.0:
            raise ValueError(f"cooling must be in (0, 1), got {self.cooling}")
        if self.t0 is not None and not self.t0 > 0:
            raise ValueError(f"t0 must be > 0, got {self.t0}")
        if self.t_floor is not None and not self.t_floor > 0:
            raise ValueError(f"t_floor must be > 0, got {self.t_floor}")
        if self.steps_per_temp is not None and self.steps_per_temp < 1:
            raise ValueError("steps_per_temp must be >= 1")
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")


def local_search_swaps(graph: Graph, arrangement: LinearArrangement,
                       config: AnnealConfig | None = None) -> LinearArrangement:
    """Anneal position swaps and return the best arrangement visited
    (the input counts as visited, so the result never costs more).

    Under the p_sum objective with p=1, equal-cost improvements are
    tie-broken toward lower max cutwidth.
    """
    cfg = config if config is not None else AnnealConfig()
    n = graph.n_nodes
    if arrangement.n != n:
        raise ValueError("arrangement size does not match graph")
    if n < 2 or graph.n_edges == 0 or cfg.max_steps == 0:
        return LinearArrangement(arrangement.positions)
    pos = arrangement.positions.copy()
    eu = np.ascontiguousarray(graph.edges[:, 0])
    ev = np.ascontiguousarray(graph.edges[:, 1])
    mean_len = float(np.abs(pos[eu] - pos[ev]).sum()) / graph.n_edges
    t0 = cfg.t0 if cfg.t0 is not None else mean_len
    t_floor = cfg.t_floor if cfg.t_floor is not None else 1e-3 * t0
    spt = cfg.steps_per_temp if cfg.steps_per_temp is not None else 100 * n
    max_steps = -1 if cfg.max_steps is None else int(cfg.max_steps)
    rng = np.random.default_rng(cfg.seed)
    if cfg.objective == "max_cutwidth":
        best_pos, _ = _anneal_maxcut(eu, ev, pos, t0, cfg.cooling, t_floor,
                                     spt, max_steps, rng)
    elif cfg.p == 1:
        best_pos, _, _ = _anneal_psum1(graph.indptr, graph.indices, eu, ev, pos,
                                       t0, cfg.cooling, t_floor, spt, max_steps, rng)
    else:
        best_pos, _ = _anneal_psum_p(graph.indptr, graph.indices, eu, ev, pos,
                                     float(cfg.p), t0, cfg.cooling, t_floor,
                                     spt, max_steps, rng)
    return LinearArrangement(best_pos)


# ---------------------------------------------------------------------------
# clustered pipeline

@dataclass(frozen=True)
class MCMConfig:
    """Settings for the clustered ordering pipeline. n_clusters defaults to
    ceil(sqrt(n)/2) clipped to [1, n]. The anneal settings apply to both the
    per-cluster and the global refinement stages (stage seeds are derived
    from ``seed``)."""

    n_clusters: int | None = None
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    seed: int = 0

    def __post_init__(self):
        if self.n_clusters is not None and self.n_clusters < 1:
            raise ValueError("n_clusters must be >= 1")


def _seed_int(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, np.uint64)[0])


def order_mcm(graph: Graph, config: MCMConfig | None = None
              ) -> tuple[LinearArrangement, CutwidthProfile]:
    """Cluster, sequence, and anneal an arrangement; returns it with its
    cut profile.

    Pipeline: spectral clustering into k groups, spectral sequencing of the
    cluster quotient graph (edge weights = cross-edge counts), spectral
    sequencing plus annealing inside each cluster, concatenation in quotient
    order, then a global annealing pass. Deterministic for a given config.
    """
    cfg = config if config is not None else MCMConfig()
    n = graph.n_nodes
    if n == 0:
        raise ValueError("graph must be nonempty")
    k = cfg.n_clusters if cfg.n_clusters is not None else max(1, math.ceil(math.sqrt(n) / 2))
    k = min(k, n)
    root = np.random.SeedSequence(cfg.seed)
    ss_cluster, ss_local, ss_global = root.spawn(3)

    labels = (spectral_clustering(graph, k, seed=_seed_int(ss_cluster))
              if k > 1 else np.zeros(n, dtype=np.int64))

    if k > 1:
        w = np.zeros((k, k), dtype=np.float64)
        for u, v in graph.edges:
            a, b = labels[u], labels[v]
            if a != b:
                w[a, b] += 1.0
                w[b, a] += 1.0
        lap_q = sp.csr_matrix(np.diag(w.sum(axis=1)) - w)
        cluster_order = _spectral_order(lap_q)
    else:
        cluster_order = np.array([0], dtype=np.int64)

    local_seeds = ss_local.spawn(k)
    pieces: list[np.ndarray] = []
    for c in cluster_order:
        members = np.nonzero(labels == c)[0]
        sub, ids = graph.induced_subgraph(members)
        la = spectral_sequencing(sub)
        la = local_search_swaps(sub, la,
                                replace(cfg.anneal, seed=_seed_int(local_seeds[int(c)])))
        pieces.append(ids[la.order])
    init = LinearArrangement.from_order(np.concatenate(pieces))

    final = local_search_swaps(graph, init,
                               replace(cfg.anneal, seed=_seed_int(ss_global)))
    return final, _profile(graph, final)


# ---------------------------------------------------------------------------
# exact reference

def order_exact_min_cutwidth(graph: Graph) -> tuple[LinearArrangement, int]:
    """Exact minimum max-cutwidth by subset dynamic programming (n <= 10).

    Returns the lexicographically smallest optimal node order and the
    optimal cutwidth.
    """
    n = graph.n_nodes
    if n == 0:
        raise ValueError("graph must be nonempty")
    if n > 10:
        raise ValueError(f"exact search is limited to 10 nodes, got {n}")
    adj_mask = [0] * n
    for u, v in graph.edges:
        adj_mask[u] |= 1 << v
        adj_mask[v] |= 1 << u
    deg = graph.degree
    full = (1 << n) - 1
    # cut[S] = edges between S and its complement
    cut = [0] * (full + 1)
    for s in range(1, full + 1):
        v = (s & -s).bit_length() - 1
        prev = s & (s - 1)
        cut[s] = cut[prev] + int(deg[v]) - 2 * (adj_mask[v] & prev).bit_count()
    # togo[S] = min over completions of the max cut after prefix S
    togo = [0] * (full + 1)
    for s in range(full - 1, -1, -1):
        best = 1 << 30
        rem = full & ~s
        while rem:
            vbit = rem & -rem
            t = s | vbit
            cand = cut[t] if cut[t] > togo[t] else togo[t]
            if cand < best:
                best = cand
            rem ^= vbit
        togo[s] = best
    optimum = togo[0]
    order = []
    s = 0
    incurred = 0
    for _ in range(n):
        for v in range(n):
            if s >> v & 1:
                continue
            t = s | (1 << v)
            if max(incurred, cut[t], togo[t]) == optimum:
                order.append(v)
                s = t
                incurred = max(incurred, cut[t])
                break
    return LinearArrangement.from_order(order), optimum


# ---------------------------------------------------------------------------
# serialization

def save_arrangement(arrangement: LinearArrangement, path: str,
                     header=()) -> None:
    """Write one node id per line; line i holds the node at position i."""
    lines = [f"# {h}" for h in header]
    lines.extend(str(int(v)) for v in arrangement.order)
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def load_arrangement(path: str, n_nodes: int | None = None) -> LinearArrangement:
    """Read an arrangement written by save_arrangement; '#' comments and blank
    lines are skipped. Validates the bijection and, if given, the node count."""
    order: list[int] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            s = raw.strip()
            if not s or s.startswith("#"):
                continue
            try:
                order.append(int(s))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer node id {s!r}") from None
    if n_nodes is not None and len(order) != n_nodes:
        raise ValueError(f"{path}: expected {n_nodes} nodes, got {len(order)}")
    return LinearArrangement.from_order(order)
