"""Exact event-driven SIS simulation with priority-planned treatment.

The contagion is the continuous-time Markov process in which a healthy node
with k infected neighbors becomes infected at rate beta*k and an infected
node recovers at rate delta, plus rho if it currently holds a treatment
resource. Resources follow the priority rule: the b(t) infected nodes with
the smallest positions in a fixed linear arrangement are treated, fewer when
fewer are infected. Simulation is exact (no time discretization); rates are
piecewise constant between events, so reallocating at every event reproduces
the continuous rule.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .arrangement import LinearArrangement
from .graph import Graph

__all__ = [
    "BudgetSchedule",
    "DiffusionParams",
    "Strategy",
    "EpidemicState",
    "Trajectory",
    "EnsembleSummary",
    "allocate_resources",
    "count_contagious_edges",
    "simulate",
    "run_ensemble",
]

INFECTION = 0
RECOVERY = 1


class BudgetSchedule:
    """Piecewise-constant nonnegative integer budget b(t).

    ``values[i]`` applies on ``[times[i], times[i+1])``; the last value holds
    forever. ``times[0]`` must be 0.
    """

    __slots__ = ("times", "values")

    def __init__(self, constant: int):
        constant = int(constant)
        if constant < 0:
            raise ValueError(f"budget must be >= 0, got {constant}")
        self.times = np.array([0.0])
        self.values = np.array([constant], dtype=np.int64)

    @classmethod
    def piecewise(cls, times, values) -> "BudgetSchedule":
        times = np.asarray(times, dtype=np.float64)
        values = np.asarray(values)
        if times.ndim != 1 or times.shape != values.shape or times.size == 0:
            raise ValueError("times and values must be equal-length 1-d sequences")
        if times[0] != 0.0:
            raise ValueError(f"schedule must start at time 0, got {times[0]}")
        if np.any(np.diff(times) <= 0):
            raise ValueError("schedule times must be strictly increasing")
        if not np.issubdtype(values.dtype, np.integer):
            rounded = np.rint(values)
            if np.any(rounded != values):
                raise ValueError("budget values must be integers")
            values = rounded
        if np.any(values < 0):
            raise ValueError("budget values must be >= 0")
        out = cls.__new__(cls)
        out.times = times.copy()
        out.values = values.astype(np.int64)
        return out

    def at(self, t: float) -> int:
        if t < 0:
            raise ValueError(f"time must be >= 0, got {t}")
        idx = int(np.searchsorted(self.times, t, side="right")) - 1
        return int(self.values[idx])

    def __eq__(self, other):
        if not isinstance(other, BudgetSchedule):
            return NotImplemented
        return (np.array_equal(self.times, other.times)
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        if self.times.size == 1:
            return f"BudgetSchedule({int(self.values[0])})"
        return (f"BudgetSchedule.piecewise({self.times.tolist()}, "
                f"{self.values.tolist()})")


@dataclass(frozen=True)
class DiffusionParams:
    """SIS rates and the treatment budget schedule.

    Parameters
    ----------
    beta : float
        Infection rate per contagious edge, >= 0.
    delta : float
        Spontaneous recovery rate, > 0.
    rho : float, optional
        Added recovery rate per resource, >= 0.
    budget : BudgetSchedule or int, optional
        Treatment budget b(t); an int means a constant schedule.

    The effective spreading rate ``r = beta/delta`` and resource efficiency
    ``e = rho/delta`` are exposed read-only.
    """

    beta: float
    delta: float
    rho: float = 0.0
    budget: BudgetSchedule | int = 0

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not self.rho >= 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if not isinstance(self.budget, BudgetSchedule):
            object.__setattr__(self, "budget", BudgetSchedule(self.budget))

    @property
    def r(self) -> float:
        return self.beta / self.delta

    @property
    def e(self) -> float:
        return self.rho / self.delta


@dataclass(frozen=True)
class Strategy:
    """Resource-allocation strategy: positional priority or no treatment."""

    kind: str
    arrangement: LinearArrangement | None = None

    def __post_init__(self):
        if self.kind not in ("priority", "none"):
            raise ValueError(f"kind must be 'priority' or 'none', got {self.kind!r}")
        if self.kind == "priority" and self.arrangement is None:
            raise ValueError("priority strategy requires an arrangement")
        if self.kind == "none" and self.arrangement is not None:
            raise ValueError("'none' strategy takes no arrangement")

    @classmethod
    def priority(cls, arrangement: LinearArrangement) -> "Strategy":
        return cls("priority", arrangement)

    @classmethod
    def none(cls) -> "Strategy":
        return cls("none")


class EpidemicState:
    """Infection and resource state with cached counts.

    Caches the per-node infected-neighbor counts (infection pressure
    multipliers), the infected count, and the contagious-edge count; all are
    recomputed from the infection vector on construction.
    """

    __slots__ = ("infected", "resources", "infected_count",
                 "contagious_edge_count", "pressure")

    def __init__(self, graph: Graph, infected, resources=None):
        infected = np.asarray(infected, dtype=bool).copy()
        if infected.shape != (graph.n_nodes,):
            raise ValueError(
                f"infected vector has shape {infected.shape}, "
                f"expected ({graph.n_nodes},)")
        if resources is None:
            resources = np.zeros(graph.n_nodes, dtype=bool)
        else:
            resources = np.asarray(resources, dtype=bool).copy()
            if resources.shape != infected.shape:
                raise ValueError("resources vector must match infected in length")
            if np.any(resources & ~infected):
                raise ValueError("resource placed on a healthy node")
        self.infected = infected
        self.resources = resources
        a = graph.adjacency_matrix()
        self.pressure = np.asarray(a @ infected.astype(np.int64))
        self.infected_count = int(infected.sum())
        self.contagious_edge_count = int(self.pressure[~infected].sum())

    @classmethod
    def all_infected(cls, graph: Graph) -> "EpidemicState":
        return cls(graph, np.ones(graph.n_nodes, dtype=bool))

    def validate(self, graph: Graph) -> None:
        """Recount every cached quantity from scratch; raise on mismatch."""
        fresh = EpidemicState(graph, self.infected, self.resources)
        if (self.infected_count != fresh.infected_count
                or self.contagious_edge_count != fresh.contagious_edge_count
                or not np.array_equal(self.pressure, fresh.pressure)):
            raise AssertionError("cached state counts disagree with recount")


def count_contagious_edges(graph: Graph, infected) -> int:
    """Number of edges joining an infected node to a healthy one."""
    infected = np.asarray(infected, dtype=bool)
    if infected.shape != (graph.n_nodes,):
        raise ValueError(
            f"infected vector has shape {infected.shape}, "
            f"expected ({graph.n_nodes},)")
    if graph.edges.shape[0] == 0:
        return 0
    u = graph.edges[:, 0]
    v = graph.edges[:, 1]
    return int(np.count_nonzero(infected[u] != infected[v]))


def allocate_resources(state: EpidemicState, order: LinearArrangement,
                       b: int) -> np.ndarray:
    """Resource vector under positional priority.

    Places exactly ``min(b, infected_count)`` resources on the infected nodes
    with the smallest positions in ``order``.
    """
    if b < 0:
        raise ValueError(f"budget must be >= 0, got {b}")
    n = state.infected.shape[0]
    if order.n != n:
        raise ValueError(
            f"arrangement covers {order.n} nodes, state has {n}")
    out = np.zeros(n, dtype=bool)
    if b == 0 or state.infected_count == 0:
        return out
    infected_ids = np.flatnonzero(state.infected)
    take = min(int(b), infected_ids.size)
    by_position = infected_ids[np.argsort(order.positions[infected_ids])]
    out[by_position[:take]] = True
    return out


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One simulation run: event log, outcome, and a sampled count curve.

    ``curve_counts[j]`` is the infected count at time ``curve_times[j]``
    (right-continuous, so a sample instant that coincides with an event sees
    the post-event count). The grid is ``j*sample_dt`` up to the first
    multiple at or past the end of the run (extinction time, or the horizon
    when censored).
    """

    times: np.ndarray
    nodes: np.ndarray
    kinds: np.ndarray
    extinction_time: float | None
    horizon: float
    peak_infected: int
    curve_times: np.ndarray
    curve_counts: np.ndarray

    @property
    def censored(self) -> bool:
        return self.extinction_time is None

    @property
    def n_events(self) -> int:
        return int(self.times.shape[0])


# ---------------------------------------------------------------------------
# event kernel

@njit(cache=True, nogil=True)
def _fw_add(tree, i, v):
    # 1-based Fenwick point update
    n = tree.shape[0] - 1
    while i <= n:
        tree[i] += v
        i += i & (-i)


@njit(cache=True, nogil=True)
def _fw_kth(tree, k, log_n):
    # smallest 1-based index whose prefix sum reaches k (k >= 1)
    n = tree.shape[0] - 1
    pos = 0
    bit = 1 << log_n
    while bit > 0:
        nxt = pos + bit
        if nxt <= n and tree[nxt] < k:
            pos = nxt
            k -= tree[nxt]
        bit >>= 1
    return pos + 1


@njit(cache=True, nogil=True)
def _sis_kernel(indptr, indices, pos2node, node_pos, use_priority,
                beta, delta, rho, bud_times, bud_values, infected0,
                horizon, sample_dt, grid_counts, check_every, rng):
    n = node_pos.shape[0]
    log_n = 0
    while (1 << (log_n + 1)) <= n:
        log_n += 1
    grid_max = grid_counts.shape[0]

    # f_pos: 1 at the position of every infected node (kth-smallest lookup
    # serves both uniform recovery and the treated prefix).
    # f_press: infected-neighbor count at every healthy node; its total is
    # the contagious-edge count, making infection targeting exact.
    f_pos = np.zeros(n + 1, np.int64)
    f_press = np.zeros(n + 1, np.int64)
    infected = infected0.copy()
    pressure = np.zeros(n, np.int64)
    n_i = 0
    for v in range(n):
        if infected[v] == 1:
            n_i += 1
            _fw_add(f_pos, node_pos[v], 1)
            for e in range(indptr[v], indptr[v + 1]):
                pressure[indices[e]] += 1
    e_is = 0
    for v in range(n):
        if infected[v] == 0 and pressure[v] > 0:
            e_is += pressure[v]
            _fw_add(f_press, v + 1, pressure[v])

    cap = 1024
    ev_t = np.empty(cap, np.float64)
    ev_n = np.empty(cap, np.int32)
    ev_k = np.empty(cap, np.uint8)
    m = 0

    t = 0.0
    bi = 0
    nbud = bud_times.shape[0]
    g = 0
    peak = n_i
    status = 1  # censored unless extinction happens
    ext_t = -1.0
    since_check = 0

    while True:
        if n_i == 0:
            status = 0
            ext_t = t
            break
        while bi + 1 < nbud and bud_times[bi + 1] <= t:
            bi += 1
        if use_priority:
            b = bud_values[bi]
        else:
            b = 0
        n_treat = b if b < n_i else n_i
        rate_inf = beta * e_is
        rate_rec = delta * n_i
        rate_boost = rho * n_treat
        lam = rate_inf + rate_rec + rate_boost
        u = rng.random()
        while u == 0.0:
            u = rng.random()
        te = t + (-np.log1p(-u)) / lam
        if use_priority and bi + 1 < nbud:
            nb = bud_times[bi + 1]
            if nb < horizon and te > nb:
                # budget changes before the drawn event; rates are memoryless
                # so advancing the clock and redrawing is exact
                t = nb
                bi += 1
                continue
        if te >= horizon:
            t = horizon
            break

        w = rng.random() * lam
        if w < rate_inf:
            k = rng.integers(1, e_is + 1)
            v = _fw_kth(f_press, k, log_n) - 1
            while g < grid_max and g * sample_dt < te:
                grid_counts[g] = n_i
                g += 1
            deg_v = indptr[v + 1] - indptr[v]
            infected[v] = 1
            n_i += 1
            _fw_add(f_pos, node_pos[v], 1)
            _fw_add(f_press, v + 1, -pressure[v])
            e_is += deg_v - 2 * pressure[v]
            for e in range(indptr[v], indptr[v + 1]):
                w2 = indices[e]
                pressure[w2] += 1
                if infected[w2] == 0:
                    _fw_add(f_press, w2 + 1, 1)
            kind = np.uint8(0)
            if n_i > peak:
                peak = n_i
        else:
            if w < rate_inf + rate_rec:
                k = rng.integers(1, n_i + 1)
            else:
                k = rng.integers(1, n_treat + 1)
            p = _fw_kth(f_pos, k, log_n)
            v = pos2node[p - 1]
            while g < grid_max and g * sample_dt < te:
                grid_counts[g] = n_i
                g += 1
            deg_v = indptr[v + 1] - indptr[v]
            infected[v] = 0
            n_i -= 1
            _fw_add(f_pos, node_pos[v], -1)
            _fw_add(f_press, v + 1, pressure[v])
            e_is += 2 * pressure[v] - deg_v
            for e in range(indptr[v], indptr[v + 1]):
                w2 = indices[e]
                pressure[w2] -= 1
                if infected[w2] == 0:
                    _fw_add(f_press, w2 + 1, -1)
            kind = np.uint8(1)
        t = te

        if m == cap:
            cap2 = cap * 2
            nt = np.empty(cap2, np.float64)
            nn = np.empty(cap2, np.int32)
            nk = np.empty(cap2, np.uint8)
            nt[:m] = ev_t
            nn[:m] = ev_n
            nk[:m] = ev_k
            ev_t, ev_n, ev_k = nt, nn, nk
            cap = cap2
        ev_t[m] = te
        ev_n[m] = v
        ev_k[m] = kind
        m += 1

        if check_every > 0:
            since_check += 1
            if since_check >= check_every:
                since_check = 0
                ni2 = 0
                eis2 = 0
                ok = True
                for x in range(n):
                    pr = 0
                    for e in range(indptr[x], indptr[x + 1]):
                        pr += infected[indices[e]]
                    if pr != pressure[x]:
                        ok = False
                        break
                    if infected[x] == 1:
                        ni2 += 1
                    else:
                        eis2 += pr
                if not ok or ni2 != n_i or eis2 != e_is:
                    status = 2
                    break

    end = ext_t if status == 0 else t
    while g < grid_max and (g == 0 or (g - 1) * sample_dt < end):
        grid_counts[g] = n_i
        g += 1

    return status, ext_t, ev_t[:m].copy(), ev_n[:m].copy(), ev_k[:m].copy(), g, peak


def _coerce_initial(graph: Graph, initial) -> EpidemicState:
    if isinstance(initial, EpidemicState):
        if initial.infected.shape != (graph.n_nodes,):
            raise ValueError(
                f"initial state covers {initial.infected.shape[0]} nodes, "
                f"graph has {graph.n_nodes}")
        return initial
    if isinstance(initial, str):
        if initial in ("all-infected", "all_infected"):
            return EpidemicState.all_infected(graph)
        raise ValueError(f"unknown initial state {initial!r}")
    return EpidemicState(graph, initial)


def simulate(graph: Graph, params: DiffusionParams, strategy: Strategy,
             initial="all-infected", seed: int = 0,
             horizon: float | None = None, sample_dt: float | None = None,
             check_every: int = 0) -> Trajectory:
    """Run one exact event-driven SIS realization.

    Parameters
    ----------
    graph : Graph
        Contact network.
    params : DiffusionParams
        Rates and budget schedule.
    strategy : Strategy
        Treatment rule; under ``priority`` the b(t) infected nodes earliest
        in the arrangement are treated between consecutive events.
    initial : EpidemicState, bool vector, or "all-infected"
        Starting infection pattern. Any resources in an explicit state are
        validated and then superseded by the strategy's own allocation.
    seed : int
        Generator seed; identical inputs give a bit-identical trajectory.
    horizon : float, optional
        Censoring time, default ``50 * n / delta``.
    sample_dt : float, optional
        Count-curve resolution, default ``horizon / 200``.
    check_every : int, optional
        If > 0, recount all cached rates from scratch every that many events
        and raise RuntimeError on any disagreement.

    Returns
    -------
    Trajectory
    """
    n = graph.n_nodes
    state = _coerce_initial(graph, initial)
    if strategy.kind == "priority":
        arr = strategy.arrangement
        if arr.n != n:
            raise ValueError(
                f"arrangement covers {arr.n} nodes, graph has {n}")
        node_pos = arr.positions.astype(np.int64)
        pos2node = arr.order.astype(np.int64)
        use_priority = True
    else:
        node_pos = np.arange(1, n + 1, dtype=np.int64)
        pos2node = np.arange(n, dtype=np.int64)
        use_priority = False
    if horizon is None:
        horizon = 50.0 * max(n, 1) / params.delta
    if not horizon > 0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    if sample_dt is None:
        sample_dt = horizon / 200.0
    if not sample_dt > 0:
        raise ValueError(f"sample_dt must be > 0, got {sample_dt}")

    grid_max = int(np.ceil(horizon / sample_dt)) + 2
    grid_counts = np.zeros(grid_max, dtype=np.int64)
    bud = params.budget
    rng = np.random.default_rng(seed)
    status, ext_t, ev_t, ev_n, ev_k, n_grid, peak = _sis_kernel(
        graph.indptr, graph.indices, pos2node, node_pos, use_priority,
        float(params.beta), float(params.delta), float(params.rho),
        bud.times, bud.values, state.infected.astype(np.uint8),
        float(horizon), float(sample_dt), grid_counts, int(check_every), rng)
    if status == 2:
        raise RuntimeError(
            "cached event rates diverged from a from-scratch recount")
    return Trajectory(
        times=ev_t, nodes=ev_n, kinds=ev_k,
        extinction_time=float(ext_t) if status == 0 else None,
        horizon=float(horizon), peak_infected=int(peak),
        curve_times=np.arange(n_grid) * sample_dt,
        curve_counts=grid_counts[:n_grid].copy())


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    """Aggregate over independent runs.

    ``extinction_times`` holds nan where a run was censored; the mean,
    median, and standard error are over ``min(tau, horizon)``, with
    ``n_censored`` reporting how many runs that caps. ``mean_curve``
    averages the per-run count curves on the common grid, with runs that
    went extinct early contributing zeros afterwards.
    """

    n_runs: int
    n_censored: int
    extinction_fraction: float
    mean_extinction_time: float
    median_extinction_time: float
    se_extinction_time: float
    mean_peak_infected: float
    extinction_times: np.ndarray
    curve_times: np.ndarray
    mean_curve: np.ndarray
    trajectories: list | None = None


def run_ensemble(graph: Graph, params: DiffusionParams, strategy: Strategy,
                 initial="all-infected", n_runs: int = 1, base_seed: int = 0,
                 horizon: float | None = None, sample_dt: float | None = None,
                 jobs: int = 1, check_every: int = 0,
                 keep_trajectories: bool = False) -> EnsembleSummary:
    """Run ``n_runs`` independent simulations with seeds ``base_seed + i``.

    Runs may execute on a thread pool (``jobs`` workers); results are
    identical to sequential execution because every run owns its seed and
    aggregation is order-independent.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    n = graph.n_nodes
    if horizon is None:
        horizon = 50.0 * max(n, 1) / params.delta
    if sample_dt is None:
        sample_dt = horizon / 200.0
    state = _coerce_initial(graph, initial)

    def one(i: int) -> Trajectory:
        return simulate(graph, params, strategy, state, base_seed + i,
                        horizon, sample_dt, check_every)

    if jobs > 1 and n_runs > 1:
        with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
            trajs = list(pool.map(one, range(n_runs)))
    else:
        trajs = [one(i) for i in range(n_runs)]

    taus = np.array([np.nan if tr.censored else tr.extinction_time
                     for tr in trajs])
    capped = np.where(np.isnan(taus), horizon, taus)
    n_censored = int(np.isnan(taus).sum())
    se = float(capped.std(ddof=1) / np.sqrt(n_runs)) if n_runs > 1 else 0.0

    grid_len = max(tr.curve_counts.shape[0] for tr in trajs)
    acc = np.zeros(grid_len, dtype=np.float64)
    for tr in trajs:
        c = tr.curve_counts
        acc[:c.shape[0]] += c
        # runs end early only by extinction, where the count stays 0
    return EnsembleSummary(
        n_runs=n_runs,
        n_censored=n_censored,
        extinction_fraction=1.0 - n_censored / n_runs,
        mean_extinction_time=float(capped.mean()),
        median_extinction_time=float(np.median(capped)),
        se_extinction_time=se,
        mean_peak_infected=float(np.mean([tr.peak_infected for tr in trajs])),
        extinction_times=taus,
        curve_times=np.arange(grid_len) * sample_dt,
        mean_curve=acc / n_runs,
        trajectories=trajs if keep_trajectories else None)
