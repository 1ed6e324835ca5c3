"""Closed-form extinction-time bounds and Monte Carlo threshold estimation.

The closed form: with a priority plan of maximum cutwidth C over a graph of
N nodes and maximum degree d, let eps = d*(1 + ln N)/C and
s = 1 + 2*sqrt(eps) + eps. Whenever rho > beta*C*s - delta the expected
extinction time from any state is at most N/(rho + delta - beta*C*s), which
also caps the resource efficiency needed for fast extinction at
e <= r*C*s - 1. The cruder planning rule of thumb is r*C/b_tot.

The empirical threshold estimator probes efficiencies by simulation and
bisects for the smallest e whose extinction fraction clears a success bar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .arrangement import LinearArrangement, cutwidth_profile
from .epidemic import DiffusionParams, Strategy, simulate
from .graph import Graph

__all__ = [
    "BoundReport",
    "ProbeSettings",
    "ProbeResult",
    "ThresholdEstimate",
    "ThresholdSearchError",
    "theorem1_bound",
    "solve_xi",
    "expected_threshold",
    "estimate_threshold",
]


@dataclass(frozen=True)
class BoundReport:
    """Evaluated rate condition and extinction-time bound.

    ``extinction_bound`` is finite exactly when ``condition_holds``;
    ``degenerate`` flags the edgeless case c_max = 0, where the condition is
    vacuous, eps is set to inf, and the bound is N/(rho + delta).
    """

    n: int
    d_max: int
    c_max: int
    beta: float
    delta: float
    rho: float
    b_tot: int
    epsilon: float
    condition_holds: bool
    extinction_bound: float
    corollary_threshold: float
    naive_threshold: float
    degenerate: bool


def theorem1_bound(n: int, d_max: int, c_max: int, beta: float, delta: float,
                   rho: float, b_tot: int = 1) -> BoundReport:
    """Evaluate the extinction-time bound for a plan of maximum cutwidth c_max.

    Parameters
    ----------
    n : int
        Number of nodes, >= 2.
    d_max : int
        Maximum degree, >= 1 (0 allowed only with c_max = 0).
    c_max : int
        Maximum cutwidth of the priority arrangement, >= 0.
    beta, delta, rho : float
        Infection, recovery, and per-resource treatment rates.
    b_tot : int, optional
        Budget used for the naive threshold r*c_max/b_tot; the closed form
        itself is stated for a unit budget.

    Returns
    -------
    BoundReport
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    if b_tot < 1:
        raise ValueError(f"b_tot must be >= 1, got {b_tot}")
    if c_max < 0:
        raise ValueError(f"c_max must be >= 0, got {c_max}")
    r = beta / delta
    if c_max == 0:
        if d_max < 0:
            raise ValueError(f"d_max must be >= 0, got {d_max}")
        return BoundReport(
            n=n, d_max=d_max, c_max=0, beta=beta, delta=delta, rho=rho,
            b_tot=b_tot, epsilon=math.inf, condition_holds=True,
            extinction_bound=n / (rho + delta), corollary_threshold=0.0,
            naive_threshold=0.0, degenerate=True)
    if d_max < 1:
        raise ValueError(f"d_max must be >= 1 when c_max >= 1, got {d_max}")
    eps = d_max * (1.0 + math.log(n)) / c_max
    s = 1.0 + 2.0 * math.sqrt(eps) + eps
    margin = rho + delta - beta * c_max * s
    holds = margin > 0
    return BoundReport(
        n=n, d_max=d_max, c_max=c_max, beta=beta, delta=delta, rho=rho,
        b_tot=b_tot, epsilon=eps, condition_holds=holds,
        extinction_bound=n / margin if holds else math.inf,
        corollary_threshold=r * c_max * s - 1.0,
        naive_threshold=r * c_max / b_tot, degenerate=False)


def solve_xi(a: float) -> float:
    """Positive root of xi - ln(1 + xi) = a.

    Bisection on [0, a + 2*sqrt(a) + 1] to absolute tolerance 1e-12, or to
    adjacent floats where the root is too large for that tolerance to be
    representable; the root always satisfies xi <= a + 2*sqrt(a).
    """
    if a < 0:
        raise ValueError(f"a must be >= 0, got {a}")
    if a == 0:
        return 0.0

    def f(x: float) -> float:
        # (x - a) first: the subtraction is exact for x near a, keeping the
        # residual meaningful when a is large
        return (x - a) - math.log1p(x)

    lo = 0.0
    hi = a + 2.0 * math.sqrt(a) + 1.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return lo if abs(f(lo)) <= abs(f(hi)) else hi


def expected_threshold(r: float, c_max: float, b_tot: int) -> float:
    """Planning rule of thumb for the efficiency threshold: r*c_max/b_tot."""
    if b_tot < 1:
        raise ValueError(f"b_tot must be >= 1, got {b_tot}")
    return r * c_max / b_tot


class ThresholdSearchError(RuntimeError):
    """Raised when no probed efficiency meets the success criterion.

    Carries the probes attempted so the caller can see how close the search
    came instead of receiving a silently clamped estimate.
    """

    def __init__(self, message: str, probes: list):
        super().__init__(message)
        self.probes = probes


@dataclass(frozen=True)
class ProbeSettings:
    """Success criterion for one probed efficiency: ``n_runs`` simulations
    from all-infected must reach extinction within
    ``horizon_multiplier * N / delta`` in at least ``success_fraction`` of
    runs."""

    n_runs: int = 20
    horizon_multiplier: float = 10.0
    success_fraction: float = 0.8

    def __post_init__(self):
        if self.n_runs < 1:
            raise ValueError(f"n_runs must be >= 1, got {self.n_runs}")
        if not self.horizon_multiplier > 0:
            raise ValueError("horizon_multiplier must be > 0")
        if not 0 < self.success_fraction <= 1:
            raise ValueError("success_fraction must be in (0, 1]")


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of one probed efficiency.

    A probe stops early once failure is forced (too many censored runs to
    reach the success bar), so ``n_executed`` may be below the configured
    run count; ``extinction_fraction`` is over the executed runs.
    """

    e: float
    n_executed: int
    n_extinct: int
    extinction_fraction: float
    mean_tau: float
    success: bool


@dataclass(frozen=True)
class ThresholdEstimate:
    """Bisection bracket for the empirical efficiency threshold.

    ``e_star`` is the upper bracket end, the smallest probed efficiency that
    met the success criterion; ``bracket[0]`` is the largest that failed
    (0 when none failed). On an edgeless graph the bracket degenerates to
    (0, 0). Otherwise e_low < e_star = e_high and e_high - e_low <= tol.
    """

    e_star: float
    bracket: tuple[float, float]
    tol: float
    n_runs: int
    horizon_multiplier: float
    success_fraction: float
    probes: tuple[ProbeResult, ...]


_PROBE_CHUNK = 8


def _run_probe(graph, order, r, b_tot, e, settings, horizon, seed_material,
               jobs) -> ProbeResult:
    params = DiffusionParams(beta=r, delta=1.0, rho=e, budget=b_tot)
    strat = Strategy.priority(order)
    base = np.random.SeedSequence(seed_material).generate_state(1, np.uint64)[0]
    need = int(np.ceil(settings.success_fraction * settings.n_runs - 1e-9))
    allow_censored = settings.n_runs - need

    def one(i: int):
        tr = simulate(graph, params, strat, "all-infected",
                      seed=int(base) + i, horizon=horizon)
        return tr.extinction_time

    taus = []
    n_censored = 0
    done = 0
    # chunked so a hopeless probe stops as soon as failure is forced; the
    # chunk size is fixed, keeping the executed-run set independent of jobs
    while done < settings.n_runs:
        take = min(_PROBE_CHUNK, settings.n_runs - done)
        idx = range(done, done + take)
        if jobs > 1 and take > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                out = list(pool.map(one, idx))
        else:
            out = [one(i) for i in idx]
        done += take
        for tau in out:
            if tau is None:
                n_censored += 1
            taus.append(horizon if tau is None else tau)
        if n_censored > allow_censored:
            break
    n_extinct = done - n_censored
    return ProbeResult(
        e=float(e), n_executed=done, n_extinct=n_extinct,
        extinction_fraction=n_extinct / done,
        mean_tau=float(np.mean(taus)),
        success=done == settings.n_runs and n_extinct >= need)


def estimate_threshold(graph: Graph, order: LinearArrangement, r: float,
                       b_tot: int = 1, probe: ProbeSettings | None = None,
                       tol: float | None = None, seed: int = 0,
                       jobs: int = 1,
                       cap_factor: float = 10.0) -> ThresholdEstimate:
    """Bisect for the smallest efficiency that reliably ends the epidemic.

    Fixes delta = 1 and beta = r (both ratios are dimensionless, so this
    loses no generality). A probe at efficiency e runs simulations from
    all-infected with rho = e and budget b_tot; it succeeds when the
    extinction fraction within horizon_multiplier*N reaches
    success_fraction. The search starts from the rule-of-thumb value
    r*C_max/b_tot, doubles until a probe succeeds (erroring past
    cap_factor times the start), then bisects down to width ``tol``
    (default: a twentieth of the starting value).

    Returns
    -------
    ThresholdEstimate

    Raises
    ------
    ThresholdSearchError
        If no efficiency up to the cap meets the success criterion.
    """
    if not r > 0:
        raise ValueError(f"r must be > 0, got {r}")
    if b_tot < 1:
        raise ValueError(f"b_tot must be >= 1, got {b_tot}")
    if probe is None:
        probe = ProbeSettings()
    n = graph.n_nodes
    horizon = probe.horizon_multiplier * max(n, 1)
    naive = r * cutwidth_profile(graph, order).max_cut / b_tot
    probes: list[ProbeResult] = []
    k = 0

    def run(e: float) -> ProbeResult:
        nonlocal k
        res = _run_probe(graph, order, r, b_tot, e, probe, horizon,
                         [seed, k], jobs)
        k += 1
        probes.append(res)
        return res

    if naive == 0.0:
        res = run(0.0)
        if not res.success:
            raise ThresholdSearchError(
                "no spread is possible yet the zero-efficiency probe failed; "
                "the success criterion is unattainable "
                f"(extinction fraction {res.extinction_fraction:.2f} < "
                f"{probe.success_fraction})", probes)
        return ThresholdEstimate(
            e_star=0.0, bracket=(0.0, 0.0), tol=0.0, n_runs=probe.n_runs,
            horizon_multiplier=probe.horizon_multiplier,
            success_fraction=probe.success_fraction, probes=tuple(probes))

    if tol is None:
        tol = naive / 20.0
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")

    hi = naive
    lo = 0.0
    res = run(hi)
    while not res.success:
        lo = hi
        hi *= 2.0
        if hi > cap_factor * naive:
            raise ThresholdSearchError(
                f"no efficiency up to {lo:.6g} (cap {cap_factor:g} x the "
                f"rule-of-thumb {naive:.6g}) met the success criterion "
                f"(fraction >= {probe.success_fraction} extinct within "
                f"horizon {horizon:g})", probes)
        res = run(hi)

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if run(mid).success:
            hi = mid
        else:
            lo = mid
    return ThresholdEstimate(
        e_star=hi, bracket=(lo, hi), tol=float(tol), n_runs=probe.n_runs,
        horizon_multiplier=probe.horizon_multiplier,
        success_fraction=probe.success_fraction, probes=tuple(probes))
