"""Command-line front end: generate graphs, order them, simulate outbreaks,
evaluate bounds, and run batch experiments that emit plot-ready CSVs.

Subcommands
-----------
gen        write a generated graph as an edge-list file
order      compute a linear arrangement and its cut profile
simulate   run an SIS ensemble and write per-run/summary/curve CSVs
threshold  estimate the empirical treatment-efficiency threshold
bound      evaluate the closed-form extinction bound
experiment run a config-driven batch producing one tidy CSV

Every subcommand exits 0 on success and nonzero with a single-line
``error: ...`` diagnostic on failure. Output files are written to a temp
file and renamed, so a failed run leaves no partial file. All randomness
derives from explicit seeds; reruns with identical arguments produce
byte-identical files. ``CUTPLAN_JOBS`` sets the default worker count where
a ``--jobs`` flag is accepted.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._util import atomic_write_text, sub_seed
from .arrangement import (
    MCMConfig,
    cutwidth_profile,
    load_arrangement,
    order_exact_min_cutwidth,
    order_least_neighbors,
    order_lrsr,
    order_mcm,
    order_most_neighbors,
    order_random,
    p_sum_cost,
    save_arrangement,
)
from .bounds import ProbeSettings, estimate_threshold, expected_threshold, theorem1_bound
from .epidemic import DiffusionParams, Strategy, run_ensemble
from .graph import (
    Graph,
    gen_erdos_renyi,
    gen_geometric,
    gen_grid,
    gen_preferential_attachment,
    gen_small_world,
    load_edge_list,
    save_edge_list,
)


class CliError(Exception):
    """User-facing failure; main() prints it on one line and exits nonzero."""


_MODEL_PARAMS = {
    "er": ("n", "p"),
    "ba": ("n", "m"),
    "ws": ("n", "k", "beta"),
    "geo": ("n", "radius"),
    "grid": ("rows", "cols"),
}

_STRATEGIES = ("rand", "mn", "ln", "lrsr", "mcm", "exact")

_EXPERIMENT_KINDS = ("threshold_vs_cutwidth", "strategy_comparison", "bound_check")


def _fmt(v) -> str:
    # bool first: it is an int subclass
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.10g" % float(v)
    return str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _write_csv(path: str, header, rows) -> None:
    atomic_write_text(path, _csv_text(header, rows))


def _read_graph(path: str) -> Graph:
    """Load an edge list, honoring an ``n=<count>`` token on a comment line.

    The plain edge-list format cannot carry isolated nodes (ids compact to
    the endpoints present), so files written by ``gen`` embed the node count
    in their metadata line and it is trusted here.
    """
    n_meta = None
    pairs: list[tuple[int, int]] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            s = raw.strip()
            if not s:
                continue
            if s.startswith("#"):
                for tok in s[1:].split():
                    if tok.startswith("n="):
                        try:
                            n_meta = int(tok[2:])
                        except ValueError:
                            pass
                continue
            parts = s.split()
            if len(parts) != 2:
                raise CliError(f"{path}:{lineno}: expected two node ids, got {s!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise CliError(f"{path}:{lineno}: non-integer node id") from None
            pairs.append((u, v))
    if n_meta is None:
        return load_edge_list(path)
    pairs = [(u, v) for u, v in pairs if u != v]
    try:
        return Graph(n_meta, pairs)
    except ValueError as e:
        raise CliError(f"{path}: {e}") from None


def _make_order(graph: Graph, strategy: str, seed: int):
    """Arrangement plus cut profile for one named strategy."""
    if strategy == "rand":
        la = order_random(graph, seed=seed)
    elif strategy == "mn":
        la = order_most_neighbors(graph)
    elif strategy == "ln":
        la = order_least_neighbors(graph)
    elif strategy == "lrsr":
        la = order_lrsr(graph)
    elif strategy == "mcm":
        return order_mcm(graph, MCMConfig(seed=seed))
    elif strategy == "exact":
        la, _ = order_exact_min_cutwidth(graph)
    else:
        raise CliError(f"unknown strategy {strategy!r}")
    return la, cutwidth_profile(graph, la)


def _resolve_jobs(args) -> int:
    if getattr(args, "jobs", None) is not None:
        if args.jobs < 1:
            raise CliError("--jobs must be >= 1")
        return args.jobs
    env = os.environ.get("CUTPLAN_JOBS", "").strip()
    if env:
        try:
            j = int(env)
        except ValueError:
            raise CliError(f"CUTPLAN_JOBS must be an integer, got {env!r}") from None
        if j < 1:
            raise CliError(f"CUTPLAN_JOBS must be >= 1, got {j}")
        return j
    return 1


def _run_tasks(fns, jobs: int):
    """Run callables, possibly on a thread pool; results keep input order."""
    if jobs <= 1 or len(fns) <= 1:
        return [fn() for fn in fns]
    with ThreadPoolExecutor(max_workers=min(jobs, len(fns))) as ex:
        return list(ex.map(lambda fn: fn(), fns))


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    """Generate a graph and write it as an edge list with a metadata line."""
    params = _MODEL_PARAMS[args.model]
    for name in params:
        if getattr(args, name) is None:
            raise CliError(f"--{name} is required for model {args.model!r}")
    if args.model == "er":
        g = gen_erdos_renyi(args.n, args.p, seed=args.seed)
    elif args.model == "ba":
        g = gen_preferential_attachment(args.n, args.m, seed=args.seed)
    elif args.model == "ws":
        g = gen_small_world(args.n, args.k, args.beta, seed=args.seed)
    elif args.model == "geo":
        g = gen_geometric(args.n, args.radius, seed=args.seed)
    else:
        g = gen_grid(args.rows, args.cols)
    tokens = [f"model={args.model}"]
    tokens += [f"{name}={_fmt(getattr(args, name))}" for name in params]
    tokens.append(f"seed={args.seed}")
    if "n" not in params:
        tokens.append(f"n={g.n_nodes}")
    save_edge_list(g, args.out, header=[" ".join(tokens)])
    print(f"wrote {args.out} ({g.n_nodes} nodes, {g.n_edges} edges)")
    return 0


# ---------------------------------------------------------------------------
# order


def cmd_order(args) -> int:
    """Order a graph, save the arrangement and its cut profile."""
    g = _read_graph(args.graph)
    la, prof = _make_order(g, args.strategy, args.seed)
    save_arrangement(la, args.out, header=[f"strategy={args.strategy} seed={args.seed}"])
    cuts_path = args.cuts if args.cuts else os.path.splitext(args.out)[0] + ".cuts.csv"
    _write_csv(cuts_path, ("position", "cut"),
               [(c, int(prof.cuts[c - 1])) for c in range(1, g.n_nodes)])
    print(f"max_cutwidth={prof.max_cut} p_sum={_fmt(p_sum_cost(g, la))}")
    return 0


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    """Run an SIS ensemble and write runs/summary/curve CSVs."""
    g = _read_graph(args.graph)
    try:
        la = load_arrangement(args.order, n_nodes=g.n_nodes)
    except ValueError as e:
        raise CliError(str(e)) from None
    if args.runs < 1:
        raise CliError("--runs must be >= 1")
    params = DiffusionParams(beta=args.beta, delta=args.delta, rho=args.rho,
                             budget=args.budget)
    want_events = args.events or args.runs == 1
    summ = run_ensemble(g, params, Strategy.priority(la), "all-infected",
                        n_runs=args.runs, base_seed=args.seed,
                        horizon=args.horizon, sample_dt=args.sample_dt,
                        jobs=_resolve_jobs(args), keep_trajectories=want_events)

    os.makedirs(args.out_dir, exist_ok=True)
    taus = summ.extinction_times
    _write_csv(os.path.join(args.out_dir, "runs.csv"),
               ("run", "seed", "extinction_time", "censored"),
               [(i, args.seed + i, taus[i], bool(np.isnan(taus[i])))
                for i in range(args.runs)])
    _write_csv(os.path.join(args.out_dir, "summary.csv"),
               ("n_runs", "n_censored", "extinction_fraction",
                "mean_extinction_time", "median_extinction_time",
                "se_extinction_time", "mean_peak_infected"),
               [(summ.n_runs, summ.n_censored, summ.extinction_fraction,
                 summ.mean_extinction_time, summ.median_extinction_time,
                 summ.se_extinction_time, summ.mean_peak_infected)])
    _write_csv(os.path.join(args.out_dir, "curve.csv"),
               ("time", "mean_infected"),
               list(zip(summ.curve_times, summ.mean_curve)))
    if want_events:
        kinds = ("infect", "recover")
        for i, tr in enumerate(summ.trajectories):
            _write_csv(os.path.join(args.out_dir, f"events_{i:04d}.csv"),
                       ("time", "node", "event"),
                       [(t, int(v), kinds[k]) for t, v, k
                        in zip(tr.times, tr.nodes, tr.kinds)])
    print(f"extinction_fraction={_fmt(summ.extinction_fraction)} "
          f"mean_tau={_fmt(summ.mean_extinction_time)}")
    return 0


# ---------------------------------------------------------------------------
# threshold


def cmd_threshold(args) -> int:
    """Estimate the treatment-efficiency threshold for a graph and order."""
    g = _read_graph(args.graph)
    try:
        la = load_arrangement(args.order, n_nodes=g.n_nodes)
    except ValueError as e:
        raise CliError(str(e)) from None
    probe = ProbeSettings(n_runs=args.runs,
                          horizon_multiplier=args.horizon_multiplier,
                          success_fraction=args.success_fraction)
    est = estimate_threshold(g, la, args.r, b_tot=args.b_tot, probe=probe,
                             tol=args.tol, seed=args.seed,
                             jobs=_resolve_jobs(args), cap_factor=args.cap_factor)
    naive = expected_threshold(args.r, cutwidth_profile(g, la).max_cut, args.b_tot)

    os.makedirs(args.out_dir, exist_ok=True)
    _write_csv(os.path.join(args.out_dir, "estimate.csv"),
               ("e_star", "bracket_lo", "bracket_hi", "tol", "n_runs",
                "horizon_multiplier", "success_fraction", "naive_threshold"),
               [(est.e_star, est.bracket[0], est.bracket[1], est.tol,
                 est.n_runs, est.horizon_multiplier, est.success_fraction,
                 naive)])
    _write_csv(os.path.join(args.out_dir, "probes.csv"),
               ("e", "n_executed", "n_extinct", "extinction_fraction",
                "mean_tau", "success"),
               [(p.e, p.n_executed, p.n_extinct, p.extinction_fraction,
                 p.mean_tau, p.success) for p in est.probes])
    print(f"e_star={_fmt(est.e_star)} bracket_lo={_fmt(est.bracket[0])} "
          f"bracket_hi={_fmt(est.bracket[1])}")
    return 0


# ---------------------------------------------------------------------------
# bound


def cmd_bound(args) -> int:
    """Evaluate the closed-form extinction bound at one parameter point."""
    rep = theorem1_bound(n=args.n, d_max=args.d_max, c_max=args.c_max,
                         beta=args.beta, delta=args.delta, rho=args.rho,
                         b_tot=args.b_tot)
    fields = (("n", rep.n), ("d_max", rep.d_max), ("c_max", rep.c_max),
              ("beta", rep.beta), ("delta", rep.delta), ("rho", rep.rho),
              ("b_tot", rep.b_tot), ("epsilon", rep.epsilon),
              ("condition_holds", rep.condition_holds),
              ("extinction_bound", rep.extinction_bound),
              ("corollary_threshold", rep.corollary_threshold),
              ("naive_threshold", rep.naive_threshold))
    if args.out:
        _write_csv(args.out, [k for k, _ in fields], [[v for _, v in fields]])
    print(" ".join(f"{k}={_fmt(v)}" for k, v in fields[7:]))
    return 0


# ---------------------------------------------------------------------------
# experiment


@dataclass(frozen=True)
class NetworkSpec:
    """Network source for an experiment: a generator model or an edge list."""

    model: str | None
    path: str | None
    params: dict
    seeds: tuple[int, ...]

    @property
    def label(self) -> str:
        return self.model if self.model else os.path.basename(self.path)

    def build(self, seed: int) -> Graph:
        if self.path is not None:
            return _read_graph(self.path)
        p = self.params
        if self.model == "er":
            return gen_erdos_renyi(p["n"], p["p"], seed=seed)
        if self.model == "ba":
            return gen_preferential_attachment(p["n"], p["m"], seed=seed)
        if self.model == "ws":
            return gen_small_world(p["n"], p["k"], p["beta"], seed=seed)
        if self.model == "geo":
            return gen_geometric(p["n"], p["radius"], seed=seed)
        return gen_grid(p["rows"], p["cols"])


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated batch-experiment description.

    Built from a flat ``key=value`` config text (``#`` comments allowed) with
    dotted prefixes grouping related keys, e.g. ``network.model=ba``. Every
    validation failure names the offending key. The master ``seed`` is the
    only entropy source: each task derives its own seeds by hashing a stable
    task label, so adding a strategy or seed to a config never perturbs the
    results of the others.
    """

    kind: str
    seed: int
    out_dir: str | None
    network: NetworkSpec
    strategies: tuple[str, ...]
    beta: float
    delta: float
    rho: float
    budget: int
    probe: ProbeSettings | None
    probe_tol: float | None
    cap_factor: float
    sim_runs: int
    sim_horizon: float | None
    sim_sample_dt: float | None

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        raw = _parse_kv(text)
        kind = raw.pop("kind", None)
        if kind is None:
            raise CliError("kind: required key is missing")
        if kind not in _EXPERIMENT_KINDS:
            raise CliError(f"kind: must be one of {', '.join(_EXPERIMENT_KINDS)}, got {kind!r}")

        allowed = {"seed", "out_dir", "strategies", "network.model", "network.path",
                   "network.seeds", "diffusion.beta", "diffusion.delta",
                   "diffusion.budget"}
        allowed |= {f"network.{p}" for ps in _MODEL_PARAMS.values() for p in ps}
        if kind == "threshold_vs_cutwidth":
            allowed |= {"probe.runs", "probe.horizon_multiplier",
                        "probe.success_fraction", "probe.tol", "probe.cap_factor"}
        else:
            allowed |= {"diffusion.rho", "sim.runs", "sim.horizon", "sim.sample_dt"}
        for key in raw:
            if key not in allowed:
                raise CliError(f"{key}: unknown key for kind {kind!r}")

        network = _parse_network(raw)
        strategies = _parse_strategies(raw)
        if kind == "strategy_comparison" and len(network.seeds) != 1:
            raise CliError("network.seeds: strategy_comparison uses exactly one network seed")

        seed = _get_int(raw, "seed", 0)
        out_dir = raw.pop("out_dir", None)
        beta = _get_float(raw, "diffusion.beta", required=True)
        if beta < 0:
            raise CliError("diffusion.beta: must be >= 0")
        delta = _get_float(raw, "diffusion.delta", 1.0)
        if delta <= 0:
            raise CliError("diffusion.delta: must be > 0")
        rho = _get_float(raw, "diffusion.rho", 0.0)
        if rho < 0:
            raise CliError("diffusion.rho: must be >= 0")
        default_budget = 1 if kind == "threshold_vs_cutwidth" else 0
        budget = _get_int(raw, "diffusion.budget", default_budget)
        if kind in ("threshold_vs_cutwidth", "bound_check"):
            if budget < 1:
                raise CliError("diffusion.budget: must be >= 1 for this kind")
        elif budget < 0:
            raise CliError("diffusion.budget: must be >= 0")

        probe = None
        probe_tol = None
        cap_factor = 10.0
        sim_runs = 100
        sim_horizon = None
        sim_sample_dt = None
        if kind == "threshold_vs_cutwidth":
            try:
                probe = ProbeSettings(
                    n_runs=_get_int(raw, "probe.runs", 20),
                    horizon_multiplier=_get_float(raw, "probe.horizon_multiplier", 10.0),
                    success_fraction=_get_float(raw, "probe.success_fraction", 0.8))
            except ValueError as e:
                raise CliError(f"probe: {e}") from None
            probe_tol = _get_float(raw, "probe.tol", None)
            if probe_tol is not None and probe_tol <= 0:
                raise CliError("probe.tol: must be > 0")
            cap_factor = _get_float(raw, "probe.cap_factor", 10.0)
            if cap_factor < 1:
                raise CliError("probe.cap_factor: must be >= 1")
        else:
            sim_runs = _get_int(raw, "sim.runs", 100)
            if sim_runs < 1:
                raise CliError("sim.runs: must be >= 1")
            sim_horizon = _get_float(raw, "sim.horizon", None)
            if sim_horizon is not None and sim_horizon <= 0:
                raise CliError("sim.horizon: must be > 0")
            sim_sample_dt = _get_float(raw, "sim.sample_dt", None)
            if sim_sample_dt is not None and sim_sample_dt <= 0:
                raise CliError("sim.sample_dt: must be > 0")

        return cls(kind=kind, seed=seed, out_dir=out_dir, network=network,
                   strategies=strategies, beta=beta, delta=delta, rho=rho,
                   budget=budget, probe=probe, probe_tol=probe_tol,
                   cap_factor=cap_factor, sim_runs=sim_runs,
                   sim_horizon=sim_horizon, sim_sample_dt=sim_sample_dt)


def _parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise CliError(f"config line {lineno}: expected key=value, got {s!r}")
        key, _, value = s.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise CliError(f"config line {lineno}: empty key")
        if key in out:
            raise CliError(f"{key}: duplicate key (line {lineno})")
        out[key] = value
    return out


def _get_int(raw: dict, key: str, default=None, required=False):
    if key not in raw:
        if required:
            raise CliError(f"{key}: required key is missing")
        return default
    try:
        return int(raw.pop(key))
    except ValueError:
        raise CliError(f"{key}: expected an integer") from None


def _get_float(raw: dict, key: str, default=None, required=False):
    if key not in raw:
        if required:
            raise CliError(f"{key}: required key is missing")
        return default
    try:
        return float(raw.pop(key))
    except ValueError:
        raise CliError(f"{key}: expected a number") from None


def _parse_network(raw: dict) -> NetworkSpec:
    model = raw.pop("network.model", None)
    path = raw.pop("network.path", None)
    if (model is None) == (path is None):
        raise CliError("network.model: exactly one of network.model or network.path is required")
    seeds_text = raw.pop("network.seeds", None)
    if path is not None:
        if seeds_text is not None:
            raise CliError("network.seeds: not applicable to an edge-list network")
        if not os.path.isfile(path):
            raise CliError(f"network.path: file not found: {path}")
        extra = [k for k in raw if k.startswith("network.")]
        if extra:
            raise CliError(f"{extra[0]}: not applicable to an edge-list network")
        return NetworkSpec(model=None, path=path, params={}, seeds=(0,))
    if model not in _MODEL_PARAMS:
        raise CliError(f"network.model: must be one of {', '.join(_MODEL_PARAMS)}, got {model!r}")
    params = {}
    for name in _MODEL_PARAMS[model]:
        key = f"network.{name}"
        if name in ("n", "m", "k", "rows", "cols"):
            params[name] = _get_int(raw, key, required=True)
        else:
            params[name] = _get_float(raw, key, required=True)
    extra = [k for k in raw if k.startswith("network.")]
    if extra:
        raise CliError(f"{extra[0]}: not a parameter of model {model!r}")
    if seeds_text is None:
        seeds = (0,)
    else:
        try:
            seeds = tuple(int(s) for s in seeds_text.split(",") if s.strip())
        except ValueError:
            raise CliError("network.seeds: expected comma-separated integers") from None
        if not seeds:
            raise CliError("network.seeds: expected at least one seed")
    return NetworkSpec(model=model, path=None, params=params, seeds=seeds)


def _parse_strategies(raw: dict) -> tuple[str, ...]:
    text = raw.pop("strategies", None)
    if text is None:
        raise CliError("strategies: required key is missing")
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    if not items:
        raise CliError("strategies: expected at least one strategy")
    for s in items:
        if s not in _STRATEGIES:
            raise CliError(f"strategies: must be among {', '.join(_STRATEGIES)}, got {s!r}")
    if len(set(items)) != len(items):
        raise CliError("strategies: duplicate entry")
    return items


def _experiment_rows(cfg: ExperimentConfig, jobs: int):
    """Header and rows for one experiment; tasks run on a worker pool but
    rows keep the deterministic (seed, strategy) order of the config."""
    master = cfg.seed
    net = cfg.network

    if cfg.kind == "threshold_vs_cutwidth":
        header = ("network_type", "seed", "strategy", "C_max", "e_star", "naive_bound")
        r = cfg.beta / cfg.delta

        def make_task(s, strat):
            label = f"tvc/{net.label}/seed={s}/{strat}"

            def task():
                g = net.build(s)
                la, prof = _make_order(g, strat, sub_seed(master, label + "/order"))
                est = estimate_threshold(
                    g, la, r, b_tot=cfg.budget, probe=cfg.probe, tol=cfg.probe_tol,
                    seed=sub_seed(master, label + "/probe"), jobs=1,
                    cap_factor=cfg.cap_factor)
                naive = expected_threshold(r, prof.max_cut, cfg.budget)
                return [(net.label, s, strat, prof.max_cut, est.e_star, naive)]

            return task

        tasks = [make_task(s, strat) for s in net.seeds for strat in cfg.strategies]

    elif cfg.kind == "strategy_comparison":
        header = ("strategy", "time", "mean_infected")
        params = DiffusionParams(beta=cfg.beta, delta=cfg.delta, rho=cfg.rho,
                                 budget=cfg.budget)
        net_seed = net.seeds[0]

        def make_task(strat):
            label = f"cmp/{net.label}/seed={net_seed}/{strat}"

            def task():
                g = net.build(net_seed)
                la, _ = _make_order(g, strat, sub_seed(master, label + "/order"))
                summ = run_ensemble(
                    g, params, Strategy.priority(la), "all-infected",
                    n_runs=cfg.sim_runs, base_seed=sub_seed(master, label + "/sim"),
                    horizon=cfg.sim_horizon, sample_dt=cfg.sim_sample_dt, jobs=1)
                return [(strat, t, m)
                        for t, m in zip(summ.curve_times, summ.mean_curve)]

            return task

        tasks = [make_task(strat) for strat in cfg.strategies]

    else:  # bound_check
        header = ("network_type", "seed", "strategy", "n", "d_max", "c_max",
                  "beta", "delta", "rho", "budget", "runs",
                  "empirical_mean_tau", "theorem_bound", "condition_holds")
        params = DiffusionParams(beta=cfg.beta, delta=cfg.delta, rho=cfg.rho,
                                 budget=cfg.budget)

        def make_task(s, strat):
            label = f"bnd/{net.label}/seed={s}/{strat}"

            def task():
                g = net.build(s)
                la, prof = _make_order(g, strat, sub_seed(master, label + "/order"))
                summ = run_ensemble(
                    g, params, Strategy.priority(la), "all-infected",
                    n_runs=cfg.sim_runs, base_seed=sub_seed(master, label + "/sim"),
                    horizon=cfg.sim_horizon, sample_dt=cfg.sim_sample_dt, jobs=1)
                rep = theorem1_bound(n=g.n_nodes, d_max=g.max_degree,
                                     c_max=prof.max_cut, beta=cfg.beta,
                                     delta=cfg.delta, rho=cfg.rho, b_tot=cfg.budget)
                return [(net.label, s, strat, g.n_nodes, g.max_degree,
                         prof.max_cut, cfg.beta, cfg.delta, cfg.rho, cfg.budget,
                         cfg.sim_runs, summ.mean_extinction_time,
                         rep.extinction_bound, rep.condition_holds)]

            return task

        tasks = [make_task(s, strat) for s in net.seeds for strat in cfg.strategies]

    rows = []
    for chunk in _run_tasks(tasks, jobs):
        rows.extend(chunk)
    return header, rows


def cmd_experiment(args) -> int:
    """Run a config-file experiment end to end, writing one CSV."""
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(str(e)) from None
    cfg = ExperimentConfig.from_text(text)
    out_dir = args.out_dir if args.out_dir else cfg.out_dir
    if not out_dir:
        raise CliError("out_dir: required (set it in the config or pass --out-dir)")
    header, rows = _experiment_rows(cfg, _resolve_jobs(args))
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, cfg.kind + ".csv")
    _write_csv(path, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cutplan",
        description="Cutwidth-guided node ordering and SIS outbreak planning.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph and write an edge list")
    g.add_argument("--model", required=True, choices=sorted(_MODEL_PARAMS))
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--m", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--beta", type=float, help="rewiring probability (ws)")
    g.add_argument("--radius", type=float)
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("order", help="compute a linear arrangement")
    o.add_argument("--graph", required=True)
    o.add_argument("--strategy", required=True, choices=_STRATEGIES)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out", required=True)
    o.add_argument("--cuts", help="cut-profile CSV path (default: <out>.cuts.csv)")
    o.set_defaults(func=cmd_order)

    s = sub.add_parser("simulate", help="run an SIS ensemble")
    s.add_argument("--graph", required=True)
    s.add_argument("--order", required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--delta", type=float, default=1.0)
    s.add_argument("--rho", type=float, default=0.0)
    s.add_argument("--budget", type=int, default=0)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--horizon", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--sample-dt", type=float)
    s.add_argument("--events", action="store_true",
                   help="write per-run event CSVs (always on for --runs 1)")
    s.add_argument("--jobs", type=int)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("threshold", help="estimate the efficiency threshold")
    t.add_argument("--graph", required=True)
    t.add_argument("--order", required=True)
    t.add_argument("--r", type=float, required=True)
    t.add_argument("--b-tot", type=int, default=1)
    t.add_argument("--runs", type=int, default=20)
    t.add_argument("--horizon-multiplier", type=float, default=10.0)
    t.add_argument("--success-fraction", type=float, default=0.8)
    t.add_argument("--tol", type=float)
    t.add_argument("--cap-factor", type=float, default=10.0)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--jobs", type=int)
    t.add_argument("--out-dir", required=True)
    t.set_defaults(func=cmd_threshold)

    b = sub.add_parser("bound", help="evaluate the closed-form extinction bound")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d-max", type=int, required=True)
    b.add_argument("--c-max", type=int, required=True)
    b.add_argument("--beta", type=float, required=True)
    b.add_argument("--delta", type=float, default=1.0)
    b.add_argument("--rho", type=float, default=0.0)
    b.add_argument("--b-tot", type=int, default=1)
    b.add_argument("--out", help="also write the report as a one-row CSV")
    b.set_defaults(func=cmd_bound)

    e = sub.add_parser("experiment", help="run a config-driven batch")
    e.add_argument("config", help="flat key=value config file")
    e.add_argument("--out-dir", help="overrides out_dir from the config")
    e.add_argument("--jobs", type=int)
    e.set_defaults(func=cmd_experiment)

    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # single-line diagnostic, never a traceback
        msg = str(e).splitlines()[0] if str(e) else repr(e)
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
