"""Closed-form extinction-time bound against simulated means.

When the treatment rate clears the rate condition, the expected time to
extinction from the all-infected state is at most N over the rate margin.
The bound is loose by design; the point is that it always sits above the
measured mean.
"""
import numpy as np

from cutplan import (
    DiffusionParams,
    MCMConfig,
    Strategy,
    gen_erdos_renyi,
    order_mcm,
    run_ensemble,
    theorem1_bound,
)

g = gen_erdos_renyi(40, 0.1, seed=0)
la, prof = order_mcm(g, MCMConfig(seed=0))
print(f"graph: n={g.n_nodes} d_max={g.max_degree} max_cut={prof.max_cut}")
print(f"{'beta':>6} {'rho':>10} {'margin':>10} {'bound':>8} {'mean tau':>9}")

for beta, factor in [(0.2, 1.2), (0.2, 3.0), (0.5, 1.2), (0.5, 3.0), (1.0, 1.2)]:
    # pick rho a fixed factor above the smallest rate that satisfies the condition
    rep0 = theorem1_bound(n=40, d_max=g.max_degree, c_max=prof.max_cut,
                          beta=beta, delta=1.0, rho=0.0)
    rho = factor * (rep0.corollary_threshold + 1.0) - 1.0
    rep = theorem1_bound(n=40, d_max=g.max_degree, c_max=prof.max_cut,
                         beta=beta, delta=1.0, rho=rho)
    summ = run_ensemble(g, DiffusionParams(beta=beta, delta=1.0, rho=rho, budget=1),
                        Strategy.priority(la), "all-infected",
                        n_runs=2000, base_seed=9)
    print(f"{beta:6.2f} {rho:10.1f} {40 / rep.extinction_bound:10.2f} "
          f"{rep.extinction_bound:8.3f} {summ.mean_extinction_time:9.3f}")
