"""Empirical treatment threshold against the r*C_max rule of thumb.

For several networks and orderings, estimate the smallest treatment
efficiency e* that reliably clears the infection with one resource, and
compare it to r*C_max computed from the arrangement's cutwidth. Smaller
cutwidth means the rule-of-thumb budget drops, and e* drops with it.
"""
import numpy as np

from cutplan import (
    MCMConfig,
    cutwidth_profile,
    estimate_threshold,
    gen_erdos_renyi,
    gen_grid,
    gen_small_world,
    order_mcm,
    order_random,
)

r = 2.0
nets = [
    ("er(60,0.08)", gen_erdos_renyi(60, 0.08, seed=0)),
    ("ws(60,4,0.1)", gen_small_world(60, 4, 0.1, seed=0)),
    ("grid(8x8)", gen_grid(8, 8)),
]

print(f"{'network':>14} {'order':>7} {'C_max':>6} {'r*C':>8} {'e*':>8} {'e*/(r*C)':>9}")
for name, g in nets:
    for strat in ("rand", "mcm"):
        if strat == "mcm":
            la, prof = order_mcm(g, MCMConfig(seed=1))
        else:
            la = order_random(g, seed=1)
            prof = cutwidth_profile(g, la)
        est = estimate_threshold(g, la, r=r, b_tot=1, seed=5)
        x = r * prof.max_cut
        print(f"{name:>14} {strat:>7} {prof.max_cut:6d} {x:8.1f} "
              f"{est.e_star:8.2f} {est.e_star / x:9.2f}")
