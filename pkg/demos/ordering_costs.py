"""Worked example: how arrangement quality is measured and improved.

A path whose node labels hide its structure. The identity arrangement
pays for that; the exact search and the heuristics recover the path
layout (cutwidth 1).
"""
import numpy as np

from cutplan import (
    Graph,
    LinearArrangement,
    MCMConfig,
    cutwidth_profile,
    gen_preferential_attachment,
    order_exact_min_cutwidth,
    order_lrsr,
    order_mcm,
    order_random,
    p_sum_cost,
)

g = Graph(5, [(0, 3), (3, 1), (1, 2), (2, 4)])  # path 0-3-1-2-4

for name, la in [("identity", LinearArrangement([1, 2, 3, 4, 5])),
                 ("improved", LinearArrangement([1, 3, 4, 2, 5]))]:
    prof = cutwidth_profile(g, la)
    print(f"{name:>9}: order={la.order.tolist()} cuts={prof.cuts.tolist()} "
          f"max_cut={prof.max_cut} edge_length_sum={p_sum_cost(g, la):g}")

la_star, c_star = order_exact_min_cutwidth(g)
print(f"    exact: order={la_star.order.tolist()} max_cut={c_star}")

print()
print("cutwidths on a preferential-attachment graph, n=120:")
g = gen_preferential_attachment(120, 2, seed=7)
rows = [
    ("random", order_random(g, seed=0)),
    ("lrsr", order_lrsr(g)),
]
for name, la in rows:
    print(f"{name:>9}: max_cut={cutwidth_profile(g, la).max_cut}")
la, prof = order_mcm(g, MCMConfig(seed=0))
print(f"{'mcm':>9}: max_cut={prof.max_cut}")
