"""cutplan: cutwidth-guided node ordering and resource planning for SIS epidemics."""

from .graph import (
    Graph,
    gen_erdos_renyi,
    gen_preferential_attachment,
    gen_small_world,
    gen_geometric,
    gen_grid,
    load_edge_list,
    save_edge_list,
    spectral_radius,
    connected_components,
)
from .arrangement import (
    LinearArrangement,
    CutwidthProfile,
    cutwidth_profile,
    p_sum_cost,
    order_random,
    order_most_neighbors,
    order_least_neighbors,
    order_lrsr,
    order_mcm,
    order_exact_min_cutwidth,
    spectral_sequencing,
    spectral_clustering,
    local_search_swaps,
    AnnealConfig,
    MCMConfig,
    save_arrangement,
    load_arrangement,
)

from .epidemic import (
    BudgetSchedule,
    DiffusionParams,
    Strategy,
    EpidemicState,
    count_contagious_edges,
    allocate_resources,
    Trajectory,
    simulate,
    EnsembleSummary,
    run_ensemble,
)
from .bounds import (
    BoundReport,
    theorem1_bound,
    solve_xi,
    expected_threshold,
    ThresholdSearchError,
    ProbeSettings,
    ProbeResult,
    ThresholdEstimate,
    estimate_threshold,
)

__version__ = "0.1.0"

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
    "LinearArrangement",
    "CutwidthProfile",
    "cutwidth_profile",
    "p_sum_cost",
    "order_random",
    "order_most_neighbors",
    "order_least_neighbors",
    "order_lrsr",
    "order_mcm",
    "order_exact_min_cutwidth",
    "spectral_sequencing",
    "spectral_clustering",
    "local_search_swaps",
    "AnnealConfig",
    "MCMConfig",
    "save_arrangement",
    "load_arrangement",
    "BudgetSchedule",
    "DiffusionParams",
    "Strategy",
    "EpidemicState",
    "count_contagious_edges",
    "allocate_resources",
    "Trajectory",
    "simulate",
    "EnsembleSummary",
    "run_ensemble",
    "BoundReport",
    "theorem1_bound",
    "solve_xi",
    "expected_threshold",
    "ThresholdSearchError",
    "ProbeSettings",
    "ProbeResult",
    "ThresholdEstimate",
    "estimate_threshold",
    "__version__",
]
