"""memtrees: recursive trees with limited memory, and their limit laws.

Growth of trees whose arrivals only see a recent window of vertices
(macroscopic fraction, mesoscopic n**beta tail, custom window, or scaled
attachment), read-only tree analyses (heights, chains, fringes, spanned
subtrees, spine distances), reference limit objects (height constants, fluid
limit, degree pmfs, fringe samplers, coalescence laws), a joint ancestral
exploration, and a seeded replication harness.
"""

from .analysis import (
    TRUNCATED,
    TRUNCATED_MARKER,
    FringeTree,
    SpannedSubtree,
    ancestor_chain,
    degree_histogram,
    depth_of,
    depths,
    empirical_fringe,
    extended_fringe,
    fringe_at,
    fringe_counts,
    height,
    max_dist_to_spine,
    spanned_subtree,
    spine_distances,
)
from .exploration import (
    BranchpointSample,
    ExplorationTrace,
    branchpoint_statistics,
    explore_ancestral_lines,
    simulate_chain,
)
from .generate import GrowthSummary, Tree, grow_many_small, grow_streaming, grow_tree
from .harness import (
    ReplicationReport,
    SweepConfig,
    cdf_dominance,
    chi_square,
    dkw_bound,
    geometric_plus_one_cdf,
    ks_one_sample,
    run_sweep,
    shifted_poisson1_pmf,
    tv_distance,
)
from .limits import (
    BranchpointLaw,
    HeightConstants,
    alpha_max,
    branchpoint_cdf,
    branchpoint_sample,
    c_theta,
    chain_absorption_time,
    constants_table,
    f_beta,
    height_constants,
    kappa,
    lambda_mgf,
    legendre,
    macro_degree_pmf,
    macro_degree_pmf_table,
    mu_drift,
    mu_of,
    n_j_count,
    phi,
    poisson_gw_shape_pmf,
    poisson_tv_bound,
    psi,
    sample_macro_fringe,
    sample_poisson_gw,
    sample_sarrt_fringe,
    uniform_density,
)
from .rng import GENERATOR_NAME, mix64, stream, substream
from .schedules import (
    CustomJ,
    Macroscopic,
    MemorySchedule,
    Mesoscopic,
    Sarrt,
    WindowlessScheduleError,
    uniform_quantile,
    window,
)

__version__ = "0.1.0"
