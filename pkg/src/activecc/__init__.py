"""activecc: query-efficient correlation clustering from pairwise side
information, driven by smooth relative-regret estimation.

The package finds a k-clustering minimizing pairwise disagreement with a
noisy "same cluster / different cluster" label source, revealing as few pair
labels as possible. Labels are charged per distinct pair through a caching
oracle; an iterative loop alternates between size-biased sampling around the
current solution and minimization of the resulting regret estimate.
"""

from .clustering import (
    Clustering,
    FullGraph,
    all_pairs,
    clustering_distance,
    cost,
    pair_cost,
    pair_key,
    random_clustering,
    same_cluster,
    sort_clusters,
)
from .oracle import (
    DictOracle,
    GraphOracle,
    OracleUnavailable,
    PairLabel,
    PairOracle,
    PlantedInstance,
    QueryLedger,
    generate_planted,
)
from .sampling import (
    Rectangle,
    RegretEstimator,
    SampleSet,
    SrraParams,
    decomposition_distance,
    decomposition_regret,
    draw_samples,
    estimate_regret,
    estimate_regret_exact,
    exact_regret,
    measure_smoothness,
    rectangle_decompose,
    sample_plan,
    sample_size_q,
)
from .optimize import (
    ExperimentTrace,
    LoopConfig,
    SearchSpaceTooLarge,
    TraceRow,
    brute_force_min,
    check_convergence_bound,
    convergence_bound,
    local_search_min,
    srra_loop,
    uniform_loop,
    uniform_regret_estimator,
)
from .harness import ExperimentConfig, RunRow, run_experiment, write_rows_csv

__version__ = "0.1.0"
