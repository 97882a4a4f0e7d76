"""Large-scale multiobjective optimization via tree search over populations."""

from .core import (
    CountingProblem,
    Population,
    Problem,
    RandomStream,
    Solution,
    clamp,
    dominates,
    random_population,
)
from .dvso import ReducedView, VariableSample, dvso, reduction_size, sample_variables
from .indicators import (
    BatchManifest,
    RunRecord,
    hv_exact,
    hv_monte_carlo,
    igd,
    insensitive_hv,
    insensitive_igd,
    normalized_front_hv,
)
from .inner_ea import (
    FrontPartition,
    OperatorParams,
    OptimizerBudget,
    crowding_distance,
    fast_nondominated_sort,
    polynomial_mutation,
    run_nsga2,
    sbx_crossover,
)
from .mcts import Archive, SearchConfig, TreeNode, branching_factor, run_lmomcts, ucb
from .problems import (
    ReferenceFront,
    make_problem,
    make_toy_problem,
    sample_reference_front,
)

__version__ = "0.1.0"
