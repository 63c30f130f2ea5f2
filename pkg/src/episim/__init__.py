"""Community-structured epidemic benchmarks and immunization experiments.

The package generates benchmark networks with planted communities, scores
node influence globally (degree, betweenness) and at community level
(indegree/outdegree and their differences), builds targeted immunization
plans, runs stochastic SIR epidemics, and orchestrates replicated parameter
sweeps with reproducible seeding.
"""

__version__ = "0.1.0"

from .centrality import (
    ScoreKind,
    ScoreTable,
    betweenness,
    community_scores,
    degree_scores,
)
from .errors import (
    CapacityError,
    ConfigurationError,
    EpisimError,
    GenerationFailure,
    GraphInputError,
    NodeBoundsError,
    PartitionCoverageError,
    UndefinedRatioError,
)
from .experiments import (
    ExperimentConfig,
    SweepRecord,
    parse_config,
    read_config,
    run_sweep,
    summarize_deaths,
    write_records,
)
from .graph import (
    DegreeSplit,
    Graph,
    Partition,
    build_from_edges,
    degree,
    inter_community_fraction,
    mu_limit,
    remove_nodes,
    split_degree,
)
from .lfr import (
    LfrParams,
    assign_communities,
    generate,
    rewire_to_mixing,
    sample_community_sizes,
    sample_degrees,
    wire_configuration_model,
)
from .seeding import derive_seed, rng_for
from .sir import (
    EpidemicState,
    NodeState,
    SirOutcome,
    SirParams,
    run,
    run_immunized,
    seed_infection,
    step,
)
from .strategies import (
    ImmunizationPlan,
    StrategyKind,
    allocate_quota,
    build_plan,
    plan_cbf,
    plan_community,
    plan_global,
    plan_random,
)

__all__ = [name for name in dir() if not name.startswith("_")]
