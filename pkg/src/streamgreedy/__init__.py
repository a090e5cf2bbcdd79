"""Single-pass streaming maximization of submodular functions under p-matchoid constraints."""
from .ground import (
    DirectedCut,
    Element,
    ExhaustiveLimitError,
    InstrumentedOracle,
    Modular,
    SubmodularOracle,
    WeightedCoverage,
    function_from_spec,
    marginal,
    verify_submodular,
)
from .greedy import GreedyParams, ProtocolViolation, StreamingGreedy, accept_test, is_good, run_streaming_greedy
from .iterated import IteratedStreamingGreedy, run_iterated
from .matchoid import (
    GraphicMatroid,
    Matchoid,
    PartitionMatroid,
    UniformMatroid,
    exchange_candidates,
    matchoid_from_spec,
    matchoid_independent,
    verify_matroid_axioms,
)
from .offline import OfflineSolver, exact_bruteforce, offline_greedy, offline_random_greedy
from .pool import AlphaGrid, InstancePool, cardinality_grid, matchoid_grid
from .randomized import (
    RandomizedCardinalityGreedy,
    RandomizedStreamingGreedy,
    cardinality_buffer_size,
    matchoid_buffer_size,
    run_randomized,
    run_randomized_cardinality,
)
from .result import RunResult
from .state import SolutionState, incremental_value

__version__ = "0.1.0"
