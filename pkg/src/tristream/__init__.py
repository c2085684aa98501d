"""Single-pass estimation of temporal triangle counts with predictor-guided sampling."""

from .baselines import MatchedConfig, match_probability, matched_config, run_naive
from .estimator import (
    EstimatorConfig,
    PredictorError,
    RunStats,
    SampleState,
    coin_flips,
    flip_biased_coin,
    make_rng,
    run_step,
    update_counters,
)
from .graph import (
    EdgeStream,
    ParseError,
    PreprocessReport,
    StreamError,
    TemporalEdge,
    compute_m_delta,
    parse_stream,
    preprocess,
    read_stream,
    validate_sorted,
    write_stream,
)
from .harness import (
    CorrelationReport,
    TrialReport,
    augment_bipartite,
    correlation,
    gen_random,
    run_trials,
    split_stream,
)
from .oracle import EdgeWeights, TriangleKind, classify_triangle, edge_weights, enumerate_exact
from .predictors import (
    NEVER,
    PredictorSpec,
    RankedEdges,
    apply_noise,
    build_hybrid,
    build_min_degree,
    build_perfect,
    build_static,
    build_threshold,
    learn_threshold,
    rank_edges,
)

__version__ = "0.1.0"
