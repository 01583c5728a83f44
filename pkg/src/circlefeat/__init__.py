"""Circle features (swing-plus, bridge) and structural attention biases for link prediction."""

__version__ = "0.1.0"

from .attention import (
    AttentionParams,
    BiasMatrix,
    PairFeatures,
    attention_forward,
    build_bias_matrix,
    gradient_check,
    pair_bias,
    score_link,
)
from .circles import (
    Bridge,
    CircleConfig,
    bridge_count,
    bridge_count_oracle,
    bridge_feature,
    circle_count,
    enumerate_bridges,
    swing_plus,
    swing_plus_oracle,
)
from .errors import (
    CapExceededError,
    CircleFeatError,
    ConfigError,
    EmptyGraphError,
    NumericError,
    OutOfRangeError,
    ParseError,
    ShapeError,
)
from .experiment import EvalReport, ExperimentConfig, run_toy_experiment
from .graph import Graph, NodePair, build_graph, generate_synthetic, load_edge_list, neighbors
from .linkpred import extract_enclosing_subgraph, mrr, rank_of_positive, sample_negatives
from .structural import PathInfo, adamic_adar, common_neighbors, jaccard, shortest_paths
