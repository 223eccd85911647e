"""Furniture style similarity from expert comparison votes.

The pipeline: expert votes on catalog images become pairwise style
comparisons, a small shared-weight network trained on those comparisons maps
feature vectors to style embeddings, embeddings drive nearest-neighbor
retrieval and a weighted product similarity graph, and a scoring service
feeds the graph's view of a candidate design back to its designer.
"""

from .catalog import (
    STYLE_ATTRIBUTES,
    STYLE_NAMES,
    CatalogError,
    DanglingReferenceError,
    DimensionMismatchError,
    DuplicateVoteError,
    ImageRecord,
    ImageSet,
    MajorityStyle,
    NoVotesError,
    ParseError,
    Product,
    ProductCatalog,
    Style,
    ValidationReport,
    Vote,
    VoteTable,
    load_catalog,
    majority_style,
    validate_files,
    vote_counts,
)
from .comparisons import (
    ComparisonLabel,
    DatasetSplit,
    SamplingError,
    generate_comparison,
    read_comparisons,
    sample_comparisons,
    split_dataset,
    write_comparisons,
)
from .designer_loop import (
    DesignReport,
    EngineConfig,
    EngineState,
    GapReport,
    GroupGapStats,
    Neighbor,
    find_gaps,
    load_engine,
    score_design,
)
from .graph_io import (
    FORMATS,
    LoadedGraph,
    encode_float,
    export_graph_string,
    read_graph,
    similarity_from_loaded,
)
from .retrieval import (
    EmbeddingStore,
    RankedNeighbors,
    distance,
    embed_all,
    read_embeddings,
    retrieval_accuracy,
    top_k,
    write_embeddings,
)
from .simgraph import (
    DEFAULT_MIN_GROUP_SIZE,
    DEFAULT_W_MAX,
    DEFAULT_W_MIN,
    DUPLICATE_DISTANCE,
    GroupGraph,
    GroupStats,
    MostConnected,
    RecommendationFrequency,
    SimilarityGraph,
    build_graph,
    export_graph,
    filter_edges,
    filter_small_groups,
    group_graph,
    most_connected,
    recommendation_frequency,
    remove_overlap_edges,
)
from .style_model import (
    EMBEDDING_DIM,
    N_STYLES,
    EstimationAccuracy,
    ForwardResult,
    Gradients,
    StyleModel,
    TrainConfig,
    TrainHistory,
    comparison_loss,
    estimate_style,
    evaluate_estimation,
    forward,
    init_model,
    load_checkpoint,
    loss_gradient,
    save_checkpoint,
    style_probabilities,
    train,
    win_probability,
)
from .synth import SynthConfig, SynthDataset, generate_dataset, write_dataset

__version__ = "0.1.0"

__all__ = [
    "STYLE_ATTRIBUTES",
    "STYLE_NAMES",
    "CatalogError",
    "DanglingReferenceError",
    "DimensionMismatchError",
    "DuplicateVoteError",
    "ImageRecord",
    "ImageSet",
    "MajorityStyle",
    "NoVotesError",
    "ParseError",
    "Product",
    "ProductCatalog",
    "Style",
    "ValidationReport",
    "Vote",
    "VoteTable",
    "load_catalog",
    "majority_style",
    "validate_files",
    "vote_counts",
    "ComparisonLabel",
    "DatasetSplit",
    "SamplingError",
    "generate_comparison",
    "read_comparisons",
    "sample_comparisons",
    "split_dataset",
    "write_comparisons",
    "DesignReport",
    "EngineConfig",
    "EngineState",
    "GapReport",
    "GroupGapStats",
    "Neighbor",
    "find_gaps",
    "load_engine",
    "score_design",
    "FORMATS",
    "LoadedGraph",
    "encode_float",
    "export_graph_string",
    "read_graph",
    "similarity_from_loaded",
    "EmbeddingStore",
    "RankedNeighbors",
    "distance",
    "embed_all",
    "read_embeddings",
    "retrieval_accuracy",
    "top_k",
    "write_embeddings",
    "DEFAULT_MIN_GROUP_SIZE",
    "DEFAULT_W_MAX",
    "DEFAULT_W_MIN",
    "DUPLICATE_DISTANCE",
    "GroupGraph",
    "GroupStats",
    "MostConnected",
    "RecommendationFrequency",
    "SimilarityGraph",
    "build_graph",
    "export_graph",
    "filter_edges",
    "filter_small_groups",
    "group_graph",
    "most_connected",
    "recommendation_frequency",
    "remove_overlap_edges",
    "EMBEDDING_DIM",
    "N_STYLES",
    "EstimationAccuracy",
    "ForwardResult",
    "Gradients",
    "StyleModel",
    "TrainConfig",
    "TrainHistory",
    "comparison_loss",
    "estimate_style",
    "evaluate_estimation",
    "forward",
    "init_model",
    "load_checkpoint",
    "loss_gradient",
    "save_checkpoint",
    "style_probabilities",
    "train",
    "win_probability",
    "SynthConfig",
    "SynthDataset",
    "generate_dataset",
    "write_dataset",
]
