"""Per-country regulatory stance estimation from search hit counts."""

from .clustering import ClusterResult, band_labels, kmeans_1d
from .config import RunConfig, load_config
from .errors import (
    AggregationError,
    CacheMissError,
    ClusteringError,
    ConfigError,
    InfeasibleKError,
    InsufficientDataError,
    MalformedResponseError,
    QuotaExhaustedError,
    StancemineError,
    TransportError,
)
from .pipeline import preview, run
from .queries import (
    CountryConfig,
    CueConfig,
    LexicalEntry,
    QueryBatch,
    QuerySpec,
    Role,
    Strategy,
    build_batch,
    query_complexity,
)
from .scoring import (
    CountTriple,
    ScoreStatus,
    StanceScore,
    aggregate,
    contrast_factor,
    score,
    weight_factor,
)

__version__ = "0.1.0"

__all__ = [
    "AggregationError",
    "CacheMissError",
    "ClusterResult",
    "ClusteringError",
    "ConfigError",
    "CountTriple",
    "CountryConfig",
    "CueConfig",
    "InfeasibleKError",
    "InsufficientDataError",
    "LexicalEntry",
    "MalformedResponseError",
    "QueryBatch",
    "QuerySpec",
    "QuotaExhaustedError",
    "Role",
    "RunConfig",
    "ScoreStatus",
    "StancemineError",
    "StanceScore",
    "Strategy",
    "TransportError",
    "aggregate",
    "band_labels",
    "build_batch",
    "contrast_factor",
    "kmeans_1d",
    "load_config",
    "preview",
    "query_complexity",
    "run",
    "score",
    "weight_factor",
]
