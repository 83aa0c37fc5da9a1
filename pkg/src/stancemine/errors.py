"""Exception hierarchy shared across the package."""


class StancemineError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(StancemineError):
    """Invalid configuration: bad entry text, empty cue set, missing path, bad CLI value."""


class CacheMissError(StancemineError):
    """Replay backend has no record for the requested query."""


class TransportError(StancemineError):
    """HTTP-level failure talking to the search engine."""


class QuotaExhaustedError(TransportError):
    """Rate-limit responses persisted through the whole retry budget."""


class MalformedResponseError(StancemineError):
    """The engine answered, but the total-results field is missing or non-numeric."""


class AggregationError(StancemineError):
    """Hit counts do not cover the query batch exactly once."""


class InsufficientDataError(StancemineError):
    """Score factors are undefined for the given counts (p = n = 0, or t = 0)."""


class ClusteringError(StancemineError):
    """Clustering could not produce a valid partition."""


class InfeasibleKError(ClusteringError):
    """Requested more clusters than there are distinct score values."""
