"""Exception types shared across the package."""

from __future__ import annotations


class CgsimError(Exception):
    """Base class for all errors this package raises on bad input or state."""


class InvalidNameError(CgsimError):
    """A variable name is empty after canonicalization."""


class GraphParseError(CgsimError):
    """Graph input violates the JSON or CLD text format."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class UnknownPolarityError(GraphParseError):
    pass


class DanglingEndpointError(GraphParseError):
    pass


class DuplicateEdgeError(GraphParseError):
    pass


class SelfLoopError(GraphParseError):
    pass


class DuplicateNodeIdError(GraphParseError):
    pass


class LabelConflictError(GraphParseError):
    """One CLD node id was declared with two different labels."""


class UndefinedStatisticError(CgsimError):
    """The requested statistic is undefined for this graph (e.g. n < 2)."""


class ResourceLimitError(CgsimError):
    """An enumeration guard tripped (cycle cap, product-graph cap)."""


class VectorDimensionError(CgsimError):
    """Two vectors of different dimension were compared."""


class ZeroVectorError(CgsimError):
    """Cosine similarity is undefined for a zero-norm vector."""


class EmbeddingStoreError(CgsimError):
    """An embedding store file is malformed or inconsistent."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class MissingEmbeddingError(CgsimError):
    """A file-backed provider was asked for a phrase it does not serve."""


class ProviderMismatchError(CgsimError):
    """A cache store was produced by a different provider or dimension."""


class EmbedTransportError(CgsimError):
    """The embedding endpoint could not be reached."""


class EmbedProtocolError(CgsimError):
    """The embedding endpoint violated the embed protocol."""


class EmptyGraphError(CgsimError):
    """Semantic comparison requires graphs with at least one node."""


class MissingProviderError(CgsimError):
    """A vector-based metric was requested without an embedding provider."""


class EmptyCorpusError(CgsimError):
    """A batch run found no graph files to compare."""


class InternalKernelError(CgsimError):
    """Sentinel for impossible kernel states (negative self-kernels)."""
