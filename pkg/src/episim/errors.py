"""Exception hierarchy shared across the package.

Every error raised on purpose derives from :class:`EpisimError`, so callers
(CLI, service) can distinguish expected failures from bugs.
"""


class EpisimError(Exception):
    """Base class for all errors raised by this package."""


class GraphInputError(EpisimError):
    """Structurally invalid graph input (duplicate edge, self-loop, bad id)."""


class NodeBoundsError(EpisimError, IndexError):
    """A node id outside the graph's node range."""


class PartitionCoverageError(EpisimError):
    """A partition does not cover every node of the graph it is used with."""


class UndefinedRatioError(EpisimError):
    """A ratio was requested on an empty denominator (e.g. edgeless graph)."""


class ConfigurationError(EpisimError, ValueError):
    """Parameters that can never produce a valid result."""


class GenerationFailure(EpisimError):
    """A randomized construction did not converge; retrying with a new seed
    may succeed."""


class CapacityError(EpisimError):
    """A request for more nodes than are available (quota > active nodes)."""
