"""Exception types shared across the package.

``ConfigError`` marks a bad run configuration (CLI exit code 2); every other
subclass of ``TrendRecError`` is a data-level problem (CLI exit code 1).
"""


class TrendRecError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TrendRecError):
    """Invalid run configuration (bad weights, odd gamma, K < 1, ...)."""


class MalformedFilename(TrendRecError):
    """Item filename does not match the canonical metadata pattern."""


class UnknownGender(TrendRecError):
    """Gender token in a filename is neither MEN nor WOMEN."""


class MalformedRecord(TrendRecError):
    """A data file row cannot be parsed or is structurally inconsistent."""


class DimensionMismatch(TrendRecError):
    """Vectors of different lengths where equal dimensions are required."""


class DuplicateItem(TrendRecError):
    """The same item id appears more than once in a catalog or table."""


class NonFiniteValue(TrendRecError):
    """An embedding entry is NaN or infinite."""


class MissingEmbedding(TrendRecError):
    """A catalog item has no embedding row (rejected at load, fail-fast)."""


class EmptyCatalog(TrendRecError):
    """An operation requires at least one catalog item."""


class EmptyEligibleSet(TrendRecError):
    """Purchase sampling was asked to draw from an empty candidate set."""


class EmptyTable(TrendRecError):
    """An operation requires a nonempty popularity table."""


class EmptyInput(TrendRecError):
    """A metric was asked to average over zero recommendations."""


class UnknownItem(TrendRecError):
    """An item id does not resolve to a catalog entry or embedding row."""


class UnknownStore(TrendRecError):
    """A store id does not resolve to a known store."""
