"""Exception hierarchy shared across the package."""


class AdforgeError(Exception):
    """Base class for all package errors."""


class ContractError(AdforgeError):
    """An operation was called in violation of its stated contract."""


class DimensionError(ContractError):
    """Operand shapes do not conform to the requested operation."""


class ConfigurationError(AdforgeError):
    """A run/experiment configuration is invalid or unsatisfiable."""


class NumericError(AdforgeError):
    """A non-finite or degenerate numeric condition was detected."""


class DatasetError(AdforgeError):
    """A dataset failed to load or violates the dataset invariants."""


class MetricError(AdforgeError):
    """A metric is undefined for the given inputs (e.g. single-class labels)."""


class InsufficientNeighbors(AdforgeError):
    """SMOTE cannot run: fewer labeled anomalies than required neighbors."""
