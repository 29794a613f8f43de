"""Exception types shared across the package.

Two families matter to callers: configuration and input problems
(``ParameterError``, ``DataFormatError``, ``DimensionError``,
``IndexingError``) and numerical or resource failures encountered while
computing (``NumericError``, ``DegeneracyError``, ``IntegrationError``,
``ContractError``, ``CapacityError``).  The command line runner maps the
first family to exit code 2 and the second to exit code 3.
"""


class NydmapError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(NydmapError, ValueError):
    """A parameter value is out of range or inconsistent with others."""


class DataFormatError(NydmapError, ValueError):
    """An input file or array does not have the expected layout."""


class DimensionError(NydmapError, ValueError):
    """Array shapes do not line up."""


class IndexingError(NydmapError, IndexError):
    """A row or column index is out of bounds or repeated."""


class NumericError(NydmapError, ArithmeticError):
    """A computation produced non-finite or otherwise unusable values."""


class DegeneracyError(NumericError):
    """An operator collapsed to (numerical) rank zero where rank is required."""


class IntegrationError(NumericError):
    """A trajectory left the representable range during time stepping."""


class ContractError(NydmapError):
    """An internal precondition failed, for example an asymmetric matrix
    was passed where a symmetric one is required."""


class CapacityError(NydmapError, MemoryError):
    """The requested problem size does not fit in memory."""


class StageFailure(NydmapError):
    """Wraps an error with the pipeline stage it occurred in."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause


class RankDeficiencyWarning(UserWarning):
    """Emitted when a sketch or factor has lower numerical rank than asked."""
