"""Exception hierarchy shared across the package."""


class BlobtrackError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(BlobtrackError):
    """An argument violates a documented precondition."""


class StructuralError(BlobtrackError):
    """Mesh or container structure is inconsistent."""


class StatisticsError(BlobtrackError):
    """A statistic is requested on a degenerate sample."""


class NumericalError(BlobtrackError):
    """A numerical operation cannot proceed (zero baseline, zero mass)."""


class ContractError(BlobtrackError):
    """A caller broke an ordering or consistency contract."""


class InputError(BlobtrackError):
    """An input file is missing, truncated or malformed."""
