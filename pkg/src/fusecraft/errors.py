"""Exception hierarchy shared by all fusecraft modules."""


class FusecraftError(Exception):
    """Base class for all errors raised by this package."""


class UnsupportedFormatError(FusecraftError):
    """Raster file is in a format this package does not read or write."""


class CorruptDataError(FusecraftError):
    """Raster file is recognized but its contents are malformed."""


class LengthMismatchError(FusecraftError):
    """Flat pixel buffer length does not match the declared dimensions."""


class DimensionMismatchError(FusecraftError):
    """Two images that must share dimensions do not."""


class InvalidParametersError(FusecraftError):
    """Membership function or engine parameters violate their constraints."""


class UnknownTermLabelError(FusecraftError):
    """A rule references a term label that no variable defines."""


class EmptyRuleBaseError(FusecraftError):
    """An inference engine was built with no rules."""


class DegenerateInputError(FusecraftError):
    """Inputs make the requested statistic undefined (e.g. zero variance)."""


class SingularSystemError(FusecraftError):
    """Least-squares normal equations are singular and damping is disabled."""


class ConfigError(FusecraftError):
    """Engine configuration document failed to parse or validate."""
