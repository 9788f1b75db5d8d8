"""Exception hierarchy shared by every module."""


class LampError(Exception):
    """Base class for all errors raised by lampcs."""


class RankDeficient(LampError):
    """A column subset is numerically rank deficient."""


class IndexOutOfRange(LampError, IndexError):
    pass


class ZeroColumn(LampError, ValueError):
    pass


class NotNormalized(LampError, ValueError):
    pass


class WindowOverflow(LampError, ValueError):
    """A pulse window or shifted support does not fit inside the signal."""


class BadBand(LampError, ValueError):
    pass


class EmptyTrueSupport(LampError, ValueError):
    pass


class ShapeMismatch(LampError, ValueError):
    pass


class InconsistentTrialCounts(LampError, ValueError):
    pass


class ConfigInvalid(LampError, ValueError):
    pass


class FormatError(LampError, ValueError):
    """Malformed DMAT / SUPP / report text."""
