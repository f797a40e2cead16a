"""Exception hierarchy shared by every module in the package."""


class ScopeError(Exception):
    """Base class for all errors raised by scope_prune."""


class DimensionMismatch(ScopeError, ValueError):
    pass


class NonFinite(ScopeError, ValueError):
    pass


class NegativeSaliency(ScopeError, ValueError):
    pass


class InvalidSimilarity(ScopeError, ValueError):
    pass


class InvalidConfig(ScopeError, ValueError):
    pass


class KTooLarge(ScopeError, ValueError):
    pass


class IndexOutOfRange(ScopeError, IndexError):
    pass


class EmptySelection(ScopeError, ValueError):
    pass


class ThetaOutOfRange(ScopeError, ValueError):
    pass


class SpecInvalid(ScopeError, ValueError):
    pass


class ManifestParseError(ScopeError, ValueError):
    pass


class FileMissing(ScopeError, FileNotFoundError):
    pass


class SizeMismatch(ScopeError, ValueError):
    pass


class ParseError(ScopeError, ValueError):
    pass


class IoError(ScopeError, OSError):
    pass


class InvalidSelection(ScopeError, ValueError):
    pass


class ChecksumMismatch(ScopeError, ValueError):
    pass
