"""Exception types shared across the package."""


class K3FMError(Exception):
    """Base class for errors raised by this package."""


class LatticeParseError(K3FMError):
    """A lattice file or object violates the input format."""


class UnsupportedError(K3FMError):
    """The input falls outside the cases the engine can decide."""


class CapExceededError(K3FMError):
    """A finite enumeration would exceed the configured size cap."""
