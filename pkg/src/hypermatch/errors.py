"""Exception types shared across the package."""


class HypermatchError(Exception):
    """Base class for package-specific errors."""


class FormatError(HypermatchError):
    """Malformed instance file or document."""


class WitnessError(HypermatchError):
    """A claimed structural certificate failed re-verification."""


class FaithfulnessError(HypermatchError):
    """A structure that must exist (or a colour that is forced) was not found.

    Raised only when the constructive pipeline's runtime checks fail, which
    would contradict the underlying combinatorial guarantees; treated as an
    implementation bug signal, never as a normal outcome.
    """
