"""Exception types shared across the package."""


class SizeGuardError(ValueError):
    """An operation would exceed its desk-scale enumeration budget."""


class PrecisionError(RuntimeError):
    """A float pipeline failed an exactness self-check; results are untrusted."""
