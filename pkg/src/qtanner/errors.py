"""Exception types shared across the package."""


class SpecError(ValueError):
    """A code spec or config violates its invariants."""


class PreconditionError(ValueError):
    """A fast path or construction was called outside its hypotheses."""


class IntegrityError(RuntimeError):
    """A constructed object failed a consistency check (e.g. Hx Hz^T != 0)."""


class RefusalError(RuntimeError):
    """An exact computation was refused because the input is too large."""
