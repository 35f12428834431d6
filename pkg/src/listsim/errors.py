"""Exception types shared across the package."""


class InvalidParam(ValueError):
    """Model or run configuration violates its contract."""


class NotSubcritical(ValueError):
    """A subcritical-only bound was requested at branching factor >= 1."""


class NotSupercritical(ValueError):
    """A supercritical-only bound was requested at branching factor <= 1."""


class TooLarge(ValueError):
    """Brute-force enumeration guard exceeded."""


class Overflow(RuntimeError):
    """Aggregate trial count exceeded the representable limit; the
    trajectory must be aborted and reported as truncated."""

    def __init__(self, step: int, count: int):
        super().__init__(f"trial count overflow at step {step} (count={count})")
        self.step = step
        self.count = count


class ListExploded(RuntimeError):
    """Uncapped candidate list crossed the hard memory guard; configure a
    cap or use the aggregate counts engine."""
