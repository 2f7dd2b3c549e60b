"""Exception hierarchy shared by every monocert module."""


class MonocertError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(MonocertError, ValueError):
    pass


class EmptySet(MonocertError, ValueError):
    pass


class UnboundedSet(MonocertError, ValueError):
    pass


class PointNotInSet(MonocertError, ValueError):
    pass


class SupportUnbounded(MonocertError, ValueError):
    pass


class HasRays(MonocertError, ValueError):
    pass


class EmptyOperator(MonocertError, ValueError):
    pass


class ConditionsNotMet(MonocertError, ValueError):
    """Raised when an epigraph fails the conditions needed to read off a function."""

    def __init__(self, report):
        super().__init__(f"epigraph conditions not met: {report}")
        self.report = report


class NotCyclicallyMonotone(MonocertError, ValueError):
    """Carries the cycle certificate that blocks the potential construction."""

    def __init__(self, violation):
        super().__init__(
            f"operator is not cyclically monotone: cycle {list(violation.indices)} "
            f"has sum {violation.cycle_sum}"
        )
        self.violation = violation


class FormatError(MonocertError, ValueError):
    pass
