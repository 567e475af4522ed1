"""Exception types shared across modules."""


class DomainError(ValueError):
    """A formula was evaluated outside the range where it is defined."""


class AbsoluteContinuityError(ValueError):
    """p puts mass where q has none, so log(p/q) is undefined."""
