"""Exception types raised by cohsteer."""


class CohsteerError(ValueError):
    """Base class for invalid inputs."""


class BlochOutOfBall(CohsteerError):
    pass


class NotAState(CohsteerError):
    pass


class NotHermitian(CohsteerError):
    pass


class NegativeEigenvalue(CohsteerError):
    pass


class DomainError(CohsteerError):
    pass


class SingularFilter(CohsteerError):
    pass


class ZeroTrace(CohsteerError):
    pass


class NoCrossing(CohsteerError):
    """The functional never exceeds its bound on the searched interval."""


class StationaryState(CohsteerError):
    """The state commutes with the generator, so no speed limit is defined."""


class DegenerateObservable(CohsteerError):
    """An observable proportional to the identity has no measurement basis."""
