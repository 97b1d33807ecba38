"""Exception hierarchy shared by all modules."""


class GraphPoincareError(ValueError):
    """Base class for every error raised by this package."""


# graph construction and input
class DisconnectedGraph(GraphPoincareError):
    pass


class SelfLoop(GraphPoincareError):
    pass


class NonpositiveWeight(GraphPoincareError):
    pass


class DuplicateEdgeConflict(GraphPoincareError):
    pass


class LengthMismatch(GraphPoincareError):
    pass


class UnknownFamily(GraphPoincareError):
    pass


class BadParams(GraphPoincareError):
    pass


class NonpositiveMass(GraphPoincareError):
    pass


class ParseError(GraphPoincareError):
    pass


# numeric kernels
class NotPositiveDefinite(GraphPoincareError):
    pass


class NoConvergence(GraphPoincareError):
    pass


class DimensionTooLarge(GraphPoincareError):
    pass


class ObjectiveNaN(GraphPoincareError):
    pass


# metrics / spectral / verification
class OmegaNotProper(GraphPoincareError):
    pass


class IndexOutOfRange(GraphPoincareError):
    pass


class InternalIdentityViolation(GraphPoincareError):
    """Two computations that must agree exactly did not (signals a solver bug)."""


class BadFamily(GraphPoincareError):
    pass


class BadF(GraphPoincareError):
    pass


class UnknownTheoremId(GraphPoincareError):
    pass
