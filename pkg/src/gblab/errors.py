"""Exception hierarchy shared by every gblab module."""


class GBLabError(Exception):
    """Base class for all library errors."""


class GraphError(GBLabError, ValueError):
    """Invalid graph input (raised at build or load time)."""


class NonPositiveWeight(GraphError):
    pass


class LoopEdge(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class AsymmetricWeight(DuplicateEdge):
    """Both orientations of an edge were given with different weights."""


class Disconnected(GraphError):
    pass


class UnknownVertex(GraphError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class GraphMismatch(GBLabError, ValueError):
    """Two cochains (or a cochain and a cutoff) live on different graphs."""


class BadParameter(GBLabError, ValueError):
    pass


class CoreTooSmall(BadParameter):
    pass


class PreconditionError(GBLabError, ValueError):
    pass


class EmptyAdmissibleSet(PreconditionError):
    pass


class FrontierContamination(PreconditionError):
    """A probe region touches (or comes too close to) the truncation frontier."""


class InsufficientDepth(PreconditionError):
    def __init__(self, message, required_depth=None):
        super().__init__(message)
        self.required_depth = required_depth


class SolverBreakdown(GBLabError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NoConvergence(GBLabError, RuntimeError):
    def __init__(self, message, value=None, bracket=None, iterations=None):
        super().__init__(message)
        self.value = value
        self.bracket = bracket
        self.iterations = iterations
