"""Exception hierarchy shared by all modules."""


class SigmaHeckeError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(SigmaHeckeError):
    """An internal guarantee failed; always signals a bug, never bad input."""


# arith
class NotAUnit(SigmaHeckeError, ValueError):
    pass


class NoWitness(ContractViolation):
    pass


# simplicial / chains
class IndexOutOfRange(SigmaHeckeError, IndexError):
    pass


class CannotFaceVertex(SigmaHeckeError, ValueError):
    pass


class NotSimplicialMap(SigmaHeckeError, ValueError):
    pass


class NotASubfamily(SigmaHeckeError, ValueError):
    pass


class NotNested(SigmaHeckeError, ValueError):
    pass


# groups
class InvariantViolation(SigmaHeckeError, ValueError):
    pass


class ConjugationMismatch(ContractViolation):
    pass


class ParseError(SigmaHeckeError, ValueError):
    pass


# hecke
class ExceedsCap(SigmaHeckeError):
    def __init__(self, message, explored=0, cap=0):
        super().__init__(message)
        self.explored = explored
        self.cap = cap


class CharacterNotLambdaVanishing(SigmaHeckeError, ValueError):
    pass


class UndefinedAtBase(SigmaHeckeError, ValueError):
    pass


class InCore(SigmaHeckeError, ValueError):
    pass


class EscapeFailed(ContractViolation):
    pass


# sigma / vietoris
class DimensionMismatch(SigmaHeckeError, ValueError):
    pass


class WindowTooSmall(SigmaHeckeError):
    pass


class VertexOutsideWindow(SigmaHeckeError, ValueError):
    pass
