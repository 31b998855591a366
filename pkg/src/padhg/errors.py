"""Exception hierarchy for the padhg package.

Every mathematically meaningful failure gets its own class so that callers
(and the CLI) can map errors to stable machine-readable codes.
"""


class PadhgError(Exception):
    """Base class; `code` is the stable identifier used in JSON error output."""

    code = "error"

    def __init__(self, detail=""):
        self.detail = str(detail)
        super().__init__(self.detail)


# -- p-adic core -------------------------------------------------------------

class DenominatorDivisibleByP(PadhgError):
    code = "denominator-divisible-by-p"


class DivisionByZero(PadhgError, ZeroDivisionError):
    code = "division-by-zero"


class PrecisionExhausted(PadhgError):
    code = "precision-exhausted"


class NotAUnit(PadhgError):
    code = "not-a-unit"


class RamifiedExtension(PadhgError):
    code = "ramified-extension"


class NonInvertible(PadhgError):
    code = "non-invertible"


# -- series algebra ----------------------------------------------------------

class NonUnitConstantTerm(PadhgError):
    code = "non-unit-constant-term"


class InvalidLift(PadhgError):
    code = "invalid-lift"


class SingularRecursion(PadhgError):
    code = "singular-recursion"


class DimensionMismatch(PadhgError):
    code = "dimension-mismatch"


# -- special functions -------------------------------------------------------

class NonIntegralArgument(PadhgError):
    code = "non-integral-argument"


class BracketPoleAtOne(PadhgError):
    code = "bracket-pole-at-one"


class BudgetExceeded(PadhgError):
    code = "budget-exceeded"


# -- Dirichlet characters / L-values ----------------------------------------

class ModulusDivisibleByP(PadhgError):
    code = "modulus-divisible-by-p"


class NonPrimitive(PadhgError):
    code = "non-primitive"


class BadModulus(PadhgError):
    code = "bad-modulus"


class RIsOne(PadhgError):
    code = "r-is-one"


# -- hypergeometric data -----------------------------------------------------

class NotPIntegral(PadhgError):
    code = "not-p-integral"


class HypothesisViolation(PadhgError):
    code = "hypothesis-violation"


class PoleInParameters(PadhgError):
    code = "pole-in-parameters"


class RepeatedNode(PadhgError):
    code = "repeated-node"


class SingularBasis(PadhgError):
    code = "singular-basis"


# -- pencils / geometry ------------------------------------------------------

class BadWeights(PadhgError):
    code = "bad-weights"


class PDividesParameter(PadhgError):
    code = "p-divides-parameter"


class SingularFiber(PadhgError):
    code = "singular-fiber"


class BadSpecializationPoint(PadhgError):
    code = "bad-specialization-point"
