"""Exception hierarchy shared by every module of the package."""


class DerivRuleError(Exception):
    """Base class for all computation errors raised by this package."""


# numerics
class NonPositiveOffdiagonal(DerivRuleError):
    pass


class PrecisionExhausted(DerivRuleError):
    pass


class AsymmetricInput(DerivRuleError):
    pass


# opsystems
class FavardViolation(DerivRuleError):
    pass


class NoClosedForm(DerivRuleError):
    pass


class OutOfSupport(DerivRuleError):
    pass


class UnknownSystem(DerivRuleError, ValueError):
    """Raised for system spec strings outside the CLI vocabulary."""


# quadrature
class EvaluationFailure(DerivRuleError):
    pass


# interpolation
class NonMonotoneSamples(DerivRuleError):
    pass


class WindowTooSmall(DerivRuleError):
    pass


class PoleInWindow(DerivRuleError):
    """A reciprocal difference vanished; the caller should fall back to a polynomial window."""


# inversion
class ZeroDerivative(DerivRuleError):
    pass


class DegenerateFit(DerivRuleError):
    pass


# markov
class PoleHit(DerivRuleError):
    pass


class DivisionNearZero(DerivRuleError):
    pass


# photoeffect
class QuadratureOrderInsufficient(DerivRuleError):
    pass


class NonMonotoneEnergies(DerivRuleError):
    pass


class NonPositiveEnergy(DerivRuleError):
    pass
