"""Exception classes used across femtoflow.

Every error carries a stable ``code`` string so that callers (the CLI in
particular) can map failures to exit statuses without string matching.
"""


class FemtoflowError(Exception):
    """Base class for all errors raised by femtoflow."""

    code = "FEMTOFLOW_ERROR"


class ValidationError(FemtoflowError, ValueError):
    """Raised when parameters violate one or more invariants.

    Parameters
    ----------
    errors : list of (str, str)
        ``(field, message)`` pairs, one per violated invariant.
    """

    code = "VALIDATION_FAILED"

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"{name}: {msg}" for name, msg in self.errors)
        super().__init__(f"{len(self.errors)} invalid parameter(s): {lines}")


class InvalidChannelSplitError(FemtoflowError, ValueError):
    code = "INVALID_CHANNEL_SPLIT"


class NonFiniteRateError(FemtoflowError, ValueError):
    code = "NONFINITE_RATE"


class SingularSystemError(FemtoflowError, ArithmeticError):
    code = "SINGULAR_SYSTEM"


class DegenerateSplitError(FemtoflowError, ValueError):
    code = "DEGENERATE_SPLIT"


class NegativeTrafficError(FemtoflowError, ValueError):
    code = "NEGATIVE_TRAFFIC"


class BalanceDivergenceError(FemtoflowError, ArithmeticError):
    code = "BALANCE_DIVERGENCE"


class NoConvergenceError(FemtoflowError, RuntimeError):
    """The damped fixed-point iteration hit its iteration cap."""

    code = "NO_CONVERGENCE"

    def __init__(self, max_iter, residual):
        self.max_iter = max_iter
        self.residual = residual
        super().__init__(
            f"fixed point did not converge in {max_iter} iterations "
            f"(last residual {residual:.3e})"
        )


class OutOfSupportError(FemtoflowError, ValueError):
    code = "OUT_OF_SUPPORT"


class NonFiniteSampleError(FemtoflowError, FloatingPointError):
    code = "NONFINITE_SAMPLE"
