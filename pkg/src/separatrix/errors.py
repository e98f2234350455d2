"""Exception hierarchy shared by the library and the command line.

Every error carries a short machine-readable ``code`` and the process exit
status the CLI maps it to.
"""


class SeparatrixError(Exception):
    code = "error"
    exit_status = 1


class PolySyntaxError(SeparatrixError, ValueError):
    code = "syntax"

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} at offset {offset}"
        super().__init__(message)


class DegreeTooHigh(SeparatrixError, ValueError):
    code = "degree"


class AssumptionError(SeparatrixError):
    """A kernel violates one of the standing hypotheses."""

    code = "assumption"
    exit_status = 2


class NonPositiveIntegral(AssumptionError):
    code = "non-positive-integral"


class DegenerateKernel(AssumptionError):
    code = "degenerate-kernel"


class NumericalError(SeparatrixError):
    code = "numerical"
    exit_status = 3


class NonPositiveLambda(NumericalError):
    code = "non-positive-lambda"

    def __init__(self, p):
        self.p = p
        super().__init__(f"Lambda_{p}(1) is not positive")


class ExponentOverflow(NumericalError):
    code = "exponent-overflow"

    def __init__(self, p):
        self.p = p
        super().__init__(f"binary exponent cap exceeded at p = {p}")


class NoConvergence(NumericalError):
    code = "no-convergence"

    def __init__(self, message, roots=None, residuals=None):
        self.roots = roots
        self.residuals = residuals
        super().__init__(message)


class DegenerateFit(NumericalError):
    code = "degenerate-fit"
