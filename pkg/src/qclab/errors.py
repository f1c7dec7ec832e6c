"""Exception types shared across the package.

The CLI maps :class:`InvalidParameters` to exit status 2 and every other
:class:`QCLabError` to exit status 3 (numeric infeasibility).
"""


class QCLabError(Exception):
    """Base class; ``code`` is a short machine-readable tag."""

    code = "error"


class InvalidParameters(QCLabError, ValueError):
    code = "invalid-params"


class DegenerateRegion(InvalidParameters):
    code = "degenerate-region"


class DerivativeUndefined(QCLabError, ValueError):
    code = "derivatives-undefined-at-origin"


class BranchUndefined(QCLabError):
    code = "branch-undefined"


class NoConvergence(QCLabError):
    code = "no-convergence"


class NotNormalized(QCLabError, ValueError):
    code = "not-normalized"


class Infeasible(QCLabError):
    code = "infeasible-params"


class PreconditionViolation(QCLabError):
    code = "precondition-violation"


class MissingData(QCLabError, ValueError):
    code = "missing-data"


class DivergenceError(QCLabError):
    code = "divergence-error"


class NeedsDenserLambdas(QCLabError):
    code = "needs-denser-lambdas"


class AliasingWarning(UserWarning):
    """Grid data reaches into the periodization guard band."""
