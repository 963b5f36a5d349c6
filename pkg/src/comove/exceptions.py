"""Exception hierarchy shared by all modules."""


class ComoveError(Exception):
    """Base class for every error raised by this package."""


class IngestionError(ComoveError):
    """Malformed input file (bad header, bad row, duplicate date...)."""


class PanelError(ComoveError):
    """A spread panel cannot be built or is too short for the requested step."""


class DegenerateRegressionError(ComoveError):
    """Regression with a singular design, e.g. a constant series."""


class RankDeficiencyError(DegenerateRegressionError):
    """OLS initializer cannot identify a coefficient."""


class LikelihoodError(ComoveError):
    """Conditional covariance became numerically singular."""


class TransformDomainError(ComoveError):
    """Parameters lie outside the open set handled by the transforms."""


class PreconditionError(ComoveError):
    """Operation called outside its documented domain."""


class IndefiniteHessianError(ComoveError):
    """Numerical Hessian of the objective is not positive definite."""
