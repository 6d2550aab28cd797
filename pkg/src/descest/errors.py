"""Exception hierarchy shared by all estimator modules."""


class ContractError(ValueError):
    """Inputs violate a documented precondition (shapes, symmetry, ...)."""


class NumericalError(RuntimeError):
    """A numerical kernel failed to produce a trustworthy result."""


class InfeasibleError(NumericalError):
    """The data admit no consistent trajectory or disturbance."""


class IllPosedError(NumericalError):
    """A discretized boundary value problem has no unique solution."""
