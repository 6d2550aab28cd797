"""Minimax state estimation for linear descriptor systems.

Discrete time: :mod:`descest.discrete` runs the recursive a posteriori
estimator, reports observable directions and the ellipsoid of consistent
states; :mod:`descest.oracle` checks it by brute force. Continuous time:
:mod:`descest.continuous` solves the a priori and a posteriori estimators as
two-point boundary value problems.
"""

from .continuous import (
    BvpSolution,
    Grid,
    aposteriori_solve,
    apriori_solve,
    block_decompose,
    check_condition_a,
    functional_estimate,
)
from .discrete import (
    Ellipsoid,
    EstimatorState,
    MinimaxEstimate,
    estimate,
    init,
    noncausality_index,
    posterior_ellipsoid,
    run,
    step,
)
from .errors import ContractError, IllPosedError, InfeasibleError, NumericalError
from .model import (
    ContinuousModel,
    DescriptorModel,
    DisturbanceRealization,
    UncertaintyWeights,
    disturbance_cost,
    residuals_of,
    simulate,
    validate,
)

__version__ = "0.1.0"
