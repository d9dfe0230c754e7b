"""Binary interacting chains on a random signed graph.

Simulation of the conditional Markov dynamics, community recovery from the
column sums of the empirical lag-1 covariance matrix, an exact small-N
covariance oracle, and Monte Carlo helpers. The heavy lifting lives in the
C++ extension ``chaincomm._core``.
"""

from ._core import (
    Environment,
    ModelParams,
    TheoreticalConstants,
    Trajectory,
    default_burn_in,
    kmeans2,
    oracle,
    recover,
    run_cell,
    run_replica,
    sample_environment,
    score,
    sigma_hat,
    simulate,
    theoretical_constants,
    transition_probs,
)

__all__ = [
    "Environment",
    "ModelParams",
    "TheoreticalConstants",
    "Trajectory",
    "default_burn_in",
    "kmeans2",
    "oracle",
    "recover",
    "run_cell",
    "run_replica",
    "sample_environment",
    "score",
    "sigma_hat",
    "simulate",
    "theoretical_constants",
    "transition_probs",
]

__version__ = "0.1.0"
