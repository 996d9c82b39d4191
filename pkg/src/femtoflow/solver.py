"""Damped fixed-point iteration for the three coupled blocking probabilities."""

from dataclasses import dataclass

import numpy as np

from . import markov, traffic
from ._validation import check_count
from .domain import BlockingProbs, validate
from .exceptions import NoConvergenceError


@dataclass(frozen=True)
class SolverConfig:
    """Convergence controls; ``tol`` bounds the max-abs fixed-point residual."""

    tol: float = 1e-10
    max_iter: int = 10_000
    damping: float = 0.5

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol!r}")
        check_count(self.max_iter, "max_iter", minimum=1)
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping!r}")


@dataclass(frozen=True, eq=False)
class Solution:
    blocking: BlockingProbs
    rates: traffic.TrafficRates
    dist: markov.StationaryDistribution
    handoff: traffic.HandoffProbs
    iterations: int
    residual: float
    params: object = None


def _apply_map(params, hp, blocking):
    rates = traffic.aggregate_rates(params, hp, blocking)
    dist = markov.stationary_product_form(
        rates.lambda_1, rates.lambda_2, rates.mu_1, rates.mu_2, params.N_F, params.N_F_O
    )
    new = BlockingProbs(
        p_fu_f=markov.blocking_femto_user(dist),
        p_mu_f=markov.blocking_macro_user_in_femto(dist),
        p_u_m=traffic.erlang_b(rates.T_M + rates.T_F, params.N_M),
    )
    return new, rates, dist


def residual(params, blocking):
    """Max-abs change produced by one application of the fixed-point map."""
    params = validate(params)
    hp = traffic.handoff_probs(params)
    new, _, _ = _apply_map(params, hp, blocking)
    return float(np.max(np.abs(np.subtract(new.as_tuple(), blocking.as_tuple()))))


def solve(params, config=None, initial=None):
    """Solve for the blocking probabilities and the traffic they imply.

    Parameters
    ----------
    params : SystemParams
    config : SolverConfig, optional
    initial : BlockingProbs, optional
        Starting point; defaults to the light-traffic limit ``(0, 0, 0)``.

    Returns
    -------
    Solution
        ``rates`` and ``dist`` are evaluated at the returned blocking values.

    Raises
    ------
    ValidationError
        If ``params`` violates an invariant.
    NoConvergenceError
        If the residual is still above ``config.tol`` after ``max_iter`` steps.
    """
    params = validate(params)
    config = config or SolverConfig()
    hp = traffic.handoff_probs(params)
    p = np.array(initial.as_tuple() if initial is not None else (0.0, 0.0, 0.0))
    d = config.damping
    res = np.inf
    for it in range(1, config.max_iter + 1):
        new, rates, dist = _apply_map(params, hp, BlockingProbs(*p))
        new = np.array(new.as_tuple())
        res = float(np.max(np.abs(new - p)))
        if res < config.tol:
            # Report the state the residual was measured at, not the next step.
            return Solution(
                blocking=BlockingProbs(*map(float, p)), rates=rates, dist=dist,
                handoff=hp, iterations=it, residual=res, params=params,
            )
        p = np.clip((1.0 - d) * p + d * new, 0.0, 1.0)
    raise NoConvergenceError(config.max_iter, res)
