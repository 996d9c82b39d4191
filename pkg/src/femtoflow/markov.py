"""Channel-occupancy chain of a single femtocell.

State ``(i, j)``: ``i`` channels held by femtocell users, ``j`` by macrocell
users. Femtocell users may take any free channel (closed first, then open);
macrocell users only open ones, so ``j <= N_F_O`` and ``i + j <= N_F``.
The chain is a coordinate-convex truncation of two independent infinite-server
queues, hence the product-form stationary law.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from ._validation import check_count, check_rate
from .exceptions import DegenerateSplitError, InvalidChannelSplitError, SingularSystemError

MAX_DIRECT_STATES = 10_000


class ChannelState(NamedTuple):
    i: int
    j: int


def _check_split(n_f, n_f_o):
    n_f = check_count(n_f, "n_f", minimum=0)
    n_f_o = check_count(n_f_o, "n_f_o", minimum=0)
    if n_f_o > n_f:
        raise InvalidChannelSplitError(f"n_f_o={n_f_o} exceeds n_f={n_f}")
    return n_f, n_f_o


def enumerate_states(n_f, n_f_o):
    """All admissible ``(i, j)`` in lexicographic order."""
    n_f, n_f_o = _check_split(n_f, n_f_o)
    return [
        ChannelState(i, j)
        for i in range(n_f + 1)
        for j in range(min(n_f_o, n_f - i) + 1)
    ]


def state_count(n_f, n_f_o):
    """Closed-form size of the state space."""
    n_f, n_f_o = _check_split(n_f, n_f_o)
    return (n_f - n_f_o + 1) * (n_f_o + 1) + n_f_o * (n_f_o + 1) // 2


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    """Probability vector over :func:`enumerate_states` order.

    ``rates`` holds ``(lambda_1, lambda_2, mu_1, mu_2)``.
    """

    n_f: int
    n_f_o: int
    rates: tuple
    states: tuple
    probabilities: np.ndarray

    def __post_init__(self):
        self.probabilities.setflags(write=False)

    def __getitem__(self, state):
        return float(self.probabilities[self._index[tuple(state)]])

    def get(self, state, default=0.0):
        idx = self._index.get(tuple(state))
        return default if idx is None else float(self.probabilities[idx])

    @property
    def _index(self):
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {tuple(s): k for k, s in enumerate(self.states)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    @property
    def i(self):
        return np.array([s[0] for s in self.states])

    @property
    def j(self):
        return np.array([s[1] for s in self.states])

    def as_dict(self):
        return {s: float(p) for s, p in zip(self.states, self.probabilities)}

    def mean_occupied(self):
        """Expected number of busy channels, E[i + j]."""
        return float(np.dot(self.i + self.j, self.probabilities))


def _check_rates(lambda_1, lambda_2, mu_1, mu_2):
    return (
        check_rate(lambda_1, "lambda_1"),
        check_rate(lambda_2, "lambda_2"),
        check_rate(mu_1, "mu_1"),
        check_rate(mu_2, "mu_2"),
    )


def stationary_product_form(lambda_1, lambda_2, mu_1, mu_2, n_f, n_f_o):
    """Closed-form stationary law ``S(i,j) ~ rho1^i/i! * rho2^j/j!``.

    Weights are built in log space and shifted by their maximum before
    exponentiating, so the normalisation never overflows.
    """
    rates = _check_rates(lambda_1, lambda_2, mu_1, mu_2)
    states = enumerate_states(n_f, n_f_o)
    i = np.array([s.i for s in states], dtype=float)
    j = np.array([s.j for s in states], dtype=float)
    log_rho1 = math.log(rates[0] / rates[2])
    log_rho2 = math.log(rates[1] / rates[3])
    logw = i * log_rho1 - gammaln(i + 1) + j * log_rho2 - gammaln(j + 1)
    w = np.exp(logw - logw.max())
    return StationaryDistribution(
        n_f=int(n_f), n_f_o=int(n_f_o), rates=rates, states=tuple(states),
        probabilities=w / w.sum(),
    )


def generator_matrix(lambda_1, lambda_2, mu_1, mu_2, n_f, n_f_o):
    """Dense CTMC generator over :func:`enumerate_states` order."""
    states = enumerate_states(n_f, n_f_o)
    index = {s: k for k, s in enumerate(states)}
    Q = np.zeros((len(states), len(states)))
    for k, (i, j) in enumerate(states):
        if i + j < n_f:
            Q[k, index[(i + 1, j)]] += lambda_1
            if j < n_f_o:
                Q[k, index[(i, j + 1)]] += lambda_2
        if i > 0:
            Q[k, index[(i - 1, j)]] += i * mu_1
        if j > 0:
            Q[k, index[(i, j - 1)]] += j * mu_2
        Q[k, k] = -Q[k].sum()
    return Q, states


def stationary_direct_solve(lambda_1, lambda_2, mu_1, mu_2, n_f, n_f_o):
    """Solve the global-balance equations ``pi Q = 0`` by dense linear algebra.

    One balance equation is replaced by the normalisation row. Independent of
    the product form and used as its oracle.
    """
    rates = _check_rates(lambda_1, lambda_2, mu_1, mu_2)
    if state_count(n_f, n_f_o) > MAX_DIRECT_STATES:
        raise ValueError(f"state space larger than {MAX_DIRECT_STATES}")
    Q, states = generator_matrix(*rates, n_f, n_f_o)
    A = Q.T.copy()
    A[-1, :] = 1.0
    b = np.zeros(len(states))
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("balance system is singular") from exc
    if not np.all(np.isfinite(pi)) or np.linalg.cond(A) > 1e14:
        raise SingularSystemError("balance system is numerically singular")
    pi = np.clip(pi, 0.0, None)
    return StationaryDistribution(
        n_f=int(n_f), n_f_o=int(n_f_o), rates=rates, states=tuple(states),
        probabilities=pi / pi.sum(),
    )


def _full_mask(dist):
    return (dist.i + dist.j) == dist.n_f


def blocking_femto_user(dist):
    """Probability that an arriving femtocell user finds every channel busy."""
    return float(min(1.0, dist.probabilities[_full_mask(dist)].sum()))


def blocking_macro_user_in_femto(dist):
    """Probability that an arriving macrocell user finds no free open channel.

    Blocked states are the full ones plus those with every open channel taken
    by macrocell users. With no open channels this is 1.
    """
    if dist.n_f_o == 0:
        return 1.0
    mask = _full_mask(dist) | (dist.j == dist.n_f_o)
    return float(min(1.0, dist.probabilities[mask].sum()))


def occupancy_closed(dist):
    """Busy probability of one closed channel.

    While ``i <= N_F - N_F_O`` a tagged closed channel is busy with
    probability ``i / (N_F - N_F_O)``; beyond that every closed channel is busy.
    """
    n_closed = dist.n_f - dist.n_f_o
    if n_closed == 0:
        raise DegenerateSplitError("no closed channels (N_F == N_F_O)")
    i = dist.i
    weight = np.where(i <= n_closed, i / n_closed, 1.0)
    return float(min(1.0, np.dot(weight, dist.probabilities)))


def occupancy_open(dist):
    """Busy probability of one open channel, with the published weights.

    ``j / N_F_O`` while femtocell users fit in closed channels, and
    ``(i - (N_F - N_F_O)) / N_F_O`` once they spill over. The second branch
    does not count macrocell users sharing the open channels; kept as is.
    """
    n_open = dist.n_f_o
    if n_open == 0:
        raise DegenerateSplitError("no open channels (N_F_O == 0)")
    n_closed = dist.n_f - n_open
    i, j = dist.i, dist.j
    weight = np.where(i <= n_closed, j / n_open, (i - n_closed) / n_open)
    return float(min(1.0, np.dot(weight, dist.probabilities)))
