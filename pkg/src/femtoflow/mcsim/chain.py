"""Event-by-event simulation of the single-femtocell occupancy chain."""

from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .. import markov
from .._validation import check_rate, spawn_seeds
from ._stats import SimEstimate, UniformStream


@dataclass(frozen=True, eq=False)
class ChainSimResult:
    """Empirical occupancy law and blocking seen by arrivals.

    ``dist`` pools every replication; ``state_estimates`` follow
    ``dist.states`` order.
    """

    dist: markov.StationaryDistribution
    state_estimates: tuple
    p_fu_f: SimEstimate
    p_mu_f: SimEstimate
    time_p_fu_f: SimEstimate
    mean_occupied: SimEstimate
    replications: tuple


def _replicate(seed, rates, n_f, n_f_o, horizon, warmup, unit):
    lambda_1, lambda_2, mu_1, mu_2 = rates
    states = markov.enumerate_states(n_f, n_f_o)
    index = {s: k for k, s in enumerate(states)}
    up_i = [index.get((i + 1, j), -1) if i + j < n_f else -1 for i, j in states]
    up_j = [index.get((i, j + 1), -1) if (j < n_f_o and i + j < n_f) else -1 for i, j in states]
    dn_i = [index.get((i - 1, j), -1) for i, j in states]
    dn_j = [index.get((i, j - 1), -1) for i, j in states]
    r_i = [i * mu_1 for i, _ in states]
    r_j = [j * mu_2 for _, j in states]
    arr = lambda_1 + lambda_2
    total = [arr + a + b for a, b in zip(r_i, r_j)]

    stream = UniformStream(np.random.default_rng(seed))
    occ = [0.0] * len(states)
    fu_tries = fu_blocked = mu_tries = mu_blocked = 0
    by_events = unit == "events"
    start = warmup * horizon
    k = 0
    t = 0.0
    n = 0
    while True:
        if by_events:
            if n >= horizon:
                break
            counting = n >= start
        dt = stream.exponential() / total[k]
        if not by_events:
            if t + dt >= horizon:
                if t < horizon:
                    occ[k] += horizon - max(t, start)
                break
            counting = t >= start
            if not counting and t + dt > start:
                occ[k] += t + dt - start
        if counting:
            occ[k] += dt
        t += dt
        n += 1
        x = stream.uniform() * total[k]
        if x < lambda_1:
            if counting:
                fu_tries += 1
            nxt = up_i[k]
            if nxt < 0:
                if counting:
                    fu_blocked += 1
            else:
                k = nxt
        elif x < arr:
            if counting:
                mu_tries += 1
            nxt = up_j[k]
            if nxt < 0:
                if counting:
                    mu_blocked += 1
            else:
                k = nxt
        elif x < arr + r_i[k]:
            k = dn_i[k]
        else:
            k = dn_j[k]
    occ = np.asarray(occ)
    occ = occ / occ.sum()
    return occ, (fu_blocked, fu_tries), (mu_blocked, mu_tries)


def simulate_chain(lambda_1, lambda_2, mu_1, mu_2, n_f, n_f_o, config):
    """Simulate the occupancy chain and estimate its stationary behaviour.

    Arrival rates may be zero (that class then never arrives); holding rates
    must be positive. Arrivals that find no admissible channel are counted
    as blocked and leave the state unchanged.

    Parameters
    ----------
    lambda_1, lambda_2, mu_1, mu_2 : float
    n_f, n_f_o : int
    config : SimConfig

    Returns
    -------
    ChainSimResult
    """
    rates = (
        check_rate(lambda_1, "lambda_1", allow_zero=True),
        check_rate(lambda_2, "lambda_2", allow_zero=True),
        check_rate(mu_1, "mu_1"),
        check_rate(mu_2, "mu_2"),
    )
    states = markov.enumerate_states(n_f, n_f_o)
    seeds = spawn_seeds(config.seed, config.replications)
    reps = Parallel(n_jobs=config.n_jobs)(
        delayed(_replicate)(s, rates, n_f, n_f_o, config.horizon, config.warmup, config.unit)
        for s in seeds
    )
    occ = np.array([r[0] for r in reps])
    pooled = occ.mean(axis=0)
    dist = markov.StationaryDistribution(
        n_f=int(n_f), n_f_o=int(n_f_o), rates=rates, states=tuple(states),
        probabilities=pooled / pooled.sum(),
    )
    full = np.array([s.i + s.j == n_f for s in states])
    busy = np.array([s.i + s.j for s in states])
    return ChainSimResult(
        dist=dist,
        state_estimates=tuple(SimEstimate.from_replications(occ[:, k]) for k in range(len(states))),
        p_fu_f=SimEstimate.from_proportions(*zip(*(r[1] for r in reps))),
        p_mu_f=SimEstimate.from_proportions(*zip(*(r[2] for r in reps))),
        time_p_fu_f=SimEstimate.from_replications(occ[:, full].sum(axis=1)),
        mean_occupied=SimEstimate.from_replications(occ @ busy),
        replications=tuple(occ),
    )
