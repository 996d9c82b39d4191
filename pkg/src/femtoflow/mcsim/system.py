"""Call-level simulation of one macrocell entity with N femtocells."""

import numpy as np
from joblib import Parallel, delayed

from .. import solver, traffic
from .._validation import spawn_seeds
from ..domain import validate
from ._stats import SimEstimate, UniformStream


class _Counter:
    __slots__ = ("tries", "blocked")

    def __init__(self):
        self.tries = 0
        self.blocked = 0



def _pop_random(calls, u):
    k = int(u * len(calls))
    calls[k], calls[-1] = calls[-1], calls[k]
    return calls.pop()


def _replicate(seed, params, hp, inflow, horizon, warmup, unit):
    n, n_f, n_f_o, n_m = params.N, params.N_F, params.N_F_O, params.N_M
    mu, eta_f, eta_m = params.mu, params.eta_RT_F, params.eta_RT_M
    mu_1, mu_2 = mu + eta_f, mu + eta_m
    mu_macro = mu + eta_m
    to_femto = hp.p_mf / (hp.p_mf + hp.p_mm)

    # Constant-rate arrival streams.
    r_fu_in = n * params.M * params.q * params.lambda_F
    r_mu_in = n * params.area_ratio * params.lambda_M
    r_fu_out = n * params.M * (1.0 - params.q) * params.lambda_F
    r_mu_out = (1.0 - n * params.area_ratio) * params.lambda_M
    r_fu_adj, r_mu_adj = inflow
    cum = np.cumsum([r_fu_in, r_mu_in, r_fu_out, r_mu_out, r_fu_adj, r_mu_adj]).tolist()
    arrivals = cum[-1]

    busy = [0] * n      # i + j per femtocell
    mus = [0] * n       # j per femtocell
    fu_calls, mu_calls = [], []   # femtocell id of every call in a femtocell
    macro = [0, 0]      # femtocell users, macrocell users on macro channels
    fu_f, mu_f, u_m = _Counter(), _Counter(), _Counter()
    stream = UniformStream(np.random.default_rng(seed))
    uni = stream.uniform

    start = warmup * horizon
    by_events = unit == "events"
    t = 0.0
    events = 0
    counting = start == 0

    def macro_admit():
        ok = macro[0] + macro[1] < n_m
        if counting:
            u_m.tries += 1
            u_m.blocked += not ok
        return ok

    def femto_admit(femto, is_fu):
        if is_fu:
            ok = busy[femto] < n_f
            c = fu_f
        else:
            ok = mus[femto] < n_f_o and busy[femto] < n_f
            c = mu_f
        if counting:
            c.tries += 1
            c.blocked += not ok
        if ok:
            busy[femto] += 1
            if is_fu:
                fu_calls.append(femto)
            else:
                mus[femto] += 1
                mu_calls.append(femto)
        return ok

    while True:
        d_fu = len(fu_calls) * mu_1
        d_mu = len(mu_calls) * mu_2
        d_macro = (macro[0] + macro[1]) * mu_macro
        total = arrivals + d_fu + d_mu + d_macro
        t += stream.exponential() / total
        events += 1
        if by_events:
            if events > horizon:
                break
            counting = events > start
        else:
            if t > horizon:
                break
            counting = t > start

        x = uni() * total
        if x < arrivals:
            if x < cum[1]:
                is_fu = x < cum[0]
                if not femto_admit(int(uni() * n), is_fu) and macro_admit():
                    macro[0 if is_fu else 1] += 1
            else:
                is_fu = x < cum[2] or cum[3] <= x < cum[4]
                if macro_admit():
                    macro[0 if is_fu else 1] += 1
            continue
        x -= arrivals
        if x < d_fu + d_mu:
            is_fu = x < d_fu
            calls, rate, eta = (fu_calls, mu_1, eta_f) if is_fu else (mu_calls, mu_2, eta_m)
            femto = _pop_random(calls, uni())
            busy[femto] -= 1
            if not is_fu:
                mus[femto] -= 1
            # Dwell expiry hands the call to the macrocell; otherwise the session ends.
            if uni() * rate < eta and macro_admit():
                macro[0 if is_fu else 1] += 1
            continue
        # A macro-channel call leaves its cell or finishes.
        is_fu = uni() * (macro[0] + macro[1]) < macro[0]
        cls = 0 if is_fu else 1
        if uni() * mu_macro >= eta_m:
            macro[cls] -= 1
        elif uni() < to_femto:
            if femto_admit(int(uni() * n), is_fu):
                macro[cls] -= 1
        else:
            macro[cls] -= 1
    return [(c.blocked, c.tries) for c in (fu_f, mu_f, u_m)]


def simulate_system(params, config, solution=None):
    """Simulate calls and handoffs in one macrocell and its femtocells.

    The inbound stream from adjacent macrocells is injected at the balanced
    rate of the analytical solution (``solution``, solved if omitted).

    Returns
    -------
    tuple of SimEstimate
        Arrival-observed ``(P_FU_F, P_MU_F, P_U_M)``. Half-widths are the
        larger of the replication t-interval and the pooled Wilson interval.
    """
    params = validate(params)
    if solution is None:
        solution = solver.solve(params)
    hp = traffic.handoff_probs(params)
    inflow = (solution.rates.lambda_FU_MM, solution.rates.lambda_MU_MM)
    seeds = spawn_seeds(config.seed, config.replications)
    reps = Parallel(n_jobs=config.n_jobs)(
        delayed(_replicate)(s, params, hp, inflow, config.horizon, config.warmup, config.unit)
        for s in seeds
    )
    counts = np.array(reps, dtype=float)
    return tuple(
        SimEstimate.from_proportions(counts[:, k, 0], counts[:, k, 1]) for k in range(3)
    )
