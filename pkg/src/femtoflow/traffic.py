"""Handoff probabilities, holding times, traffic-rate algebra and Erlang-B.

The rate equations are self-referential (the adjacent-macrocell inflow
depends on itself, and the femtocell aggregate rates feed back through the
femto->macro handoff stream). Both loops are linear in the unknown, so they
are solved in closed form here rather than iterated.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, logsumexp

from ._validation import check_count, is_finite_number
from .exceptions import BalanceDivergenceError, NegativeTrafficError


@dataclass(frozen=True)
class HandoffProbs:
    p_fm: float
    p_mf: float
    p_mm: float


@dataclass(frozen=True)
class TrafficRates:
    """Every arrival rate (s^-1) and the two macrocell traffic intensities (Erl)."""

    lambda_1: float
    lambda_2: float
    mu_1: float
    mu_2: float
    lambda_FU_F: float
    lambda_MU_F: float
    lambda_FU_H: float
    lambda_MU_H: float
    lambda_FU_M: float
    lambda_FU_FM: float
    lambda_FU_MM: float
    lambda_MU_M: float
    lambda_MU_FM: float
    lambda_MU_MM: float
    T_F: float
    T_M: float

    @property
    def femto_user_macro_total(self):
        return self.lambda_FU_M + self.lambda_FU_FM + self.lambda_FU_MM

    @property
    def macro_user_macro_total(self):
        return self.lambda_MU_M + self.lambda_MU_FM + self.lambda_MU_MM


class MacrocellRates(NamedTuple):
    lambda_FU_M: float
    lambda_FU_FM: float
    lambda_FU_MM: float
    lambda_MU_M: float
    lambda_MU_FM: float
    lambda_MU_MM: float


def _dwell_bracket(mu, eta):
    # ln(r)/r - (1/r)(e^{-1/r} - 1) with r = mu/eta; shared by the macro->femto
    # handoff probability and the mean of the truncated holding time E(Z).
    r = mu / eta
    return math.log(r) / r - (eta / mu) * (math.exp(-eta / mu) - 1.0)


def handoff_probs(params):
    """Femto->macro, macro->femto and macro->adjacent-macro handoff probabilities."""
    mu, eta_f, eta_m = params.mu, params.eta_RT_F, params.eta_RT_M
    return HandoffProbs(
        p_fm=eta_f / (mu + eta_f),
        p_mf=params.area_ratio * _dwell_bracket(mu, eta_m),
        p_mm=eta_m / (mu + eta_m),
    )


def holding_rates(params):
    """Channel-release rates in a femtocell, ``(mu + eta_RT_F, mu + eta_RT_M)``."""
    return params.mu + params.eta_RT_F, params.mu + params.eta_RT_M


def mean_z(params):
    """E(Z): the residual-holding term used by the macrocell holding times."""
    mu = params.mu
    return 1.0 / mu - _dwell_bracket(mu, params.eta_RT_M) / mu


def _stay_factor(hp, blocking):
    x = (1.0 - blocking.p_u_m) * hp.p_mm
    if not x < 1.0:
        raise BalanceDivergenceError(f"adjacent-macrocell loop gain {x} >= 1")
    return x


def macrocell_side_rates(params, hp, blocking, lambda_1, lambda_2):
    """Arrival streams into the macrocell for both user classes.

    The adjacent-macrocell inflow balances the outflow: with loop gain
    ``x = (1 - P_U_M) p_mm``, ``inflow = (new + from_femto) * x / (1 - x)``.
    """
    x = _stay_factor(hp, blocking)
    n, a = params.N, params.area_ratio
    fu_m = n * params.M * (1.0 - params.q) * params.lambda_F
    fu_fm = n * lambda_1 * (1.0 - blocking.p_fu_f) * hp.p_fm
    mu_m = (1.0 - n * a) * params.lambda_M
    mu_fm = n * lambda_2 * (1.0 - blocking.p_mu_f) * hp.p_fm
    return MacrocellRates(
        lambda_FU_M=fu_m,
        lambda_FU_FM=fu_fm,
        lambda_FU_MM=(fu_m + fu_fm) * x / (1.0 - x),
        lambda_MU_M=mu_m,
        lambda_MU_FM=mu_fm,
        lambda_MU_MM=(mu_m + mu_fm) * x / (1.0 - x),
    )


def femto_aggregate_rates(params, hp, blocking):
    """Solve the linear feedback for ``(lambda_1, lambda_2)`` exactly.

    ``lambda_k = new_k + b * (outside_k + N * lambda_k * (1 - P_k) * p_fm)``
    with ``b = (1 - P_U_M) p_mf / (N (1 - x))``.
    """
    x = _stay_factor(hp, blocking)
    n, a = params.N, params.area_ratio
    b = (1.0 - blocking.p_u_m) * hp.p_mf / (n * (1.0 - x))
    out = []
    for new, outside, p_block in (
        (params.M * params.q * params.lambda_F,
         n * params.M * (1.0 - params.q) * params.lambda_F, blocking.p_fu_f),
        (a * params.lambda_M, (1.0 - n * a) * params.lambda_M, blocking.p_mu_f),
    ):
        denom = 1.0 - b * n * (1.0 - p_block) * hp.p_fm
        if not denom > 0.0:
            raise BalanceDivergenceError("femtocell handoff feedback gain >= 1")
        out.append((new + b * outside) / denom)
    return tuple(out)


def mean_channel_holding_macro(params, blocking):
    """Mean macrocell channel holding times ``(E[T_cM_M], E[T_cF_M])`` in seconds."""
    na = params.N * params.area_ratio
    ez = mean_z(params)
    base = 1.0 / (params.mu + params.eta_RT_M)

    def holding(p_block):
        return base * (na * p_block + (1.0 - na)) + na * (1.0 - p_block) * ez

    return holding(blocking.p_mu_f), holding(blocking.p_fu_f)


def traffic_intensities(macro_rates, holding):
    """Macrocell offered loads ``(T_M, T_F)`` in Erlangs."""
    e_mm, e_fm = holding
    r = macro_rates
    t_m = (r.lambda_MU_M + r.lambda_MU_FM + r.lambda_MU_MM) * e_mm
    t_f = (r.lambda_FU_M + r.lambda_FU_FM + r.lambda_FU_MM) * e_fm
    return t_m, t_f


def aggregate_rates(params, hp, blocking):
    """All traffic rates and intensities implied by ``blocking``."""
    lambda_1, lambda_2 = femto_aggregate_rates(params, hp, blocking)
    mu_1, mu_2 = holding_rates(params)
    macro = macrocell_side_rates(params, hp, blocking, lambda_1, lambda_2)
    t_m, t_f = traffic_intensities(macro, mean_channel_holding_macro(params, blocking))
    share = (1.0 - blocking.p_u_m) * hp.p_mf / params.N
    fu_f = params.M * params.q * params.lambda_F
    mu_f = params.area_ratio * params.lambda_M
    fu_h = share * (macro.lambda_FU_M + macro.lambda_FU_FM + macro.lambda_FU_MM)
    mu_h = share * (macro.lambda_MU_M + macro.lambda_MU_FM + macro.lambda_MU_MM)
    return TrafficRates(
        lambda_1=fu_f + fu_h,
        lambda_2=mu_f + mu_h,
        mu_1=mu_1,
        mu_2=mu_2,
        lambda_FU_F=fu_f,
        lambda_MU_F=mu_f,
        lambda_FU_H=fu_h,
        lambda_MU_H=mu_h,
        T_F=t_f,
        T_M=t_m,
        **macro._asdict(),
    )


def erlang_b(traffic, n_channels):
    """Erlang-B blocking of ``n_channels`` servers offered ``traffic`` Erlangs.

    Uses ``B(k) = T B(k-1) / (k + T B(k-1))``, which is stable for hundreds
    of channels.
    """
    if not is_finite_number(traffic) or traffic < 0:
        raise NegativeTrafficError(f"traffic must be finite and >= 0, got {traffic!r}")
    n = check_count(n_channels, "n_channels")
    b = 1.0
    for k in range(1, n + 1):
        b = traffic * b / (k + traffic * b)
    return b


def erlang_b_direct(traffic, n_channels):
    """Erlang-B from the defining ratio of sums, evaluated in log space."""
    if traffic == 0:
        return 0.0 if n_channels > 0 else 1.0
    k = np.arange(n_channels + 1)
    logs = k * math.log(traffic) - gammaln(k + 1)
    return float(np.exp(logs[-1] - logsumexp(logs)))
