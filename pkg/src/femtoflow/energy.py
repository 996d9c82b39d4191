"""Femtocell base-station power draw and the energy-efficiency utility."""

import math
from dataclasses import dataclass

import numpy as np

from . import markov, phy


@dataclass(frozen=True)
class EfficiencyReport:
    """Occupancy, capacity, power and efficiency of one femtocell.

    ``eta_ee`` is power over capacity (W per bit/s, lower is better) and
    ``bits_per_joule`` its reciprocal. When the capacity is zero ``eta_ee``
    is ``inf``, ``bits_per_joule`` is 0 and ``zero_capacity`` is set.
    """

    p_closed: float
    p_open: float
    capacity: phy.CapacityEstimate
    e_pw_t: float
    e_pw_fbs: float
    eta_ee: float
    bits_per_joule: float
    zero_capacity: bool = False


def mean_dynamic_power(dist, radio):
    """Mean transmit power: ``PW_v`` times the expected number of busy channels."""
    busy = dist.i + dist.j
    return float(np.dot(busy, dist.probabilities) * radio.PW_v)


def occupancy_probabilities(dist):
    """``(P_closed, P_open)``; an empty channel class contributes 0."""
    p_closed = markov.occupancy_closed(dist) if dist.n_f > dist.n_f_o else 0.0
    p_open = markov.occupancy_open(dist) if dist.n_f_o > 0 else 0.0
    return p_closed, p_open


def efficiency_from_parts(p_closed, p_open, capacity, e_pw_t, radio):
    e_pw_fbs = radio.PW_c + e_pw_t
    if capacity.c_total > 0:
        eta = e_pw_fbs / capacity.c_total
        bpj = capacity.c_total / e_pw_fbs
        zero = False
    else:
        eta, bpj, zero = math.inf, 0.0, True
    return EfficiencyReport(
        p_closed=p_closed, p_open=p_open, capacity=capacity, e_pw_t=e_pw_t,
        e_pw_fbs=e_pw_fbs, eta_ee=eta, bits_per_joule=bpj, zero_capacity=zero,
    )


def efficiency(params, radio, solution, mc=20_000, seed=0, n_jobs=1):
    """Evaluate occupancy, capacity, power draw and efficiency at a solved point.

    Parameters
    ----------
    params : SystemParams
    radio : RadioParams
    solution : Solution
        Output of :func:`femtoflow.solver.solve` for ``params``.
    mc : int
        Monte-Carlo samples for the capacity estimate.
    seed : int or SeedSequence
    """
    dist = solution.dist
    p_closed, p_open = occupancy_probabilities(dist)
    capacity = phy.estimate_capacity(params, radio, p_closed, p_open, mc, seed, n_jobs)
    return efficiency_from_parts(p_closed, p_open, capacity, mean_dynamic_power(dist, radio), radio)
