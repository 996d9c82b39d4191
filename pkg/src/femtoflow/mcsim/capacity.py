"""Second, independently coded estimate of femtocell capacity and efficiency.

Occupancy comes from simulating the channel chain rather than from the
product form, and every geometric quantity is sampled from its physical
construction: base stations and users are uniform points, interferer
distances are point-to-point distances, and Rayleigh gain is the squared
modulus of a complex Gaussian.
"""

from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .. import markov
from .._validation import spawn_seeds
from ._stats import SimConfig, SimEstimate
from .chain import simulate_chain


@dataclass(frozen=True)
class CapacitySimResult:
    c_total: SimEstimate
    bits_per_joule: SimEstimate
    p_closed: SimEstimate
    p_open: SimEstimate


def _uniform_in_disc(rng, radius, size):
    r = radius * np.sqrt(rng.random(size))
    theta = rng.uniform(0.0, 2.0 * np.pi, size)
    return r * np.cos(theta), r * np.sin(theta)


def _user_distance(rng, r_inner, r_outer, size):
    out = np.empty(0)
    while out.size < size:
        x, y = _uniform_in_disc(rng, r_outer, 2 * (size - out.size) + 16)
        d = np.hypot(x, y)
        out = np.concatenate([out, d[d >= r_inner]])
    return out[:size]


def _class_capacity(rng, params, radio, p_occ, class_size, samples):
    if class_size == 0 or p_occ == 0.0:
        return np.zeros(samples)
    k = params.N - 1
    p_busy = min(1.0, p_occ / class_size)
    loss = 10.0 ** (1.2 * radio.n_w)
    z = 10.0 ** (radio.Z_shadowing_dB / 10.0)
    total = np.zeros(samples)
    for _ in range(class_size):
        x1, y1 = _uniform_in_disc(rng, params.R_M, (samples, k))
        x2, y2 = _uniform_in_disc(rng, params.R_M, (samples, k))
        dist = np.hypot(x1 - x2, y1 - y2)
        shadow = 10.0 ** (radio.sigma_dB * rng.standard_normal((samples, k)) / 10.0)
        h = rng.standard_normal((samples, k, 2))
        rayleigh = 0.5 * (h**2).sum(axis=-1)
        on = rng.random((samples, k)) < p_busy
        with np.errstate(divide="ignore"):
            each = radio.PW_v * shadow * rayleigh / (loss * dist**radio.beta)
        interference = np.where(on, each, 0.0).sum(axis=1)
        L = _user_distance(rng, radio.R_p, params.R_F, samples)
        signal = radio.PW_v * z / L**radio.beta
        total += radio.B_W * np.log2(1.0 + p_occ * signal / (radio.n_0 + interference))
    return total


def _replicate(seed, params, radio, solution, horizon, warmup, unit, samples):
    chain_seed, geo_seed = seed.spawn(2)
    r = solution.rates
    chain = simulate_chain(
        r.lambda_1, r.lambda_2, r.mu_1, r.mu_2, params.N_F, params.N_F_O,
        SimConfig(horizon=horizon, warmup=warmup, replications=1,
                  seed=chain_seed, unit=unit),
    )
    dist = chain.dist
    p_closed = markov.occupancy_closed(dist) if dist.n_f > dist.n_f_o else 0.0
    p_open = markov.occupancy_open(dist) if dist.n_f_o > 0 else 0.0
    rng = np.random.default_rng(geo_seed)
    c = (
        _class_capacity(rng, params, radio, p_closed, params.N_F - params.N_F_O, samples)
        + _class_capacity(rng, params, radio, p_open, params.N_F_O, samples)
    ).mean()
    power = radio.PW_c + radio.PW_v * dist.mean_occupied()
    return float(c), float(c / power), p_closed, p_open


def simulate_capacity(params, radio, solution, config, samples=4096):
    """Replicated estimate of total capacity and bits per joule.

    Each replication simulates the occupancy chain for ``config.horizon``
    (per ``config.unit``) and then draws ``samples`` link realisations.
    """
    seeds = spawn_seeds(config.seed, config.replications)
    reps = Parallel(n_jobs=config.n_jobs)(
        delayed(_replicate)(s, params, radio, solution, config.horizon,
                            config.warmup, config.unit, samples)
        for s in seeds
    )
    reps = np.array(reps)
    return CapacitySimResult(*(SimEstimate.from_replications(reps[:, k]) for k in range(4)))
