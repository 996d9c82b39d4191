"""Propagation model and Monte-Carlo evaluation of femtocell capacity.

Conventions
-----------
* Shadowing ``e^{2 sigma G}`` uses ``sigma = sigma_dB * ln(10) / 20`` so the
  power factor is ``10^{sigma_dB G / 10}``.
* User distance ``L`` has density ``2L / (R_F^2 - R_p^2)`` on ``[R_p, R_F]``.
* Capacities are in bit/s (log base 2).
* Co-channel interferers per channel: one per neighbouring femtocell, their
  number drawn from ``Binomial(N - 1, P_occ / class_size)`` and the
  expectation taken outside the logarithm.
"""

import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from ._validation import check_probability, spawn_seeds
from .exceptions import NonFiniteSampleError, OutOfSupportError

BLOCK_SIZE = 4096
_CDF_GRID = 8193


def shadowing_sigma(sigma_dB):
    """Natural-log amplitude deviation for a dB shadowing deviation."""
    return sigma_dB * math.log(10.0) / 20.0


def wall_loss(n_w):
    return 10.0 ** (1.2 * n_w)


def _in_support(x, lo, hi):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < lo) or np.any(x > hi):
        raise OutOfSupportError(f"value outside [{lo}, {hi}]")
    return x


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def pdf_inter_bs(l, R_M):
    """Density of the distance between two uniform points in a disc of radius ``R_M``."""
    l = _in_support(l, 0.0, 2.0 * R_M)
    x = l / (2.0 * R_M)
    f = 4.0 * l / (math.pi * R_M**2) * (np.arccos(x) - x * np.sqrt(1.0 - x**2))
    return _scalar_or_array(f)


def cdf_inter_bs(l, R_M):
    """Closed-form integral of :func:`pdf_inter_bs` from 0 to ``l``."""
    l = _in_support(l, 0.0, 2.0 * R_M)
    x = l / (2.0 * R_M)
    s = np.sqrt(1.0 - x**2)
    F = 2.0 / math.pi * (4.0 * x**2 * np.arccos(x) + np.arcsin(x) - x * s * (1.0 + 2.0 * x**2))
    return _scalar_or_array(np.clip(F, 0.0, 1.0))


def sample_inter_bs(rng, R_M, size):
    """Inverse-transform draws from :func:`pdf_inter_bs` (tabulated CDF)."""
    # Quadratic spacing keeps the table dense near l = 0, where F ~ l^2.
    grid = 2.0 * R_M * np.linspace(0.0, 1.0, _CDF_GRID) ** 2
    cdf = cdf_inter_bs(grid, R_M)
    return np.interp(rng.random(size), cdf, grid)


def pdf_user_distance(L, R_p, R_F):
    """Density of the user-to-BS distance, uniform users outside ``R_p``."""
    L = _in_support(L, R_p, R_F)
    return _scalar_or_array(2.0 * L / (R_F**2 - R_p**2))


def sample_user_distance(rng, R_p, R_F, size):
    return np.sqrt(rng.uniform(R_p**2, R_F**2, size))


@dataclass(frozen=True)
class FadingSample:
    """Random draws for one (or an array of) link realisations.

    ``g``, ``alpha_sq`` and ``l`` describe interferers (trailing axis = one
    neighbour); ``L`` and ``n_interferers`` describe the served user.
    """

    g: np.ndarray
    alpha_sq: np.ndarray
    l: np.ndarray
    L: np.ndarray
    n_interferers: np.ndarray


def draw_fading(rng, params, radio, p_occ, class_size, size):
    """Draw ``size`` user/interferer realisations for one channel class."""
    k = params.N - 1
    p = min(1.0, p_occ / class_size) if class_size else 0.0
    return FadingSample(
        g=rng.standard_normal((size, k)),
        alpha_sq=rng.exponential(1.0, (size, k)),
        l=sample_inter_bs(rng, params.R_M, (size, k)),
        L=sample_user_distance(rng, radio.R_p, params.R_F, size),
        n_interferers=rng.binomial(k, p, size),
    )


def interference_sample(radio, sample, per_channel_power):
    """Interference power ``I_k`` from each neighbour in ``sample`` (W)."""
    sigma = shadowing_sigma(radio.sigma_dB)
    with np.errstate(divide="ignore"):
        return (
            per_channel_power
            * np.exp(2.0 * sigma * np.asarray(sample.g))
            * np.asarray(sample.alpha_sq)
            / (wall_loss(radio.n_w) * np.asarray(sample.l, dtype=float) ** radio.beta)
        )


def signal_power(radio, L, per_channel_power, R_F=None):
    """Desired received power ``PW_v * Z / L^beta`` (W)."""
    hi = np.inf if R_F is None else R_F
    L = _in_support(L, radio.R_p, hi)
    z = 10.0 ** (radio.Z_shadowing_dB / 10.0)
    return _scalar_or_array(per_channel_power * z / L**radio.beta)


@dataclass(frozen=True)
class CapacityEstimate:
    c_closed: float
    c_open: float
    c_total: float
    std_error: float
    samples: int
    seed: object


def _channel_capacity(rng, params, radio, p_occ, class_size, size):
    """Per-sample capacity of one channel class (bit/s), shape ``(size,)``."""
    if class_size == 0 or p_occ == 0.0:
        return np.zeros(size)
    total = np.zeros(size)
    for _ in range(class_size):
        fs = draw_fading(rng, params, radio, p_occ, class_size, size)
        interf = interference_sample(radio, fs, radio.PW_v)
        active = np.arange(params.N - 1)[None, :] < fs.n_interferers[:, None]
        i_sum = np.where(active, interf, 0.0).sum(axis=1)
        s = signal_power(radio, fs.L, radio.PW_v)
        total += radio.B_W * np.log2(1.0 + p_occ * s / (radio.n_0 + i_sum))
    return total


def _block(seed, params, radio, p_closed, p_open, size):
    rng_c, rng_o = (np.random.default_rng(s) for s in seed.spawn(2))
    closed = _channel_capacity(rng_c, params, radio, p_closed, params.N_F - params.N_F_O, size)
    open_ = _channel_capacity(rng_o, params, radio, p_open, params.N_F_O, size)
    return closed, open_


def estimate_capacity(params, radio, p_closed, p_open, samples=20_000, seed=0, n_jobs=1):
    """Monte-Carlo estimate of closed, open and total femtocell capacity.

    Samples are generated in fixed blocks, each with its own child seed, so
    the result depends on ``seed`` and ``samples`` only, never on ``n_jobs``.

    Returns
    -------
    CapacityEstimate
        Means in bit/s and the standard error of ``c_total``.
    """
    p_closed = check_probability(p_closed, "p_closed")
    p_open = check_probability(p_open, "p_open")
    if samples < 2:
        raise ValueError("samples must be >= 2")
    n_blocks = -(-samples // BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * (n_blocks - 1) + [samples - BLOCK_SIZE * (n_blocks - 1)]
    seeds = spawn_seeds(seed, n_blocks)
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_block)(s, params, radio, p_closed, p_open, n) for s, n in zip(seeds, sizes)
    )
    closed = np.concatenate([c for c, _ in parts])
    open_ = np.concatenate([o for _, o in parts])
    total = closed + open_
    if not np.all(np.isfinite(total)):
        raise NonFiniteSampleError("capacity sample is not finite")
    c_closed, c_open = float(closed.mean()), float(open_.mean())
    return CapacityEstimate(
        c_closed=c_closed,
        c_open=c_open,
        c_total=c_closed + c_open,
        std_error=float(total.std(ddof=1) / math.sqrt(samples)),
        samples=int(samples),
        seed=seed,
    )
