"""Parameter and result types shared by every femtoflow module.

All types are frozen dataclasses. Rates are stored in s^-1;
mean durations (session, dwell times) are converted once, in
:meth:`SystemParams.from_means`.
"""

import math
import numbers
from dataclasses import dataclass, fields

from ._validation import is_finite_number
from .exceptions import ValidationError

THERMAL_NOISE_DBM_PER_HZ = -174.0


@dataclass(frozen=True)
class SystemParams:
    """Population, topology and traffic parameters of one macrocell entity.

    Attributes
    ----------
    R_M, R_F : float
        Macrocell and femtocell radii in metres.
    N : int
        Number of femtocells in the macrocell.
    M : float
        Mean number of femtocell users per femtocell.
    N_F, N_F_O, N_M : int
        Femtocell channels, open femtocell channels, macrocell channels.
    q : float
        Fraction of a femtocell user's calls made indoors.
    lambda_F : float
        New-call rate of one femtocell user (s^-1).
    lambda_T : float
        Total new-call rate of the entity (s^-1).
    mu : float
        Session-end rate (s^-1).
    eta_RT_F, eta_RT_M : float
        Femtocell and macrocell user dwell-departure rates (s^-1).
    """

    R_M: float
    R_F: float
    N: int
    M: float
    N_F: int
    N_F_O: int
    N_M: int
    q: float
    lambda_F: float
    lambda_T: float
    mu: float
    eta_RT_F: float
    eta_RT_M: float

    @classmethod
    def from_means(cls, *, session_mean_s, femto_dwell_mean_s, macro_dwell_mean_s, **kwargs):
        """Build params from mean durations in seconds instead of rates."""
        return cls(
            mu=1.0 / session_mean_s,
            eta_RT_F=1.0 / femto_dwell_mean_s,
            eta_RT_M=1.0 / macro_dwell_mean_s,
            **kwargs,
        )

    @classmethod
    def baseline(cls, M=4, lambda_T=1.0, **overrides):
        """Reference operating point used throughout the tests and CLI.

        ``M`` and ``lambda_T`` are the usual sweep variables; any other field
        can be overridden by keyword.
        """
        values = dict(
            R_M=1000.0,
            R_F=20.0,
            N=40,
            M=M,
            N_F=3,
            N_F_O=1,
            N_M=24,
            q=0.6,
            lambda_F=0.002,
            lambda_T=lambda_T,
            mu=1.0 / 110.0,
            eta_RT_F=1.0 / 990.0,
            eta_RT_M=1.0 / 300.0,
        )
        values.update(overrides)
        return cls(**values)

    @property
    def A_M(self):
        return math.pi * self.R_M**2

    @property
    def A_F(self):
        return math.pi * self.R_F**2

    @property
    def area_ratio(self):
        """A_F / A_M, computed from the radii."""
        return (self.R_F / self.R_M) ** 2

    @property
    def lambda_M(self):
        """Total new-call rate of macrocell users, lambda_T - N*M*lambda_F."""
        return self.lambda_T - self.N * self.M * self.lambda_F

    @property
    def n_closed(self):
        return self.N_F - self.N_F_O

    def replace(self, **changes):
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return type(self)(**values)


@dataclass(frozen=True)
class RadioParams:
    """Propagation and power parameters for the capacity/energy models.

    ``n_0`` defaults to thermal noise (-174 dBm/Hz) over ``B_W``.
    ``PW_v``, ``PW_c``, ``B_W`` are configuration defaults; the blocking
    analysis does not depend on them.
    """

    sigma_dB: float = 8.0
    beta: float = 2.0
    n_w: float = 2.0
    R_p: float = 5.0
    Z_shadowing_dB: float = 4.0
    PW_v: float = 0.02
    PW_c: float = 5.0
    B_W: float = 180e3
    n_0: float = None

    def __post_init__(self):
        if self.n_0 is None and is_finite_number(self.B_W) and self.B_W > 0:
            object.__setattr__(self, "n_0", thermal_noise_w(self.B_W))

    def replace(self, **changes):
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        if "B_W" in changes and "n_0" not in changes:
            values["n_0"] = None
        return type(self)(**values)


def thermal_noise_w(bandwidth_hz):
    return 10.0 ** ((THERMAL_NOISE_DBM_PER_HZ - 30.0) / 10.0) * bandwidth_hz


@dataclass(frozen=True)
class BlockingProbs:
    """Femtocell-user, macrocell-user (in a femtocell) and macrocell blocking."""

    p_fu_f: float
    p_mu_f: float
    p_u_m: float

    def as_tuple(self):
        return (self.p_fu_f, self.p_mu_f, self.p_u_m)


def _system_errors(p):
    errors = []

    def num(name, cond, msg):
        value = getattr(p, name)
        if not is_finite_number(value):
            errors.append((name, f"must be a finite number, got {value!r}"))
            return False
        if not cond(value):
            errors.append((name, f"{msg}, got {value!r}"))
            return False
        return True

    def integer(name, minimum):
        value = getattr(p, name)
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            errors.append((name, f"must be an integer, got {value!r}"))
            return False
        if value < minimum:
            errors.append((name, f"must be >= {minimum}, got {value!r}"))
            return False
        return True

    ok_rm = num("R_M", lambda v: v > 0, "must be > 0")
    ok_rf = num("R_F", lambda v: v > 0, "must be > 0")
    ok_n = integer("N", 1)
    ok_m = num("M", lambda v: v > 0, "must be > 0")
    ok_nf = integer("N_F", 1)
    ok_nfo = integer("N_F_O", 0)
    integer("N_M", 1)
    num("q", lambda v: 0 <= v <= 1, "must lie in [0, 1]")
    ok_lf = num("lambda_F", lambda v: v > 0, "must be > 0")
    ok_lt = num("lambda_T", lambda v: v > 0, "must be > 0")
    ok_mu = num("mu", lambda v: v > 0, "must be > 0")
    num("eta_RT_F", lambda v: v > 0, "must be > 0")
    ok_em = num("eta_RT_M", lambda v: v > 0, "must be > 0")

    if ok_nf and ok_nfo and p.N_F_O > p.N_F:
        errors.append(("N_F_O", f"must satisfy N_F_O <= N_F ({p.N_F_O} > {p.N_F})"))
    try:
        if ok_n and ok_m and ok_lf and ok_lt:
            floor = p.N * p.M * p.lambda_F
            if p.lambda_T < floor:
                errors.append(
                    ("lambda_T", f"must be >= N*M*lambda_F = {floor:g} so that lambda_M >= 0")
                )
        if ok_n and ok_rm and ok_rf and p.N * p.R_F**2 > p.R_M**2:
            errors.append(("N", "femtocell coverage exceeds the macrocell (N*A_F > A_M)"))
    except OverflowError:
        errors.append(("N", "magnitude too large to evaluate coverage/traffic constraints"))
    if ok_mu and ok_em:
        # The macro->femto handoff expression turns negative for short macro dwell times.
        try:
            r = p.mu / p.eta_RT_M
            bracket = math.log(r) / r - (1.0 / r) * (math.exp(-1.0 / r) - 1.0)
        except (ValueError, OverflowError, ZeroDivisionError):
            bracket = float("nan")
        if not bracket >= 0:
            errors.append(
                ("eta_RT_M", "mu/eta_RT_M out of range: macro->femto handoff probability < 0")
            )
    return errors


def _radio_errors(r, params=None):
    errors = []

    def num(name, cond, msg):
        value = getattr(r, name)
        if not is_finite_number(value):
            errors.append((name, f"must be a finite number, got {value!r}"))
            return False
        if not cond(value):
            errors.append((name, f"{msg}, got {value!r}"))
            return False
        return True

    num("sigma_dB", lambda v: v >= 0, "must be >= 0")
    num("beta", lambda v: v > 0, "must be > 0")
    num("n_w", lambda v: v >= 0, "must be >= 0")
    ok_rp = num("R_p", lambda v: v > 0, "must be > 0")
    num("Z_shadowing_dB", lambda v: True, "")
    num("PW_v", lambda v: v > 0, "must be > 0")
    num("PW_c", lambda v: v > 0, "must be > 0")
    num("B_W", lambda v: v > 0, "must be > 0")
    num("n_0", lambda v: v > 0, "must be > 0")
    if ok_rp and params is not None and is_finite_number(params.R_F) and r.R_p >= params.R_F:
        errors.append(("R_p", f"must be < R_F ({r.R_p!r} >= {params.R_F!r})"))
    return errors


def validate(params, radio=None):
    """Check every invariant of ``params`` (and ``radio`` when given).

    Returns the inputs unchanged when valid: ``params`` alone, or the tuple
    ``(params, radio)``. Otherwise raises :class:`ValidationError` listing
    every violation, not just the first.
    """
    errors = _system_errors(params)
    if radio is not None:
        errors += _radio_errors(radio, params)
    if errors:
        raise ValidationError(errors)
    return params if radio is None else (params, radio)
