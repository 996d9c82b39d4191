"""Per-point evaluation shared by sweeps, the CLI and the estimator wrapper."""

import numbers

from . import solver
from .energy import efficiency

AXES = ("lambda_T", "M", "N", "N_F_O", "N_F_closed")
METRICS = (
    "P_FU_F", "P_MU_F", "P_U_M", "P_closed", "P_open",
    "C_total", "E_PW_FBS", "eta_EE", "bits_per_joule",
)


def apply_axis(params, axis, value):
    """Return ``params`` with one sweep coordinate set to ``value``.

    ``N_F_closed`` changes the closed-channel count with ``N_F_O`` held
    fixed, so ``N_F`` moves with it.
    """
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    if axis in ("N", "N_F_O", "N_F_closed"):
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            if not (isinstance(value, float) and value.is_integer()):
                raise ValueError(f"{axis} values must be integers, got {value!r}")
            value = int(value)
    if axis == "N_F_closed":
        return params.replace(N_F=params.N_F_O + value)
    if axis == "N_F_O":
        return params.replace(N_F_O=value)
    return params.replace(**{axis: value})


def evaluate(params, radio, solver_config=None, mc_samples=20_000, seed=0):
    """Solve one point and evaluate its efficiency; returns ``(solution, report, row)``.

    ``row`` maps every name in :data:`METRICS` to a float. Using the same
    ``seed`` at every point gives common random numbers across a sweep.
    """
    sol = solver.solve(params, solver_config)
    rep = efficiency(params, radio, sol, mc=mc_samples, seed=seed)
    b = sol.blocking
    row = dict(
        P_FU_F=b.p_fu_f, P_MU_F=b.p_mu_f, P_U_M=b.p_u_m,
        P_closed=rep.p_closed, P_open=rep.p_open,
        C_total=rep.capacity.c_total, E_PW_FBS=rep.e_pw_fbs,
        eta_EE=rep.eta_ee, bits_per_joule=rep.bits_per_joule,
    )
    return sol, rep, {k: float(v) for k, v in row.items()}
