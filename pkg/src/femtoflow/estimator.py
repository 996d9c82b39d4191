"""Scikit-learn style front end to the analytical pipeline.

:class:`FemtocellNetwork` takes every model parameter as a constructor
argument, so ``get_params``/``set_params``/``clone`` work as usual. ``fit``
solves the configured operating point; ``predict`` and ``transform``
evaluate the model along one sweep axis given as a single-column ``X``.
"""

from dataclasses import fields

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import pipeline, solver
from .domain import RadioParams, SystemParams, validate

_DEFAULTS = SystemParams.baseline()


class FemtocellNetwork(TransformerMixin, BaseEstimator):
    """Partially open femtocell network under one macrocell.

    Parameters
    ----------
    R_M ... eta_RT_M
        System parameters, see :class:`~femtoflow.domain.SystemParams`.
    sigma_dB, beta, n_w, R_p, Z_shadowing_dB, PW_v, PW_c, B_W
        Radio parameters, see :class:`~femtoflow.domain.RadioParams`.
    axis : str
        Sweep coordinate read from ``X`` by ``predict``/``transform``.
    tol, max_iter, damping
        Fixed-point controls.
    mc_samples, random_state
        Capacity Monte-Carlo size and seed.

    Attributes
    ----------
    solution_ : Solution
    blocking_ : ndarray of shape (3,)
        ``(P_FU_F, P_MU_F, P_U_M)`` at the fitted point.
    n_iter_ : int
    """

    def __init__(
        self, *, R_M=_DEFAULTS.R_M, R_F=_DEFAULTS.R_F, N=_DEFAULTS.N, M=_DEFAULTS.M,
        N_F=_DEFAULTS.N_F, N_F_O=_DEFAULTS.N_F_O, N_M=_DEFAULTS.N_M, q=_DEFAULTS.q,
        lambda_F=_DEFAULTS.lambda_F, lambda_T=_DEFAULTS.lambda_T, mu=_DEFAULTS.mu,
        eta_RT_F=_DEFAULTS.eta_RT_F, eta_RT_M=_DEFAULTS.eta_RT_M,
        sigma_dB=8.0, beta=2.0, n_w=2.0, R_p=5.0, Z_shadowing_dB=4.0,
        PW_v=0.02, PW_c=5.0, B_W=180e3,
        axis="lambda_T", tol=1e-10, max_iter=10_000, damping=0.5,
        mc_samples=20_000, random_state=0,
    ):
        self.R_M, self.R_F, self.N, self.M = R_M, R_F, N, M
        self.N_F, self.N_F_O, self.N_M, self.q = N_F, N_F_O, N_M, q
        self.lambda_F, self.lambda_T, self.mu = lambda_F, lambda_T, mu
        self.eta_RT_F, self.eta_RT_M = eta_RT_F, eta_RT_M
        self.sigma_dB, self.beta, self.n_w, self.R_p = sigma_dB, beta, n_w, R_p
        self.Z_shadowing_dB, self.PW_v, self.PW_c, self.B_W = Z_shadowing_dB, PW_v, PW_c, B_W
        self.axis = axis
        self.tol, self.max_iter, self.damping = tol, max_iter, damping
        self.mc_samples, self.random_state = mc_samples, random_state

    def _system(self):
        return SystemParams(**{f.name: getattr(self, f.name) for f in fields(SystemParams)})

    def _radio(self):
        names = [f.name for f in fields(RadioParams) if f.name != "n_0"]
        return RadioParams(**{n: getattr(self, n) for n in names})

    def _config(self):
        return solver.SolverConfig(self.tol, self.max_iter, self.damping)

    def fit(self, X=None, y=None):
        """Solve the fixed point at the configured parameters. ``X`` is ignored."""
        params, _ = validate(self._system(), self._radio())
        self.solution_ = solver.solve(params, self._config())
        self.blocking_ = np.array(self.solution_.blocking.as_tuple())
        self.n_iter_ = self.solution_.iterations
        return self

    def _axis_values(self, X):
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError(f"X must have a single column, got {X.shape[1]}")
            X = X[:, 0]
        return X

    def _points(self, X):
        check_is_fitted(self, "solution_")
        base = self._system()
        for v in self._axis_values(X):
            v = float(v)
            if self.axis != "lambda_T" and self.axis != "M":
                v = int(round(v))
            yield pipeline.apply_axis(base, self.axis, v)

    def predict(self, X):
        """Blocking probabilities ``(P_FU_F, P_MU_F, P_U_M)`` per row of ``X``."""
        cfg = self._config()
        return np.array([solver.solve(p, cfg).blocking.as_tuple() for p in self._points(X)])

    def transform(self, X):
        """Every metric in :data:`femtoflow.pipeline.METRICS`, one row per axis value."""
        radio = self._radio()
        rows = [
            pipeline.evaluate(p, radio, self._config(), self.mc_samples, self.random_state)[2]
            for p in self._points(X)
        ]
        return np.array([[r[m] for m in pipeline.METRICS] for r in rows])

    def get_feature_names_out(self, input_features=None):
        return np.array(pipeline.METRICS, dtype=object)
