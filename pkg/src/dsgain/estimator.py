"""scikit-learn style front ends.

Samples are floorplans: ``transform`` maps a collection of layouts to a
feature matrix of delay-spread metrics, so the evaluation drops into
pipelines, ``clone``, and parameter grids like any other transformer.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analytic import RELIABILITY_MODES, QuadratureSpec, conditional_tau_mean, ds_gain
from .montecarlo import simulate
from .validation import check_distances, check_floorplans, check_params

__all__ = ["DelaySpreadGain", "LinkSimulator"]


class DelaySpreadGain(TransformerMixin, BaseEstimator):
    """Analytic DS gain evaluator.

    Parameters
    ----------
    params : DsParams, path, dict or None
        Channel parameter table; None uses the built-in office/corridor table.
    rel_tol, abs_tol, max_subdivisions :
        Adaptive quadrature settings.
    reliability_mode : {"variance", "strict"}
    n_jobs : int or None
        Worker threads for per-room integrals. Results do not depend on it.
    """

    feature_names = ("e_tau_indoor_ns", "e_tau_open_ns", "ds_gain_ns", "reliability_ns")

    def __init__(self, params=None, rel_tol=1e-8, abs_tol=1e-12, max_subdivisions=200,
                 reliability_mode="variance", n_jobs=None):
        self.params = params
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.max_subdivisions = max_subdivisions
        self.reliability_mode = reliability_mode
        self.n_jobs = n_jobs

    def _setup(self):
        if self.reliability_mode not in RELIABILITY_MODES:
            raise ValueError(f"reliability_mode must be one of {RELIABILITY_MODES}")
        p = check_params(self.params)
        q = QuadratureSpec(self.rel_tol, self.abs_tol, self.max_subdivisions)
        return p, q

    def _evaluate(self, X):
        p, q = self._setup()
        fps = check_floorplans(X, p)
        return fps, [ds_gain(fp, p, q, reliability_mode=self.reliability_mode, threads=self.n_jobs)
                     for fp in fps]

    def fit(self, X, y=None):
        self.params_ = check_params(self.params)
        self.floorplans_, self.reports_ = self._evaluate(X)
        self.n_features_out_ = len(self.feature_names)
        return self

    def transform(self, X):
        check_is_fitted(self, "reports_")
        _, reports = self._evaluate(X)
        return np.array([[r.e_tau_indoor, r.e_tau_open, r.ds_gain, r.reliability_sigma] for r in reports])

    def predict(self, X):
        """DS gain in ns for each floorplan."""
        return self.transform(X)[:, 2]

    def conditional_mean(self, d, index: int = 0):
        """Analytic mean indoor RMS-DS (ns) at link lengths ``d`` in fitted floorplan ``index``."""
        check_is_fitted(self, "reports_")
        return conditional_tau_mean(check_distances(d), self.floorplans_[index], self.params_)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names, dtype=object)


class LinkSimulator(TransformerMixin, BaseEstimator):
    """Monte-Carlo counterpart of ``DelaySpreadGain``.

    Every floorplan is simulated with the same ``seed``; features are
    (mean indoor RMS-DS, mean open-space RMS-DS, simulated DS gain,
    empirical reliability or NaN below 10^4 links).
    """

    feature_names = ("mean_tau_indoor_ns", "mean_tau_open_ns", "ds_gain_sim_ns", "reliability_ns")

    def __init__(self, n_links=10_000, seed=0, params=None, n_jobs=None):
        self.n_links = n_links
        self.seed = seed
        self.params = params
        self.n_jobs = n_jobs

    def _simulate(self, X):
        p = check_params(self.params)
        fps = check_floorplans(X, p)
        return [simulate(fp, p, self.n_links, self.seed, threads=self.n_jobs)[0] for fp in fps]

    def fit(self, X, y=None):
        self.reports_ = self._simulate(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "reports_")
        rows = [
            [r.mean_tau_indoor, r.mean_tau_open, r.ds_gain_sim, np.nan if r.reliability is None else r.reliability]
            for r in self._simulate(X)
        ]
        return np.array(rows)

    def predict(self, X):
        return self.transform(X)[:, 2]

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names, dtype=object)
