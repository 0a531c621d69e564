"""Scikit-learn style estimator wrapper around the synthesis pipeline.

`fit` runs synthesis + refinement for the configured band plan and
stores the resulting network; `predict` evaluates the transducer gain
at requested frequencies.  Parameters follow the sklearn convention
(constructor args mirrored by get_params/set_params), which makes the
designer usable inside parameter searches.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import synthesis


class DualBandMatchingDesigner(BaseEstimator):
    """Designs a dual-band transformer matching network on fit().

    Attributes set by fit: ``network_`` (the synthesized network),
    ``diagnostics_`` and ``residual_norm_``.
    """

    def __init__(
        self,
        f_low: float = 28e9,
        f_high: float = 38e9,
        r_opt: float = 50.0,
        r_load: float = 50.0,
        c_par_primary: float = 150e-15,
        c_par_secondary: float = 150e-15,
        f_sc: float | None = None,
        k_m: float = 1.0,
        q_xfmr: float = math.inf,
        q_t: float = math.inf,
        l_ts: float | str = "auto",
        refine: bool = True,
    ):
        self.f_low = f_low
        self.f_high = f_high
        self.r_opt = r_opt
        self.r_load = r_load
        self.c_par_primary = c_par_primary
        self.c_par_secondary = c_par_secondary
        self.f_sc = f_sc
        self.k_m = k_m
        self.q_xfmr = q_xfmr
        self.q_t = q_t
        self.l_ts = l_ts
        self.refine = refine

    def _spec(self) -> synthesis.DesignSpec:
        return synthesis.DesignSpec(
            f_low=self.f_low,
            f_high=self.f_high,
            f_sc=self.f_sc,
            r_opt=self.r_opt,
            r_load=self.r_load,
            c_par_primary=self.c_par_primary,
            c_par_secondary=self.c_par_secondary,
            k_m=self.k_m,
            q_xfmr=self.q_xfmr,
            q_t=self.q_t,
        )

    def fit(self, X=None, y=None):
        """Synthesize the network; X and y are ignored (design is driven
        entirely by the constructor parameters)."""
        net = synthesis.synthesize(self._spec(), l_ts=self.l_ts, do_refine=self.refine)
        self.network_ = net
        self.diagnostics_ = dict(net.diagnostics)
        self.residual_norm_ = (
            net.refinement.residual_norm
            if net.refinement is not None
            else float(np.linalg.norm(net.diagnostics["match_residuals"]))
        )
        return self

    def predict(self, X):
        """Transducer gain (linear) at frequencies X (Hz, array-like)."""
        check_is_fitted(self, "network_")
        f = np.asarray(X, dtype=float).reshape(-1)
        # evaluate pointwise (grid need not be sorted or unique)
        _, _, s21, _ = synthesis.sparams_at(self.network_, 2.0 * math.pi * f)
        return np.abs(s21) ** 2

    def score(self, X=None, y=None) -> float:
        """Negative match-residual norm (higher is better)."""
        check_is_fitted(self, "network_")
        return -self.residual_norm_

    def to_netlist(self, grid=(2501, 20e9, 45e9)):
        check_is_fitted(self, "network_")
        return synthesis.to_netlist(self.network_, grid=grid)
