"""Exact statistics of the maximum of a Gaussian random walk with negative drift."""

from .errors import (BatemanInvalid, BranchError, ConvergenceFailure, DomainError, GwmError,
                     HorizonTooSmall, PoleAtOne, RemainderUnbounded, ToleranceNotMet)
from .euler_maclaurin import EmProblem, em_sum, kingman_constant
from .gauss_walk import (Drift, WalkStats, asymptotic_stats, decay_crossover, jk_spitzer,
                         jk_zeta, mean_spitzer, mean_zeta, p_zero_spitzer, p_zero_zeta,
                         s_series, stats_auto, stats_extended, stats_spitzer, stats_zeta,
                         var_spitzer, var_zeta)
from .mc_oracle import McConfig, McEstimate, simulate_max
from .series import Precision, SeriesEval
from .special_fn import (bernoulli_number, bernoulli_poly, hurwitz_zeta, lerch_phi, log_gamma,
                         riemann_zeta, std_normal_cdf)

__all__ = [
    "BatemanInvalid", "BranchError", "ConvergenceFailure", "DomainError", "GwmError",
    "HorizonTooSmall", "PoleAtOne", "RemainderUnbounded", "ToleranceNotMet",
    "EmProblem", "em_sum", "kingman_constant",
    "Drift", "WalkStats", "asymptotic_stats", "decay_crossover", "jk_spitzer", "jk_zeta",
    "mean_spitzer", "mean_zeta", "p_zero_spitzer", "p_zero_zeta", "s_series", "stats_auto",
    "stats_extended", "stats_spitzer", "stats_zeta", "var_spitzer", "var_zeta",
    "McConfig", "McEstimate", "simulate_max",
    "Precision", "SeriesEval",
    "bernoulli_number", "bernoulli_poly", "hurwitz_zeta", "lerch_phi", "log_gamma",
    "riemann_zeta", "std_normal_cdf",
]
