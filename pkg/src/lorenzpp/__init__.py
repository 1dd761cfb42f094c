"""Bootstrap tests of stochastic dominance based on the Lorenz P-P plot."""

from .bootstrap import (
    FSD_THETA,
    Scheme,
    TestConfig,
    TestOutcome,
    bootstrap_pvalue,
    lpp_test,
    resample,
    ssd_test,
    tsd_test,
)
from .distributions import (
    LognormalMixture,
    PairedSamplerConfig,
    SinghMaddala,
    UnitExponential,
    Weibull,
    cdf,
    quantile,
    sample_iid,
    sample_paired,
    weibull_unit_mean_scale,
)
from .harness import ExperimentSpec, RejectionTable, builtin_specs, get_builtin, run_experiment
from .ksb3 import Ksb3Config, ksb3_test
from .lorenz import (
    LorenzCurve,
    LppCurve,
    PairedSample,
    Sample,
    empirical_lorenz,
    generalized_lpp,
    lpp_linear,
    lpp_step,
    pp_plot,
    step_lorenz_inverse,
)
from .special import analytic_lpp_weibull_exp, gamma_fn, lambert_w_minus1, upper_incomplete_gamma
from .statistics import T1, TINF, FunctionalValue, StatKind, functional, t_inf, t_one, t_p

__version__ = "0.1.0"
