"""Bootstrap tests of second-order and transformed stochastic dominance.

The null hypothesis is that the X distribution dominates the Y distribution.
The observed functional is ``T(I - LPP)`` of the step Lorenz P-P plot; each
replicate is ``T(LPP - LPP*)`` where ``LPP*`` comes from resampled data, and
the p-value is the fraction of replicates strictly exceeding the observed
value.

Replicate ``k`` draws from ``stream(seed, k)``, so an outcome depends only on
the inputs and the configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .lorenz import (
    LppCurve,
    PairedSample,
    Sample,
    _cumulative_means,
    _log_cumulative_means,
    _step_counts,
    as_sample,
    shift_samples,
)
from .statistics import (
    TINF,
    FunctionalValue,
    StatKind,
    effective_size,
    observed_score,
    replicate_score,
    score_to_raw,
)
from .streams import DEFAULT_SEED, stream

__all__ = [
    "Scheme",
    "TestConfig",
    "TestOutcome",
    "resample",
    "bootstrap_pvalue",
    "ssd_test",
    "tsd_test",
    "lpp_test",
    "FSD_THETA",
]

SCHEMA_VERSION = 1
FSD_THETA = 50.0


class Scheme(str, Enum):
    INDEPENDENT = "independent"
    MATCHED_PAIRS = "paired"


@dataclass(frozen=True)
class TestConfig:
    """Settings of an LPP bootstrap test.

    ``theta=None`` is the plain second-order test; a positive ``theta`` tests
    transformed dominance of order ``1 + 1/theta`` (``theta=50`` approximates
    first-order dominance). ``shift_before_power`` chooses whether ``eps`` is
    added before or after raising to ``theta``.
    """

    __test__ = False

    stat: StatKind = TINF
    alpha: float = 0.1
    replicates: int = 500
    eps: float = 1e-4
    theta: float | None = None
    scheme: Scheme = Scheme.INDEPENDENT
    seed: int = DEFAULT_SEED
    shift_before_power: bool = True

    def __post_init__(self) -> None:
        if isinstance(self.stat, str):
            object.__setattr__(self, "stat", StatKind.parse(self.stat))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 0.5), got {self.alpha!r}")
        if self.replicates < 1:
            raise ValueError("the bootstrap needs at least one replicate")
        if not self.eps >= 0.0:
            raise ValueError(f"eps must be non-negative, got {self.eps!r}")
        if self.theta is not None and not (self.theta > 0 and math.isfinite(self.theta)):
            raise ValueError(f"theta must be positive, got {self.theta!r}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True, eq=False)
class TestOutcome:
    """Result of one bootstrap test."""

    __test__ = False

    stat: str
    statistic: FunctionalValue
    pvalue: float
    reject: bool
    replicate_values: np.ndarray = field(repr=False)
    config: object = field(repr=False)
    extra: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        cfg = self.config
        out = {
            "schema": SCHEMA_VERSION,
            "stat": self.stat,
            "raw": self.statistic.raw,
            "scale": self.statistic.scale,
            "statistic": self.statistic.statistic,
            "pvalue": self.pvalue,
            "reject": self.reject,
            "K": cfg.replicates,
            "alpha": cfg.alpha,
            "eps": getattr(cfg, "eps", None),
            "theta": getattr(cfg, "theta", None),
            "scheme": cfg.scheme.value,
            "seed": cfg.seed,
        }
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _unpack(x, y, scheme: Scheme) -> tuple[Sample, Sample]:
    if isinstance(x, PairedSample):
        if y is not None:
            raise ValueError("pass either a PairedSample or two samples, not both")
        x, y = x.x, x.y
    elif isinstance(y, PairedSample):
        raise ValueError("a PairedSample must be passed as the first argument")
    x, y = as_sample(x), as_sample(y)
    if scheme is Scheme.MATCHED_PAIRS and x.n != y.n:
        raise ValueError(f"matched pairs require equal sample sizes, got n={x.n}, m={y.n}")
    return x, y


def _draw_indices(rng: np.random.Generator, n: int, m: int, paired: bool):
    ix = rng.integers(0, n, n)
    iy = ix if paired else rng.integers(0, m, m)
    return ix, iy


def resample(x, y=None, scheme: Scheme = Scheme.INDEPENDENT, rng: np.random.Generator | None = None):
    """One bootstrap resample of the data.

    Independent sampling draws ``n`` points from ``x`` and ``m`` from ``y``;
    matched pairs draw one index vector and apply it to both coordinates.
    """
    scheme = Scheme(scheme)
    x, y = _unpack(x, y, scheme)
    if rng is None:
        rng = np.random.default_rng()
    ix, iy = _draw_indices(rng, x.n, y.n, scheme is Scheme.MATCHED_PAIRS)
    return Sample(x.values[ix]), Sample(y.values[iy])


def _keys(x: Sample, y: Sample, theta: float | None, eps_after: float):
    """Sort keys and the ordinate builder for the (possibly powered) data."""
    if theta is None or (theta == 1.0 and eps_after == 0.0):
        return x.values, y.values, _cumulative_means
    with np.errstate(divide="ignore"):
        kx = theta * np.log(x.values)
        ky = theta * np.log(y.values)
    if eps_after > 0.0:
        kx = np.logaddexp(kx, math.log(eps_after))
        ky = np.logaddexp(ky, math.log(eps_after))
    return kx, ky, _log_cumulative_means


def _run(x: Sample, y: Sample, cfg: TestConfig, eps_after: float) -> TestOutcome:
    kind = cfg.stat
    paired = cfg.scheme is Scheme.MATCHED_PAIRS
    kx, ky, ordinates = _keys(x, y, cfg.theta, eps_after)
    n, m = kx.size, ky.size

    obs_x = ordinates(np.sort(kx))
    obs_y = ordinates(np.sort(ky))
    if np.isnan(obs_x).any() or np.isnan(obs_y).any():
        raise FloatingPointError(
            "Lorenz ordinates became NaN; rescale the samples (the test is scale-free)"
        )
    curve = LppCurve(n=n, m=m, counts=_step_counts(obs_x, obs_y))
    obs_score, den = observed_score(curve, kind)

    raw_reps = np.empty(cfg.replicates)
    exceed = 0
    for k in range(cfg.replicates):
        ix, iy = _draw_indices(stream(cfg.seed, k), n, m, paired)
        boot = _step_counts(ordinates(np.sort(kx[ix])), ordinates(np.sort(ky[iy])))
        score, _ = replicate_score(curve, boot, kind)
        exceed += score > obs_score
        raw_reps[k] = score_to_raw(score, den, n, kind)

    pvalue = exceed / cfg.replicates
    # an observed value of exactly 0 never exceeds the bootstrap threshold
    reject = bool(pvalue < cfg.alpha and obs_score > 0)
    statistic = FunctionalValue(
        raw=score_to_raw(obs_score, den, n, kind),
        scale=math.sqrt(effective_size(n, m)),
    )
    return TestOutcome(
        stat=kind.name,
        statistic=statistic,
        pvalue=pvalue,
        reject=reject,
        replicate_values=raw_reps,
        config=cfg,
    )


def bootstrap_pvalue(x, y=None, cfg: TestConfig | None = None) -> TestOutcome:
    """Bootstrap the LPP test on the data as given (no shift applied).

    ``cfg.theta`` selects the power transform; ``cfg.eps`` is ignored here.
    """
    cfg = cfg or TestConfig()
    x, y = _unpack(x, y, cfg.scheme)
    return _run(x, y, cfg, eps_after=0.0)


def ssd_test(x, y=None, cfg: TestConfig | None = None) -> TestOutcome:
    """Test ``H0: X >=_2 Y`` on the samples shifted by ``cfg.eps``."""
    cfg = cfg or TestConfig()
    if cfg.theta is not None:
        cfg = replace(cfg, theta=None)
    x, y = _unpack(x, y, cfg.scheme)
    x, y = shift_samples(x, y, cfg.eps)
    return _run(x, y, cfg, eps_after=0.0)


def tsd_test(x, y=None, theta: float = FSD_THETA, cfg: TestConfig | None = None) -> TestOutcome:
    """Test transformed dominance of order ``1 + 1/theta`` via powered samples.

    The samples are shifted by ``cfg.eps`` and then raised to ``theta``
    (or raised first when ``cfg.shift_before_power`` is false). With
    ``theta = 1`` and the default shift order this is :func:`ssd_test`.
    """
    cfg = replace(cfg or TestConfig(), theta=float(theta))
    x, y = _unpack(x, y, cfg.scheme)
    if cfg.shift_before_power:
        x, y = shift_samples(x, y, cfg.eps)
        return _run(x, y, cfg, eps_after=0.0)
    return _run(x, y, cfg, eps_after=cfg.eps)


def lpp_test(x, y=None, cfg: TestConfig | None = None) -> TestOutcome:
    """Dispatch on ``cfg.theta``: plain second-order test or transformed test."""
    cfg = cfg or TestConfig()
    if cfg.theta is None:
        return ssd_test(x, y, cfg)
    return tsd_test(x, y, cfg.theta, cfg)
