"""Parametric families used by the simulation designs.

All families live on the non-negative half line. Sampling is by inverse
transform so that a single uniform stream drives every family, including the
Gaussian-copula paired sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import ndtr, ndtri

from .lorenz import PairedSample, Sample
from .special import gamma_fn

__all__ = [
    "Weibull",
    "UnitExponential",
    "SinghMaddala",
    "LognormalMixture",
    "DistSpec",
    "PairedSamplerConfig",
    "cdf",
    "quantile",
    "weibull_unit_mean_scale",
    "sample_iid",
    "sample_paired",
    "dist_from_dict",
    "dist_to_dict",
    "parse_dist",
]


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class Weibull:
    """``F(x) = 1 - exp(-(x/b)^a)``."""

    a: float
    b: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _positive("Weibull shape a", self.a))
        object.__setattr__(self, "b", _positive("Weibull scale b", self.b))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return -np.expm1(-((x / self.b) ** self.a))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        return self.b * (-np.log1p(-p)) ** (1.0 / self.a)

    @property
    def mean(self) -> float:
        return self.b * gamma_fn(1.0 + 1.0 / self.a)


@dataclass(frozen=True)
class UnitExponential:
    """``F(x) = 1 - exp(-x)``."""

    def cdf(self, x):
        return -np.expm1(-np.asarray(x, dtype=float))

    def quantile(self, p):
        return -np.log1p(-np.asarray(p, dtype=float))

    @property
    def mean(self) -> float:
        return 1.0


@dataclass(frozen=True)
class SinghMaddala:
    """``F(x) = 1 - (1 + (x/b)^a)^(-q)``."""

    a: float
    q: float
    b: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _positive("Singh-Maddala shape a", self.a))
        object.__setattr__(self, "q", _positive("Singh-Maddala shape q", self.q))
        object.__setattr__(self, "b", _positive("Singh-Maddala scale b", self.b))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return -np.expm1(-self.q * np.log1p((x / self.b) ** self.a))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        # b * ((1-p)^(-1/q) - 1)^(1/a)
        return self.b * np.expm1(-np.log1p(-p) / self.q) ** (1.0 / self.a)


@dataclass(frozen=True)
class LognormalMixture:
    """Finite mixture of lognormals; components are ``(meanlog, sdlog)``."""

    weights: tuple[float, ...]
    components: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        weights = tuple(float(w) for w in self.weights)
        comps = tuple((float(mu), float(sd)) for mu, sd in self.components)
        if not weights or len(weights) != len(comps):
            raise ValueError("mixture needs one weight per component")
        if any(w < 0.0 or not math.isfinite(w) for w in weights):
            raise ValueError("mixture weights must be non-negative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1, got {sum(weights)!r}")
        for mu, sd in comps:
            if not math.isfinite(mu):
                raise ValueError("lognormal meanlog must be finite")
            _positive("lognormal sdlog", sd)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", comps)

    @classmethod
    def single(cls, meanlog: float, sdlog: float) -> LognormalMixture:
        return cls((1.0,), ((meanlog, sdlog),))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            logx = np.log(x)
        out = np.zeros_like(x)
        for w, (mu, sd) in zip(self.weights, self.components):
            out = out + w * ndtr((logx - mu) / sd)
        return out

    def quantile(self, p):
        """Bisection on the mixture CDF to an absolute tolerance of 1e-12."""
        p = np.asarray(p, dtype=float)
        if len(self.components) == 1:
            mu, sd = self.components[0]
            return np.exp(mu + sd * ndtri(p))
        flat = p.ravel()
        lo = np.zeros_like(flat)
        hi = np.ones_like(flat)
        while True:
            low = self.cdf(hi) <= flat
            if not low.any():
                break
            lo = np.where(low, hi, lo)
            hi = np.where(low, 2.0 * hi, hi)
        for _ in range(200):
            if np.all(hi - lo <= 1e-12):
                break
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < flat
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        out[flat == 0.0] = 0.0
        return out.reshape(p.shape)


DistSpec = Union[Weibull, UnitExponential, SinghMaddala, LognormalMixture]


def cdf(spec: DistSpec, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("cdf is defined for x >= 0")
    out = np.clip(spec.cdf(x), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def quantile(spec: DistSpec, p):
    p = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p)) or np.any((p < 0.0) | (p >= 1.0)):
        raise ValueError("quantile requires p in [0, 1)")
    out = spec.quantile(p)
    return float(out) if out.ndim == 0 else out


def weibull_unit_mean_scale(a: float) -> float:
    """Scale ``q_a = 1 / Gamma(1 + 1/a)`` giving ``W(a, q_a)`` unit mean."""
    return 1.0 / gamma_fn(1.0 + 1.0 / _positive("Weibull shape a", a))


def sample_iid(spec: DistSpec, n: int, rng: np.random.Generator) -> Sample:
    if n < 1:
        raise ValueError("sample size must be at least 1")
    return Sample(quantile(spec, rng.random(n)))


@dataclass(frozen=True)
class PairedSamplerConfig:
    rho: float
    marginals: tuple[DistSpec, DistSpec]
    n: int

    def __post_init__(self) -> None:
        if not abs(self.rho) < 1.0:
            raise ValueError(f"correlation must satisfy |rho| < 1, got {self.rho!r}")
        if self.n < 1:
            raise ValueError("sample size must be at least 1")


_ONE_MINUS = np.nextafter(1.0, 0.0)


def sample_paired(cfg: PairedSamplerConfig, rng: np.random.Generator) -> PairedSample:
    """Draw ``n`` pairs whose dependence is a Gaussian copula with correlation ``rho``."""
    z1 = rng.standard_normal(cfg.n)
    z2 = rng.standard_normal(cfg.n)
    w = cfg.rho * z1 + math.sqrt(1.0 - cfg.rho**2) * z2
    u1 = np.minimum(ndtr(z1), _ONE_MINUS)
    u2 = np.minimum(ndtr(w), _ONE_MINUS)
    f, g = cfg.marginals
    return PairedSample(Sample(quantile(f, u1)), Sample(quantile(g, u2)))


# --- serialisation -----------------------------------------------------------


def dist_to_dict(spec: DistSpec) -> dict:
    if isinstance(spec, Weibull):
        return {"family": "weibull", "a": spec.a, "b": spec.b}
    if isinstance(spec, UnitExponential):
        return {"family": "exponential"}
    if isinstance(spec, SinghMaddala):
        return {"family": "singh_maddala", "a": spec.a, "q": spec.q, "b": spec.b}
    if isinstance(spec, LognormalMixture):
        return {
            "family": "lognormal_mixture",
            "weights": list(spec.weights),
            "components": [list(c) for c in spec.components],
        }
    raise TypeError(f"not a distribution spec: {spec!r}")


def dist_from_dict(data: dict) -> DistSpec:
    if not isinstance(data, dict) or "family" not in data:
        raise ValueError(f"distribution must be an object with a 'family' key, got {data!r}")
    family = data["family"]
    try:
        if family == "weibull":
            return Weibull(data["a"], data.get("b", 1.0))
        if family == "exponential":
            return UnitExponential()
        if family == "singh_maddala":
            return SinghMaddala(data["a"], data["q"], data.get("b", 1.0))
        if family == "lognormal":
            return LognormalMixture.single(data["meanlog"], data["sdlog"])
        if family == "lognormal_mixture":
            return LognormalMixture(tuple(data["weights"]), tuple(tuple(c) for c in data["components"]))
    except KeyError as exc:
        raise ValueError(f"{family} distribution is missing parameter {exc}") from None
    raise ValueError(f"unknown distribution family {family!r}")


def parse_dist(text: str) -> DistSpec:
    """Parse the short form used on the command line.

    ``weibull:a,b``, ``exp``, ``sm:a,q[,b]`` and ``lognormal:meanlog,sdlog``.
    """
    name, _, args = text.strip().partition(":")
    try:
        params = [float(v) for v in args.split(",")] if args else []
    except ValueError:
        raise ValueError(f"bad distribution parameters in {text!r}") from None
    name = name.lower()
    if name in ("exp", "exponential") and not params:
        return UnitExponential()
    if name == "weibull" and len(params) in (1, 2):
        return Weibull(*params)
    if name in ("sm", "singh_maddala") and len(params) in (2, 3):
        return SinghMaddala(*params)
    if name == "lognormal" and len(params) == 2:
        return LognormalMixture.single(*params)
    raise ValueError(f"cannot parse distribution {text!r}")
