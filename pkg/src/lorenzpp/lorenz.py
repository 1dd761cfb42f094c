"""Empirical unscaled Lorenz curves and Lorenz P-P plots.

The step Lorenz P-P plot of an X-sample against a Y-sample is represented
by integer counts ``c_k`` (``k = 1..n``): the curve takes the value
``c_k / m`` on ``((k-1)/n, k/n]``, where ``c_k`` is the number of Y
breakpoints ``t_j = (1/m) sum_{i<=j} Y_(i)`` (``j >= 1``) not exceeding the
X cumulative mean ``s_k = (1/n) sum_{i<=k} X_(i)``. Keeping counts rather
than floats lets the test statistics compare observed and bootstrap values
exactly.

The power-transformed variant compares cumulative sums of ``X**theta`` and
``Y**theta`` in log space, so large ``theta`` cannot overflow or underflow.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Sample",
    "PairedSample",
    "LorenzCurve",
    "StepLorenzInverse",
    "LppCurve",
    "as_sample",
    "empirical_lorenz",
    "step_lorenz_inverse",
    "lpp_step",
    "lpp_linear",
    "generalized_lpp",
    "pp_plot",
    "shift_samples",
    "curve_to_csv",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Sample:
    """A finite sample of non-negative observations.

    ``values`` keeps insertion order (needed for matched pairs); ``sorted``
    and ``mean`` are cached on construction.
    """

    values: np.ndarray
    sorted: np.ndarray = field(init=False, repr=False)
    mean: float = field(init=False)

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size == 0:
            raise ValueError("a sample needs at least one observation")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sample values must be finite")
        if np.any(vals < 0.0):
            raise ValueError("sample values must be non-negative")
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "sorted", _frozen(np.sort(vals)))
        object.__setattr__(self, "mean", float(vals.mean()))

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    def scaled(self, c: float) -> Sample:
        return Sample(self.values * c)


@dataclass(frozen=True, eq=False)
class PairedSample:
    """Matched pairs ``(x_i, y_i)``; both margins share insertion order."""

    x: Sample
    y: Sample

    def __post_init__(self) -> None:
        x, y = as_sample(self.x), as_sample(self.y)
        if x.n != y.n:
            raise ValueError(f"paired samples need equal lengths, got {x.n} and {y.n}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.n

    def swapped(self) -> PairedSample:
        return PairedSample(self.y, self.x)


def as_sample(data) -> Sample:
    return data if isinstance(data, Sample) else Sample(np.asarray(data, dtype=float))


def _cumulative_means(sorted_values: np.ndarray) -> np.ndarray:
    """``(0, s_1, ..., s_n)`` with ``s_k = (1/n) sum_{i<=k} v_(i)``."""
    out = np.empty(sorted_values.size + 1)
    out[0] = 0.0
    np.cumsum(sorted_values, out=out[1:])
    out[1:] /= sorted_values.size
    return out


def _log_cumulative_means(sorted_logs: np.ndarray) -> np.ndarray:
    """Log-space analogue of :func:`_cumulative_means` (leading ``-inf``)."""
    out = np.empty(sorted_logs.size + 1)
    out[0] = -math.inf
    with np.errstate(invalid="ignore", divide="ignore"):
        np.logaddexp.accumulate(sorted_logs, out=out[1:])
    out[1:] -= math.log(sorted_logs.size)
    return out


def _step_counts(x_ordinates: np.ndarray, y_ordinates: np.ndarray) -> np.ndarray:
    # c_k = #{j >= 1 : t_j <= s_k}; equal ordinates count (right-continuous inverse)
    return np.searchsorted(y_ordinates[1:], x_ordinates[1:], side="right")


@dataclass(frozen=True, eq=False)
class LorenzCurve:
    """Piecewise-linear unscaled Lorenz curve through ``(k/n, s_k)``."""

    n: int
    nodes: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.nodes[-1])

    def __call__(self, p):
        """Evaluate at ``p``; ``+inf`` beyond ``p = 1``."""
        p = np.asarray(p, dtype=float)
        if np.any(p < 0.0):
            raise ValueError("Lorenz curve is defined for p >= 0")
        grid = np.arange(self.n + 1) / self.n
        out = np.interp(np.minimum(p, 1.0), grid, self.nodes)
        out = np.where(p > 1.0, math.inf, out)
        return float(out) if out.ndim == 0 else out

    def inverse(self, t):
        """Generalised inverse ``inf{u : L(u) > t}``, clamped to 1."""
        t = np.asarray(t, dtype=float)
        j = np.searchsorted(self.nodes, t, side="right")
        inside = j <= self.n
        jj = np.where(inside, j, self.n)
        lo = self.nodes[jj - 1]
        hi = self.nodes[jj]
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(hi > lo, (t - lo) / (hi - lo), 0.0)
        out = np.where(inside, (jj - 1 + frac) / self.n, 1.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class StepLorenzInverse:
    """Right-continuous step inverse of the empirical Lorenz curve.

    Takes the value ``j/m`` on ``[t_j, t_{j+1})`` and 1 from the sample mean on.
    """

    m: int
    breakpoints: np.ndarray

    def counts(self, t) -> np.ndarray:
        return np.searchsorted(self.breakpoints[1:], np.asarray(t, dtype=float), side="right")

    def __call__(self, t):
        out = self.counts(t) / self.m
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class LppCurve:
    """Step Lorenz P-P plot on the grid ``k/n``.

    Attributes
    ----------
    n, m : int
        Sizes of the X and Y samples.
    counts : ndarray of int
        ``c_k`` for ``k = 1..n``; the curve value at ``k/n`` is ``c_k / m``.
    nu : float or None
        ``1 ^ L_{F_n}^{-1}(mean(Y))``, the point from which the population
        analogue is identically 1. ``None`` for the classic P-P plot.
    """

    n: int
    m: int
    counts: np.ndarray
    nu: float | None = None

    @property
    def values(self) -> np.ndarray:
        return self.counts / self.m

    @property
    def grid(self) -> np.ndarray:
        return np.arange(1, self.n + 1) / self.n

    def __call__(self, t):
        """Evaluate with the left-open interval convention.

        ``t`` in ``((k-1)/n, k/n]`` returns ``c_k / m``; ``t = 0`` returns the
        first value, which is where the curve starts.
        """
        t = np.asarray(t, dtype=float)
        if np.any((t < 0.0) | (t > 1.0)):
            raise ValueError("LPP is evaluated on [0, 1]")
        k = np.clip(np.ceil(t * self.n - 1e-9).astype(int), 1, self.n)
        out = self.counts[k - 1] / self.m
        return float(out) if out.ndim == 0 else out

    def __eq__(self, other) -> bool:
        if not isinstance(other, LppCurve):
            return NotImplemented
        return self.n == other.n and self.m == other.m and np.array_equal(self.counts, other.counts)

    __hash__ = None  # type: ignore[assignment]


def empirical_lorenz(x) -> LorenzCurve:
    x = as_sample(x)
    return LorenzCurve(n=x.n, nodes=_frozen(_cumulative_means(x.sorted)))


def step_lorenz_inverse(y) -> StepLorenzInverse:
    y = as_sample(y)
    return StepLorenzInverse(m=y.n, breakpoints=_frozen(_cumulative_means(y.sorted)))


def _nu(x: Sample, y: Sample) -> float:
    return float(min(1.0, empirical_lorenz(x).inverse(y.mean)))


def lpp_step(x, y) -> LppCurve:
    """Step Lorenz P-P plot of ``x`` against ``y``.

    Examples
    --------
    >>> lpp_step([1.0, 2.0, 3.0], [2.0, 4.0]).values
    array([0. , 0.5, 0.5])
    """
    x, y = as_sample(x), as_sample(y)
    counts = _step_counts(_cumulative_means(x.sorted), _cumulative_means(y.sorted))
    return LppCurve(n=x.n, m=y.n, counts=_frozen(counts), nu=_nu(x, y))


def lpp_linear(x, y, p):
    """Continuous piecewise-linear Lorenz P-P plot ``L_{G_m}^{-1}(L_{F_n}(p))``."""
    x, y = as_sample(x), as_sample(y)
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("p must lie in [0, 1]")
    return empirical_lorenz(y).inverse(empirical_lorenz(x)(p))


def _log_powers(values: np.ndarray, theta: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return theta * np.log(values)


def generalized_lpp(x, y, theta: float) -> LppCurve:
    """Step Lorenz P-P plot of the power-transformed samples ``x**theta``, ``y**theta``.

    Cumulative sums are compared in log space, which is order-equivalent to
    comparing the sums of powers themselves. ``theta = 1`` uses the plain
    arithmetic path and is identical to :func:`lpp_step`.
    """
    if not (theta > 0 and math.isfinite(theta)):
        raise ValueError(f"theta must be a positive finite number, got {theta!r}")
    x, y = as_sample(x), as_sample(y)
    if theta == 1.0:
        return lpp_step(x, y)
    sx = _log_cumulative_means(_log_powers(x.sorted, theta))
    ty = _log_cumulative_means(_log_powers(y.sorted, theta))
    return LppCurve(n=x.n, m=y.n, counts=_frozen(_step_counts(sx, ty)))


def pp_plot(x, y) -> LppCurve:
    """Classic P-P plot ``G_m(X_(k))`` on the grid ``k/n``."""
    x, y = as_sample(x), as_sample(y)
    counts = np.searchsorted(y.sorted, x.sorted, side="right")
    return LppCurve(n=x.n, m=y.n, counts=_frozen(counts))


def shift_samples(x, y, eps: float):
    if not eps >= 0.0:
        raise ValueError(f"shift must be non-negative, got {eps!r}")
    x, y = as_sample(x), as_sample(y)
    if eps == 0.0:
        return x, y
    return Sample(x.values + eps), Sample(y.values + eps)


def curve_to_csv(p, values, header=("p", "value")) -> str:
    """Render a curve as CSV text with a fixed header."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for pi, vi in zip(np.asarray(p, dtype=float), np.asarray(values, dtype=float)):
        writer.writerow([repr(float(pi)), repr(float(vi))])
    return buf.getvalue()
