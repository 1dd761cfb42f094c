"""``T_p`` functionals of ``(I - LPP)_+`` on the evaluation grids.

``T_inf`` is evaluated on the nodes ``k/n``; finite ``p`` uses the midpoint
rule on ``(2k-1)/(2n)``, where the step curve takes the value ``c_k/m``.
Both grids turn the deviation into integer numerators over a common
denominator (``n*m`` on nodes, ``2*n*m`` on midpoints), so ``T_inf`` and
``T_1`` values from the observed curve and from bootstrap replicates can be
compared without rounding. The bootstrap decision is invariant to any
common positive prefactor, so the stored value is the unscaled functional
and ``sqrt(nm/(n+m))`` is kept separately for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lorenz import LppCurve

__all__ = [
    "StatKind",
    "TINF",
    "T1",
    "FunctionalValue",
    "tp_norm",
    "t_inf",
    "t_one",
    "t_p",
    "functional",
    "effective_size",
]


@dataclass(frozen=True)
class StatKind:
    """Which ``T_p`` functional to use; ``p = inf`` is the sup functional."""

    p: float

    def __post_init__(self) -> None:
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise ValueError(f"T_p needs p >= 1, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, text: str) -> StatKind:
        """Parse ``tinf``, ``t1`` or ``tp:<p>``."""
        token = text.strip().lower()
        if token in ("tinf", "t_inf", "sup"):
            return cls(math.inf)
        if token in ("t1", "t_1"):
            return cls(1.0)
        if token.startswith("tp:"):
            try:
                return cls(float(token[3:]))
            except ValueError:
                pass
        raise ValueError(f"unknown statistic {text!r}; expected tinf, t1 or tp:<p>")

    @property
    def name(self) -> str:
        if math.isinf(self.p):
            return "tinf"
        if self.p == 1.0:
            return "t1"
        return f"tp:{self.p:g}"

    @property
    def on_nodes(self) -> bool:
        return math.isinf(self.p)


TINF = StatKind(math.inf)
T1 = StatKind(1.0)


@dataclass(frozen=True)
class FunctionalValue:
    """Unscaled functional ``raw`` and the reporting scale ``sqrt(r_n)``."""

    raw: float
    scale: float

    @property
    def statistic(self) -> float:
        return self.raw * self.scale


def effective_size(n: int, m: int) -> float:
    """``r_n = n m / (n + m)``."""
    return n * m / (n + m)


def tp_norm(values, p: float) -> float:
    """``||(v)_+||_p`` of a grid function under the uniform probability weights."""
    v = np.maximum(np.asarray(values, dtype=float), 0.0)
    if v.size == 0:
        raise ValueError("empty grid function")
    if math.isinf(p):
        return float(v.max())
    if p < 1.0:
        raise ValueError(f"T_p needs p >= 1, got {p!r}")
    if p == 1.0:
        return float(v.mean())
    top = v.max()
    if top == 0.0:
        return 0.0
    # factor out the max to keep v**p in range
    return float(top * np.mean((v / top) ** p) ** (1.0 / p))


# --- exact numerators --------------------------------------------------------


def _observed_numerators(counts: np.ndarray, n: int, m: int, kind: StatKind) -> tuple[np.ndarray, int]:
    k = np.arange(1, n + 1, dtype=np.int64)
    c = counts.astype(np.int64)
    if kind.on_nodes:
        return k * m - n * c, n * m
    return (2 * k - 1) * m - 2 * n * c, 2 * n * m


def _replicate_numerators(counts: np.ndarray, boot_counts: np.ndarray, n: int, m: int, kind: StatKind) -> tuple[np.ndarray, int]:
    diff = counts.astype(np.int64) - boot_counts.astype(np.int64)
    if kind.on_nodes:
        return n * diff, n * m
    return 2 * n * diff, 2 * n * m


def _numerator_score(a: np.ndarray, kind: StatKind):
    """Monotone score of ``tp_norm(a)``: exact ints for p in {1, inf}."""
    pos = np.maximum(a, 0)
    if kind.on_nodes:
        return int(pos.max())
    if kind.p == 1.0:
        return int(pos.sum())
    return tp_norm(pos.astype(float), kind.p)


def score_to_raw(score, den: int, n: int, kind: StatKind) -> float:
    if kind.on_nodes:
        return score / den
    if kind.p == 1.0:
        return score / (n * den)
    return score / den


def observed_score(curve: LppCurve, kind: StatKind):
    a, den = _observed_numerators(curve.counts, curve.n, curve.m, kind)
    return _numerator_score(a, kind), den


def replicate_score(curve: LppCurve, boot_counts: np.ndarray, kind: StatKind):
    a, den = _replicate_numerators(curve.counts, boot_counts, curve.n, curve.m, kind)
    return _numerator_score(a, kind), den


# --- public functionals ------------------------------------------------------


def t_inf(curve: LppCurve) -> float:
    """``max(0, max_k (k/n - c_k/m))``."""
    score, den = observed_score(curve, TINF)
    return score_to_raw(score, den, curve.n, TINF)


def t_one(curve: LppCurve) -> float:
    """Midpoint-rule ``(1/n) sum_k ((2k-1)/(2n) - c_k/m)_+``, without prefactor."""
    score, den = observed_score(curve, T1)
    return score_to_raw(score, den, curve.n, T1)


def t_p(curve: LppCurve, p: float) -> float:
    """Midpoint-rule ``L^p`` norm of ``(I - LPP)_+``; ``p = inf`` gives :func:`t_inf`."""
    kind = StatKind(p)
    score, den = observed_score(curve, kind)
    return score_to_raw(score, den, curve.n, kind)


def functional(curve: LppCurve, kind: StatKind) -> FunctionalValue:
    raw = t_p(curve, kind.p)
    return FunctionalValue(raw=raw, scale=math.sqrt(effective_size(curve.n, curve.m)))
