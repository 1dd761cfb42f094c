"""Monte Carlo rejection-rate experiments.

Each Monte Carlo run draws one pair of samples and applies every configured
test to it (in the forward direction ``H0: F >= G`` and/or the reverse
``H0: G >= F``). Data for run ``r`` at size ``n`` come from
``stream(master_seed, n, r)``; each test derives its bootstrap seed from
``(master_seed, n, r, stat, direction)``. Tables are thus identical whatever
the number of worker processes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .bootstrap import FSD_THETA, Scheme, TestConfig, lpp_test
from .distributions import (
    DistSpec,
    LognormalMixture,
    PairedSamplerConfig,
    SinghMaddala,
    UnitExponential,
    Weibull,
    dist_from_dict,
    dist_to_dict,
    sample_iid,
    sample_paired,
    weibull_unit_mean_scale,
)
from .ksb3 import Ksb3Config, ksb3_test
from .statistics import StatKind
from .streams import DEFAULT_SEED, label_key, stream

__all__ = [
    "ExperimentSpec",
    "RejectionTable",
    "run_experiment",
    "builtin_specs",
    "get_builtin",
    "PAPER_N_LIST",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
PAPER_N_LIST = (50, 100, 200, 500, 1000)
DIRECTIONS = ("forward", "reverse")


def _parse_stat(token: str):
    """``tinf``/``t1``/``tp:<p>`` -> StatKind, ``ksb3[:order]`` -> order."""
    token = token.strip().lower()
    if token.startswith("ksb3"):
        _, _, order = token.partition(":")
        try:
            order_i = int(order) if order else 2
        except ValueError:
            raise ValueError(f"bad KSB3 order in {token!r}") from None
        if order_i not in (1, 2):
            raise ValueError(f"KSB3 order must be 1 or 2, got {order_i}")
        return order_i
    return StatKind.parse(token)


@dataclass(frozen=True)
class ExperimentSpec:
    """One simulation design; the defaults are the paper-scale settings."""

    name: str
    f: DistSpec
    g: DistSpec
    n_list: tuple[int, ...] = PAPER_N_LIST
    mc_runs: int = 500
    replicates: int = 500
    alpha: float = 0.1
    stats: tuple[str, ...] = ("tinf", "t1", "ksb3:2")
    direction: str = "both"
    scheme: Scheme = Scheme.INDEPENDENT
    rho: float = 0.0
    theta: float | None = None
    eps: float = 1e-4
    master_seed: int = DEFAULT_SEED
    description: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "stats", tuple(self.stats))
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ValueError("n_list must be a non-empty list of positive sizes")
        if self.mc_runs < 1:
            raise ValueError("mc_runs must be at least 1")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.direction not in ("forward", "reverse", "both"):
            raise ValueError(f"direction must be forward, reverse or both, got {self.direction!r}")
        if not self.stats:
            raise ValueError("at least one statistic is required")
        for token in self.stats:
            _parse_stat(token)
        if self.scheme is Scheme.MATCHED_PAIRS and not abs(self.rho) < 1.0:
            raise ValueError("paired designs need |rho| < 1")
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 0.5), got {self.alpha!r}")

    @property
    def directions(self) -> tuple[str, ...]:
        return DIRECTIONS if self.direction == "both" else (self.direction,)

    @property
    def columns(self) -> list[str]:
        return [f"{d}_{s}" for d in self.directions for s in self.stats]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["f"] = dist_to_dict(self.f)
        out["g"] = dist_to_dict(self.g)
        out["scheme"] = self.scheme.value
        out["n_list"] = list(self.n_list)
        out["stats"] = list(self.stats)
        out["schema"] = SCHEMA_VERSION
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentSpec:
        if not isinstance(data, dict):
            raise ValueError("experiment config must be a JSON object")
        data = dict(data)
        schema = data.pop("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ValueError(f"unsupported config schema {schema!r}")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        for key in ("name", "f", "g"):
            if key not in data:
                raise ValueError(f"config is missing required field {key!r}")
        data["f"] = dist_from_dict(data["f"])
        data["g"] = dist_from_dict(data["g"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValueError(str(exc)) from None

    def digest(self) -> str:
        """Short hash of the design (independent of run time)."""
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def scaled(self, mc_runs=None, replicates=None, n_list=None, master_seed=None) -> ExperimentSpec:
        changes = {}
        if mc_runs is not None:
            changes["mc_runs"] = mc_runs
        if replicates is not None:
            changes["replicates"] = replicates
        if n_list is not None:
            changes["n_list"] = tuple(n_list)
        if master_seed is not None:
            changes["master_seed"] = master_seed
        return replace(self, **changes)


@dataclass
class RejectionTable:
    """Rejection fractions per sample size and ``direction_stat`` column."""

    spec: ExperimentSpec
    rows: dict[int, dict[str, float]]
    valid_runs: dict[int, dict[str, int]]
    failures: dict[int, dict[str, int]]
    runtime: float = field(default=0.0, compare=False)

    @property
    def columns(self) -> list[str]:
        return self.spec.columns

    def cell(self, n: int, direction: str, stat: str) -> float:
        return self.rows[n][f"{direction}_{stat}"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", *self.columns])
        for n in sorted(self.rows):
            writer.writerow([n, *(_fmt(self.rows[n][c]) for c in self.columns)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "name": self.spec.name,
            "digest": self.spec.digest(),
            "spec": self.spec.to_dict(),
            "columns": self.columns,
            "rows": {str(n): self.rows[n] for n in sorted(self.rows)},
            "valid_runs": {str(n): self.valid_runs[n] for n in sorted(self.valid_runs)},
            "failed_runs": {str(n): self.failures[n] for n in sorted(self.failures)},
            "runtime_seconds": self.runtime,
            "notes": "all statistics in a run are applied to the same simulated samples",
        }

    @property
    def stem(self) -> str:
        return f"{self.spec.name}_{self.spec.digest()}"

    def write(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / f"{self.stem}.csv"
        json_path = out / f"{self.stem}.json"
        csv_path.write_text(self.to_csv())
        json_path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return csv_path, json_path


def _fmt(value: float) -> str:
    return "nan" if value != value else f"{value:.6f}"


def _draw(spec: ExperimentSpec, n: int, run: int):
    rng = stream(spec.master_seed, n, run)
    if spec.scheme is Scheme.MATCHED_PAIRS:
        ps = sample_paired(PairedSamplerConfig(spec.rho, (spec.f, spec.g), n), rng)
        return ps.x, ps.y
    return sample_iid(spec.f, n, rng), sample_iid(spec.g, n, rng)


def _test_seed(spec: ExperimentSpec, n: int, run: int, stat: str, direction: str) -> int:
    rng = stream(spec.master_seed, n, run, label_key(stat), DIRECTIONS.index(direction))
    return int(rng.integers(0, 2**63 - 1))


def _run_one(spec: ExperimentSpec, n: int, run: int) -> dict[str, bool | None]:
    """Decisions of every configured test on one simulated data set."""
    x, y = _draw(spec, n, run)
    out: dict[str, bool | None] = {}
    for direction in spec.directions:
        a, b = (x, y) if direction == "forward" else (y, x)
        for token in spec.stats:
            seed = _test_seed(spec, n, run, token, direction)
            kind = _parse_stat(token)
            try:
                if isinstance(kind, int):
                    cfg = Ksb3Config(
                        order=kind, alpha=spec.alpha, replicates=spec.replicates,
                        scheme=spec.scheme, seed=seed,
                    )
                    decision = ksb3_test(a, b, cfg).reject
                else:
                    cfg = TestConfig(
                        stat=kind, alpha=spec.alpha, replicates=spec.replicates, eps=spec.eps,
                        theta=spec.theta, scheme=spec.scheme, seed=seed,
                    )
                    decision = lpp_test(a, b, cfg).reject
            except (FloatingPointError, ValueError, ArithmeticError) as exc:
                log.warning("%s n=%d run=%d %s/%s failed: %s", spec.name, n, run, direction, token, exc)
                decision = None
            out[f"{direction}_{token}"] = decision
    return out


def _run_task(args):
    spec, n, run = args
    return n, run, _run_one(spec, n, run)


def run_experiment(spec: ExperimentSpec, workers: int = 1, progress=None) -> RejectionTable:
    """Run every Monte Carlo replication of ``spec`` and tabulate rejection rates.

    Runs that raise a numerical error are excluded from the denominator and
    counted in ``failures``.
    """
    start = time.perf_counter()
    tasks = [(spec, n, run) for n in spec.n_list for run in range(spec.mc_runs)]
    results: dict[tuple[int, int], dict] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(tasks) // (workers * 8))
            for n, run, rec in pool.map(_run_task, tasks, chunksize=chunk):
                results[(n, run)] = rec
                if progress:
                    progress(len(results), len(tasks))
    else:
        for task in tasks:
            n, run, rec = _run_task(task)
            results[(n, run)] = rec
            if progress:
                progress(len(results), len(tasks))

    rows, valid, failures = {}, {}, {}
    for n in spec.n_list:
        rows[n], valid[n], failures[n] = {}, {}, {}
        for col in spec.columns:
            decisions = [results[(n, r)][col] for r in range(spec.mc_runs)]
            ok = [d for d in decisions if d is not None]
            valid[n][col] = len(ok)
            failures[n][col] = len(decisions) - len(ok)
            rows[n][col] = sum(ok) / len(ok) if ok else float("nan")
    return RejectionTable(spec, rows, valid, failures, runtime=time.perf_counter() - start)


# --- built-in designs ---------------------------------------------------------


def _weibull_unit_mean(a: float) -> Weibull:
    return Weibull(a, weibull_unit_mean_scale(a))


def builtin_specs() -> list[ExperimentSpec]:
    """Designs behind the appendix tables, numbered in the order they appear.

    Tables 1-4 are the Weibull size/power designs, 5 the lognormal mixture,
    6-8 independent Singh-Maddala, 9-14 Gaussian-copula paired Singh-Maddala
    and 15-17 the first-order tests with ``theta = 50``. Extra designs cover
    the alternative Weibull shapes 1.25-2 and the alternative mixture
    component ``LN(0.4, 0.9)``.
    """
    exp = UnitExponential()
    specs = [
        ExperimentSpec(
            "table1", Weibull(1.0, 1.0), Weibull(1.0, 1.0), direction="forward",
            description="F = G = W(1,1); independent samples",
        ),
    ]
    for num, a in zip((2, 3, 4), (1.1, 1.2, 1.3)):
        specs.append(ExperimentSpec(
            f"table{num}", _weibull_unit_mean(a), Weibull(1.0, 1.0),
            description=f"F = W({a}, q_{a}), G = W(1,1); independent samples",
        ))
    mixture = LognormalMixture((0.9, 0.1), ((0.85, 0.4), (0.4, 0.4)))
    specs.append(ExperimentSpec(
        "table5", mixture, LognormalMixture.single(0.86, 0.6),
        description="F = 0.9 LN(0.85,0.4) + 0.1 LN(0.4,0.4), G = LN(0.86,0.6)",
    ))
    for num, q in zip((6, 7, 8), (1.8, 1.5, 1.2)):
        specs.append(ExperimentSpec(
            f"table{num}", SinghMaddala(1.5, q), SinghMaddala(1.0, q),
            description=f"F = SM(1.5,{q}), G = SM(1,{q}); independent samples",
        ))
    num = 9
    for q in (1.8, 1.2):
        for rho in (0.25, 0.5, 0.75):
            specs.append(ExperimentSpec(
                f"table{num}", SinghMaddala(1.5, q), SinghMaddala(1.0, q),
                scheme=Scheme.MATCHED_PAIRS, rho=rho,
                description=f"F = SM(1.5,{q}), G = SM(1,{q}); paired samples, rho = {rho}",
            ))
            num += 1
    for num, q in zip((15, 16, 17), (1.2, 1.5, 1.8)):
        specs.append(ExperimentSpec(
            f"table{num}", SinghMaddala(1.5, q), SinghMaddala(1.0, q),
            theta=FSD_THETA, stats=("tinf", "t1", "ksb3:1"),
            description=f"first-order test (theta = 50), F = SM(1.5,{q}), G = SM(1,{q})",
        ))
    for a in (1.25, 1.5, 1.75, 2.0):
        specs.append(ExperimentSpec(
            f"weibull_a{a:g}", _weibull_unit_mean(a), Weibull(1.0, 1.0),
            description=f"F = W({a:g}, q_{a:g}), G = W(1,1); independent samples",
        ))
    specs.append(ExperimentSpec(
        "table5_alt", LognormalMixture((0.9, 0.1), ((0.85, 0.4), (0.4, 0.9))),
        LognormalMixture.single(0.86, 0.6),
        description="F = 0.9 LN(0.85,0.4) + 0.1 LN(0.4,0.9), G = LN(0.86,0.6)",
    ))
    return specs


ALIASES = {"fsd_q1.2": "table15", "fsd_q1.5": "table16", "fsd_q1.8": "table17"}


def get_builtin(name: str) -> ExperimentSpec:
    name = ALIASES.get(name, name)
    for spec in builtin_specs():
        if spec.name == name:
            return spec
    raise KeyError(name)
