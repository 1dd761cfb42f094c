"""Command-line interface: ``lorenzpp test|simulate|curves``.

Results go to stdout, logs to stderr. Exit codes:

====  ==========================================
0     success (whatever the test decision)
2     bad command-line usage
3     input file cannot be read
4     non-numeric value in an input file
5     negative value in an input file
6     paired input with unequal lengths
7     unknown built-in simulation spec
8     invalid simulation config
9     numerical failure during computation
====  ==========================================
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bootstrap import FSD_THETA, Scheme, TestConfig, lpp_test
from .distributions import UnitExponential, Weibull, cdf, parse_dist, quantile, sample_iid
from .harness import ALIASES, ExperimentSpec, builtin_specs, get_builtin, run_experiment
from .ksb3 import Ksb3Config, ksb3_test
from .lorenz import Sample, generalized_lpp, pp_plot
from .special import analytic_lpp_weibull_exp
from .statistics import StatKind
from .streams import DEFAULT_SEED, stream

log = logging.getLogger("lorenzpp")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNREADABLE = 3
EXIT_NON_NUMERIC = 4
EXIT_NEGATIVE = 5
EXIT_PAIRED_LENGTH = 6
EXIT_UNKNOWN_SPEC = 7
EXIT_BAD_CONFIG = 8
EXIT_COMPUTATION = 9


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# --- input -------------------------------------------------------------------


def read_columns(path: str, ncols: int) -> list[np.ndarray]:
    """Read ``ncols`` comma-separated numeric columns; blank lines are skipped."""
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_UNREADABLE) from None
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != ncols:
            raise CliError(
                f"{path}:{lineno}: expected {ncols} column(s), found {len(fields)}", EXIT_NON_NUMERIC
            )
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise CliError(f"{path}:{lineno}: non-numeric value in {line.strip()!r}", EXIT_NON_NUMERIC) from None
        if not all(math.isfinite(v) for v in values):
            raise CliError(f"{path}:{lineno}: non-finite value in {line.strip()!r}", EXIT_NON_NUMERIC)
        if any(v < 0 for v in values):
            raise CliError(f"{path}:{lineno}: negative value in {line.strip()!r}", EXIT_NEGATIVE)
        rows.append(values)
    if not rows:
        raise CliError(f"{path}: no data", EXIT_NON_NUMERIC)
    arr = np.asarray(rows, dtype=float)
    return [arr[:, j] for j in range(ncols)]


def load_samples(x_path: str | None, y_path: str | None, paired: bool):
    if x_path is None:
        raise CliError("--x is required", EXIT_USAGE)
    if y_path is None:
        if not paired:
            raise CliError("--y is required unless --paired reads two columns from --x", EXIT_USAGE)
        x, y = read_columns(x_path, 2)
    else:
        (x,) = read_columns(x_path, 1)
        (y,) = read_columns(y_path, 1)
    if paired and x.size != y.size:
        raise CliError(
            f"--paired needs equal sample sizes, got {x.size} and {y.size}", EXIT_PAIRED_LENGTH
        )
    return Sample(x), Sample(y)


# --- commands ----------------------------------------------------------------


def _theta(args) -> float | None:
    if args.fsd:
        if args.theta is not None:
            raise CliError("use either --fsd or --theta", EXIT_USAGE)
        return FSD_THETA
    return args.theta


def cmd_test(args) -> int:
    x, y = load_samples(args.x, args.y, args.paired)
    scheme = Scheme.MATCHED_PAIRS if args.paired else Scheme.INDEPENDENT
    try:
        if args.stat == "ksb3":
            cfg = Ksb3Config(
                order=args.order, alpha=args.alpha, replicates=args.boot, scheme=scheme, seed=args.seed
            )
            outcome = ksb3_test(x, y, cfg)
        else:
            cfg = TestConfig(
                stat=StatKind.parse(args.stat), alpha=args.alpha, replicates=args.boot,
                eps=args.eps, theta=_theta(args), scheme=scheme, seed=args.seed,
            )
            if cfg.theta == 1.0:
                cfg = replace(cfg, theta=None)
            outcome = lpp_test(x, y, cfg)
    except FloatingPointError as exc:
        raise CliError(str(exc), EXIT_COMPUTATION) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    print(outcome.to_json())
    return EXIT_OK


def _load_spec(args) -> list[ExperimentSpec]:
    if (args.spec is None) == (args.config is None):
        raise CliError("give exactly one of --spec or --config", EXIT_USAGE)
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise CliError(f"cannot read {args.config}: {exc}", EXIT_UNREADABLE) from None
        except json.JSONDecodeError as exc:
            raise CliError(f"{args.config} is not valid JSON: {exc}", EXIT_BAD_CONFIG) from None
        try:
            return [ExperimentSpec.from_dict(data)]
        except (ValueError, TypeError) as exc:
            raise CliError(f"invalid config {args.config}: {exc}", EXIT_BAD_CONFIG) from None
    if args.spec == "all":
        return builtin_specs()
    try:
        return [get_builtin(args.spec)]
    except KeyError:
        names = [s.name for s in builtin_specs()] + sorted(ALIASES)
        raise CliError(f"unknown spec {args.spec!r}; choose from {', '.join(names)} or all", EXIT_UNKNOWN_SPEC) from None


def cmd_simulate(args) -> int:
    specs = _load_spec(args)
    if args.paper_scale:
        if args.runs is not None or args.boot is not None or args.n is not None:
            raise CliError("--paper-scale cannot be combined with --runs, --boot or --n", EXIT_USAGE)
        log.info("paper scale: 500 runs x 500 replicates; expect several hours per table on one core")
    else:
        try:
            n_list = None if args.n is None else [int(v) for v in args.n.split(",")]
            specs = [s.scaled(mc_runs=args.runs, replicates=args.boot, n_list=n_list) for s in specs]
        except ValueError as exc:
            raise CliError(str(exc), EXIT_BAD_CONFIG) from None
    if args.seed is not None:
        specs = [s.scaled(master_seed=args.seed) for s in specs]

    for spec in specs:
        log.info("running %s (%s): runs=%d K=%d n=%s", spec.name, spec.description, spec.mc_runs, spec.replicates, list(spec.n_list))
        table = run_experiment(spec, workers=args.workers)
        csv_path, _ = table.write(args.out)
        log.info("%s done in %.1fs -> %s", spec.name, table.runtime, csv_path)
        for n in spec.n_list:
            cells = " ".join(f"{c}={table.rows[n][c]:.3f}" for c in table.columns)
            print(f"{spec.name} n={n} {cells}")
    return EXIT_OK


def _parse_thetas(text: str) -> list[float]:
    try:
        thetas = [float(t) for t in text.split(",")]
    except ValueError:
        raise CliError(f"bad --theta list {text!r}", EXIT_USAGE) from None
    if not all(t > 0 and math.isfinite(t) for t in thetas):
        raise CliError("every theta must be positive", EXIT_USAGE)
    return thetas


def _is_weibull_vs_exp(f, g) -> bool:
    exp_like = isinstance(g, UnitExponential) or (isinstance(g, Weibull) and g.a == 1.0 and g.b == 1.0)
    return isinstance(f, Weibull) and exp_like


def cmd_curves(args) -> int:
    thetas = _parse_thetas(args.theta)
    if args.grid < 2:
        raise CliError("--grid must be at least 2", EXIT_USAGE)
    p = np.linspace(0.0, 1.0, args.grid)
    use_data = args.x is not None or args.y is not None
    if use_data and (args.dist_f or args.dist_g):
        raise CliError("give either --x/--y or --dist-f/--dist-g", EXIT_USAGE)

    if use_data:
        x, y = load_samples(args.x, args.y, args.paired)
        f = g = None
    else:
        if not (args.dist_f and args.dist_g):
            raise CliError("give --x/--y or both --dist-f and --dist-g", EXIT_USAGE)
        try:
            f, g = parse_dist(args.dist_f), parse_dist(args.dist_g)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_USAGE) from None
        x = y = None

    out = sys.stdout
    out.write("theta,p,lpp,identity,pp\n")
    for theta in thetas:
        if f is not None and theta == 1.0 and _is_weibull_vs_exp(f, g):
            lpp = analytic_lpp_weibull_exp(f.a, f.b, p)
        else:
            if f is not None:
                rng = stream(args.seed, 0)
                x, y = sample_iid(f, args.sample_size, rng), sample_iid(g, args.sample_size, rng)
            lpp = generalized_lpp(x, y, theta)(p)
        if f is not None:
            inner = p < 1.0
            pp = np.ones_like(p)
            pp[inner] = cdf(g, quantile(f, p[inner]))
        else:
            pp = pp_plot(x, y)(p)
        for row in zip(p, np.atleast_1d(lpp), p, pp):
            out.write(f"{theta:g}," + ",".join(repr(float(v)) for v in row) + "\n")
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorenzpp", description="Lorenz P-P plot dominance tests.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test H0: X dominates Y on two data files")
    t.add_argument("--x", help="CSV with one value per line (or two columns with --paired)")
    t.add_argument("--y", help="CSV with one value per line")
    t.add_argument("--stat", default="tinf", help="tinf, t1, tp:<p> or ksb3 (default tinf)")
    t.add_argument("--order", type=int, choices=(1, 2), default=2, help="KSB3 dominance order")
    t.add_argument("--theta", type=float, default=None, help="power transform x**theta")
    t.add_argument("--fsd", action="store_true", help="first-order test, same as --theta 50")
    t.add_argument("--paired", action="store_true", help="matched-pairs bootstrap")
    t.add_argument("--alpha", type=float, default=0.1)
    t.add_argument("--boot", type=int, default=500, help="bootstrap replicates K")
    t.add_argument("--eps", type=float, default=1e-4, help="shift added to every observation")
    t.add_argument("--seed", type=int, default=DEFAULT_SEED)
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="Monte Carlo rejection rates for a design")
    s.add_argument("--spec", help="built-in design name, or 'all'")
    s.add_argument("--config", help="JSON experiment config")
    s.add_argument("--runs", type=int, help="Monte Carlo runs per sample size")
    s.add_argument("--boot", type=int, help="bootstrap replicates per test")
    s.add_argument("--n", help="comma-separated sample sizes")
    s.add_argument("--out", default="results", help="output directory (default ./results)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--seed", type=int, default=None, help="override the design's master seed")
    s.add_argument("--paper-scale", action="store_true", help="500 runs x 500 replicates, all sizes")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("curves", help="emit LPP and P-P curve points as CSV")
    c.add_argument("--x")
    c.add_argument("--y")
    c.add_argument("--paired", action="store_true")
    c.add_argument("--dist-f", help="e.g. weibull:2,1.5, exp, sm:1.5,1.2, lognormal:0.86,0.6")
    c.add_argument("--dist-g")
    c.add_argument("--grid", type=int, default=101, help="number of evenly spaced p values")
    c.add_argument("--theta", default="1", help="comma-separated powers, e.g. 1,2,5,10")
    c.add_argument("--sample-size", type=int, default=10000, help="draws per distribution without an analytic curve")
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    c.set_defaults(func=cmd_curves)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    except FloatingPointError as exc:
        log.error("%s", exc)
        return EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
