"""Command-line front end: test execution, q selection, and simulation runs.

Numeric output is rendered with 17 significant digits so every value
round-trips, and seeded invocations are byte-reproducible.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import gemsim, ratio_test

__all__ = ["RunConfig", "parse_args", "read_sample", "read_paired_columns", "run", "main"]


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    mu0: float = 0.0
    q: Optional[float] = None  # None means adaptive selection
    bootstrap: int = 100
    equal_var: bool = True
    alpha: float = 0.05
    seed: Optional[int] = None
    fmt: str = "json"
    output: Optional[str] = None
    paired_columns: bool = False
    scenario: str = "all"
    tests: Optional[list[str]] = None
    eps_grid: list[float] = field(default_factory=lambda: list(gemsim.DEFAULT_EPS_GRID))
    reps: int = 500
    under_null: bool = False


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _q_arg(text: str):
    if text == "auto":
        return None
    try:
        q = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid q value {text!r}")
    if not 0.0 < q <= 1.0:
        raise argparse.ArgumentTypeError(f"q must satisfy 0 < q <= 1, got {text}")
    return q


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _alpha_arg(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return value


def _eps_arg(text: str) -> list[float]:
    values = [float(tok) for tok in text.split(",") if tok.strip()]
    if not values:
        raise argparse.ArgumentTypeError("empty contamination grid")
    for value in values:
        if not 0.0 <= value < 0.5:
            raise argparse.ArgumentTypeError("contamination levels must lie in [0, 0.5)")
    return values


def _add_common(sub, with_equal_var=False):
    sub.add_argument("--q", type=_q_arg, default=None,
                     help="distortion parameter in (0, 1], or 'auto' (default)")
    sub.add_argument("--bootstrap", type=_positive_int, default=100,
                     help="number of bootstrap resamples (default 100)")
    sub.add_argument("--seed", type=int, default=None, help="seed for reproducible resampling")
    sub.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    sub.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")
    if with_equal_var:
        sub.add_argument("--no-equal-var", dest="equal_var", action="store_false",
                         help="drop the shared-variance assumption")


def parse_args(argv) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="lqrt",
        description="Robust location tests with bootstrap p-values, plus a contamination study runner.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    one = subs.add_parser("onesample", help="test the mean of one sample")
    one.add_argument("data", help="input file, one value per line ('-' for stdin)")
    one.add_argument("--mu0", type=float, default=0.0, help="null-hypothesis mean (default 0)")
    _add_common(one)

    rel = subs.add_parser("paired", help="test equality of means of paired samples")
    rel.add_argument("data", nargs="+", help="two files, or one two-column file with --paired-columns")
    rel.add_argument("--paired-columns", action="store_true",
                     help="read both samples from one comma-separated file")
    _add_common(rel)

    ind = subs.add_parser("unpaired", help="test equality of means of independent samples")
    ind.add_argument("data", nargs=2, help="two input files")
    _add_common(ind, with_equal_var=True)

    sel = subs.add_parser("selectq", help="report the adaptive q grid search")
    sel.add_argument("data", nargs="+", help="one file (one-sample) or two files (two-sample)")
    _add_common(sel, with_equal_var=True)

    sim = subs.add_parser("simulate", help="run the contamination size/power study (CSV output)")
    sim.add_argument("--scenario", default="all", choices=gemsim.SETUPS + ("all",))
    sim.add_argument("--tests", default=None,
                     help="comma-separated test identifiers (default: all for the scenario)")
    sim.add_argument("--eps", type=_eps_arg, default=list(gemsim.DEFAULT_EPS_GRID),
                     help="comma-separated contamination levels in [0, 0.5)")
    sim.add_argument("--reps", type=_positive_int, default=500)
    sim.add_argument("--bootstrap", type=_positive_int, default=200)
    sim.add_argument("--alpha", type=_alpha_arg, default=0.05)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--size", action="store_true", dest="under_null",
                     help="generate under the null means (size) instead of the alternative (power)")
    sim.add_argument("-o", "--output", default=None)

    ns = parser.parse_args(argv)
    cfg = RunConfig(subcommand=ns.subcommand)
    if ns.subcommand == "simulate":
        cfg.scenario = ns.scenario
        cfg.tests = [t.strip() for t in ns.tests.split(",")] if ns.tests else None
        cfg.eps_grid = list(ns.eps)
        cfg.reps = ns.reps
        cfg.bootstrap = ns.bootstrap
        cfg.alpha = ns.alpha
        cfg.seed = ns.seed
        cfg.under_null = ns.under_null
        cfg.fmt = "csv"
        cfg.output = ns.output
        return cfg

    cfg.inputs = [ns.data] if isinstance(ns.data, str) else list(ns.data)
    cfg.q = ns.q
    cfg.bootstrap = ns.bootstrap
    cfg.seed = ns.seed
    cfg.fmt = ns.fmt
    cfg.output = ns.output
    if ns.subcommand == "onesample":
        cfg.mu0 = ns.mu0
    if ns.subcommand == "paired":
        cfg.paired_columns = ns.paired_columns
        if cfg.paired_columns and len(cfg.inputs) != 1:
            parser.error("--paired-columns takes exactly one input file")
        if not cfg.paired_columns and len(cfg.inputs) != 2:
            parser.error("paired needs two input files (or one with --paired-columns)")
    if ns.subcommand in ("unpaired", "selectq"):
        cfg.equal_var = getattr(ns, "equal_var", True)
    if ns.subcommand == "selectq" and len(cfg.inputs) not in (1, 2):
        parser.error("selectq takes one or two input files")
    return cfg


def _lines_from(path: str) -> list[str]:
    if path == "-":
        return sys.stdin.read().splitlines()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read().splitlines()


def _parse_column(lines, path: str, ncols: int):
    columns = [[] for _ in range(ncols)]
    header_allowed = True
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        fields = [f.strip() for f in stripped.split(",")] if ncols > 1 else [stripped]
        try:
            if len(fields) != ncols:
                raise ValueError
            values = [float(f) for f in fields]
        except ValueError:
            if header_allowed:
                header_allowed = False
                continue
            raise ValueError(f"{path}: could not parse line {lineno}: {raw!r}")
        header_allowed = False
        for col, value in zip(columns, values):
            col.append(value)
    if not columns[0]:
        raise ValueError(f"{path}: no numeric data found")
    return [np.array(col) for col in columns]


def read_sample(path: str) -> np.ndarray:
    """One value per line; a single leading non-numeric header line is skipped."""
    (col,) = _parse_column(_lines_from(path), path, 1)
    return col


def read_paired_columns(path: str):
    """Two comma-separated columns per line, optional header line."""
    return tuple(_parse_column(_lines_from(path), path, 2))


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)


def _test_report(outcome: ratio_test.TestOutcome, seed, fmt: str) -> str:
    seed_txt = "null" if seed is None else str(int(seed))
    if fmt == "json":
        return (
            "{"
            f'"statistic": {_fmt(outcome.statistic)}, '
            f'"pvalue": {_fmt(outcome.pvalue)}, '
            f'"q": {_fmt(outcome.q)}, '
            f'"bootstrap": {outcome.bootstrap}, '
            f'"degenerate_fraction": {_fmt(outcome.degenerate_fraction)}, '
            f'"seed": {seed_txt}'
            "}\n"
        )
    seed_csv = "" if seed is None else str(int(seed))
    return (
        "statistic,pvalue,q,bootstrap,degenerate_fraction,seed\n"
        f"{_fmt(outcome.statistic)},{_fmt(outcome.pvalue)},{_fmt(outcome.q)},"
        f"{outcome.bootstrap},{_fmt(outcome.degenerate_fraction)},{seed_csv}\n"
    )


def _selectq_report(report: ratio_test.QSelectionReport, fmt: str) -> str:
    if fmt == "json":
        grid = ", ".join(f"[{_fmt(q)}, {_fmt(v)}]" for q, v in report.grid)
        return (
            "{"
            f'"q": {_fmt(report.q_hat)}, '
            f'"objective": {_fmt(report.objective)}, '
            f'"grid": [{grid}]'
            "}\n"
        )
    rows = "".join(f"{_fmt(q)},{_fmt(v)}\n" for q, v in report.grid)
    return "q,objective\n" + rows


def _simulate_report(cfg: RunConfig) -> str:
    scenarios = gemsim.builtin_scenarios()
    if cfg.scenario != "all":
        scenarios = [s for s in scenarios if s.setup == cfg.scenario]
    seed = cfg.seed if cfg.seed is not None else int(np.random.SeedSequence().entropy)
    lines = ["scenario,test,epsilon,rate,ci_low,ci_high,reps,alpha,seed"]
    for scenario in scenarios:
        tests = cfg.tests if cfg.tests is not None else list(gemsim.TESTS_BY_SETUP[scenario.setup])
        for test in tests:
            estimates = gemsim.run_scenario(
                scenario,
                test,
                eps_grid=cfg.eps_grid,
                reps=cfg.reps,
                alpha=cfg.alpha,
                bootstrap=cfg.bootstrap,
                seed=seed,
                under_null=cfg.under_null,
            )
            for est in estimates:
                lines.append(
                    f"{scenario.setup},{test},{_fmt(est.epsilon)},{_fmt(est.rejection_rate)},"
                    f"{_fmt(est.ci_low)},{_fmt(est.ci_high)},{est.repetitions},"
                    f"{_fmt(est.alpha)},{est.seed}"
                )
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> int:
    """Execute one parsed invocation; returns the process exit status."""
    try:
        if cfg.subcommand == "onesample":
            x = read_sample(cfg.inputs[0])
            outcome = ratio_test.lqrtest_1samp(x, cfg.mu0, q=cfg.q, bootstrap=cfg.bootstrap, seed=cfg.seed)
            _emit(_test_report(outcome, cfg.seed, cfg.fmt), cfg.output)
        elif cfg.subcommand == "paired":
            if cfg.paired_columns:
                x1, x2 = read_paired_columns(cfg.inputs[0])
            else:
                x1, x2 = read_sample(cfg.inputs[0]), read_sample(cfg.inputs[1])
            outcome = ratio_test.lqrtest_rel(x1, x2, q=cfg.q, bootstrap=cfg.bootstrap, seed=cfg.seed)
            _emit(_test_report(outcome, cfg.seed, cfg.fmt), cfg.output)
        elif cfg.subcommand == "unpaired":
            x1, x2 = read_sample(cfg.inputs[0]), read_sample(cfg.inputs[1])
            outcome = ratio_test.lqrtest_ind(
                x1, x2, equal_var=cfg.equal_var, q=cfg.q, bootstrap=cfg.bootstrap, seed=cfg.seed
            )
            _emit(_test_report(outcome, cfg.seed, cfg.fmt), cfg.output)
        elif cfg.subcommand == "selectq":
            if len(cfg.inputs) == 1:
                report = ratio_test.select_q_1samp(read_sample(cfg.inputs[0]))
            else:
                report = ratio_test.select_q_ind(
                    read_sample(cfg.inputs[0]), read_sample(cfg.inputs[1]), cfg.equal_var
                )
            _emit(_selectq_report(report, cfg.fmt), cfg.output)
        elif cfg.subcommand == "simulate":
            _emit(_simulate_report(cfg), cfg.output)
        else:  # pragma: no cover - argparse enforces the choices
            raise ValueError(f"unknown subcommand {cfg.subcommand!r}")
    except (ValueError, OSError) as exc:
        print(f"lqrt: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
