"""Command-line driver.

Configuration files hold ``key = value`` lines (``#`` starts a comment);
keys mirror the field names of the library types. Command-line flags and
``--set key=value`` override file values.

Exit codes: 0 success, 1 validation did not pass, 2 configuration error,
3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .metrics import ClassMetrics
from .model import BufferConfig, ConfigError, GeneratorMode, TrafficParams
from .sim import EXACT_PAIRS, DEFAULT_SEED, Discipline, SimConfig, run_simulation, validate
from .solver import NumericalError
from .wgos import CostWeights, SweepResult, evaluate, sweep_threshold, wgos_gamma

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

METRIC_COLUMNS = ("L_rt", "L_nrt", "N_rt", "N_nrt", "D_rt", "D_nrt")
_ATTR = {"L_rt": "l_rt", "L_nrt": "l_nrt", "N_rt": "n_rt", "N_nrt": "n_nrt",
         "D_rt": "d_rt", "D_nrt": "d_nrt"}
SOLVE_HEADER = ("R", "N", *METRIC_COLUMNS, "gamma")
SWEEP_HEADER = ("mode", "R", "N", *METRIC_COLUMNS)

MODE_ALIASES = {"literal": GeneratorMode.PAPER_LITERAL, "strict": GeneratorMode.STRICT_PRIORITY}
VARY_TARGETS = ("lambda_rt", "lambda_nrt")

PAPER_COSTS = CostWeights(cl_rt=300, cl_nrt=50, cd_rt=1000, cd_nrt=1)
SCENARIO_1 = dict(lambda_nrt=6.0, mu_rt=20.0, mu_nrt=10.0)
SCENARIO_2 = dict(lambda_rt=12.0, mu_rt=20.0, mu_nrt=10.0)
PAPER_T = 20
PAPER_R = tuple(range(2, 17))


@dataclass(frozen=True)
class Figure:
    base: dict
    vary: str
    values: tuple[float, ...]
    wgos: bool = False


FIGURES = {
    **{f"fig{k}": Figure(SCENARIO_1, "lambda_rt", (2.0, 12.0, 18.0)) for k in (3, 4, 5, 6)},
    **{f"fig{k}": Figure(SCENARIO_2, "lambda_nrt", (2.0, 6.0, 9.0)) for k in (7, 8, 9, 10)},
    "fig11": Figure(SCENARIO_1, "lambda_rt", (12.0, 18.0), wgos=True),
    "fig12": Figure(SCENARIO_2, "lambda_nrt", (2.0, 6.0, 9.0), wgos=True),
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class ExperimentSpec:
    params: TrafficParams
    total_T: int
    r_values: list[int]
    vary: Optional[tuple[str, list[float]]] = None
    costs: Optional[CostWeights] = None
    mode: GeneratorMode = GeneratorMode.PAPER_LITERAL
    sim: dict = field(default_factory=dict)

    def curves(self) -> list[tuple[Optional[float], TrafficParams]]:
        if self.vary is None:
            return [(None, self.params)]
        name, values = self.vary
        base = {k: getattr(self.params, k) for k in ("lambda_rt", "lambda_nrt", "mu_rt", "mu_nrt")}
        return [(v, TrafficParams(**{**base, name: v})) for v in values]


# -- configuration ---------------------------------------------------------

def read_config(path: Path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliError(f"config file not found: {path}", EXIT_IO) from None
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}", EXIT_IO) from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CliError(f"{path}:{lineno}: expected 'key = value'", EXIT_CONFIG)
        values[key.strip()] = value.strip()
    return values


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.replace(" ", "").split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.replace(" ", "").split(",") if p]


_KNOWN_KEYS = {
    "lambda_rt", "lambda_nrt", "mu_rt", "mu_nrt", "r_threshold", "n_capacity", "total",
    "r_values", "vary", "cl_rt", "cl_nrt", "cd_rt", "cd_nrt", "mode", "discipline",
    "warmup", "horizon", "replications", "master_seed",
}


def build_spec(values: dict[str, str]) -> ExperimentSpec:
    unknown = set(values) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    try:
        rates = {k: float(values[k]) for k in ("lambda_rt", "lambda_nrt", "mu_rt", "mu_nrt")}
    except KeyError as exc:
        raise ConfigError(f"missing required key {exc.args[0]}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    params = TrafficParams(**rates)

    try:
        r = int(values["r_threshold"]) if "r_threshold" in values else None
        n = int(values["n_capacity"]) if "n_capacity" in values else None
        total = int(values["total"]) if "total" in values else None
        r_values = _int_list(values["r_values"]) if "r_values" in values else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if total is None:
        if r is None or n is None:
            raise ConfigError("give 'total', or both 'r_threshold' and 'n_capacity'")
        total = r + n
    elif n is not None and r is not None and r + n != total:
        raise ConfigError(f"total={total} differs from r_threshold + n_capacity = {r + n}")
    if r_values is None:
        r_values = [r] if r is not None else list(range(1, total))
    for rv in r_values:
        if not 1 <= rv <= total - 1:
            raise ConfigError(f"threshold R={rv} violates 1 <= R <= T-1 (T={total})")

    vary = None
    if "vary" in values:
        name, sep, rest = values["vary"].partition(":")
        name = name.strip()
        if not sep or name not in VARY_TARGETS:
            raise ConfigError("vary must look like 'lambda_rt: 2, 12, 18' or 'lambda_nrt: ...'")
        vary = (name, _float_list(rest))

    cost_keys = ("cl_rt", "cl_nrt", "cd_rt", "cd_nrt")
    present = [k for k in cost_keys if k in values]
    costs = None
    if present:
        if len(present) != 4:
            raise ConfigError(f"cost weights need all of {', '.join(cost_keys)}")
        costs = CostWeights(**{k: float(values[k]) for k in cost_keys})

    mode = parse_mode(values.get("mode", "literal"))
    sim = {}
    for key, conv in (("warmup", float), ("horizon", float), ("replications", int),
                      ("master_seed", int)):
        if key in values:
            sim[key] = conv(values[key])
    if "discipline" in values:
        sim["discipline"] = Discipline(values["discipline"])
    return ExperimentSpec(params, total, r_values, vary, costs, mode, sim)


def parse_mode(text: str) -> GeneratorMode:
    try:
        return MODE_ALIASES[text]
    except KeyError:
        raise ConfigError(f"mode must be one of {', '.join(MODE_ALIASES)}, got {text!r}") from None


def _collect(args) -> dict[str, str]:
    values = read_config(args.config) if args.config else {}
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"--set expects KEY=VALUE, got {item!r}", EXIT_CONFIG)
        values[key.strip()] = value.strip()
    for flag, key in (("mode", "mode"), ("discipline", "discipline"), ("seed", "master_seed"),
                      ("replications", "replications"), ("horizon", "horizon"),
                      ("warmup", "warmup")):
        value = getattr(args, flag, None)
        if value is not None:
            values[key] = str(value)
    return values


# -- output ------------------------------------------------------------------

def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def metric_cells(m: ClassMetrics) -> list[str]:
    return [fmt(getattr(m, _ATTR[c])) for c in METRIC_COLUMNS]


def sweep_rows(result: SweepResult) -> list[list[str]]:
    return [
        [result.mode.value, str(row.r), str(row.n), *metric_cells(row.metrics)]
        + ([fmt(row.gamma)] if row.gamma is not None else [])
        for row in result.rows
    ]


def render_csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


def _emit(args, name: str, text: str) -> None:
    if args.out:
        write_text(Path(args.out) / name, text)
    sys.stdout.write(text)


def _curve_name(prefix: str, vary: Optional[str], value: Optional[float]) -> str:
    return f"{prefix}.csv" if vary is None else f"{prefix}_{vary}={value:g}.csv"


# -- commands ----------------------------------------------------------------

def cmd_solve(args) -> int:
    spec = build_spec(_collect(args))
    if len(spec.r_values) != 1:
        raise ConfigError("solve needs a single threshold (set r_threshold)")
    config = BufferConfig.from_total(spec.r_values[0], spec.total_T)
    metrics = evaluate(spec.params, config, spec.mode)
    gamma = wgos_gamma(metrics, spec.params, spec.costs).gamma if spec.costs else None
    row = [str(config.r_threshold), str(config.n_capacity), *metric_cells(metrics), fmt(gamma)]
    _emit(args, "solve.csv", render_csv(SOLVE_HEADER, [row]))
    return EXIT_OK


def _run_sweeps(spec: ExperimentSpec, costs) -> list[tuple[Optional[float], SweepResult]]:
    return [
        (value, sweep_threshold(params, spec.total_T, spec.r_values, costs, spec.mode))
        for value, params in spec.curves()
    ]


def cmd_sweep(args) -> int:
    spec = build_spec(_collect(args))
    vary = spec.vary[0] if spec.vary else None
    header = SWEEP_HEADER + (("gamma",) if spec.costs else ())
    for value, result in _run_sweeps(spec, spec.costs):
        _emit(args, _curve_name("sweep", vary, value), render_csv(header, sweep_rows(result)))
    return EXIT_OK


def cmd_optimize(args) -> int:
    spec = build_spec(_collect(args))
    if spec.costs is None:
        raise ConfigError("optimize needs cost weights cl_rt, cl_nrt, cd_rt, cd_nrt")
    vary = spec.vary[0] if spec.vary else None
    summary = []
    for value, result in _run_sweeps(spec, spec.costs):
        _emit(args, _curve_name("optimize", vary, value),
              render_csv(SWEEP_HEADER + ("gamma",), sweep_rows(result)))
        best = min(result.rows, key=lambda row: row.gamma)
        summary.append([result.mode.value, vary or "", fmt(value), str(result.r_star),
                        fmt(best.gamma)])
    _emit(args, "optimum.csv", render_csv(("mode", "vary", "value", "r_star", "gamma"), summary))
    return EXIT_OK


def _sim_config(spec: ExperimentSpec, discipline: Discipline) -> SimConfig:
    if len(spec.r_values) != 1:
        raise ConfigError("simulation needs a single threshold (set r_threshold)")
    buffer = BufferConfig.from_total(spec.r_values[0], spec.total_T)
    extra = {k: v for k, v in spec.sim.items() if k != "discipline"}
    return SimConfig(spec.params, buffer, discipline, **extra)


def cmd_simulate(args) -> int:
    spec = build_spec(_collect(args))
    discipline = spec.sim.get("discipline", Discipline.NONPREEMPTIVE)
    sim = run_simulation(_sim_config(spec, discipline))
    rows = []
    for col in METRIC_COLUMNS:
        est = sim[_ATTR[col]]
        rows.append([discipline.value, col, fmt(est.mean), fmt(est.se), str(est.n)])
    _emit(args, "simulate.csv", render_csv(("discipline", "metric", "mean", "se", "n"), rows))
    return EXIT_OK


def cmd_validate(args) -> int:
    spec = build_spec(_collect(args))
    discipline = spec.sim.get("discipline", EXACT_PAIRS[spec.mode])
    config = _sim_config(spec, discipline)
    analytic = evaluate(spec.params, config.buffer, spec.mode)
    report = validate(analytic, run_simulation(config), spec.mode)

    header = ["mode", "discipline", "R", "N", *METRIC_COLUMNS]
    for prefix in ("sim_", "se_", "z_"):
        header += [prefix + c for c in METRIC_COLUMNS]
    header.append("comparison_only")
    checks = {c.name: c for c in report.metrics}
    row = [spec.mode.value, discipline.value, str(config.buffer.r_threshold),
           str(config.buffer.n_capacity)]
    for field_name in ("analytic", "simulated", "se", "z"):
        row += [fmt(getattr(checks[_ATTR[c]], field_name)) for c in METRIC_COLUMNS]
    row.append(str(report.comparison_only).lower())
    if args.out:
        write_text(Path(args.out) / "validate.csv", render_csv(header, [row]))

    tag = " (comparison only: no exact analytic counterpart)" if report.comparison_only else ""
    print(f"validate mode={spec.mode.value} discipline={discipline.value}{tag}")
    for c in report.metrics:
        z = "n/a" if c.z is None else f"{c.z:.3f}"
        if report.comparison_only:
            status = "within 3se" if c.passed else "gap"
        else:
            status = "PASS" if c.passed else "FAIL"
        print(f"  {c.name:6s} analytic={fmt(c.analytic):24s} sim={fmt(c.simulated):24s} "
              f"se={fmt(c.se):24s} z={z:8s} {status}")
    for c in report.little:
        rel = "n/a" if c.rel_error is None else f"{c.rel_error:.2e}"
        print(f"  little[{c.cls}] rel_error={rel} {'PASS' if c.passed else 'FAIL'}")
    if report.comparison_only:
        print("overall: comparison only")
        return EXIT_OK
    print("overall:", "PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_VALIDATION_FAILED


def reproduce_figure(fig_id: str) -> list[tuple[str, list[list[str]], bool]]:
    """CSV payloads for one figure: ``(filename, rows, has_gamma)`` per curve."""
    fig = FIGURES[fig_id]
    costs = PAPER_COSTS if fig.wgos else None
    out = []
    for value in fig.values:
        params = TrafficParams(**{**fig.base, fig.vary: value})
        rows = []
        for mode in GeneratorMode:
            rows += sweep_rows(sweep_threshold(params, PAPER_T, PAPER_R, costs, mode))
        out.append((_curve_name(fig_id, fig.vary, value), rows, fig.wgos))
    return out


def cmd_reproduce(args) -> int:
    if args.figure == "all":
        ids = sorted(FIGURES, key=lambda f: int(f[3:]))
    elif args.figure in FIGURES:
        ids = [args.figure]
    else:
        valid = ", ".join(sorted(FIGURES, key=lambda f: int(f[3:])))
        raise ConfigError(f"unknown figure id {args.figure!r}; valid ids: {valid}, all")
    out = Path(args.out or ".")
    for fig_id in ids:
        for name, rows, has_gamma in reproduce_figure(fig_id):
            header = SWEEP_HEADER + (("gamma",) if has_gamma else ())
            write_text(out / name, render_csv(header, rows))
            print(out / name)
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--mode", choices=sorted(MODE_ALIASES))
    common.add_argument("--out", type=Path, help="directory for CSV output")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--discipline", choices=[d.value for d in Discipline])
    sim.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
    sim.add_argument("--replications", type=int)
    sim.add_argument("--horizon", type=float)
    sim.add_argument("--warmup", type=float)

    parser = argparse.ArgumentParser(prog="bufferpartition", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="metrics for one threshold").set_defaults(
        func=cmd_solve)
    sub.add_parser("sweep", parents=[common], help="metrics over a threshold range").set_defaults(
        func=cmd_sweep)
    sub.add_parser("optimize", parents=[common], help="WGoS-optimal threshold").set_defaults(
        func=cmd_optimize)
    sub.add_parser("simulate", parents=[common, sim], help="discrete-event simulation").set_defaults(
        func=cmd_simulate)
    sub.add_parser("validate", parents=[common, sim],
                   help="analytic vs simulated agreement").set_defaults(func=cmd_validate)
    rep = sub.add_parser("reproduce", help="CSV data for the published experiment grids")
    rep.add_argument("figure", help="fig3 .. fig12, or 'all'")
    rep.add_argument("--out", type=Path, help="output directory (default: current directory)")
    rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
