"""Command-line front end: scenario configuration, sweeps and CSV output.

Configuration files are flat ``key = value`` text; ``#`` starts a comment,
blank lines are ignored and unknown or repeated keys are errors.  Keys are
case sensitive (``lambda`` configures the dephasing channel memory rate,
``Lambda`` the collective emission rate).  Command-line flags mirror the
config keys and take precedence over file values, which take precedence
over the documented defaults.

All results go to stdout (or ``--out``); diagnostics go to stderr.  Every
error path exits nonzero after printing a single line of the form
``error[<Kind>]: <message>``.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from .channels import CollectiveParams, OunParams
from .errors import BadParams, ParseError, QslError, ValidationError
from .qsl import SWEEPABLE, ScenarioRun, SweepRow, run_scenario, sweep_scenario

MODELS = ("oun", "collective")
INITIALS = ("bell-psi-plus", "g1e2")
MEASURES = ("entanglement", "discord")

DEFAULTS = {
    "model": "oun",
    "initial": "bell-psi-plus",
    "measure": "entanglement",
    "kappa": 1.0,
    "lambda": 0.1,
    "lambda_ratio": None,
    "Lambda": 1.0,
    "Lambda12": 0.95,
    "M12": 4.65,
    "omega": 0.0,
    "tau": 1.0,
    "steps": 2000,
    "sweep_param": None,
    "sweep_from": None,
    "sweep_to": None,
    "sweep_count": None,
}

_STRING_KEYS = ("model", "initial", "measure", "sweep_param")
_INT_KEYS = ("steps", "sweep_count")

TRAJECTORY_COLUMNS = (
    "t",
    "concurrence",
    "E_bures",
    "D_bures",
    "F_P",
    "K_op",
    "K_tr",
    "K_hs",
    "tau_op",
    "tau_tr",
    "tau_hs",
    "tau_unified",
)
SWEEP_COLUMNS = ("sweep_value", "delta_Q", "tau_unified", "tau_op", "tau_tr", "tau_hs")


@dataclass(frozen=True)
class SweepSpec:
    param: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario description with defaults filled in."""

    model: str
    initial: str
    measure: str
    kappa: float
    lam: float
    lambda_ratio: float | None
    Lambda: float
    Lambda12: float
    M12: float
    omega: float
    tau: float
    steps: int
    sweep: SweepSpec | None

    def params(self) -> OunParams | CollectiveParams:
        if self.model == "oun":
            lam = self.lambda_ratio * self.kappa if self.lambda_ratio else self.lam
            return OunParams(kappa=self.kappa, lam=lam)
        return CollectiveParams(
            Lambda=self.Lambda,
            Lambda12=self.Lambda12,
            M12=self.M12,
            omega=self.omega,
        )


def _parse_pairs(text: str) -> dict:
    """Parse ``key = value`` lines into a typed dict."""
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParseError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in DEFAULTS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ParseError(f"line {lineno}: empty value for {key!r}")
        if key in _STRING_KEYS:
            raw[key] = value
        elif key in _INT_KEYS:
            try:
                raw[key] = int(value)
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {key} needs an integer") from exc
        else:
            try:
                raw[key] = float(value)
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {key} needs a number") from exc
    return raw


def build_config(raw: dict) -> ScenarioConfig:
    """Fill defaults and validate a raw key-value mapping."""
    merged = dict(DEFAULTS)
    merged.update({k: v for k, v in raw.items() if v is not None})

    model = merged["model"]
    if model not in MODELS:
        raise ValidationError(f"model must be one of {MODELS}, got {model!r}")
    initial = merged["initial"]
    if initial not in INITIALS:
        raise ValidationError(f"initial must be one of {INITIALS}, got {initial!r}")
    measure = merged["measure"]
    if measure not in MEASURES:
        raise ValidationError(f"measure must be one of {MEASURES}, got {measure!r}")
    if model == "collective" and measure == "discord":
        raise ValidationError(
            "UnsupportedScenario: the discord measure needs Bell-diagonal "
            "trajectories and is not available for model 'collective'"
        )

    for key in ("kappa", "lambda", "Lambda", "tau"):
        if not (math.isfinite(merged[key]) and merged[key] > 0):
            raise ValidationError(f"{key} must be positive and finite")
    if merged["lambda_ratio"] is not None and not merged["lambda_ratio"] > 0:
        raise ValidationError("lambda_ratio must be positive")
    if abs(merged["Lambda12"]) > merged["Lambda"]:
        raise ValidationError("|Lambda12| must not exceed Lambda")
    if merged["omega"] < 0:
        raise ValidationError("omega must be nonnegative")
    steps = merged["steps"]
    if steps < 10 or steps % 2 != 0:
        raise ValidationError("steps must be an even integer >= 10")

    sweep_keys = ("sweep_param", "sweep_from", "sweep_to", "sweep_count")
    given = [k for k in sweep_keys if merged[k] is not None]
    sweep = None
    if given:
        missing = [k for k in sweep_keys if merged[k] is None]
        if missing:
            raise ValidationError(f"incomplete sweep: missing {', '.join(missing)}")
        param = merged["sweep_param"]
        if param not in SWEEPABLE[model]:
            raise ValidationError(
                f"sweep parameter must be one of {SWEEPABLE[model]} for "
                f"model {model!r}, got {param!r}"
            )
        if not (math.isfinite(merged["sweep_from"]) and math.isfinite(merged["sweep_to"])):
            raise ValidationError("sweep bounds must be finite")
        if merged["sweep_count"] < 2:
            raise ValidationError("sweep_count must be at least 2")
        sweep = SweepSpec(
            param=param,
            start=float(merged["sweep_from"]),
            stop=float(merged["sweep_to"]),
            count=int(merged["sweep_count"]),
        )

    return ScenarioConfig(
        model=model,
        initial=initial,
        measure=measure,
        kappa=float(merged["kappa"]),
        lam=float(merged["lambda"]),
        lambda_ratio=(
            None if merged["lambda_ratio"] is None else float(merged["lambda_ratio"])
        ),
        Lambda=float(merged["Lambda"]),
        Lambda12=float(merged["Lambda12"]),
        M12=float(merged["M12"]),
        omega=float(merged["omega"]),
        tau=float(merged["tau"]),
        steps=int(steps),
        sweep=sweep,
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a configuration document."""
    return build_config(_parse_pairs(text))


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    """Render a float with 12 significant digits; empty string for NaN."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    value = float(value)
    if value == 0.0:
        value = 0.0  # normalize -0.0
    return f"{value:.12g}"


def emit_trajectory_csv(run: ScenarioRun) -> str:
    """Per-node CSV of measures, norm averages and speed-limit times."""
    samples = run.trajectory.samples
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for idx, result in enumerate(run.results):
        d_b = float(samples.d_bures[idx])
        row = (
            run.trajectory.times[idx],
            samples.concurrence[idx],
            samples.e_bures[idx],
            d_b,
            samples.f_p[idx],
            result.k_op,
            result.k_tr,
            result.k_hs,
            result.tau_op,
            result.tau_tr,
            result.tau_hs,
            result.tau_unified,
        )
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_sweep_csv(rows: list[SweepRow]) -> str:
    """CSV of end-time speed limits across a parameter sweep."""
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    row.value,
                    row.delta_q,
                    row.tau_unified,
                    row.tau_op,
                    row.tau_tr,
                    row.tau_hs,
                )
            )
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing and subcommands
# ---------------------------------------------------------------------------


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="configuration file (key = value lines)")
    parser.add_argument("--model", choices=MODELS)
    parser.add_argument("--initial", choices=INITIALS)
    parser.add_argument("--measure", choices=MEASURES)
    parser.add_argument("--kappa", type=float)
    parser.add_argument("--lambda", dest="lam", type=float)
    parser.add_argument(
        "--lambda-ratio",
        dest="lambda_ratio",
        type=float,
        help="tie lambda = ratio * kappa (used by kappa sweeps)",
    )
    parser.add_argument("--Lambda", dest="Lambda", type=float)
    parser.add_argument("--Lambda12", dest="Lambda12", type=float)
    parser.add_argument("--M12", dest="M12", type=float)
    parser.add_argument("--omega", type=float)
    parser.add_argument("--tau", type=float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--out", help="write output here instead of stdout")


def _add_sweep_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--param", dest="sweep_param")
    parser.add_argument("--from", dest="sweep_from", type=float)
    parser.add_argument("--to", dest="sweep_to", type=float)
    parser.add_argument("--count", dest="sweep_count", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qslcorr",
        description=(
            "Simulate two-qubit decoherence and the speed limit times for "
            "the creation and decay of Bures correlation measures."
        ),
        allow_abbrev=False,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario, emit a trajectory CSV")
    _add_scenario_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter, emit a sweep CSV")
    _add_scenario_flags(p_sweep)
    _add_sweep_flags(p_sweep)
    p_sweep.add_argument("--jobs", type=int, help="evaluate sweep points in parallel")

    p_report = sub.add_parser(
        "report", help="run a scenario and render figures next to the CSV data"
    )
    _add_scenario_flags(p_report)
    _add_sweep_flags(p_report)
    p_report.add_argument("--jobs", type=int)
    p_report.add_argument("--outdir", default="report", help="output directory")

    sub.add_parser("selftest", help="run the built-in golden and property checks")
    return parser


def _config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    raw: dict = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ParseError(f"cannot read config file: {exc}") from exc
        raw.update(_parse_pairs(text))
    flag_keys = {
        "model": "model",
        "initial": "initial",
        "measure": "measure",
        "kappa": "kappa",
        "lam": "lambda",
        "lambda_ratio": "lambda_ratio",
        "Lambda": "Lambda",
        "Lambda12": "Lambda12",
        "M12": "M12",
        "omega": "omega",
        "tau": "tau",
        "steps": "steps",
        "sweep_param": "sweep_param",
        "sweep_from": "sweep_from",
        "sweep_to": "sweep_to",
        "sweep_count": "sweep_count",
    }
    for attr, key in flag_keys.items():
        value = getattr(args, attr, None)
        if value is not None:
            raw[key] = value
    return build_config(raw)


def _write_output(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    run = run_scenario(
        config.model,
        config.initial,
        config.params(),
        config.tau,
        config.steps,
        config.measure,
    )
    _write_output(emit_trajectory_csv(run), args.out)
    return 0


def _sweep_rows(config: ScenarioConfig, jobs: int | None) -> list[SweepRow]:
    if config.sweep is None:
        raise ValidationError("sweep needs --param/--from/--to/--count or config keys")
    return sweep_scenario(
        config.model,
        config.initial,
        config.params(),
        config.tau,
        config.steps,
        config.measure,
        config.sweep.param,
        config.sweep.values(),
        lambda_ratio=config.lambda_ratio,
        jobs=jobs,
    )


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    rows = _sweep_rows(config, args.jobs)
    _write_output(emit_sweep_csv(rows), args.out)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    from .report import render_report

    config = _config_from_args(args)
    run = run_scenario(
        config.model,
        config.initial,
        config.params(),
        config.tau,
        config.steps,
        config.measure,
    )
    rows = _sweep_rows(config, args.jobs) if config.sweep else None
    paths = render_report(
        run,
        args.outdir,
        sweep_rows=rows,
        sweep_param=config.sweep.param if config.sweep else None,
    )
    sys.stdout.write("\n".join(str(p) for p in paths) + "\n")
    return 0


def _cmd_selftest(_args: argparse.Namespace) -> int:
    from .selftest import run_selftest

    return run_selftest()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "report": _cmd_report,
        "selftest": _cmd_selftest,
    }
    try:
        return handlers[args.command](args)
    except (ParseError, ValidationError, BadParams) as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    except QslError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
