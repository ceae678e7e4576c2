"""
Command-line frontend.

    ar-bridge simulate   --ar "c1,c2" | --ma1 THETA | --spec FILE  --n N --seed S
    ar-bridge select     --data FILE [--criteria LIST] [--lmax auto|INT] [--mn auto|REAL]
    ar-bridge curves     --n N [--lmax INT] [--c REAL] [--shifted]
    ar-bridge thresholds --n N [--lmax INT] [--p REAL]
    ar-bridge mc         --config FILE --out FILE [--threads INT]
    ar-bridge preq       --data FILE --n0 INT [--mode expanding|sliding] [--avg-window INT]
    ar-bridge preprocess --data FILE (--demean | --deseason PERIOD)

Exit status is 0 on success, 1 on usage or config errors and 2 on data or
domain errors. Errors are printed to stderr as one JSON line
{"code", "message", "context"}.
"""

import argparse
import json
import logging
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from ar_bridge.core.config import Settings
from ar_bridge.core.errors import ArBridgeError, ConfigError, DomainError, UsageError
from ar_bridge.models import Filter, RngStream
from ar_bridge.schemas.prequential import PrequentialConfig, WindowMode
from ar_bridge.schemas.process import ProcessSpec
from ar_bridge.schemas.selection import Criterion
from ar_bridge.services import criteria as crit
from ar_bridge.services import experiments, prequential
from ar_bridge.services.fit import fit
from ar_bridge.services.numerics import floor_power
from ar_bridge.services.process import simulate
from ar_bridge.utils.io import atomic_write, read_series, series_to_csv

logger = logging.getLogger(__name__)

NATIVE_SIGN = "native"
CONVENTIONAL_SIGN = "conventional"
SIGN_LABELS = {
    NATIVE_SIGN: "x_n + sum psi_l x_(n-l) = eps_n",
    CONVENTIONAL_SIGN: "x_n = sum phi_l x_(n-l) + eps_n",
}


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised as UsageError instead of exiting with status 2."""

    def error(self, message: str):
        raise UsageError(message, prog=self.prog)


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise UsageError(f"cannot parse coefficient list {text!r}")


def parse_criteria(text: str) -> List[Criterion]:
    try:
        return [Criterion(item.strip()) for item in text.split(",") if item.strip()]
    except ValueError:
        choices = ", ".join(c.value for c in Criterion)
        raise UsageError(f"unknown criterion in {text!r}; choose from {choices}")


def emit(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _coeffs_out(filter: Filter, sign: str) -> List[float]:
    return (filter.conventional if sign == CONVENTIONAL_SIGN else filter.coeffs).tolist()


# ---------------------------------------------------------------------------
# simulate

def load_process_spec(path: str) -> ProcessSpec:
    path = Path(path)
    try:
        text = path.read_text()
        document = tomllib.loads(text) if path.suffix == ".toml" else json.loads(text)
        return ProcessSpec.model_validate(document)
    except (OSError, tomllib.TOMLDecodeError, json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"cannot load process spec {path}: {e}", path=str(path))


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    sources = [args.spec is not None, args.ar is not None, args.ma1 is not None]
    if sum(sources) != 1:
        raise UsageError("give exactly one of --spec, --ar, --ma1")
    if args.spec is not None:
        truth = load_process_spec(args.spec)
    elif args.ar is not None:
        coeffs = parse_float_list(args.ar)
        if args.sign == CONVENTIONAL_SIGN:
            coeffs = Filter.from_conventional(coeffs).coeffs.tolist()
        truth = ProcessSpec.finite_ar(coeffs, args.sigma2)
    else:
        truth = ProcessSpec.ma1(args.ma1, args.sigma2)

    seed = settings.SEED if settings.SEED is not None else args.seed
    data = simulate(truth, args.n, RngStream(seed), burnin=args.burnin)
    sys.stderr.write(json.dumps({"process": truth.model_dump(mode="json"), "seed": seed,
                                 "convention": SIGN_LABELS[NATIVE_SIGN]}) + "\n")
    emit(series_to_csv(data), args.out)
    return 0


# ---------------------------------------------------------------------------
# select

def parse_auto(text: str, kind: type, flag: str):
    if text == crit.AUTO:
        return crit.AUTO
    try:
        return kind(text)
    except ValueError:
        raise UsageError(f"{flag} must be 'auto' or a {kind.__name__}, got {text!r}")


def cmd_select(args: argparse.Namespace, settings: Settings) -> int:
    lmax = parse_auto(args.lmax, int, "--lmax")
    mn = parse_auto(args.mn, float, "--mn")
    data = read_series(args.data, args.col)
    params = crit.params_for_series(data.size, lmax, mn, args.zeta)
    table = fit(data, params.L_max)
    result = crit.select_orders(table, params, parse_criteria(args.criteria))

    if args.json:
        document = result.model_dump(mode="json")
        document["filters"] = {
            criterion.value: _coeffs_out(table.filters[order], args.sign)
            for criterion, order in result.chosen.items()
        }
        document["convention"] = SIGN_LABELS[args.sign]
        print(json.dumps(document))
        return 0

    print(f"N = {result.N}, L_max = {params.L_max}, M_N = {params.M_N:.4f}")
    for criterion, order in result.chosen.items():
        coeffs = _coeffs_out(table.filters[order], args.sign)
        print(f"{criterion.value:>14}: L = {order}  coeffs = {[round(c, 6) for c in coeffs]}")
    print(f"{'PI':>14}: {result.pi:.4f}")
    print(f"coefficient convention: {SIGN_LABELS[args.sign]}")
    return 0


# ---------------------------------------------------------------------------
# curves

def cmd_curves(args: argparse.Namespace, settings: Settings) -> int:
    L_max = args.lmax if args.lmax is not None else floor_power(args.n, settings.LMAX_EXPONENT)
    c = args.c if args.c is not None else settings.HQ_C
    curves = crit.penalty_curves(args.n, L_max, c, shifted=args.shifted)
    if args.json:
        document = {
            "N": args.n, "L_max": L_max, "c": c,
            "curves": curves.to_dict(orient="records"),
            "tangent_points": dict(zip(("aic", "hq", "bic"), crit.tangent_points(args.n, L_max, c))),
            "discrete_tangent_points": dict(zip(("aic", "hq", "bic"), crit.discrete_tangent_points(args.n, L_max, c))),
        }
        emit(json.dumps(document) + "\n", args.out)
    else:
        emit(curves.to_csv(index=False, lineterminator="\n"), args.out)
    return 0


# ---------------------------------------------------------------------------
# thresholds

def cmd_thresholds(args: argparse.Namespace, settings: Settings) -> int:
    L_max = args.lmax if args.lmax is not None else floor_power(args.n, settings.LMAX_EXPONENT)
    table = crit.threshold_table(args.n, L_max, args.p)
    if args.json:
        print(json.dumps(table))
        return 0
    print(f"N = {table['N']}, L_max = {table['L_max']}")
    print(f"BIC significance level q  = {table['bic_significance_level']:.4f}")
    print(f"AIC significance level    = {table['aic_significance_level']:.4f}")
    print(f"BC calibration level p    = {table['bc_calibration_level']:.6f}")
    print(f"{'L':>4} {'h_L exact':>14} {'h_L approx':>14}")
    for row in table["thresholds"]:
        print(f"{row['L']:>4} {row['exact']:>14.6e} {row['approximate']:>14.6e}")
    return 0


# ---------------------------------------------------------------------------
# mc

def cmd_mc(args: argparse.Namespace, settings: Settings) -> int:
    config = experiments.load_config(args.config)
    if settings.SEED is not None:
        config = config.model_copy(update={"master_seed": settings.SEED})
    threads = args.threads if args.threads is not None else settings.THREADS
    if threads < 1:
        raise UsageError(f"--threads must be at least 1, got {threads}")

    report = experiments.run_study(config, threads)
    csv_text = experiments.report_to_csv(report)
    if args.out:
        out = Path(args.out)
        json_out = out.with_suffix(".json")
        json_text = experiments.report_to_json(report) + "\n"
        atomic_write(json_out, json_text)
        try:
            atomic_write(out, csv_text)
        except OSError:
            json_out.unlink(missing_ok=True)
            raise
        logger.info(f"wrote {out} and {json_out}")
    elif args.json:
        print(experiments.report_to_json(report))
    else:
        sys.stdout.write(csv_text)
    return 0


# ---------------------------------------------------------------------------
# preq / preprocess

def cmd_preq(args: argparse.Namespace, settings: Settings) -> int:
    data = read_series(args.data, args.col)
    try:
        config = PrequentialConfig(
            n0=args.n0, mode=args.mode, window=args.window,
            avg_window=args.avg_window, criteria=parse_criteria(args.criteria),
        )
    except ValidationError as e:
        raise UsageError(f"invalid prequential options: {e}")
    if config.n0 >= data.size:
        raise DomainError(f"n0={config.n0} must be smaller than the series length {data.size}",
                          n0=config.n0, length=data.size)

    series = prequential.run_prequential(data, config)
    frame = series.to_frame()
    if args.json:
        emit(frame.to_json(orient="records") + "\n", args.out)
    else:
        emit(frame.to_csv(index=False, lineterminator="\n"), args.out)
    return 0


def cmd_preprocess(args: argparse.Namespace, settings: Settings) -> int:
    if args.demean == (args.deseason is not None):
        raise UsageError("give exactly one of --demean, --deseason")
    data = read_series(args.data, args.col)
    values = prequential.demean(data) if args.demean else prequential.deseasonalize(data, args.deseason)
    if args.json:
        emit(json.dumps(values.tolist()) + "\n", args.out)
    else:
        emit(series_to_csv(values), args.out)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="ar-bridge", description="Autoregressive order selection with the bridge criterion")
    parser.add_argument("--log-level", default=None, help="Logging level (default from AR_BRIDGE_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    def common(p: argparse.ArgumentParser, data: bool = False, out: bool = True):
        p.add_argument("--json", action="store_true", help="Machine-readable output")
        if data:
            p.add_argument("--data", required=True, help="CSV file with the series")
            p.add_argument("--col", default=None, help="Column name or 0-based index")
        if out:
            p.add_argument("--out", default=None, help="Output file (default stdout)")

    p = sub.add_parser("simulate", help="Simulate a process")
    common(p)
    p.add_argument("--spec", default=None, help="ProcessSpec file (JSON or TOML)")
    p.add_argument("--ar", default=None, help='AR coefficients "c1,c2,..."')
    p.add_argument("--ma1", type=float, default=None, help="MA(1) coefficient theta")
    p.add_argument("--sigma2", type=float, default=1.0, help="Noise variance")
    p.add_argument("--sign", choices=[NATIVE_SIGN, CONVENTIONAL_SIGN], default=NATIVE_SIGN)
    p.add_argument("--n", type=int, required=True, help="Number of points")
    p.add_argument("--seed", type=int, default=0, help="Master seed (AR_BRIDGE_SEED overrides)")
    p.add_argument("--burnin", type=int, default=None, help="Discarded warm-up points")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("select", help="Fit and select an order")
    common(p, data=True, out=False)
    p.add_argument("--criteria", default="bc,aic,bic,hq", help="Comma-separated criteria")
    p.add_argument("--lmax", default="auto", help="'auto' or an integer")
    p.add_argument("--mn", default="auto", help="'auto' or a positive number")
    p.add_argument("--zeta", type=float, default=None, help="Penalty exponent of the two-step bridge criterion")
    p.add_argument("--sign", choices=[NATIVE_SIGN, CONVENTIONAL_SIGN], default=NATIVE_SIGN)
    p.set_defaults(handler=cmd_select)

    p = sub.add_parser("curves", help="Penalty curves J_BC, J_AIC, J_BIC, J_HQ")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--c", type=float, default=None, help="HQ constant")
    p.add_argument("--shifted", action="store_true", help="Shift curves to share the value at L = 1")
    p.set_defaults(handler=cmd_curves)

    p = sub.add_parser("thresholds", help="Significance levels and underfitting thresholds")
    common(p, out=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--p", type=float, default=None, help="Level for h_L (default: BC calibration level)")
    p.set_defaults(handler=cmd_thresholds)

    p = sub.add_parser("mc", help="Run a Monte Carlo study")
    common(p)
    p.add_argument("--config", required=True, help="Study config (TOML or JSON)")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(handler=cmd_mc)

    p = sub.add_parser("preq", help="Prequential one-step-ahead evaluation")
    common(p, data=True)
    p.add_argument("--n0", type=int, default=200)
    p.add_argument("--mode", choices=[m.value for m in WindowMode], default=WindowMode.EXPANDING.value)
    p.add_argument("--window", type=int, default=None, help="Sliding training width (default n0)")
    p.add_argument("--avg-window", type=int, default=100)
    p.add_argument("--criteria", default="bc,aic,bic")
    p.set_defaults(handler=cmd_preq)

    p = sub.add_parser("preprocess", help="Demean or deseasonalize a series")
    common(p, data=True)
    p.add_argument("--demean", action="store_true")
    p.add_argument("--deseason", type=int, default=None, metavar="PERIOD")
    p.set_defaults(handler=cmd_preprocess)

    return parser


def report_error(error: ArBridgeError) -> int:
    sys.stderr.write(error.to_json() + "\n")
    return error.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    try:
        settings = Settings()
    except ValidationError as e:
        return report_error(ConfigError(f"invalid environment settings: {e}"))

    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=(args.log_level or settings.LOG_LEVEL).upper(), format=settings.LOG_FORMAT)
        return args.handler(args, settings)
    except ArBridgeError as e:
        return report_error(e)
    except ValidationError as e:
        return report_error(UsageError(f"invalid arguments: {e}"))
    except Exception as e:
        logger.exception("unexpected failure")
        sys.stderr.write(json.dumps({"code": "internal_error", "message": str(e), "context": {}}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
