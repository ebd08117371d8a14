import argparse
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Type

import yaml
from dagster import AssetsDefinition, Config, RunConfig, materialize

from .assets.scalar import DecayConfig, ScalarStudyConfig, decay_report, scalar_convergence_report
from .assets.sweeps import SweepConfig, coeff_sweep_report, lemma41_sweep_report, order_for
from .assets.tables import TableConfig, table1_report, table2_report
from .resources.report_io_manager import SUPPORTED_FORMATS, ReportIOManager
from .utils.coefficients import FractionalOrder
from .utils.scalar_scheme import TimeGrid

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DEFAULT_REPORT_DIR = "reports"


class Experiment(NamedTuple):
    asset: AssetsDefinition
    config_cls: Type[Config]
    # flag destination -> config field
    flags: Dict[str, str]
    verdict_column: str


TABLE_FLAGS = {
    "alpha": "alphas", "steps": "steps", "spatial": "spatial_intervals", "horizon": "horizon",
    "tolerance_factor": "tolerance_factor", "workers": "workers", "initial_data": "initial_data",
}
SCALAR_FLAGS = {
    "alpha": "alphas", "steps": "steps", "horizon": "horizon", "epsilon": "epsilon", "lam": "lam_values",
    "lam_im": "lam_im",
}
SWEEP_FLAGS = {"alpha": "alphas", "n_max": "n_max", "epsilon": "epsilon"}

EXPERIMENTS = {
    "table1": Experiment(table1_report, TableConfig, TABLE_FLAGS, "passed"),
    "table2": Experiment(table2_report, TableConfig, TABLE_FLAGS, "passed"),
    "scalar-convergence": Experiment(scalar_convergence_report, ScalarStudyConfig, SCALAR_FLAGS, "passed"),
    "decay": Experiment(decay_report, DecayConfig, SCALAR_FLAGS, "bounded"),
    "coeff-sweep": Experiment(coeff_sweep_report, SweepConfig, SWEEP_FLAGS, "passed"),
    "lemma41-sweep": Experiment(lemma41_sweep_report, SweepConfig, SWEEP_FLAGS, "passed"),
}


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="YAML file, flat or in Dagster run-config shape")
    common.add_argument("--alpha", type=float, nargs="+", help="Fractional orders in (0, 1)")
    common.add_argument("--steps", type=int, nargs="+", help="Time step counts")
    common.add_argument("--spatial", type=int, help="Spatial intervals M (tables)")
    common.add_argument("--horizon", type=float, help="Final time T")
    common.add_argument("--epsilon", type=float, help="Rate slack epsilon in (0, 1 - alpha)")
    common.add_argument("--lam", type=float, nargs="+", help="Real parts of lambda (scalar studies)")
    common.add_argument("--lam-im", type=float, help="Imaginary part of lambda (scalar studies)")
    common.add_argument("--n-max", type=int, help="Largest n in the coefficient sweeps")
    common.add_argument("--initial-data", type=str, nargs="+", choices=["poly", "sine"],
                        help="Restrict table rows to these initial data")
    common.add_argument("--workers", type=int, help="Table rows computed concurrently")
    common.add_argument("--tolerance-factor", type=float, help="Accepted factor against published values")
    common.add_argument("--out", type=str, help="Report file (default: <report dir>/<report>.<format>)")
    common.add_argument("--format", type=str, choices=SUPPORTED_FORMATS, help="Report format")

    parser = argparse.ArgumentParser(
        prog="caputo-scheme",
        description="Reproduce the published tables and run the coefficient and scalar studies"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        subparsers.add_parser(name, parents=[common])
    return parser


def read_config_file(path: str, asset_name: str) -> Dict[str, Any]:
    try:
        with open(path) as f:
            raw = yaml.safe_load(f) or {}
    except OSError as e:
        raise UsageError(f"Could not read config file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise UsageError(f"Config file {path} is not valid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise UsageError(f"Config file {path} must hold a mapping")
    if "ops" in raw:
        return dict(((raw["ops"] or {}).get(asset_name) or {}).get("config") or {})
    return raw


def merge_config(args: argparse.Namespace, experiment: Experiment) -> Dict[str, Any]:
    values = read_config_file(args.config, experiment.asset.key.path[-1]) if args.config else {}
    for dest in ("alpha", "steps", "spatial", "horizon", "epsilon", "lam", "lam_im", "n_max",
                 "initial_data", "workers", "tolerance_factor"):
        value = getattr(args, dest)
        if value is None:
            continue
        if dest not in experiment.flags:
            raise UsageError(f"--{dest.replace('_', '-')} does not apply to {args.command}")
        values[experiment.flags[dest]] = value
    return values


def validate(command: str, config: Config):
    """Domain checks that would otherwise only fail inside the run."""
    if isinstance(config, TableConfig):
        for alpha in config.alphas or []:
            if not 0 < alpha < 1:
                raise ValueError(f"Fractional order alpha must lie in (0, 1), got {alpha}")
        if config.spatial_intervals < 2:
            raise ValueError(f"Need at least 2 spatial intervals, got {config.spatial_intervals}")
        if config.tolerance_factor < 1:
            raise ValueError(f"Tolerance factor must be >= 1, got {config.tolerance_factor}")
        for steps in config.steps or []:
            TimeGrid(config.horizon, steps)
    elif isinstance(config, ScalarStudyConfig):
        for alpha in config.alphas:
            FractionalOrder(alpha, config.epsilon)
        for steps in config.steps:
            TimeGrid(config.horizon, steps)
        if command == "decay" and 0.0 in config.lam_values and config.lam_im == 0:
            raise ValueError("Decay study needs lambda != 0")
    elif isinstance(config, SweepConfig):
        for alpha in config.alphas:
            order_for(alpha, config.epsilon)
        if config.n_max < 2:
            raise ValueError(f"Sweeps need n_max >= 2, got {config.n_max}")


def report_resource(args: argparse.Namespace) -> ReportIOManager:
    file_format = args.format
    if file_format is None and args.out:
        suffix = Path(args.out).suffix.lstrip(".")
        file_format = suffix if suffix in SUPPORTED_FORMATS else "csv"
    return ReportIOManager(
        base_dir=os.environ.get("CAPUTO_REPORT_DIR", DEFAULT_REPORT_DIR),
        file_format=file_format or "csv",
        output_path=args.out,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_PASS

    experiment = EXPERIMENTS[args.command]
    asset_name = experiment.asset.key.path[-1]
    try:
        config = experiment.config_cls(**merge_config(args, experiment))
        validate(args.command, config)
    except ValueError as e:
        print(f"caputo-scheme {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE

    resource = report_resource(args)
    try:
        result = materialize(
            [experiment.asset],
            resources={"report_io_manager": resource},
            run_config=RunConfig(ops={asset_name: config}),
        )
    except Exception as e:
        print(f"caputo-scheme {args.command}: run failed: {e}", file=sys.stderr)
        return EXIT_FAIL

    df = result.output_for_node(asset_name)
    verdicts = df[experiment.verdict_column].astype(bool)
    path = resource.output_path or str(Path(resource.base_dir) / f"{asset_name}.{resource.file_format}")
    status = "PASS" if verdicts.all() else "FAIL"
    print(f"{args.command}: {status} {int(verdicts.sum())}/{len(verdicts)} rows -> {path}")
    return EXIT_PASS if verdicts.all() else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
