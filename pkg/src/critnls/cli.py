"""Command line entry point: ``critnls <study> [--config FILE] [--output DIR] [--threads N]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import STUDIES, ConfigError, config_from_dict, read_config_file, run


def _command(study: str) -> str:
    return study.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="critnls", description="Small-dispersion NLS break-up studies.")
    sub = parser.add_subparsers(dest="command", required=True)
    for study in STUDIES:
        p = sub.add_parser(_command(study), help=f"run the {_command(study)} study")
        p.add_argument("--config", type=Path, help="YAML or JSON configuration file")
        p.add_argument("--output", type=Path, help="output directory (overrides output_dir)")
        p.add_argument("--threads", type=int, default=1, help="FFT worker threads")
        p.add_argument("--case", help="initial-data case name (overrides case.name)")
        p.add_argument("--epsilon", type=float, nargs="+", help="epsilon values (overrides epsilon_list)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    study = args.command.replace("-", "_")
    try:
        data = read_config_file(args.config) if args.config else {}
        given = data.get("study")
        if given is not None and str(given).replace("-", "_") != study:
            raise ConfigError(f"config study {given!r} does not match subcommand {args.command!r}")
        data["study"] = study
        if args.output is not None:
            data["output_dir"] = str(args.output)
        if args.case is not None:
            case = data.get("case", {})
            case = {"name": case} if isinstance(case, str) else dict(case)
            case["name"] = args.case
            data["case"] = case
        if args.epsilon is not None:
            data["epsilon_list"] = args.epsilon
        cfg = config_from_dict(data)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        status = run(cfg, threads=args.threads)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"critnls: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {cfg.output_dir}")
    return status


if __name__ == "__main__":
    sys.exit(main())
