"""Command-line benchmark runner.

Verbs: run, ablate-scaling, qubit-sweep, learning-curve, pca-analyze,
validate-config. Exit codes: 0 success, 2 configuration error, 3 data
error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkbench", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--threads", type=int, default=None,
                       help="BLAS thread count (also read from QKBENCH_THREADS)")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="stdout summary format")

    common(sub.add_parser("run", help="full benchmark: data -> kernels -> report"))
    common(sub.add_parser("ablate-scaling", help="unscaled vs scaled ansatz comparison"))
    p_sweep = sub.add_parser("qubit-sweep", help="accuracy vs additional qubits")
    common(p_sweep)
    p_sweep.add_argument("--extras", default="0,1", help="comma-separated extra qubit counts")
    p_curve = sub.add_parser("learning-curve", help="proxy-model learning curve")
    common(p_curve)
    p_curve.add_argument("--sizes", default=None, help="comma-separated train sizes")
    common(sub.add_parser("pca-analyze", help="cumulative explained-variance analysis"))
    common(sub.add_parser("validate-config", help="parse and validate the configuration"))
    return parser


def _set_threads(n: int | None) -> None:
    n = n if n is not None else (
        int(os.environ["QKBENCH_THREADS"]) if os.environ.get("QKBENCH_THREADS") else None
    )
    if n is None:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)


def _load_config(args):
    import yaml

    from .errors import ConfigError
    from .runner import _expect_mapping, config_from_dict

    try:
        raw = yaml.safe_load(Path(args.config).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {args.config}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    raw = _expect_mapping(raw, "config")
    if args.seed is not None:
        raw["seed"] = args.seed
    return config_from_dict(raw)


def _summary_rows(verb: str, report: dict) -> list[list]:
    if verb == "run":
        return [
            [kind, entry["test_accuracy"]] for kind, entry in sorted(report["kernels"].items())
        ]
    if verb == "ablate-scaling":
        return [
            [kind, cell, vals["test_accuracy"]]
            for kind, cells in sorted(report["kernels"].items())
            for cell, vals in sorted(cells.items())
        ]
    if verb == "qubit-sweep":
        return [
            [kind, pt["extra_qubits"], pt["test_accuracy"]]
            for kind, pts in sorted(report["kernels"].items())
            for pt in pts
        ]
    if verb == "learning-curve":
        return list(map(list, zip(report["sizes"], report["accuracy"])))
    if verb == "pca-analyze":
        return [[k + 1, v] for k, v in enumerate(report["cumulative_variance"])]
    return []


def _emit(verb: str, report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True, default=str))
    else:
        for row in _summary_rows(verb, report):
            print(",".join(str(v) for v in row))


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    _set_threads(args.threads)

    from .errors import ConfigError, DataError, NumericalError

    try:
        config = _load_config(args)
        if args.verb == "validate-config":
            print(f"config OK: {args.config}")
            return 0
        from . import runner

        out = args.out
        if args.verb == "run":
            report = runner.run(config, out)
        elif args.verb == "ablate-scaling":
            report = runner.ablate_scaling(config, out)
        elif args.verb == "qubit-sweep":
            extras = [int(v) for v in args.extras.split(",") if v != ""]
            report = runner.qubit_sweep(config, extras, out)
        elif args.verb == "learning-curve":
            sizes = (
                [int(v) for v in args.sizes.split(",") if v != ""] if args.sizes else None
            )
            report = runner.learning_curve_report(config, sizes, out)
        else:
            report = runner.pca_report(config, out)
        _emit(args.verb, report, args.format)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
