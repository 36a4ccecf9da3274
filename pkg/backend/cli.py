"""Command-line entry point: inspect datasets, write Gram matrices, run cross-validation.

Examples::

    python cli.py inspect data/MUTAG
    python cli.py gram --kernel wls --h 3 --out mutag_wls.csv data/MUTAG
    python cli.py cv --kernel wls --folds 10 --C-grid 0.01,0.1,1,10,100,1000 --param-grid "h=0,1,2,3" --seed 7 data/MUTAG

Results go to standard output, diagnostics to standard error. Exit codes:
0 success, 1 usage error, 2 data error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from app.config import configure_logging, get_settings
from app.cross_validation import DEFAULT_C_GRID
from app.datasets import dataset_statistics, parse_dataset
from app.errors import GraphKernelError, is_numeric_error
from app.experiments import run_cv, run_gram
from app.gram_io import write_gram
from app.kernel_registry import KERNELS, KernelDescriptor

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


# CLI/JSON keys that are not kernel parameters
RUN_KEYS = {
    "command", "config", "dataset", "out", "format", "scale", "rbf",
    "folds", "C_grid", "param_grid", "seed", "repeats", "scheme", "n_jobs",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _number(token: str) -> Any:
    for cast in (int, float):
        try:
            return cast(token)
        except ValueError:
            pass
    lowered = token.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    return token


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_param_grid(text: str) -> dict[str, list[Any]]:
    """``"h=0,1,2;sigma=0.5,1"`` -> ``{"h": [0, 1, 2], "sigma": [0.5, 1]}``."""
    grid: dict[str, list[Any]] = {}
    for item in filter(None, (part.strip() for part in text.split(";"))):
        key, sep, values = item.partition("=")
        if not sep or not key.strip() or not values.strip():
            raise argparse.ArgumentTypeError(f"expected name=v1,v2,... in {item!r}")
        grid[key.strip()] = [_number(v.strip()) for v in values.split(",") if v.strip()]
    return grid


def _add_kernel_flags(parser: argparse.ArgumentParser) -> None:
    # defaults are suppressed so that only flags given on the command line override the config file
    parser.add_argument("--config", type=Path, help="JSON file whose keys mirror the long flags")
    parser.add_argument("--kernel", choices=sorted(KERNELS), help="Kernel id")
    parser.add_argument("--h", type=int, help="WL iterations or tree-pattern depth")
    parser.add_argument("--base", choices=["vh", "eh", "sp"], help="Base kernel of the wl kernel")
    parser.add_argument("--gamma", type=_number, help="Geometric decay, or 'auto'")
    parser.add_argument("--beta", type=float, help="Exponential kernel scale")
    parser.add_argument("--steps", type=int, help="N of the N-step kernel (unit weights)")
    parser.add_argument("--weights", type=parse_float_list, help="N-step weights l0,l1,...")
    parser.add_argument("--depth", type=int, help="Fingerprint path depth")
    parser.add_argument("--no-prune", dest="prune", action="store_false", help="Disable edge-divergence pruning")
    parser.add_argument("--vector-length", type=int, help="Hashed fingerprint length")
    parser.add_argument("--bits", type=int, choices=[1, 4], help="Bits set per hashed feature")
    parser.add_argument("--c", type=_number, help="Hybrid kernel parameter, or 'auto'")
    parser.add_argument("--lambda", dest="lambda", type=float, help="Tree-pattern weight")
    parser.add_argument("--variant", choices=["size", "branch"], help="Tree-pattern weighting")
    parser.add_argument("--tree-set", choices=["balanced", "up_to_depth"], help="Tree-pattern set")
    parser.add_argument("--no-tottering", action="store_true", help="No-tottering tree patterns")
    parser.add_argument("--stop-prob", type=float, help="Marginalized kernel stop probability")
    parser.add_argument("--morgan-iterations", type=int, help="Morgan relabeling for marginalized_nt")
    parser.add_argument("--uniform-start", dest="use_labels", action="store_false", help="WL-OA ignores vertex labels")
    parser.add_argument("--scale", action="store_true", help="Min-max scale the Gram matrix")
    parser.add_argument("--n-jobs", type=int, help="Worker processes for Gram assembly")
    parser.add_argument("dataset", nargs="?", type=Path, help="Dataset directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cli.py", description="Graph kernels, Gram matrices and SVM cross-validation")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    inspect = sub.add_parser("inspect", help="Print dataset statistics as JSON", argument_default=argparse.SUPPRESS)
    inspect.add_argument("dataset", type=Path, help="Dataset directory")

    gram = sub.add_parser("gram", help="Compute and write a Gram matrix", argument_default=argparse.SUPPRESS)
    _add_kernel_flags(gram)
    rbf = gram.add_mutually_exclusive_group()
    rbf.add_argument("--sigma", type=float, help="Compose the kernel with the graph RBF")
    rbf.add_argument("--rbf", action="store_true", help="Graph RBF with sigma 1")
    gram.add_argument("--format", choices=["csv", "binary"], help="Output format (default csv)")
    gram.add_argument("--out", type=Path, help="Output file")

    cv = sub.add_parser("cv", help="Run k-fold cross-validation and print the report", argument_default=argparse.SUPPRESS)
    _add_kernel_flags(cv)
    cv.add_argument("--sigma", type=float, help="Compose the kernel with the graph RBF")
    cv.add_argument("--rbf", action="store_true", help="Search sigma over 2^-7..2^7")
    cv.add_argument("--folds", type=int, help="Number of folds (default 10)")
    cv.add_argument("--C-grid", dest="C_grid", type=parse_float_list, help="Comma-separated C values")
    cv.add_argument("--param-grid", dest="param_grid", type=parse_param_grid, help="name=v1,v2;name2=...")
    cv.add_argument("--seed", type=int, help="Fold seed (default 0)")
    cv.add_argument("--repeats", type=int, help="Repeat the CV with seeds seed, seed+1, ...")
    cv.add_argument("--scheme", choices=["ovo", "ova"], help="Multiclass scheme")
    return parser


def _merged_options(args: argparse.Namespace) -> dict[str, Any]:
    options: dict[str, Any] = {}
    config = getattr(args, "config", None)
    if config is not None:
        try:
            loaded = json.loads(Path(config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError(f"config {config} must hold a JSON object")
        options.update(loaded)
        try:
            if isinstance(options.get("param_grid"), str):
                options["param_grid"] = parse_param_grid(options["param_grid"])
            if isinstance(options.get("C_grid"), str):
                options["C_grid"] = parse_float_list(options["C_grid"])
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"config {config}: {exc}") from exc
    options.update(vars(args))
    if options.get("dataset") is None:
        raise UsageError("a dataset directory is required")
    if options.get("rbf") and options.get("sigma") is None and options.get("command") == "gram":
        options["sigma"] = 1.0
    return options


def _descriptor(options: dict[str, Any]) -> KernelDescriptor:
    if "kernel" not in options:
        raise UsageError("--kernel is required")
    params = {k: v for k, v in options.items() if k not in RUN_KEYS}
    try:
        return KernelDescriptor.model_validate(params)
    except ValidationError as exc:
        raise UsageError(str(exc)) from exc


def _print_json(payload: Any) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _inspect(options: dict[str, Any]) -> int:
    _print_json(dataset_statistics(parse_dataset(options["dataset"])))
    return EXIT_OK


def _gram(options: dict[str, Any]) -> int:
    if options.get("out") is None:
        raise UsageError("--out is required")
    descriptor = _descriptor(options)
    dataset = parse_dataset(options["dataset"])
    settings = get_settings()
    try:
        m, report = run_gram(
            dataset,
            descriptor,
            scale=bool(options.get("scale")),
            n_jobs=options.get("n_jobs") or settings.n_jobs,
            psd_tol=settings.psd_tol,
        )
    except ValueError as exc:
        if isinstance(exc, GraphKernelError):
            raise
        raise UsageError(str(exc)) from exc
    if not report.passed:
        print(f"warning: Gram matrix fails the PSD check (min eigenvalue {report.min_eigenvalue:.3g})", file=sys.stderr)
    write_gram(m, options["out"], options.get("format") or "csv")
    _print_json(
        {
            "out": str(options["out"]),
            "graphs": m.size,
            "kernel": descriptor.kernel,
            "psd": {"passed": report.passed, "min_eigenvalue": report.min_eigenvalue},
        }
    )
    return EXIT_OK


def _cv(options: dict[str, Any]) -> int:
    descriptor = _descriptor(options)
    dataset = parse_dataset(options["dataset"])
    try:
        report = run_cv(
            dataset,
            descriptor,
            folds=options.get("folds") or 10,
            C_grid=options.get("C_grid") or list(DEFAULT_C_GRID),
            param_grid=options.get("param_grid"),
            seed=options.get("seed", 0),
            repeats=options.get("repeats") or 1,
            scale=bool(options.get("scale")),
            scheme=options.get("scheme") or "ovo",
            rbf=bool(options.get("rbf")),
            n_jobs=options.get("n_jobs") or get_settings().n_jobs,
        )
    except ValueError as exc:
        if isinstance(exc, GraphKernelError):
            raise
        raise UsageError(str(exc)) from exc
    _print_json(report.model_dump())
    return EXIT_OK


COMMANDS = {"inspect": _inspect, "gram": _gram, "cv": _cv}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage())
        configure_logging()
        options = _merged_options(args)
        return COMMANDS[args.command](options)
    except UsageError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GraphKernelError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if is_numeric_error(exc) else EXIT_DATA
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
