"""Command-line interface.

Subcommands dispatch to the library modules; exit codes follow the contract
0 = success, 1 = computational failure (singularity, non-convergence,
unusable fits), 2 = usage error (bad flags, malformed files, parse errors).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .approximation import approx_profile, approx_space_norm
from .core import IndexGeometry, invert
from .errors import (
    AliasingError,
    BandRangeError,
    ConvergenceError,
    DegenerateInputError,
    EmptyGridError,
    FitError,
    NormTagParseError,
    OffdiagError,
    SingularMatrixError,
    UsageError,
)
from .experiments import ExperimentConfig, GeneratorSpec, generate, run_experiment
from .io import (
    parse_norm_tag,
    read_json,
    read_matrix_json,
    write_approx_csv,
    write_hz_breakdown_csv,
    write_matrix_json,
    write_profile_csv,
    write_report_json,
)
from .norms import diagonal_profile
from .smoothness import HZParams, TGrid, hz_norm, hz_probe_breakdown

_COMPUTE_ERRORS = (
    SingularMatrixError,
    ConvergenceError,
    FitError,
    DegenerateInputError,
    AliasingError,
    BandRangeError,
    EmptyGridError,
)


def _parse_geometry(text: str, d: int) -> IndexGeometry:
    try:
        kind, size = text.split(":")
        if kind == "torus":
            return IndexGeometry.torus(int(size), d)
        if kind == "window":
            return IndexGeometry.window(int(size), d)
    except (ValueError, TypeError):
        pass
    raise UsageError(f"geometry must be torus:<N> or window:<n>, got {text!r}")


def _resolve_config(path: str) -> dict:
    """Load a config file, falling back to the bundled configs by name."""
    p = Path(path)
    if p.exists():
        return read_json(p)
    bundled = resources.files("offdiag").joinpath("configs", path)
    if bundled.is_file():
        return json.loads(bundled.read_text())
    raise UsageError(f"config {path!r} not found (no such file or bundled config)")


def _info(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def cmd_norm(args) -> int:
    a = read_matrix_json(args.infile)
    tag = parse_norm_tag(args.norm)
    from .norms import matrix_norm

    print(repr(matrix_norm(a, tag)))
    return 0


def cmd_profile(args) -> int:
    a = read_matrix_json(args.infile)
    profile = diagonal_profile(a, args.per_diag)
    write_profile_csv(profile, args.out)
    _info(args, f"wrote profile CSV to {args.out}")
    if args.plot:
        from .plotting import save_profile_figure

        fig = Path(args.out).with_suffix(".png")
        save_profile_figure(profile, fig)
        _info(args, f"wrote figure to {fig}")
    return 0


def cmd_approx(args) -> int:
    a = read_matrix_json(args.infile)
    tag = parse_norm_tag(args.norm)
    profile = approx_profile(a, tag, args.metric, args.max_band)
    write_approx_csv(profile, args.out)
    _info(args, f"wrote approximation-error CSV to {args.out}")
    if args.r is not None:
        try:
            p = math.inf if args.p in (None, "inf") else float(args.p)
        except ValueError:
            raise UsageError(f"--p must be a number or 'inf', got {args.p!r}") from None
        print(repr(approx_space_norm(a, args.r, p, tag, args.metric)))
    if args.plot:
        from .plotting import save_approx_figure

        fig = Path(args.out).with_suffix(".png")
        save_approx_figure(profile, fig)
        _info(args, f"wrote figure to {fig}")
    return 0


def cmd_hz(args) -> int:
    a = read_matrix_json(args.infile)
    tag = parse_norm_tag(args.norm)
    if args.r is None:
        raise UsageError("hz needs --r (the smoothness order)")
    grid = TGrid.for_matrix(a, dyadic_levels=args.grid_levels)
    params = HZParams(args.r, tag, grid)
    value = hz_norm(a, params)
    print(repr(value))
    if args.out:
        rows = hz_probe_breakdown(a, params)
        write_hz_breakdown_csv(a.geometry.d, rows, args.out)
        _info(args, f"wrote probe breakdown CSV to {args.out}")
        if args.plot:
            from .plotting import save_hz_breakdown_figure

            fig = Path(args.out).with_suffix(".png")
            save_hz_breakdown_figure(rows, fig)
            _info(args, f"wrote figure to {fig}")
    return 0


def cmd_invert(args) -> int:
    a = read_matrix_json(args.infile)
    inv = invert(a)
    write_matrix_json(inv, args.out)
    _info(args, f"wrote inverse matrix JSON to {args.out}")
    return 0


def cmd_generate(args) -> int:
    data = _resolve_config(args.config)
    if args.seed is not None:
        data = {**data, "seed": args.seed}
    if args.geometry is not None:
        data = {**data, "geometry": _parse_geometry(args.geometry, args.d).to_dict()}
    try:
        spec = GeneratorSpec.from_dict(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad generator spec: {exc}") from exc
    a = generate(spec)
    write_matrix_json(a, args.out)
    _info(args, f"wrote generated matrix JSON to {args.out}")
    return 0


def cmd_experiment(args) -> int:
    data = _resolve_config(args.config)
    if args.seed is not None:
        data = {**data, "seed": args.seed}
    try:
        config = ExperimentConfig.from_dict(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad experiment config: {exc}") from exc
    report = run_experiment(config)
    payload = report.to_dict()
    write_report_json(payload, args.out)
    _info(args, f"wrote experiment report to {args.out}")
    if not args.no_plot:
        from .plotting import save_report_figure

        fig = Path(args.out).with_suffix(".png")
        save_report_figure(payload, fig)
        _info(args, f"wrote figure to {fig}")
    print("pass" if report.passed else "fail")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offdiag",
        description="Off-diagonal decay norms, smoothness, and inversion experiments",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, infile=True, out_required=True):
        if infile:
            p.add_argument("--in", dest="infile", required=True, help="matrix JSON")
        p.add_argument("--quiet", action="store_true", help="suppress progress notes")
        return p

    p = common(sub.add_parser("norm", help="print a matrix norm"))
    p.add_argument("--norm", required=True, help="norm tag, e.g. jaffard:2.5")
    p.set_defaults(func=cmd_norm)

    p = common(sub.add_parser("profile", help="write the side-diagonal profile CSV"))
    p.add_argument("--per-diag", choices=("max", "opl2"), default="max")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true", help="also render a figure")
    p.set_defaults(func=cmd_profile)

    p = common(sub.add_parser("approx", help="write banded approximation errors"))
    p.add_argument("--norm", required=True)
    p.add_argument("--metric", choices=("one", "inf"), default="inf")
    p.add_argument("--max-band", type=int, default=None)
    p.add_argument("--r", type=float, default=None,
                   help="also print the approximation-space norm of this order")
    p.add_argument("--p", default=None, help="approximation-space exponent (default inf)")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_approx)

    p = common(sub.add_parser("hz", help="print the Hölder-Zygmund norm"))
    p.add_argument("--norm", required=True, help="base norm tag")
    p.add_argument("--r", type=float, required=True, help="smoothness order")
    p.add_argument("--grid-levels", type=int, default=12)
    p.add_argument("--out", default=None, help="probe breakdown CSV path")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_hz)

    p = common(sub.add_parser("invert", help="invert a matrix"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_invert)

    p = common(sub.add_parser("generate", help="generate a matrix from a spec"),
               infile=False)
    p.add_argument("--config", required=True, help="GeneratorSpec JSON (path or bundled name)")
    p.add_argument("--seed", type=int, default=None, help="override the spec seed")
    p.add_argument("--geometry", default=None, help="override geometry, torus:<N>|window:<n>")
    p.add_argument("--d", type=int, default=1, help="dimension for --geometry override")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = common(sub.add_parser("experiment", help="run a verification experiment"),
               infile=False)
    p.add_argument("--config", required=True, help="experiment config JSON (path or bundled name)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--no-plot", action="store_true",
                   help="skip the figure rendered alongside the report")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _COMPUTE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NormTagParseError, UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OffdiagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
