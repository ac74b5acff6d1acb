"""Command-line entry point.

Exit codes: 0 success, 2 usage, 3 unphysical or malformed state,
4 canonicalization failure, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import __version__
from .canonical import CanonicalizationError, canonicalize, reduce_to_standard_form
from .gaussian import (
    CovarianceMatrix,
    SamplerConfig,
    StateError,
    is_standard_form,
    load_state,
    tmsv,
    to_standard_moments,
    validate,
)
from .measures import measure_all, simon_separable
from .pfunc import DEMO_BETA, HIGH_P, GridSpec, MixtureParams, scan_cut
from .study import (
    DEFAULT_BIN_WIDTH,
    DEPTH_MODES,
    PerturbationSpec,
    perturbation_identity,
    records_csv,
    relation_analysis,
    run_study,
)

EXIT_OK, EXIT_USAGE, EXIT_UNPHYSICAL, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4, 5


class CLIError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, path) -> None:
    if path:
        try:
            Path(path).write_text(text)
        except OSError as err:
            raise CLIError(f"cannot write {path}: {err}", EXIT_IO) from err
    else:
        sys.stdout.write(text)


def _read_state(args) -> CovarianceMatrix:
    if args.tmsv is not None:
        return tmsv(args.tmsv)
    try:
        state = load_state(args.state)
    except OSError as err:
        raise CLIError(f"cannot read {args.state}: {err}", EXIT_IO) from err
    except (StateError, ValueError, KeyError) as err:
        raise CLIError(f"invalid state file: {err}", EXIT_UNPHYSICAL) from err
    report = validate(state)
    if not report.physical:
        sys.stderr.write(_dumps({"error": "unphysical state", "validation": report.to_json()}))
        raise CLIError("unphysical state", EXIT_UNPHYSICAL)
    return state


def cmd_pfunc_cut(args) -> int:
    if args.paper_params:
        beta, p = DEMO_BETA, HIGH_P
        print(
            "note: p = 3/4 makes the mode-b marginal negative near the origin; "
            "use p < 1/2 for classical marginals",
            file=sys.stderr,
        )
    else:
        if args.beta is None or args.p is None:
            raise CLIError("pfunc-cut needs --beta and --p (or --paper-params)", EXIT_USAGE)
        beta, p = args.beta, args.p
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            params = MixtureParams(beta, p)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        grid_a = GridSpec(args.center_a, args.half_width, args.points)
        grid_b = GridSpec(args.center_b, args.half_width, args.points)
    except ValueError as err:
        raise CLIError(str(err), EXIT_USAGE) from err
    if args.smooth < 0:
        raise CLIError("--smooth must be non-negative", EXIT_USAGE)
    cut = scan_cut(params, grid_a, grid_b, args.smooth)
    out = Path(args.out)
    summary = args.summary or out.with_suffix(".json")
    try:
        cut.write_csv(out)
        cut.write_summary(summary, grid_a, grid_b)
    except OSError as err:
        raise CLIError(f"cannot write output: {err}", EXIT_IO) from err
    return EXIT_OK


def cmd_measures(args) -> int:
    state = _read_state(args)
    if is_standard_form(state):
        moments = to_standard_moments(state)
    else:
        moments, _ = reduce_to_standard_form(state)
        print("note: input not in standard form; measures use its reduced standard form", file=sys.stderr)
    _emit(_dumps(measure_all(moments).to_json()), args.out)
    return EXIT_OK


def cmd_canonicalize(args) -> int:
    state = _read_state(args)
    try:
        result = canonicalize(state)
    except CanonicalizationError as err:
        sys.stderr.write(_dumps({"error": str(err), "residuals": list(err.residuals)}))
        raise CLIError("canonicalization failed", EXIT_SOLVER) from err
    if not result.converged:
        sys.stderr.write(_dumps({"error": "not converged", "residuals": [result.residual_11, result.residual_14]}))
        raise CLIError("canonicalization failed", EXIT_SOLVER)
    payload = result.to_json()
    payload["verdict"] = {"p_positive": result.p_positive, "simon_separable": simon_separable(state)}
    _emit(_dumps(payload), args.out)
    return EXIT_OK


def cmd_mc_study(args) -> int:
    if args.count is None or args.count < 1:
        raise CLIError("--count must be a positive integer", EXIT_USAGE)
    try:
        config = SamplerConfig(
            seed=args.seed,
            count=args.count,
            max_squeeze=args.max_squeeze,
            max_thermal=args.max_thermal,
            mix_passive=not args.symmetric,
        )
    except ValueError as err:
        raise CLIError(str(err), EXIT_USAGE) from err
    records = run_study(config, workers=args.workers, depth_mode=args.depth_mode)
    try:
        report = relation_analysis(records, bin_width=args.bin_width)
    except ValueError as err:
        raise CLIError(str(err), EXIT_USAGE) from err
    try:
        Path(args.out_csv).write_text(records_csv(records))
        Path(args.out_json).write_text(_dumps(report.to_json()))
    except OSError as err:
        raise CLIError(f"cannot write output: {err}", EXIT_IO) from err
    return EXIT_OK


def cmd_perturb(args) -> int:
    spec = PerturbationSpec(args.m, args.n, args.c, args.delta_c)
    try:
        result = perturbation_identity(spec, asymmetry=args.asymmetry, extra_noise=args.extra_noise)
    except (ValueError, StateError) as err:
        raise CLIError(str(err), EXIT_UNPHYSICAL) from err
    _emit(_dumps(result.to_json()), args.out)
    return EXIT_OK


def _add_state_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help="state JSON: {\"sigma\": 4x4} or the six standard moments")
    src.add_argument("--tmsv", type=float, metavar="R", help="two-mode squeezed vacuum with squeezing R")
    p.add_argument("--out", help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gauss-nclass",
        description="Nonclassicality versus entanglement for two-mode Gaussian states.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pfunc-cut", help="real-real cut of the mixture P function (CSV + JSON summary)")
    p.add_argument("--config", help="JSON file whose keys mirror the flags")
    p.add_argument("--beta", type=complex, help="coherent amplitude, e.g. 2 or 1.5+0.5j")
    p.add_argument("--p", type=float, help="single-photon branch probability")
    p.add_argument("--paper-params", action="store_true", help="beta = 2, p = 3/4")
    p.add_argument("--half-width", type=float, default=4.0)
    p.add_argument("--points", type=int, default=161)
    p.add_argument("--center-a", type=complex, default=0j)
    p.add_argument("--center-b", type=complex, default=0j)
    p.add_argument("--smooth", type=float, default=0.0, metavar="T", help="Gaussian smoothing T (0 = raw P)")
    p.add_argument("--out", default="pfunc_cut.csv")
    p.add_argument("--summary", help="JSON summary path (default: --out with .json)")
    p.set_defaults(func=cmd_pfunc_cut)

    p = sub.add_parser("measures", help="LN, depth, P-positivity, Duan and Simon verdicts")
    p.add_argument("--config")
    _add_state_source(p)
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("canonicalize", help="bring a state to canonical form and compare verdicts")
    p.add_argument("--config")
    _add_state_source(p)
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("mc-study", help="Monte Carlo depth/LN study (CSV + analysis JSON)")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int)
    p.add_argument("--max-squeeze", type=float, default=1.0)
    p.add_argument("--max-thermal", type=float, default=1.0)
    p.add_argument("--symmetric", action="store_true", help="sample only the c1 = -c2 subclass")
    p.add_argument("--depth-mode", choices=DEPTH_MODES, default="canonical")
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    p.add_argument("--workers", type=int, help="worker processes (capped by GAUSS_NCLASS_THREADS)")
    p.add_argument("--out-csv", default="study.csv")
    p.add_argument("--out-json", default="study_analysis.json")
    p.set_defaults(func=cmd_mc_study)

    p = sub.add_parser("perturb", help="equal-depth perturbation of a symmetric state")
    p.add_argument("--config")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--delta-c", type=float, required=True)
    p.add_argument("--asymmetry", type=float, default=0.0)
    p.add_argument("--extra-noise", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_perturb)
    return parser


def _apply_config(parser, argv):
    """Re-parse with defaults taken from ``--config`` so explicit flags still win."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, ValueError) as err:
        raise CLIError(f"cannot read config {args.config}: {err}", EXIT_USAGE) from err
    sub = next(a for a in parser._subparsers._group_actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub.choices[args.command]
    subparser.set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})
    # required flags may now come from the config
    for action in subparser._actions:
        if action.dest.replace("_", "-") in config or action.dest in config:
            action.required = False
    for group in subparser._mutually_exclusive_groups:
        if any(a.dest in config for a in group._group_actions):
            group.required = False
    args = parser.parse_args(argv)
    for key in ("beta", "center_a", "center_b"):
        if isinstance(getattr(args, key, None), (int, float, str)):
            setattr(args, key, complex(getattr(args, key)))
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except CLIError as err:
        print(f"gauss-nclass: {err}", file=sys.stderr)
        return err.code
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
