"""Command-line entry point: ``logiwave <command> ...`` or ``python -m logiwave``.

Every command that writes files also writes ``manifest.json`` next to them
with the effective parameters and input checksums.  Exit codes: 0 success,
2 bad input, 3 bad parameter, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .cwt import ysat_from_cwt, scalogram
from .decomposition import (ConvergenceWarning, DecompositionConfig, decompose,
                            significant_extrema)
from .info import (DistributionError, configurational_information_3, load_distribution,
                   mutual_information_2, mutual_redundancy, shannon_entropy)
from .kdv import GridFunction, kdv_residual, soliton
from .model import MultilogisticModel
from .synthetic import REFERENCE_LENGTH, synthesize
from .timeseries import SeriesError, first_difference, ingest_csv, write_csv
from .trend import ChainError, auto_group, write_chains

EXIT_OK, EXIT_INPUT, EXIT_PARAM, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("logiwave")


class InputError(Exception):
    pass


class ParamError(Exception):
    pass


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path, data):
    path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return path


def _write_manifest(out, args, inputs, outputs):
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "command", "config", "verbose")}
    manifest = {
        "tool": "logiwave", "version": __version__, "command": args.command,
        "parameters": params,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": sorted(Path(p).name for p in outputs),
    }
    _write_json(out / "manifest.json", manifest)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None


def _load_series(path):
    try:
        return ingest_csv(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except SeriesError as exc:
        raise InputError(str(exc)) from None


def _load_model(path):
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object with 'd' and 'waves'")
    try:
        return MultilogisticModel.from_dict(data), data
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid wave table ({exc})") from None


# --- commands ---------------------------------------------------------------

def cmd_scalogram(args):
    if not (args.alpha_min > 0 and args.alpha_step > 0 and args.alpha_max >= args.alpha_min):
        raise ParamError("need 0 < alpha-min <= alpha-max and alpha-step > 0")
    if args.min_abs is not None and args.min_abs < 0:
        raise ParamError("min-abs must be nonnegative")
    series = _load_series(args.input)
    alphas = np.arange(args.alpha_min, args.alpha_max + 0.5 * args.alpha_step, args.alpha_step)
    try:
        sc = scalogram(first_difference(series), alphas, workers=args.workers)
    except ValueError as exc:
        raise InputError(f"{args.input}: series too short for a scalogram ({exc})") from None
    found = significant_extrema(sc, args.min_abs)
    out = _out_dir(args)
    files = [sc.to_csv(out / "scalogram.csv"),
             _write_json(out / "extrema.json",
                         [dict(e.to_dict(), y_sat=ysat_from_cwt(e)) for e in found])]
    _write_manifest(out, args, [args.input], files)
    print(f"scalogram {sc.shape[0]}x{sc.shape[1]}, {len(found)} extrema -> {out}")


def cmd_decompose(args):
    try:
        cfg = DecompositionConfig(max_waves=args.max_waves, stop_r2=args.stop_r2,
                                  workers=args.workers)
    except ValueError as exc:
        raise ParamError(str(exc)) from None
    series = _load_series(args.input)
    try:
        model, report = decompose(series, cfg)
    except SeriesError as exc:
        raise InputError(str(exc)) from None
    out = _out_dir(args)
    files = [_write_json(out / "waves.json", model.to_dict()),
             _write_json(out / "fit.json", report.to_dict())]
    _write_manifest(out, args, [args.input], files)
    print(f"{len(model.waves)} waves, R^2 = {report.r_squared:.6g} -> {out}")


def cmd_synthesize(args):
    if args.noise_sigma < 0:
        raise ParamError("noise-sigma must be nonnegative")
    model, data = _load_model(args.params)
    n = args.n if args.n is not None else int(data.get("n", REFERENCE_LENGTH))
    if n < 2:
        raise ParamError("series length must be at least 2")
    series = synthesize(model, n=n, noise_sigma=args.noise_sigma, seed=args.seed)
    out = _out_dir(args)
    files = [write_csv(series, out / "series.csv")]
    _write_manifest(out, args, [args.params], files)
    print(f"{n} points -> {out / 'series.csv'}")


def cmd_trend(args):
    if args.group_tol < 0:
        raise ParamError("group-tol must be nonnegative")
    model, _ = _load_model(args.waves)
    try:
        chains = auto_group(model.waves, tol=args.group_tol)
    except ChainError as exc:
        raise InputError(str(exc)) from None
    out = _out_dir(args)
    files = [write_chains(chains, out / "chains.json")]
    _write_manifest(out, args, [args.waves], files)
    for c in chains:
        flag = "  reversal" if c.reversal_flag else ""
        print(f"{c.chain_id}: {', '.join(c.member_ids)}  slope {c.slope:.6g}{flag}")
    if not chains:
        print("no chains")


_MEASURES = {
    "H": ((1, 2, 3), shannon_entropy),
    "T2": ((2,), mutual_information_2),
    "T3": ((3,), configurational_information_3),
    "R": ((2, 3), mutual_redundancy),
}


def cmd_entropy(args):
    try:
        dist = load_distribution(args.dist)
    except OSError as exc:
        raise InputError(f"cannot read {args.dist}: {exc.strerror}") from None
    except (DistributionError, json.JSONDecodeError) as exc:
        raise InputError(f"{args.dist}: {exc}") from None
    arities, fn = _MEASURES[args.measure]
    if dist.arity not in arities:
        raise ParamError(f"measure {args.measure} needs {' or '.join(map(str, arities))} "
                         f"variables, distribution has {dist.arity}")
    value = fn(dist)
    print(f"{value:.12g}")
    if args.out:
        out = _out_dir(args)
        files = [_write_json(out / "entropy.json", {"measure": args.measure, "bits": value})]
        _write_manifest(out, args, [args.dist], files)


def _kdv_level(k, h, tau):
    half = 20.0 / k
    xs = np.arange(-half, half + 0.5 * h, h)
    ts = np.array([-tau, 0.0, tau])
    return kdv_residual(GridFunction.sample(lambda x, t: soliton(k, x, t), xs, ts))


def cmd_kdv_check(args):
    if not args.k > 0:
        raise ParamError("k must be positive")
    if not (args.h > 0 and args.tau > 0):
        raise ParamError("h and tau must be positive")
    if 40.0 / args.k / args.h > 2e6:
        raise ParamError("grid too large; increase h or k")
    coarse = _kdv_level(args.k, args.h, args.tau)
    fine = _kdv_level(args.k, args.h / 2, args.tau / 2)
    if not (np.isfinite(coarse) and np.isfinite(fine)) or fine == 0:
        raise FloatingPointError("residual is not finite or vanished")
    ratio = coarse / fine
    report = {"k": args.k, "h": args.h, "tau": args.tau, "residual_coarse": coarse,
              "residual_fine": fine, "ratio": ratio, "order": float(np.log2(ratio))}
    print(f"residual h={args.h:g}, tau={args.tau:g}: {coarse:.6e}")
    print(f"residual h={args.h / 2:g}, tau={args.tau / 2:g}: {fine:.6e}")
    print(f"ratio {ratio:.4f}, observed order {report['order']:.4f}")
    if args.out:
        out = _out_dir(args)
        files = [_write_json(out / "kdv.json", report)]
        _write_manifest(out, args, [], files)


# --- parser -----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file supplying any flag; command line wins")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="logiwave", parents=[common],
                                     description="Logistic-wavelet wave analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scalogram", parents=[common], help="CWT of a series")
    p.add_argument("input")
    p.add_argument("--alpha-min", type=float, default=1.0)
    p.add_argument("--alpha-max", type=float, default=30.0)
    p.add_argument("--alpha-step", type=float, default=0.5)
    p.add_argument("--min-abs", type=float, default=None,
                   help="extremum threshold (default: 3x row median |cwt|)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_scalogram)

    p = sub.add_parser("decompose", parents=[common], help="fit drift plus waves")
    p.add_argument("input")
    p.add_argument("--max-waves", type=int, default=22)
    p.add_argument("--stop-r2", type=float, default=0.9939)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("synthesize", parents=[common], help="series from a wave table")
    p.add_argument("params")
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n", type=int, default=None, help="length (default: params 'n' or 514)")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("trend", parents=[common], help="group waves into chains")
    p.add_argument("waves")
    p.add_argument("--group-tol", type=float, default=0.3)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("entropy", parents=[common], help="information measures in bits")
    p.add_argument("dist")
    p.add_argument("--measure", choices=sorted(_MEASURES), default="H")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("kdv-check", parents=[common], help="soliton residual convergence")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.05)
    p.add_argument("--tau", type=float, default=0.001)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_kdv_check)
    return parser


def _apply_config(parser, argv):
    """Parse twice: config-file values become defaults, explicit flags override."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    data = _read_json(args.config)
    if not isinstance(data, dict):
        raise InputError(f"{args.config}: config must be a JSON object")
    known = set(vars(args)) - {"func", "command", "config"}
    defaults = {}
    for key, value in data.items():
        name = key.lstrip("-").replace("-", "_")
        if name not in known:
            raise ParamError(f"config key {key!r} is not a flag of '{args.command}'")
        defaults[name] = value
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                            format="%(levelname)s %(name)s: %(message)s")
        with warnings.catch_warnings():
            warnings.simplefilter("always", ConvergenceWarning)
            args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
