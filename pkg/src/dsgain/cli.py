"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 bad input (schema, geometry,
parameters, unreadable file), 3 numerical failure (quadrature did not
converge, too few samples).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .analytic import QuadratureSpec, ds_gain
from .channel import OFFICE, load_params, default_params
from .exceptions import ConvergenceError, DsGainError, InsufficientSamplesError, ParamError
from .layout import dump_floorplan, generate_grid, generate_winner_a1, load_floorplan
from .montecarlo import (
    empirical_distance_pdf,
    empirical_tau_cdf,
    sample_at_distance,
    simulate,
    write_xy_csv,
)
from .sweep import SWEEP_KINDS, SweepSpec, load_sweep_spec, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0 or v >= 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return v


def _seed_list(text: str) -> list[int]:
    """``0,3,7`` or an inclusive range ``0-19``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(_seed(lo), _seed(hi) + 1))
        elif part:
            out.append(_seed(part))
    if not out:
        raise argparse.ArgumentTypeError("empty seed list")
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}") from None


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = parser.add_argument_group("global options")
    g.add_argument("--params", default=d(None), help="parameter table override (JSON or TOML)")
    g.add_argument("--tolerance", type=_positive_float, default=d(1e-8), help="relative quadrature tolerance")
    g.add_argument("--threads", type=_positive_int, default=d(1), help="worker threads (results do not change)")
    g.add_argument("--output", "-o", default=d(None), help="write the main result here instead of stdout")
    g.add_argument("--format", choices=("json", "csv"), default=d(None), help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dsgain", description="Delay-spread gain evaluation of building layouts.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    _global_options(common, suppress=True)

    p = sub.add_parser("evaluate", parents=[common], help="analytic DS gain and reliability")
    p.add_argument("floorplan")
    p.add_argument("--reliability-mode", choices=("variance", "strict"), default="variance")

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo link simulation")
    p.add_argument("floorplan")
    p.add_argument("--links", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--emit-samples", metavar="CSV", help="write every link to this CSV file")
    p.add_argument("--distance-pdf", metavar="CSV", help="write the link-length histogram (x, density)")
    p.add_argument("--bin-width", type=_positive_float, default=1.0)
    p.add_argument("--tau-cdf", metavar="CSV", help="write the indoor RMS-DS CDF at --at-distance")
    p.add_argument("--at-distance", type=_positive_float)
    p.add_argument("--window", type=_positive_float, default=1.0,
                   help="distance window for the CDF when not --conditioned")
    p.add_argument("--conditioned", action="store_true",
                   help="draw --links fixed-length links for the CDF instead of windowing")

    p = sub.add_parser("compare", parents=[common], help="analytic vs simulated DS gain over seeds")
    p.add_argument("floorplan")
    p.add_argument("--links", type=_positive_int, default=100_000)
    p.add_argument("--seeds", type=_seed_list, default=list(range(20)))

    p = sub.add_parser("sweep", parents=[common], help="evaluate a parametric family of layouts")
    p.add_argument("--spec", help="sweep spec JSON file (kind, values, base, output)")
    p.add_argument("--kind", choices=SWEEP_KINDS)
    p.add_argument("--values", type=_float_list)
    for name in ("rows", "cols"):
        p.add_argument(f"--{name}", type=_positive_int)
    for name in ("room-area", "room-diagonal", "aspect-ratio", "floor-x", "floor-y", "room-w", "room-h",
                 "tx-height", "rx-height"):
        p.add_argument(f"--{name}", type=_positive_float)
    p.add_argument("--type", dest="room_type")

    gen = sub.add_parser("generate", help="write a generated floorplan as JSON")
    gsub = gen.add_subparsers(dest="layout", required=True, parser_class=_Parser)
    g = gsub.add_parser("grid", parents=[common])
    g.add_argument("--rows", type=_positive_int, required=True)
    g.add_argument("--cols", type=_positive_int, required=True)
    g.add_argument("--room-w", type=_positive_float, required=True)
    g.add_argument("--room-h", type=_positive_float, required=True)
    g.add_argument("--type", dest="room_type", default=OFFICE)
    g.add_argument("--tx-height", type=_positive_float, default=4.0)
    g.add_argument("--rx-height", type=_positive_float, default=3.0)
    g = gsub.add_parser("winner-a1", parents=[common])
    g.add_argument("--tx-height", type=_positive_float, default=4.0)
    g.add_argument("--rx-height", type=_positive_float, default=3.0)
    return parser


def _params(args):
    return load_params(args.params) if args.params else default_params()


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def cmd_evaluate(args) -> int:
    p = _params(args)
    fp = load_floorplan(args.floorplan, p)
    report = ds_gain(fp, p, QuadratureSpec(rel_tol=args.tolerance),
                     reliability_mode=args.reliability_mode, threads=args.threads)
    _emit(args, report.to_csv() if args.format == "csv" else report.to_json() + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    p = _params(args)
    fp = load_floorplan(args.floorplan, p)
    if args.tau_cdf and args.at_distance is None:
        raise _UsageError("--tau-cdf requires --at-distance")
    report, batch = simulate(fp, p, args.links, args.seed, threads=args.threads)
    if args.emit_samples:
        with open(args.emit_samples, "w", encoding="utf-8", newline="") as fh:
            batch.write_csv(fh)
    if args.distance_pdf:
        x, dens = empirical_distance_pdf(batch, args.bin_width)
        with open(args.distance_pdf, "w", encoding="utf-8", newline="") as fh:
            write_xy_csv(fh, x, dens, ("d_m", "density"))
    if args.tau_cdf:
        if args.conditioned:
            cond = sample_at_distance(fp, p, args.at_distance, args.links, args.seed, threads=args.threads)
            tau, cdf = empirical_tau_cdf(cond, args.at_distance, 1e-9 * max(1.0, args.at_distance))
        else:
            tau, cdf = empirical_tau_cdf(batch, args.at_distance, args.window)
        with open(args.tau_cdf, "w", encoding="utf-8", newline="") as fh:
            write_xy_csv(fh, tau, cdf, ("tau_ns", "cdf"))
    if args.format == "csv":
        d = report.to_dict()
        _emit(args, _csv_text(list(d), [[_fmt(v) if k not in ("n_links", "seed") else v for k, v in d.items()]]))
    else:
        _emit(args, report.to_json() + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    p = _params(args)
    fp = load_floorplan(args.floorplan, p)
    analytic = ds_gain(fp, p, QuadratureSpec(rel_tol=args.tolerance), threads=args.threads).ds_gain
    rows = []
    diffs = []
    for s in args.seeds:
        rep, _ = simulate(fp, p, args.links, s, threads=args.threads)
        diff = rep.ds_gain_sim - analytic
        diffs.append(diff)
        rows.append([s, analytic, rep.ds_gain_sim, diff, rep.se_ds_gain, diff / rep.se_ds_gain])
    mean_diff = math.fsum(diffs) / len(diffs)
    mean_sim = math.fsum(r[2] for r in rows) / len(rows)
    header = ["seed", "analytic_ds_gain_ns", "simulated_ds_gain_ns", "difference_ns", "se_ns", "z"]
    if args.format == "json":
        doc = {"rows": [dict(zip(header, r)) for r in rows],
               "summary": {"analytic_ds_gain_ns": analytic, "mean_simulated_ds_gain_ns": mean_sim,
                           "mean_difference_ns": mean_diff}}
        _emit(args, json.dumps(doc, indent=2) + "\n")
    else:
        body = [[r[0], *(_fmt(v) for v in r[1:])] for r in rows]
        body.append(["mean", _fmt(analytic), _fmt(mean_sim), _fmt(mean_diff), "", ""])
        _emit(args, _csv_text(header, body))
    return EXIT_OK


_SWEEP_FLAGS = {
    "rows": "rows", "cols": "cols", "room_area": "room_area", "room_diagonal": "room_diagonal",
    "aspect_ratio": "aspect_ratio", "floor_x": "floor_x", "floor_y": "floor_y", "room_w": "room_w",
    "room_h": "room_h", "tx_height": "tx_height", "rx_height": "rx_height", "room_type": "room_type",
}


def cmd_sweep(args) -> int:
    p = _params(args)
    if args.spec:
        spec = load_sweep_spec(args.spec)
    else:
        if not args.kind or not args.values:
            raise _UsageError("sweep needs --spec or both --kind and --values")
        base = {key: getattr(args, attr) for attr, key in _SWEEP_FLAGS.items() if getattr(args, attr) is not None}
        spec = SweepSpec(args.kind, tuple(args.values), base)
    if spec.output and not args.output:
        args.output = spec.output
    rows = run_sweep(spec, p, QuadratureSpec(rel_tol=args.tolerance), threads=args.threads)
    header = [spec.kind, "ds_gain_ns", "reliability_ns"]
    if args.format == "json":
        _emit(args, json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n")
    else:
        _emit(args, _csv_text(header, [[_fmt(v) for v in r] for r in rows]))
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.layout == "grid":
        fp = generate_grid(args.rows, args.cols, args.room_w, args.room_h, args.room_type,
                           args.tx_height, args.rx_height)
        p = _params(args)
        if not p.has_type(fp.rooms[0].room_type):
            raise ParamError(f"room type {args.room_type!r} has no rows in the parameter table")
    else:
        fp = generate_winner_a1(args.tx_height, args.rx_height)
    _emit(args, dump_floorplan(fp) + "\n")
    return EXIT_OK


COMMANDS = {
    "evaluate": cmd_evaluate,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "generate": cmd_generate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dsgain: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, InsufficientSamplesError) as exc:
        print(f"dsgain: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DsGainError as exc:
        print(f"dsgain: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"dsgain: cannot access file: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
