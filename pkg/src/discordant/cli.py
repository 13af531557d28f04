"""Command-line front end.

Subcommands::

    discordant discord FILE [--side A|B] [--json | --text]
    discordant sweep FIGURE [KEY=VALUE ...] [--out PATH]
    discordant verify [--n N] [--seed S] [--out PATH]

Exit codes: 0 success, 1 verification mismatch, 2 invalid input, 3 input is
not an X-state.
"""
import argparse
import functools
import json
import sys

from . import __version__
from .ellipsoid import separability
from .errors import DiscordantError, ShapeError, ValidationError
from .oracle import ORACLE_TOL, verify_state, write_records
from .optimizer import discord
from .parallel import ordered_map
from .sampling import random_x_muellers
from .stateio import load_mueller
from .sweeps import FIGURES, run_sweep, write_csv

EXIT_OK, EXIT_MISMATCH, EXIT_INVALID, EXIT_NOT_X = 0, 1, 2, 3


# --------------------------------------------------------------------------
# discord
# --------------------------------------------------------------------------

def report_dict(rep):
    """JSON-ready view of a :class:`~discordant.optimizer.DiscordReport`."""
    s = rep.scheme
    out = {
        "side": rep.side,
        "S_A": rep.S_A, "S_B": rep.S_B, "S_AB": rep.S_AB,
        "I": rep.I, "C": rep.C, "D": rep.D,
        "SA_min": rep.SA_min,
        "EoF_complement": rep.EoF_complement,
        "scheme": {
            "kind": str(s.kind),
            "z0": s.z0,
            "theta": s.theta,
            "weights": [float(w) for w in s.weights],
            "elements": [[float(v) for v in el] for el in s.elements],
        },
        "ellipsoid": None,
        "separability": None,
    }
    if rep.ellipsoid is not None:
        verdict = separability(rep.ellipsoid)
        out["ellipsoid"] = rep.ellipsoid.as_dict()
        out["separability"] = {"separable": verdict.separable, "margin": verdict.margin}
    else:
        # measured qubit pure: product state
        out["separability"] = {"separable": True, "margin": None}
    return out


def _text(d):
    lines = [f"side measured   {d['side']}"]
    for key in ("S_A", "S_B", "S_AB", "I", "C", "D", "SA_min", "EoF_complement"):
        lines.append(f"{key:<15} {d[key]:.10f}")
    s = d["scheme"]
    lines.append(f"scheme          {s['kind']}")
    if s["z0"] is not None:
        lines.append(f"  z0            {s['z0']:.10f}")
    if s["theta"] is not None:
        lines.append(f"  theta         {s['theta']:.10f}")
    lines.append("  weights       " + ", ".join(f"{w:.10f}" for w in s["weights"]))
    e = d["ellipsoid"]
    if e is None:
        lines.append("ellipsoid       none (measured qubit in a pure state)")
    else:
        lines.append("ellipsoid       " + ", ".join(f"{k}={v:.10g}" for k, v in e.items()))
    sep = d["separability"]
    lines.append(f"separable       {str(sep['separable']).lower()}")
    return "\n".join(lines)


def cmd_discord(args):
    m = load_mueller(args.file)
    rep = discord(m, side=args.side)
    d = report_dict(rep)
    if args.format == "text":
        print(_text(d))
    else:
        print(json.dumps(d, indent=2))
    return EXIT_OK


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------

def _parse_value(raw):
    if "," in raw:
        return tuple(float(v) for v in raw.split(",") if v.strip())
    try:
        return int(raw)
    except ValueError:
        return float(raw)


def parse_params(pairs):
    """``["a_z=0.5", "ax=0.6,0.7"]`` -> ``{"a_z": 0.5, "ax": (0.6, 0.7)}``."""
    out = {}
    for item in pairs:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ValidationError("sweep_params", f"parameter {item!r} is not KEY=VALUE")
        if key == "state":
            out["m"] = load_mueller(raw)
            continue
        try:
            out[key] = _parse_value(raw)
        except ValueError:
            raise ValidationError("sweep_params", f"parameter {item!r}: not a number") from None
    return out


def cmd_sweep(args):
    table = run_sweep(args.figure, **parse_params(args.params))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(table, fh)
        print(f"{args.figure}: {len(table.rows)} rows -> {args.out}", file=sys.stderr)
    else:
        write_csv(table, sys.stdout)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

def cmd_verify(args):
    if args.n < 0:
        raise ValidationError("n", f"--n must be non-negative, got {args.n}")
    states = random_x_muellers(args.n, seed=args.seed)
    fn = functools.partial(verify_state, restarts=args.restarts, tol=args.tol)
    records = ordered_map(fn, states)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_records(records, fh)
    n_ok = sum(r.agrees for r in records)
    worst = max((abs(r.deviation) for r in records), default=0.0)
    gain = max((r.k4_gain for r in records), default=0.0)
    tilt = max((r.vn_out_of_plane for r in records), default=0.0)
    print(f"agreement {n_ok}/{len(records)}")
    print(f"worst deviation {worst:.3e}")
    print(f"largest 4-element gain {gain:.3e}")
    print(f"largest out-of-plane component {tilt:.3e}")
    for r in records:
        if not r.agrees:
            print(r.failure_report())
    return EXIT_OK if n_ok == len(records) else EXIT_MISMATCH


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="discordant", description="Quantum discord of two-qubit X-states.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("discord", help="discord report for a state file")
    d.add_argument("file", help="JSON state file (rho, mueller, xparams, ellipsoid or family)")
    d.add_argument("--side", choices=("A", "B"), default="B", help="measured subsystem")
    fmt = d.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--text", dest="format", action="store_const", const="text")
    d.set_defaults(format="json", func=cmd_discord)

    s = sub.add_parser("sweep", help="figure sweeps as CSV")
    s.add_argument("figure", choices=tuple(FIGURES), metavar="FIGURE",
                   help="one of: " + ", ".join(FIGURES))
    s.add_argument("params", nargs="*", metavar="KEY=VALUE",
                   help="override sweep defaults; lists are comma-separated; state=FILE for vn-theta")
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="compare the closed form with the brute-force oracle")
    v.add_argument("--n", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="CSV path for per-state records")
    v.add_argument("--restarts", type=int, default=20)
    v.add_argument("--tol", type=float, default=ORACLE_TOL)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ShapeError as exc:
        print(f"error: not an X-state: {exc}", file=sys.stderr)
        return EXIT_NOT_X
    except ValidationError as exc:
        print(f"error: invalid input [{exc.invariant}]: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DiscordantError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
