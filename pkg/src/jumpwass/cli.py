"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration, 3 exact enumeration too
large, 4 numerical failure.
"""

import argparse
import json
import sys as _sys

import numpy as np

from .config import load_system
from .exceptions import ComponentExplosion, ConfigError, NotPSD, NumericalFailure
from .jump_process import occupation_sequence
from .model_builder import PRESETS, load_preset
from .monte_carlo import SimulationConfig, simulate
from .propagation import DEFAULT_COMPONENT_LIMIT, analyze, exact_w_series, feasible_horizon

EXIT_OK, EXIT_CONFIG, EXIT_EXPLOSION, EXIT_NUMERICAL = 0, 2, 3, 4


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_table(columns, rows, fmt, out, meta=None):
    if fmt == "csv":
        out.write(",".join(columns) + "\n")
        for row in rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")
    else:
        doc = dict(meta or {})
        doc["columns"] = list(columns)
        doc["rows"] = [[int(v) if isinstance(v, (int, np.integer)) else float(v) for v in row] for row in rows]
        json.dump(doc, out, indent=1)
        out.write("\n")


def _system(args):
    if args.preset:
        try:
            return load_preset(args.preset)
        except KeyError as exc:
            raise ConfigError("--preset", exc.args[0]) from None
    return load_system(args.config)


def _pi_columns(m):
    return [f"pi_{j + 1}" for j in range(m)]


def cmd_analyze(args, sys, rho0):
    traj = analyze(sys, rho0, args.horizon)
    cols = ["k", "w_hat"] + _pi_columns(sys.n_modes)
    rows = [[k, traj.w_hat[k], *traj.pi[k]] for k in range(len(traj))]
    return cols, rows, {"engine": "split-merge"}


def cmd_exact(args, sys, rho0):
    w = exact_w_series(sys, rho0, args.horizon, args.component_limit)
    pis = occupation_sequence(sys.jump, args.horizon, include_seed=True)
    cols = ["k", "w"] + _pi_columns(sys.n_modes)
    return cols, [[k, w[k], *pis[k]] for k in range(w.size)], {"engine": "exact"}


def cmd_montecarlo(args, sys, rho0):
    cfg = SimulationConfig(args.samples, args.horizon, args.seed, args.semantics)
    est = simulate(sys, rho0, cfg, n_jobs=args.jobs)
    rows = []
    for e in est:
        w = np.sqrt(e.mean_sq_norm)
        # Delta method: standard error of sqrt(E|x|^2) from that of E|x|^2.
        se = e.std_error / (2.0 * w) if w > 0 else 0.0
        rows.append([e.k, w, se])
    meta = {"engine": "montecarlo", "samples": args.samples, "seed": args.seed, "semantics": args.semantics}
    return ["k", "w_emp", "std_error"], rows, meta


def cmd_compare(args, sys, rho0):
    k = feasible_horizon(sys, rho0, args.horizon, args.component_limit)
    if k < 0:
        raise ComponentExplosion(rho0.n_components, args.component_limit)
    if k < args.horizon:
        print(f"horizon capped to {k} (component limit {args.component_limit})", file=_sys.stderr)
    w_hat = analyze(sys, rho0, k).w_hat
    w = exact_w_series(sys, rho0, k, args.component_limit)
    rel = np.abs(w_hat - w) / np.maximum(1.0, w)
    print(f"max_rel_err={_fmt(rel.max())} horizon={k}", file=_sys.stderr)
    rows = [[i, w_hat[i], w[i], rel[i]] for i in range(k + 1)]
    return ["k", "w_hat", "w_exact", "rel_err"], rows, {"engine": "compare", "horizon": k, "max_rel_err": float(rel.max())}


COMMANDS = {
    "analyze": cmd_analyze,
    "exact": cmd_exact,
    "montecarlo": cmd_montecarlo,
    "compare": cmd_compare,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="jumpwass",
        description="Wasserstein performance analysis of stochastic jump linear systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("presets", help="list built-in systems")
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--preset", metavar="NAME")
        src.add_argument("--config", metavar="PATH")
        p.add_argument("--horizon", type=int, default=100, metavar="K")
        p.add_argument("--output", metavar="PATH")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name in ("exact", "compare"):
            p.add_argument("--component-limit", type=int, default=DEFAULT_COMPONENT_LIMIT, metavar="L")
        if name == "montecarlo":
            p.add_argument("--samples", type=int, default=100_000, metavar="N")
            p.add_argument("--seed", type=int, required=True, metavar="S")
            p.add_argument("--semantics", choices=("independent", "markov-path"), default="independent")
            p.add_argument("--jobs", type=int, default=1, metavar="J")
    return parser


def run(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name in PRESETS:
            print(name)
        return EXIT_OK
    if args.horizon < 0:
        print("error: --horizon must be >= 0", file=_sys.stderr)
        return EXIT_CONFIG
    try:
        sys, rho0 = _system(args)
        cols, rows, meta = COMMANDS[args.command](args, sys, rho0)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except ComponentExplosion as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_EXPLOSION
    except (NotPSD, NumericalFailure) as exc:
        print(f"numerical failure: {exc}", file=_sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    meta["command"] = args.command
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_table(cols, rows, args.format, fh, meta)
    else:
        write_table(cols, rows, args.format, _sys.stdout, meta)
    return EXIT_OK


def main():
    _sys.exit(run())


if __name__ == "__main__":
    main()
