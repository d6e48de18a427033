"""Command-line surface: compute, figure, sweep.

Exit codes: 0 success, 2 validation/domain error, 3 numeric-integrity error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import CatalogSpec
from .errors import (
    ConditioningError,
    ConvergenceError,
    DomainError,
    GridCoverageError,
    NumericIntegrityError,
    StateValidationError,
    SynthesisError,
)
from .figures import FIGURE_IDS, build_figure, parse_range, sweep_table, write_table
from .measure import non_gaussianity
from .statefile import load_state

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nongauss",
        description="Non-Gaussianity of bosonic states in a truncated Fock basis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    comp = sub.add_parser("compute", help="non-Gaussianity of one state")
    comp.add_argument("--family", choices=["fock", "coherent", "squeezed", "thermal",
                                           "cat", "bell-phi", "bell-psi", "random"])
    comp.add_argument("--state", help="path to a JSON state file")
    comp.add_argument("--p", type=int, default=0)
    comp.add_argument("--alpha", type=float, default=1.0)
    comp.add_argument("--phi", type=float, default=0.0)
    comp.add_argument("--r", type=float, default=0.5)
    comp.add_argument("--n-t", type=float, default=1.0)
    comp.add_argument("--d", type=int, default=2)
    comp.add_argument("--cutoff", type=int)
    comp.add_argument("--seed", type=int, default=0)
    comp.add_argument("--format", choices=["text", "json", "csv"], default="text")

    fig = sub.add_parser("figure", help="emit a figure dataset (CSV + PNG)")
    fig.add_argument("id", choices=list(FIGURE_IDS))
    fig.add_argument("--out", default="figures", help="output directory")
    fig.add_argument("--samples", type=int, default=1000)
    fig.add_argument("--seed", type=int, default=0)
    fig.add_argument("--parallelism", type=int, default=1)
    fig.add_argument("--no-plot", action="store_true", help="skip PNG rendering")

    sw = sub.add_parser("sweep", help="parameter sweep to CSV")
    sw.add_argument("--family", required=True, choices=["loss", "ips", "cat"])
    sw.add_argument("--p", type=int, default=1)
    sw.add_argument("--eta-range", default="")
    sw.add_argument("--t-range", default="")
    sw.add_argument("--phi-range", default="")
    sw.add_argument("--efficiency", type=float, default=0.8)
    sw.add_argument("--r", type=float, default=0.5)
    sw.add_argument("--alpha", type=float, default=0.5)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--parallelism", type=int, default=1)
    sw.add_argument("--out", required=True)
    return parser


def _cmd_compute(args) -> int:
    if bool(args.family) == bool(args.state):
        print("compute needs exactly one of --family or --state", file=sys.stderr)
        return EXIT_VALIDATION
    if args.state:
        state, _meta = load_state(args.state)
    else:
        spec = CatalogSpec(family=args.family, p=args.p, alpha=args.alpha,
                           phi=args.phi, r=args.r, n_t=args.n_t, d=args.d,
                           seed=args.seed, cutoff=args.cutoff)
        state = spec.build()
    res = non_gaussianity(state)
    record = {
        "delta": res.delta,
        "purity_rho": res.purity_rho,
        "purity_tau": res.purity_tau,
        "overlap": res.overlap,
        "cutoffs": list(res.cutoffs),
        "flags": list(res.flags),
    }
    if args.format == "json":
        print(json.dumps(record, indent=1))
    elif args.format == "csv":
        keys = ["delta", "purity_rho", "purity_tau", "overlap", "cutoffs", "flags"]
        print(",".join(keys))
        print(",".join(
            f"{record[k]:.9g}" if isinstance(record[k], float)
            else ";".join(str(v) for v in record[k]) or "ok"
            for k in keys))
    else:
        for key, value in record.items():
            print(f"{key}: {value}")
    return EXIT_OK


def _cmd_figure(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tables = build_figure(args.id, samples=args.samples, seed=args.seed,
                          parallelism=args.parallelism)
    paths = []
    for table in tables:
        path = out_dir / f"{table.name}.csv"
        write_table(table, path)
        paths.append(path)
    if not args.no_plot:
        from .plotting import render_figure

        png = out_dir / f"{args.id}.png"
        render_figure(args.id, tables, png)
        paths.append(png)
    for p in paths:
        print(p)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    table = sweep_table(
        args.family,
        p=args.p,
        eta_values=parse_range(args.eta_range) if args.eta_range else (),
        t_values=parse_range(args.t_range) if args.t_range else (),
        phi_values=parse_range(args.phi_range) if args.phi_range else (),
        efficiency=args.efficiency,
        r=args.r,
        alpha=args.alpha,
        seed=args.seed,
        parallelism=args.parallelism,
    )
    write_table(table, args.out)
    print(args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compute":
            code = _cmd_compute(args)
        elif args.command == "figure":
            code = _cmd_figure(args)
        else:
            code = _cmd_sweep(args)
    except (StateValidationError, DomainError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        code = EXIT_VALIDATION
    except (NumericIntegrityError, SynthesisError, ConvergenceError,
            ConditioningError, GridCoverageError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        code = EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        code = EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
