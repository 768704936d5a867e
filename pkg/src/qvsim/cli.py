"""Command-line entry point.

    qvsim run <file> --mode direct|adqc|mincontrol [--compare]
              [--seed N] [--force a,b,c] [--spec-seed N] [--mc-spec NAME]
              [--out file.json]

Exit codes: 0 success, 2 circuit parse error or unsupported combination,
3 numerical invariant violation.
"""

from __future__ import annotations

import argparse
import sys

from .circuits import CircuitParseError, parse_circuit
from .core import NumericalInvariantError
from .runner import MODES, document_to_json, run_mode


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qvsim")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a circuit file")
    run_p.add_argument("file", help="circuit text file")
    run_p.add_argument("--mode", choices=MODES, default="direct")
    run_p.add_argument("--compare", action="store_true",
                       help="also run the direct oracle and report fidelity")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the file's RNG seed")
    run_p.add_argument("--force", default=None,
                       help="comma-separated forced outcomes (overrides file)")
    run_p.add_argument("--spec-seed", type=int, default=None,
                       help="seed for the minimal-control parameter draw")
    run_p.add_argument("--mc-spec", choices=("universal", "cz"),
                       default="universal",
                       help="minimal-control parameter family")
    run_p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        circ = parse_circuit(text)
    except CircuitParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2

    forced = None
    if args.force is not None:
        try:
            forced = tuple(int(v) for v in args.force.split(","))
        except ValueError:
            print("error: --force expects integers like 2,0,1", file=sys.stderr)
            return 2

    try:
        doc = run_mode(circ, args.mode, compare=args.compare, seed=args.seed,
                       forced=forced, spec_seed=args.spec_seed,
                       mc_spec=args.mc_spec)
    except NumericalInvariantError as exc:
        print(f"numerical invariant violation: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    payload = document_to_json(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
