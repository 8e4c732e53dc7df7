"""Command line entry point.

Exit codes: 0 success, 1 violation or counter-example found, 2 run stuck or
closed on both halves, 3 usage or I/O error, 4 prover aborted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .collatz import default_threads, descent_analysis, verify_range
from .engine import (
    Decision,
    TerminationKind,
    TraceFormatError,
    candidate_from_trace,
    classify_trace,
    density,
    read_trace,
    run_dichotomy,
    run_finite,
    write_trace,
)
from .oracle import cross_check
from .props import exact_prover, parse_proposition, scripted_prover
from .residue import ResidueClass

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_STUCK = 2
EXIT_USAGE = 3
EXIT_ABORTED = 4


class UsageError(Exception):
    pass


def parse_script(text: str) -> list[Decision]:
    """``even,odd,odd`` with optional repetition, e.g. ``even,odd*31``."""
    out: list[Decision] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        word, _, times = token.partition("*")
        if word not in ("even", "odd"):
            raise UsageError(f"scripted decisions must be 'even' or 'odd', got {word!r}")
        if times and not times.isdigit():
            raise UsageError(f"bad repetition count in {token!r}")
        out.extend([Decision(word)] * (int(times) if times else 1))
    if not out:
        raise UsageError("empty decision script")
    return out


def parse_class(text: str) -> ResidueClass:
    k, sep, r = text.partition(":")
    if not sep or not k.isdigit() or not r.isdigit():
        raise UsageError(f"initial class must be K:R, got {text!r}")
    try:
        return ResidueClass(int(k), int(r))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_run(args: argparse.Namespace) -> int:
    initial = parse_class(args.initial)
    P = None
    if args.prover == "exact":
        P = _proposition(args.prop)
        if P.holds_on_class is None:
            raise UsageError(f"{P.name} has no class-level decision; use a scripted prover")
        prover = exact_prover(P)
        steps = args.steps or 32
    elif args.prover.startswith("scripted:"):
        script = parse_script(args.prover[len("scripted:"):])
        prover = scripted_prover(script)
        steps = args.steps or len(script)
        if args.prop:
            P = _proposition(args.prop)
    else:
        raise UsageError(f"unknown prover {args.prover!r}")

    if args.finite_bound is not None:
        trace, _ = run_finite(prover, args.finite_bound, initial)
    else:
        trace = run_dichotomy(prover, initial, steps)
    try:
        write_trace(trace, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    cls = classify_trace(trace, args.tail_window)
    print("decisions:", " ".join(d.value for d in trace.decisions) or "-")
    print("termination:", f"{trace.termination.kind.value} at step {trace.termination.step}")
    print("candidate:", candidate_from_trace(trace))
    print("density:", density(trace))
    print("classification:", cls.describe())
    print("caveat:", cls.caveat)
    print("trace:", args.out)

    status = EXIT_OK
    if args.oracle_bound and P is not None:
        rep = cross_check(trace, P, args.oracle_bound)
        print("oracle:", "ok" if rep.ok else "VIOLATIONS")
        if not rep.ok:
            print(json.dumps(rep.to_json(), indent=2))
            status = EXIT_VIOLATION
    kind = trace.termination.kind
    if kind in (TerminationKind.STUCK, TerminationKind.CLOSED_BOTH):
        return EXIT_STUCK
    if kind is TerminationKind.ABORTED:
        print("prover aborted:", trace.termination.detail, file=sys.stderr)
        return EXIT_ABORTED
    return status


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        trace = read_trace(args.trace)
    except OSError as exc:
        print(f"error: cannot read {args.trace}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TraceFormatError as exc:
        print(json.dumps({"ok": False, "structural": [str(exc)]}, indent=2))
        return EXIT_VIOLATION
    P = _proposition(args.prop) if args.prop else None
    rep = cross_check(trace, P, args.bound)
    print(json.dumps(rep.to_json(), indent=2))
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_candidate(args: argparse.Namespace) -> int:
    try:
        trace = read_trace(args.trace)
    except OSError as exc:
        print(f"error: cannot read {args.trace}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TraceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    print(candidate_from_trace(trace))
    return EXIT_OK


def cmd_collatz_verify(args: argparse.Namespace) -> int:
    if args.lo < 0 or args.hi <= args.lo:
        raise UsageError("need 0 <= --from < --to")
    report = verify_range(args.lo, args.hi, args.budget, args.threads)
    print(json.dumps(report.to_json(), indent=2))
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_collatz_descent(args: argparse.Namespace) -> int:
    if not 0 <= args.k <= 24:
        raise UsageError("-k must be in [0, 24]")
    cert = descent_analysis(args.k, args.step_bound)
    if args.json:
        print(json.dumps(cert.to_json(), indent=2))
    else:
        for r in range(len(cert.entries)):
            print(f"{r}:{cert.status(r)}")
        print("certified fraction:", cert.certified_fraction)
    return EXIT_OK


def _proposition(spec: str | None):
    if not spec:
        raise UsageError("--prop is required")
    try:
        return parse_proposition(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dichotomy", description="Dichotomy proofs over residue classes mod 2^k.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a dichotomy proof and write its trace")
    run.add_argument("--prop", help="proposition spec, e.g. single-hole:13")
    run.add_argument("--prover", default="exact", help="'exact' or 'scripted:even,odd,...'")
    run.add_argument("--steps", type=int, default=None, help="max steps (default 32, or script length)")
    run.add_argument("--initial", default="0:0", help="initial class K:R (default: all naturals)")
    run.add_argument("--finite-bound", type=int, default=None, help="run on [0, N) until one number is left")
    run.add_argument("--out", default="trace.json", help="trace file to write")
    run.add_argument("--tail-window", type=int, default=16)
    run.add_argument("--oracle-bound", type=int, default=None, help="cross-check the run below this bound")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="cross-check a trace file against brute force")
    ver.add_argument("trace")
    ver.add_argument("--prop", default=None)
    ver.add_argument("--bound", type=int, default=1 << 16)
    ver.set_defaults(func=cmd_verify)

    cand = sub.add_parser("candidate", help="print the candidate counter-example of a trace")
    cand.add_argument("trace")
    cand.set_defaults(func=cmd_candidate)

    col = sub.add_parser("collatz", help="Collatz range verification and descent tables")
    csub = col.add_subparsers(dest="collatz_command", required=True)
    cv = csub.add_parser("verify")
    cv.add_argument("--from", dest="lo", type=int, default=1)
    cv.add_argument("--to", dest="hi", type=int, required=True)
    cv.add_argument("--budget", type=int, default=10_000)
    cv.add_argument("--threads", type=int, default=None, help="worker processes (env DICHOTOMY_THREADS)")
    cv.set_defaults(func=cmd_collatz_verify)
    cd = csub.add_parser("descent")
    cd.add_argument("-k", type=int, required=True)
    cd.add_argument("--step-bound", type=int, default=64)
    cd.add_argument("--json", action="store_true")
    cd.set_defaults(func=cmd_collatz_descent)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "threads", 0) is None:
        args.threads = default_threads()
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
