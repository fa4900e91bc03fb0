"""Command-line runner.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O failure.
"""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .analysis import bell_product_witness, match_up_to_phase_perm, search_cluster_angles_n2
from .bases import AngleSchedule
from .measurement import all_labels, labels_to_bits, validate_labels
from .protocols import (
    UndecodableError,
    dense_decode,
    dense_gram_check,
    dense_round_trip,
    teleport_exhaustive,
    teleport_once,
)
from .qcore import PROTOCOL_TOL, QubitCapExceeded, check_cap, num_qubits, random_state
from .resource import (
    ResourceState,
    closed_form_block,
    cluster6_reference,
    cluster6_schedule,
    computational_resource,
    reduced_last_pair,
    resource_from_schedules,
)
from .serialization import load_schedules, load_state

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TELEPORT_CSV = ["trial", "outcome", "bits", "probability", "fidelity"]
DENSE_CSV = ["message", "bits", "decoded", "ok"]


class UsageError(Exception):
    pass


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Evaluate a radian expression such as ``0.25``, ``pi/8`` or ``3*pi/4``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported angle expression: {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"bad angle expression {text!r}: {exc}") from exc
    if not math.isfinite(value):
        raise ValueError(f"angle {text!r} is not finite")
    return value


def parse_angles(text: str) -> list[float]:
    return [parse_angle(t) for t in text.split(",") if t.strip()]


def _add_resource_args(p: argparse.ArgumentParser, need_n: bool = True) -> None:
    p.add_argument("--n", type=int, required=need_n, help="payload qubit count")
    src = p.add_argument_group("resource bases")
    src.add_argument("--schedule", help="JSON schedule file (single schedule or 'a'/'b' keys)")
    src.add_argument("--schedule-a", help="JSON schedule file for the A side")
    src.add_argument("--schedule-b", help="JSON schedule file for the B side")
    src.add_argument("--angles-a", help="inline A angles, comma-separated radians (all levels or last level)")
    src.add_argument("--angles-b", help="inline B angles, comma-separated radians")
    src.add_argument("--computational", action="store_true", help="computational bases on both sides")
    src.add_argument("--cluster6", action="store_true", help="six-qubit cluster constraints (n=3)")
    src.add_argument("--cluster-thetas", default="0,0,0", help="free angles theta1,theta2,theta3 for --cluster6")
    src.add_argument("--random-schedule", action="store_true", help="draw schedules from --seed")
    src.add_argument("--uniform-signs", action="store_true", help="use (-sin, cos) for every A-side pair")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def resolve_resource(args, rng: np.random.Generator) -> ResourceState:
    n = args.n
    if n < 1:
        raise UsageError("--n must be >= 1")
    try:
        check_cap(3 * n)
    except QubitCapExceeded as exc:
        raise UsageError(str(exc)) from exc
    if args.computational:
        return computational_resource(n)
    if args.cluster6:
        if n != 3:
            raise UsageError("--cluster6 requires --n 3")
        thetas = parse_angles(args.cluster_thetas)
        if len(thetas) != 3:
            raise UsageError("--cluster-thetas needs three angles")
        return resource_from_schedules(*cluster6_schedule(*thetas), uniform_signs=args.uniform_signs)
    sa = sb = None
    if args.schedule:
        sa, sb = load_schedules(args.schedule)
    if args.schedule_a:
        sa = load_schedules(args.schedule_a)[0]
    if args.schedule_b:
        sb = load_schedules(args.schedule_b)[1]
    # inline angles win over files
    if args.angles_a:
        sa = AngleSchedule.from_flat(n, parse_angles(args.angles_a))
    if args.angles_b:
        sb = AngleSchedule.from_flat(n, parse_angles(args.angles_b))
    if args.random_schedule:
        sa = sa or AngleSchedule.random(n, rng)
        sb = sb or AngleSchedule.random(n, rng)
    if sa is None or sb is None:
        raise UsageError(
            "no bases given: use --computational, --cluster6, --random-schedule, or schedules for both sides"
        )
    for side, s in (("A", sa), ("B", sb)):
        if s.n != n:
            raise UsageError(f"{side} schedule has n={s.n}, expected {n}")
    return resource_from_schedules(sa, sb, uniform_signs=args.uniform_signs)


def _emit(args, rows: list[dict], csv_fields: list[str], payload) -> str | None:
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=csv_fields, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        return None
    return text


def _print_report(text: str | None, summary: str) -> None:
    if text is None:
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


def cmd_resource(args) -> int:
    r = resolve_resource(args, np.random.default_rng(args.seed))
    text = json.dumps(r.to_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_teleport(args) -> int:
    rng = np.random.default_rng(args.seed)
    r = resolve_resource(args, rng)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    fixed = None
    if args.state:
        fixed = load_state(args.state)
        if num_qubits(fixed) != args.n:
            raise UsageError(f"state file has {num_qubits(fixed)} qubits, expected {args.n}")
        norm = float(np.linalg.norm(fixed))
        if abs(norm - 1) > 1e-12:
            raise UsageError(f"state file is not normalized (norm {norm!r})")
    records = []
    for trial in range(args.trials):
        phi = fixed if fixed is not None else random_state(args.n, rng)
        if args.exhaustive:
            recs = teleport_exhaustive(phi, r)
        else:
            recs = [teleport_once(phi, r, int(rng.integers(2**63)))]
        records += [(trial, rec) for rec in recs]
    min_fid = min(rec.fidelity for _, rec in records)
    max_dp = max(abs(rec.probability - 4.0**-args.n) for _, rec in records)
    rows = [
        {"trial": t, "outcome": " ".join(map(str, rec.outcome)), "bits": rec.bits,
         "probability": repr(rec.probability), "fidelity": repr(rec.fidelity)}
        for t, rec in records
    ]
    payload = [{"trial": t, **rec.to_dict()} for t, rec in records]
    text = _emit(args, rows, TELEPORT_CSV, payload)
    ok = min_fid >= 1 - PROTOCOL_TOL
    _print_report(
        text,
        f"teleport n={args.n}: {len(records)} records, min fidelity {min_fid:.16f}, "
        f"max |p - 4^-n| {max_dp:.3e}, {'OK' if ok else 'FAILED'}",
    )
    return EXIT_OK if ok else EXIT_FAIL


def _parse_messages(text: str, n: int) -> list[tuple[int, ...]]:
    msgs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if set(chunk) <= {"0", "1"} and len(chunk) == 2 * n:
            msgs.append(validate_labels([int(chunk[k : k + 2], 2) for k in range(0, 2 * n, 2)], n))
        else:
            msgs.append(validate_labels([int(x) for x in chunk.split(",")], n))
    return msgs


def cmd_densecode(args) -> int:
    rng = np.random.default_rng(args.seed)
    r = resolve_resource(args, rng)
    if args.encoded:
        state = load_state(args.encoded)
        try:
            decoded = dense_decode(r, state)
        except UndecodableError as exc:
            print(f"undecodable: {exc}", file=sys.stderr)
            return EXIT_FAIL
        print(json.dumps({"decoded": list(decoded), "bits": labels_to_bits(decoded)}))
        return EXIT_OK
    if args.messages:
        messages = _parse_messages(args.messages, args.n)
    elif args.sample:
        labels = all_labels(args.n)
        picks = rng.choice(len(labels), size=min(args.sample, len(labels)), replace=False)
        messages = [labels[i] for i in sorted(picks)]
    else:
        messages = None
    records = dense_round_trip(r, messages)
    gram = dense_gram_check(r)
    n_ok = sum(rec.ok for rec in records)
    rows = [
        {"message": " ".join(map(str, rec.message)), "bits": labels_to_bits(rec.message),
         "decoded": " ".join(map(str, rec.decoded)), "ok": rec.ok}
        for rec in records
    ]
    payload = {
        "records": [rec.to_dict() for rec in records],
        "gram": {"max_offdiag": gram.max_offdiag, "max_diag_deviation": gram.max_diag_deviation,
                 "max_marginal_deviation": gram.max_marginal_deviation},
    }
    text = _emit(args, rows, DENSE_CSV, payload)
    ok = n_ok == len(records) and gram.ok()
    _print_report(
        text,
        f"densecode n={args.n}: {n_ok}/{len(records)} decoded ({2 * args.n} bits each), "
        f"max Gram off-diagonal {gram.max_offdiag:.3e}, {'OK' if ok else 'FAILED'}",
    )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_analyze(args) -> int:
    rng = np.random.default_rng(args.seed)
    report: dict = {}
    ok = True
    has_source = any(
        [args.computational, args.cluster6, args.random_schedule, args.schedule, args.schedule_a,
         args.schedule_b, args.angles_a, args.angles_b]
    )
    if has_source:
        if args.n is None:
            raise UsageError("--n is required when analyzing a resource")
        r = resolve_resource(args, rng)
        rho = reduced_last_pair(r)
        p, verdict = bell_product_witness(r)
        d = 2**r.n
        report["resource"] = {
            "n": r.n,
            "last_pair_purity": p,
            "bell_product_verdict": verdict.value,
            "a_marginal_deviation": float(np.max(np.abs(r.a_marginal() - np.eye(d) / d))),
            "last_pair_block": {"rho_00_00": float(rho[0, 0].real), "rho_00_11": float(rho[0, 3].real)},
        }
        if r.n == 3 and r.schedule_a is not None:
            c_diag, c_off = closed_form_block(r.schedule_a.last_level, r.schedule_b.last_level)
            report["resource"]["closed_form"] = {
                "c_diag": c_diag, "c_off": c_off,
                "max_deviation": float(max(abs(rho[0, 0] - c_diag), abs(rho[0, 3] - c_off))),
            }
        if r.n == 3:
            report["resource"]["cluster6_match"] = match_up_to_phase_perm(r.state, cluster6_reference()).to_dict()
    if args.closed_form:
        worst = 0.0
        for _ in range(args.random_schedules):
            sa, sb = AngleSchedule.random(3, rng), AngleSchedule.random(3, rng)
            rho = reduced_last_pair(resource_from_schedules(sa, sb))
            c_diag, c_off = closed_form_block(sa.last_level, sb.last_level)
            worst = max(worst, float(abs(rho[0, 0] - c_diag)), float(abs(rho[0, 3] - c_off)))
        report["closed_form"] = {"schedules": args.random_schedules, "max_deviation": worst}
        ok &= worst <= 1e-12
    if args.search_cluster_n2:
        res = search_cluster_angles_n2(parse_angle(args.grid), uniform_signs=args.uniform_signs)
        report["cluster4_search"] = {
            "schedule_a": res.schedule_a.to_dict(),
            "schedule_b": res.schedule_b.to_dict(),
            "grid_points": res.evaluated,
            "match": res.report.to_dict(),
        }
        ok &= res.report.matched
    if not report:
        raise UsageError("nothing to analyze: give a resource source, --closed-form, or --search-cluster-n2")
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    try:
        results = acceptance.run_all(only=only, seed=args.seed, n_max=args.n_max)
    except KeyError as exc:
        raise UsageError(f"{exc.args[0]}; known: {', '.join(acceptance.CHECKS)}") from exc
    for res in results:
        print(res.line())
    passed = all(res.passed for res in results)
    payload = {"passed": passed, "criteria": [res.to_dict() for res in results]}
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return EXIT_OK if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="telecluster", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resource", help="build a resource state and write it as JSON")
    _add_resource_args(p)
    p.set_defaults(func=cmd_resource)

    p = sub.add_parser("teleport", help="run teleportation trials")
    _add_resource_args(p)
    p.add_argument("--state", help="input state JSON file")
    p.add_argument("--random-state", action="store_true", help="random input states from --seed (default)")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--exhaustive", action="store_true", help="sweep all 4^n outcomes instead of sampling one")
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("densecode", help="dense-coding round trips")
    _add_resource_args(p)
    p.add_argument("--all", action="store_true", help="all 4^n messages (default)")
    p.add_argument("--messages", help="';'-separated messages, each 'i1,i2,..' or a 2n-bit string")
    p.add_argument("--sample", type=int, help="random subset of this many messages")
    p.add_argument("--encoded", help="decode this state JSON instead of running round trips")
    p.set_defaults(func=cmd_densecode)

    p = sub.add_parser("analyze", help="purity, closed-form block, witnesses, cluster matches")
    _add_resource_args(p, need_n=False)
    p.add_argument("--closed-form", action="store_true", help="check the closed-form block on random n=3 schedules")
    p.add_argument("--random-schedules", type=int, default=100)
    p.add_argument("--search-cluster-n2", action="store_true", help="grid search for the four-qubit cluster")
    p.add_argument("--grid", default="pi/8", help="grid step in radians")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criteria: " + ", ".join(acceptance.CHECKS))
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    p.add_argument("--out", help="write pass/fail JSON here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "state", None) and getattr(args, "random_state", False):
        parser.error("--state and --random-state are mutually exclusive")
    try:
        return args.func(args)
    except (UsageError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
