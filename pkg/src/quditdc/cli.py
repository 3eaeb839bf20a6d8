"""Command-line front end.

Four subcommands cover the workflow:

* ``quditdc validate <stabilizer.json>``      -- structural checks.
* ``quditdc synth <stabilizer.json> ...``     -- build a protocol file.
* ``quditdc verify <protocol.json> ...``      -- recheck a protocol file.
* ``quditdc standard-form <stabilizer.json>`` -- block reduction (prime d).

Exit codes: 0 = success, 1 = a semantic check failed (invalid stabilizer,
no protocol found, labels collide, composite d for standard-form), 2 =
usage problems (bad arguments, malformed files, resource caps).

Environment knobs: ``QUDITDC_SIM_CAP`` bounds the dense-simulation
dimension and ``QUDITDC_SPAN_CAP`` bounds span enumeration during
synthesis.  Identical inputs and flags always produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Any, Sequence

from .densecode import (
    ChainChoices,
    Partition,
    check_bounds,
    protocol_from_free_sets,
    synth_basis_chain,
    synth_column_sets,
    verify_protocol,
)
from .errors import InternalError, ResourceLimitError, UsageError
from .io import (
    _read_json,
    canonical_json,
    load_protocol,
    load_stabilizer,
    save_protocol,
)
from .modring import DEFAULT_ENUM_CAP, RingBasis, is_prime
from .stabilizer import (
    DEFAULT_SIM_CAP,
    optimal_singleton_partition,
    validate,
)


def _env_cap(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise UsageError(f"{name} must be positive, got {value}")
    return value


def _parse_partition(spec: str, n: int) -> Partition:
    """Parse "1,2|3|4,5": groups split by '|', the last one is the receiver."""
    groups = []
    for chunk in spec.split("|"):
        try:
            group = [int(tok) for tok in chunk.split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise UsageError(f"bad partition group {chunk!r}") from exc
        if not group:
            raise UsageError("partition groups must be nonempty")
        groups.append(group)
    if len(groups) < 2:
        raise UsageError(
            "a partition needs at least one sender and the receiver, "
            "e.g. '1,2|3|4,5'"
        )
    return Partition.from_groups(groups[:-1], groups[-1], n)


def _fmt_group(qudits) -> str:
    return "{" + ",".join(str(q) for q in sorted(qudits)) + "}"


def _emit(args: argparse.Namespace, obj: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        sys.stdout.write(canonical_json(obj))
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def _check_choice_keys(obj: dict, allowed: set[str], method: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise UsageError(
            f"choices for {method} accept only {sorted(allowed)}, "
            f"got unknown keys {sorted(unknown)}"
        )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    matrix = load_stabilizer(args.stabilizer)
    sim_cap = _env_cap("QUDITDC_SIM_CAP", DEFAULT_SIM_CAP)
    rep = validate(matrix, sim_cap=sim_cap)

    def flag(value: bool | None) -> str:
        if value is None:
            return "skipped"
        return "pass" if value else "FAIL"

    lines = [
        f"commuting:   {flag(rep.commuting)}",
        f"independent: {flag(rep.independent)}",
        f"admissible:  {flag(rep.admissible)}",
        f"complete:    {flag(rep.complete)}",
    ]
    lines += [f"- {msg}" for msg in rep.messages]
    lines.append(f"overall:     {flag(rep.ok)}")
    obj = {
        "commuting": rep.commuting,
        "independent": rep.independent,
        "admissible": rep.admissible,
        "complete": rep.complete,
        "messages": list(rep.messages),
        "ok": rep.ok,
    }
    _emit(args, obj, lines)
    return 0 if rep.ok else 1


def _synth_column_sets(args, matrix, partition):
    pinned = None
    if args.choices:
        obj = _read_json(args.choices, "choices")
        _check_choice_keys(obj, {"free_z", "free_x"}, "column-sets")
        if ("free_z" in obj) != ("free_x" in obj):
            raise UsageError("choices must pin free_z and free_x together")
        if "free_z" in obj:
            pinned = (obj["free_z"], obj["free_x"])
    result = synth_column_sets(matrix, partition, pinned=pinned)
    if result is None:
        return None, None, None
    return result.protocol, None, (result.free_z, result.free_x)


def _synth_basis_chain(args, matrix, partition):
    if args.basis:
        rows = _read_json(args.basis, "basis")
        if not (
            isinstance(rows, list)
            and len(rows) == matrix.n
            and all(isinstance(r, list) and len(r) == matrix.n for r in rows)
        ):
            raise UsageError(
                f"basis file must hold {matrix.n} rows of {matrix.n} integers"
            )
        basis = RingBasis.from_rows(rows, matrix.d)
    else:
        basis = RingBasis.from_rows(
            [[1 if c == r else 0 for c in range(matrix.n)] for r in range(matrix.n)],
            matrix.d,
        )
    choices = ChainChoices()
    if args.choices:
        obj = _read_json(args.choices, "choices")
        _check_choice_keys(obj, {"pinned_vectors", "factor_vectors"}, "basis-chain")
        pinned_map = {}
        for entry in obj.get("pinned_vectors", []):
            try:
                pinned_map[(int(entry["sender"]), int(entry["position"]))] = entry[
                    "vector"
                ]
            except (KeyError, TypeError) as exc:
                raise UsageError(
                    "pinned_vectors entries need sender, position, vector"
                ) from exc
        factor_map = {}
        for entry in obj.get("factor_vectors", []):
            try:
                factor_map[int(entry["position"])] = entry["factors"]
            except (KeyError, TypeError) as exc:
                raise UsageError(
                    "factor_vectors entries need position and factors"
                ) from exc
        choices = ChainChoices.from_mappings(pinned_map, factor_map)
    span_cap = _env_cap("QUDITDC_SPAN_CAP", DEFAULT_ENUM_CAP)
    trace, proto = synth_basis_chain(
        matrix, partition, basis, choices, span_cap=span_cap
    )
    return proto, trace, None


def cmd_synth(args: argparse.Namespace) -> int:
    matrix = load_stabilizer(args.stabilizer)
    free_sets = None
    trace = None

    if args.method == "auto":
        if args.partition or args.basis or args.choices:
            raise UsageError(
                "--method auto derives everything from the reduction; "
                "omit --partition, --basis and --choices"
            )
        result = optimal_singleton_partition(matrix)
        if result.partition is None:
            left, right = result.witness_bipartition
            commutes = "yes" if result.witness_commutes else "no"
            lines = [
                "no partition derived: the reduction found no usable block entry",
                f"witness bipartition: {_fmt_group(left)} | {_fmt_group(right)}",
                f"witness restrictions commute: {commutes}",
            ]
            obj = {
                "partition": None,
                "witness_bipartition": [sorted(left), sorted(right)],
                "witness_commutes": result.witness_commutes,
            }
            _emit(args, obj, lines)
            return 1
        partition = result.partition
        proto = protocol_from_free_sets(
            matrix, partition, result.free_z, result.free_x
        )
        if not verify_protocol(proto):
            raise InternalError("derived partition produced colliding labels")
        free_sets = (result.free_z, result.free_x)
    else:
        if not args.partition:
            raise UsageError(f"--method {args.method} requires --partition")
        partition = _parse_partition(args.partition, matrix.n)
        if args.method == "column-sets":
            if args.basis:
                raise UsageError("--basis applies to basis-chain only")
            proto, trace, free_sets = _synth_column_sets(args, matrix, partition)
            if proto is None:
                _emit(
                    args,
                    {"protocol": None, "reason": "no protocol found by this method"},
                    ["no protocol found by this method"],
                )
                return 1
        else:
            proto, trace, free_sets = _synth_basis_chain(args, matrix, partition)

    bounds = check_bounds(proto.alphabet, matrix.d, proto.partition)
    lines = [
        f"method:   {proto.method}",
        "partition: "
        + " | ".join(_fmt_group(s) for s in proto.partition.senders)
        + " | receiver "
        + _fmt_group(proto.partition.receiver),
        f"alphabet: ({', '.join(str(b) for b in proto.alphabet)})",
        f"product:  {bounds.product} (ceiling {bounds.ceiling})",
        f"optimal:  {'yes' if bounds.optimal else 'no'}",
        f"useful:   {'yes' if bounds.useful else 'no'}",
        f"bounds:   {'ok' if bounds.ok else 'VIOLATED'}",
    ]
    obj: dict[str, Any] = {
        "method": proto.method,
        "partition": {
            "senders": [sorted(s) for s in proto.partition.senders],
            "receiver": sorted(proto.partition.receiver),
        },
        "alphabet": list(proto.alphabet),
        "product": bounds.product,
        "ceiling": bounds.ceiling,
        "optimal": bounds.optimal,
        "useful": bounds.useful,
        "bounds_ok": bounds.ok,
        "free_z": None,
        "free_x": None,
        "notes": [],
        "saved": None,
    }
    if free_sets is not None:
        fz, fx = free_sets
        for i in range(proto.partition.m):
            lines.append(
                f"sender {i + 1}: free_z={_fmt_group(fz[i])} "
                f"free_x={_fmt_group(fx[i])}"
            )
        obj["free_z"] = [sorted(s) for s in fz]
        obj["free_x"] = [sorted(s) for s in fx]
    if trace is not None and trace.notes:
        for note in trace.notes:
            lines.append(f"note: {note}")
        obj["notes"] = list(trace.notes)
    if args.out:
        save_protocol(proto, args.out, trace)
        lines.append(f"saved: {args.out}")
        obj["saved"] = str(args.out)
    _emit(args, obj, lines)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    proto, _ = load_protocol(args.protocol)
    distinct = verify_protocol(proto)
    total = 1
    for b in proto.alphabet:
        total *= b
    lines = [
        f"messages: {total}",
        f"labels distinct: {'yes' if distinct else 'NO'}",
    ]
    obj: dict[str, Any] = {
        "messages": total,
        "labels_distinct": distinct,
        "simulation": None,
    }
    ok = distinct
    if args.simulate:
        from .simulator import orthogonality_check

        sim_cap = _env_cap("QUDITDC_SIM_CAP", DEFAULT_SIM_CAP)
        mode = "sample" if args.sample else "full"
        report = orthogonality_check(
            proto,
            mode=mode,
            pairs=args.sample or 200,
            seed=args.seed,
            cap=sim_cap,
        )
        ok = ok and report.ok
        lines += [
            f"simulation mode: {report.mode}",
            f"pairs checked: {report.pairs_checked}",
            f"max overlap: {report.max_overlap:.3e}",
            f"orthogonal: {'yes' if report.ok else 'NO'}",
        ]
        obj["simulation"] = {
            "mode": report.mode,
            "pairs_checked": report.pairs_checked,
            "max_overlap": report.max_overlap,
            "ok": report.ok,
            "worst_generator_residual": report.worst_generator_residual,
        }
    lines.append(f"overall: {'pass' if ok else 'FAIL'}")
    obj["ok"] = ok
    _emit(args, obj, lines)
    return 0 if ok else 1


def cmd_standard_form(args: argparse.Namespace) -> int:
    matrix = load_stabilizer(args.stabilizer)
    if not is_prime(matrix.d):
        _emit(
            args,
            {"ok": False, "reason": f"standard form needs a prime dimension, got d={matrix.d}"},
            [f"standard form needs a prime dimension, got d={matrix.d}"],
        )
        return 1
    result = optimal_singleton_partition(matrix)
    sf = result.standard
    reduced = sf.matrix
    lines = [
        f"r: {sf.r}",
        f"qudit order: ({', '.join(str(q) for q in sf.qudit_order)})",
    ]
    for name, block in (("A1", sf.block_a1), ("B", sf.block_b), ("D", sf.block_d)):
        if not block or not block[0]:
            lines.append(f"block {name}: (empty)")
        else:
            lines.append(f"block {name}:")
            for row in block:
                lines.append("  [" + " ".join(str(e) for e in row) + "]")
    obj: dict[str, Any] = {
        "r": sf.r,
        "qudit_order": list(sf.qudit_order),
        "blocks": {
            "A1": [list(r) for r in sf.block_a1],
            "B": [list(r) for r in sf.block_b],
            "D": [list(r) for r in sf.block_d],
        },
        "reduced": {
            "rows": [list(row) for row in reduced.rows],
            "phases": list(reduced.phases),
        },
        "partition": None,
        "free_z": None,
        "free_x": None,
        "witness_bipartition": None,
        "witness_commutes": None,
    }
    if result.partition is not None:
        lines.append(
            "partition: "
            + " | ".join(_fmt_group(s) for s in result.partition.senders)
            + " | receiver "
            + _fmt_group(result.partition.receiver)
        )
        for i in range(result.partition.m):
            lines.append(
                f"sender {i + 1}: free_z={_fmt_group(result.free_z[i])} "
                f"free_x={_fmt_group(result.free_x[i])}"
            )
        obj["partition"] = {
            "senders": [sorted(s) for s in result.partition.senders],
            "receiver": sorted(result.partition.receiver),
        }
        obj["free_z"] = [sorted(s) for s in result.free_z]
        obj["free_x"] = [sorted(s) for s in result.free_x]
    else:
        left, right = result.witness_bipartition
        commutes = "yes" if result.witness_commutes else "no"
        lines.append(
            f"no usable block entry; witness bipartition "
            f"{_fmt_group(left)} | {_fmt_group(right)} "
            f"(restrictions commute: {commutes})"
        )
        obj["witness_bipartition"] = [sorted(left), sorted(right)]
        obj["witness_commutes"] = result.witness_commutes
    _emit(args, obj, lines)
    return 0


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quditdc",
        description="Distributed dense-coding protocols on qudit stabilizer states.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=("text", "json"),
        default="text",
        help="output format (default: text)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "validate", parents=[common], help="check a stabilizer file"
    )
    p.add_argument("stabilizer", help="stabilizer JSON file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser(
        "synth", parents=[common], help="synthesize a protocol"
    )
    p.add_argument("stabilizer", help="stabilizer JSON file")
    p.add_argument(
        "--partition",
        help="sender groups then receiver, e.g. '1,2|3|4,5' (last group = receiver)",
    )
    p.add_argument(
        "--method",
        choices=("column-sets", "basis-chain", "auto"),
        default="column-sets",
        help="synthesis route (default: column-sets)",
    )
    p.add_argument("--basis", help="JSON file with n basis rows (basis-chain only)")
    p.add_argument("--choices", help="JSON file pinning synthesis choices")
    p.add_argument("--out", help="write the protocol file here")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser(
        "verify", parents=[common], help="verify a protocol file"
    )
    p.add_argument("protocol", help="protocol JSON file")
    p.add_argument(
        "--simulate",
        action="store_true",
        help="also check orthogonality numerically",
    )
    p.add_argument(
        "--sample",
        type=int,
        default=0,
        metavar="K",
        help="sample K random pairs instead of the full sweep",
    )
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "standard-form",
        parents=[common],
        help="block-reduce a prime-dimension stabilizer",
    )
    p.add_argument("stabilizer", help="stabilizer JSON file")
    p.set_defaults(func=cmd_standard_form)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
