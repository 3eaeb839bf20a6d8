"""File formats: canonical JSON, schema validation, and (de)serialization.

Two file types exist.  A stabilizer file carries d, n, and the generator
list (phase exponent plus one [x, z] pair per qudit; negative entries are
accepted and reduced mod d).  A protocol file embeds the stabilizer it was
built from — plus that stabilizer's canonical-JSON SHA-256, so tampering is
detected — together with the partition, the per-sender encoding words
(given as per-qudit pairs over the sender's own qudits), the alphabet, and
an optional synthesis trace.

All serialization goes through ``canonical_json`` (sorted keys, two-space
indent, trailing newline), which makes write-then-read round trips
byte-identical and output diffable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .densecode import ChainTrace, Partition, Protocol
from .errors import UsageError
from .pauli import PauliWord
from .stabilizer import CheckMatrix


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, indent 2, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@lru_cache(maxsize=8)
def _schema(name: str) -> dict:
    path = resources.files(__package__) / "schemas" / name
    return json.loads(path.read_text(encoding="utf-8"))


def _validate_schema(obj: Any, schema_name: str, label: str) -> None:
    try:
        jsonschema.validate(obj, _schema(schema_name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise UsageError(f"invalid {label} file at {where}: {exc.message}") from exc


def _read_json(path: str | Path, label: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {label} file {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{label} file {path} is not valid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# Stabilizer files
# ---------------------------------------------------------------------------


def matrix_to_obj(matrix: CheckMatrix) -> dict:
    return {
        "d": matrix.d,
        "n": matrix.n,
        "generators": [
            {
                "phase": matrix.phases[i],
                "pairs": [
                    [matrix.rows[i][j], matrix.rows[i][matrix.n + j]]
                    for j in range(matrix.n)
                ],
            }
            for i in range(matrix.k)
        ],
    }


def matrix_from_obj(obj: Any) -> CheckMatrix:
    _validate_schema(obj, "stabilizer.schema.json", "stabilizer")
    d, n = obj["d"], obj["n"]
    gens = obj["generators"]
    if len(gens) > n:
        raise UsageError(
            f"stabilizer file has {len(gens)} generators on {n} qudits; "
            f"at most n are allowed"
        )
    rows = []
    phases = []
    for g in gens:
        pairs = g["pairs"]
        if len(pairs) != n:
            raise UsageError(
                f"every generator needs exactly {n} [x, z] pairs, got {len(pairs)}"
            )
        rows.append(
            tuple(p[0] for p in pairs) + tuple(p[1] for p in pairs)
        )
        phases.append(g.get("phase", 0))
    return CheckMatrix(d, n, tuple(rows), tuple(phases))


def stabilizer_hash(matrix: CheckMatrix) -> str:
    return sha256_hex(canonical_json(matrix_to_obj(matrix)))


def load_stabilizer(path: str | Path) -> CheckMatrix:
    return matrix_from_obj(_read_json(path, "stabilizer"))


def save_stabilizer(matrix: CheckMatrix, path: str | Path) -> None:
    Path(path).write_text(canonical_json(matrix_to_obj(matrix)), encoding="utf-8")


# ---------------------------------------------------------------------------
# Protocol files
# ---------------------------------------------------------------------------


def partition_to_obj(partition: Partition) -> dict:
    return {
        "senders": [sorted(s) for s in partition.senders],
        "receiver": sorted(partition.receiver),
    }


def trace_to_obj(trace: ChainTrace) -> dict:
    obj = asdict(trace)
    obj["basis"] = [list(row) for row in obj["basis"]]
    obj["steps"] = [
        {
            "position": step["position"],
            "members": list(step["members"]),
            "picks": [
                {
                    "sender": p["sender"],
                    "vector": list(p["vector"]),
                    "coefficient": p["coefficient"],
                    "scale": p["scale"],
                    "scaled_vector": (
                        list(p["scaled_vector"])
                        if p["scaled_vector"] is not None
                        else None
                    ),
                }
                for p in step["picks"]
            ],
            "factors": list(step["factors"]),
            "solvable": list(step["solvable"]),
            "slot_sizes": list(step["slot_sizes"]),
        }
        for step in obj["steps"]
    ]
    obj["notes"] = list(obj["notes"])
    return obj


def protocol_to_obj(proto: Protocol, trace: ChainTrace | None = None) -> dict:
    sender_objs = []
    for i in range(1, proto.partition.m + 1):
        qudits = proto.partition.sender_qudits(i)
        encodings = []
        for w in proto.encodings[i - 1]:
            encodings.append(
                {
                    "pairs": [
                        [w.x_exp[l - 1], w.z_exp[l - 1]] for l in qudits
                    ]
                }
            )
        sender_objs.append(
            {"index": i, "qudits": list(qudits), "encodings": encodings}
        )
    return {
        "method": proto.method,
        "stabilizer": matrix_to_obj(proto.matrix),
        "stabilizer_sha256": stabilizer_hash(proto.matrix),
        "partition": partition_to_obj(proto.partition),
        "alphabet": list(proto.alphabet),
        "senders": sender_objs,
        "trace": trace_to_obj(trace) if trace is not None else None,
    }


def protocol_from_obj(obj: Any) -> tuple[Protocol, dict | None]:
    _validate_schema(obj, "protocol.schema.json", "protocol")
    matrix = matrix_from_obj(obj["stabilizer"])
    if stabilizer_hash(matrix) != obj["stabilizer_sha256"]:
        raise UsageError(
            "protocol file's stabilizer hash does not match its stabilizer "
            "block; the file was edited inconsistently"
        )
    part_obj = obj["partition"]
    partition = Partition.from_groups(
        part_obj["senders"], part_obj["receiver"], matrix.n
    )
    sender_objs = sorted(obj["senders"], key=lambda s: s["index"])
    if [s["index"] for s in sender_objs] != list(range(1, partition.m + 1)):
        raise UsageError("protocol senders must be indexed 1..m exactly once")
    encodings: list[tuple[PauliWord, ...]] = []
    for s in sender_objs:
        qudits = partition.sender_qudits(s["index"])
        if tuple(s["qudits"]) != qudits:
            raise UsageError(
                f"sender {s['index']} lists qudits {s['qudits']} but the "
                f"partition assigns {list(qudits)}"
            )
        words = []
        for enc in s["encodings"]:
            pairs = enc["pairs"]
            if len(pairs) != len(qudits):
                raise UsageError(
                    f"sender {s['index']} encodings need one [x, z] pair per "
                    f"qudit in {list(qudits)}"
                )
            x_exp = [0] * matrix.n
            z_exp = [0] * matrix.n
            for l, (a, b) in zip(qudits, pairs):
                x_exp[l - 1] = a
                z_exp[l - 1] = b
            words.append(
                PauliWord(matrix.d, matrix.n, 0, tuple(x_exp), tuple(z_exp))
            )
        encodings.append(tuple(words))
    proto = Protocol(obj["method"], matrix, partition, tuple(encodings))
    if list(proto.alphabet) != list(obj["alphabet"]):
        raise UsageError(
            f"protocol file declares alphabet {obj['alphabet']} but carries "
            f"{list(proto.alphabet)} encodings"
        )
    return proto, obj["trace"]


def load_protocol(path: str | Path) -> tuple[Protocol, dict | None]:
    return protocol_from_obj(_read_json(path, "protocol"))


def save_protocol(
    proto: Protocol, path: str | Path, trace: ChainTrace | None = None
) -> None:
    Path(path).write_text(
        canonical_json(protocol_to_obj(proto, trace)), encoding="utf-8"
    )
