"""Circuit file format: a strict JSON document.

Schema (all indices 1-based, matching the public API):

    {
      "n": 3,
      "gates": [
        {"qubits": [1, 2], "theta": "pi/8"},
        {"qubits": [2], "theta": 0.42}
      ],
      "embedding": {                      # optional, two-qubit gates only
        "rotations": [[1, 2], [1], [2]],  # per qubit: cyclic gate ids
        "outer": [1, 1]                   # optional [qubit, gate id]
      }
    }

Angles are radians as numbers, or exact strings "k*pi/m" (also "pi",
"pi/m", "-pi/4", "0").  Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from .angles import Angle
from .circuit import IqpCircuit, gate
from .errors import IqpError
from .planar.embedding import PlanarEmbedding


class FileFormatError(IqpError, ValueError):
    pass


_PI_RE = re.compile(r"^\s*([+-])?\s*(\d+)?\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$")


def parse_angle(value: Any) -> Angle:
    if isinstance(value, bool):
        raise FileFormatError(f"bad angle {value!r}")
    if isinstance(value, (int, float)):
        if value == 0:
            return Angle.from_pi_fraction(0)
        return Angle.from_radians(float(value))
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("0", "0.0"):
            return Angle.from_pi_fraction(0)
        match = _PI_RE.match(text)
        if match:
            num = int(match.group(2)) if match.group(2) else 1
            if match.group(1) == "-":
                num = -num
            den = int(match.group(3)) if match.group(3) else 1
            if den == 0:
                raise FileFormatError(f"zero denominator in angle {value!r}")
            return Angle.from_pi_fraction(num, den)
        try:
            return Angle.from_radians(float(text))
        except ValueError:
            raise FileFormatError(f"cannot parse angle {value!r}") from None
    raise FileFormatError(f"bad angle {value!r}")


def format_angle(angle: Angle) -> "str | float":
    if angle.pi_frac is not None:
        num, den = angle.pi_frac.numerator, angle.pi_frac.denominator
        if num == 0:
            return "0"
        return f"{num}*pi/{den}" if den != 1 else f"{num}*pi"
    return angle.rad


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise FileFormatError(f"unknown field(s) {sorted(extra)} in {where}")
    missing = required - set(obj)
    if missing:
        raise FileFormatError(f"missing field(s) {sorted(missing)} in {where}")


def parse_circuit_document(doc: Any) -> tuple[IqpCircuit, PlanarEmbedding | None]:
    if not isinstance(doc, dict):
        raise FileFormatError("top level must be an object")
    _require_keys(doc, {"n", "gates", "embedding"}, {"n", "gates"}, "circuit file")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise FileFormatError("n must be a positive integer")
    if not isinstance(doc["gates"], list):
        raise FileFormatError("gates must be a list")
    gates = []
    for idx, entry in enumerate(doc["gates"]):
        if not isinstance(entry, dict):
            raise FileFormatError(f"gate {idx + 1} must be an object")
        _require_keys(entry, {"qubits", "theta"}, {"qubits", "theta"}, f"gate {idx + 1}")
        qubits = entry["qubits"]
        if not isinstance(qubits, list) or not all(isinstance(q, int) for q in qubits):
            raise FileFormatError(f"gate {idx + 1} qubits must be an integer list")
        gates.append(gate(qubits, parse_angle(entry["theta"])))
    try:
        circuit = IqpCircuit(n=n, gates=tuple(gates))
    except ValueError as exc:
        raise FileFormatError(str(exc)) from exc

    embedding = None
    if "embedding" in doc:
        embedding = _parse_embedding(doc["embedding"], circuit)
    return circuit, embedding


def _parse_embedding(spec: Any, circuit: IqpCircuit) -> PlanarEmbedding:
    if not isinstance(spec, dict):
        raise FileFormatError("embedding must be an object")
    _require_keys(spec, {"rotations", "outer"}, {"rotations"}, "embedding")
    rotations = spec["rotations"]
    if not isinstance(rotations, list) or len(rotations) != circuit.n:
        raise FileFormatError("embedding.rotations needs one list per qubit")
    edges = []
    for g in circuit.gates:
        if len(g.qubits) != 2:
            raise FileFormatError("embedding requires all gates to act on two qubits")
        u, v = sorted(g.qubits)
        edges.append((u - 1, v - 1))
    rot0 = []
    for v, rot in enumerate(rotations):
        if not isinstance(rot, list) or not all(isinstance(e, int) for e in rot):
            raise FileFormatError(f"rotation of qubit {v + 1} must be an integer list")
        if any(e < 1 or e > len(edges) for e in rot):
            raise FileFormatError(f"rotation of qubit {v + 1} references a bad gate id")
        rot0.append(tuple(e - 1 for e in rot))
    outer = None
    if "outer" in spec:
        pair = spec["outer"]
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, int) for x in pair)
        ):
            raise FileFormatError("embedding.outer must be [qubit, gate id]")
        outer = (pair[0] - 1, pair[1] - 1)
    try:
        return PlanarEmbedding(
            n_vertices=circuit.n,
            edges=tuple(edges),
            rotations=tuple(rot0),
            outer_dart=outer,
        )
    except Exception as exc:
        raise FileFormatError(f"bad embedding: {exc}") from exc


def load_circuit_file(path: "str | Path") -> tuple[IqpCircuit, PlanarEmbedding | None]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"not valid JSON: {exc}") from exc
    return parse_circuit_document(doc)


def circuit_document(
    circuit: IqpCircuit, embedding: PlanarEmbedding | None = None
) -> dict:
    doc: dict = {
        "n": circuit.n,
        "gates": [
            {"qubits": sorted(g.qubits), "theta": format_angle(g.theta)}
            for g in circuit.gates
        ],
    }
    if embedding is not None:
        emb: dict = {
            "rotations": [[e + 1 for e in rot] for rot in embedding.rotations]
        }
        if embedding.outer_dart is not None:
            emb["outer"] = [embedding.outer_dart[0] + 1, embedding.outer_dart[1] + 1]
        doc["embedding"] = emb
    return doc


def save_circuit_file(
    path: "str | Path", circuit: IqpCircuit, embedding: PlanarEmbedding | None = None
) -> None:
    Path(path).write_text(json.dumps(circuit_document(circuit, embedding), indent=2) + "\n")


__all__ = [
    "FileFormatError",
    "parse_angle",
    "format_angle",
    "parse_circuit_document",
    "load_circuit_file",
    "circuit_document",
    "save_circuit_file",
]
