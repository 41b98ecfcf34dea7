"""Command-line front end.

Subcommands: classify | prob | marginal | partition | sample | gen |
selftest.  Every command is deterministic given its inputs and --seed;
results go to stdout (one record per line, or a single JSON document with
--json), diagnostics to stderr.  Outcome strings print qubit 1 leftmost.

Exit codes: 0 success, 2 parse/usage error, 3 failed --verify cross-check,
1 selftest failure or internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import ising, oracle, sparse
from .circuit import IqpCircuit
from .errors import CapExceededError, IqpError, MergeError
from .files import FileFormatError, load_circuit_file, parse_angle, save_circuit_file
from .generators import grid_instance
from .planar.engine import (
    PlanarSampler,
    marginal_probability,
    planar_joint_probability,
    planar_partition_function_with_fields,
)
from .planar.instance import PlanarIsingInstance
from .selftest import run_selftest

DEFAULT_CAP = 20


def format_float(value: float) -> str:
    """Fixed 12 decimals in the ordinary range, 12 significant digits outside."""
    if value != 0.0 and (abs(value) < 1e-4 or abs(value) >= 1e16):
        return f"{value:.12e}"
    return f"{value:.12f}"


def format_complex(value: complex) -> str:
    re, im = value.real, value.imag
    sign = "+" if im >= 0 or math.isnan(im) else "-"
    return f"{format_float(re)}{sign}{format_float(abs(im))}i"


def _parse_outcome(text: str, n: int) -> tuple[int, ...]:
    if len(text) != n or any(ch not in "01" for ch in text):
        raise FileFormatError(f"outcome must be {n} bits of 0/1, got {text!r}")
    return tuple(int(ch) for ch in text)


def _load(path: str):
    circuit, embedding = load_circuit_file(path)
    planar = None
    if embedding is not None:
        planar = PlanarIsingInstance.from_circuit(circuit, embedding)
    return circuit, planar


def _classification_labels(circuit: IqpCircuit, planar: "PlanarIsingInstance | None") -> list[str]:
    labels = []
    kind = sparse.classify(circuit).kind
    if kind is sparse.SparseKind.IFRB:
        labels.append("IFRB")
    elif kind is sparse.SparseKind.IB:
        labels.append("IB")
    if planar is not None:
        try:
            planar.embedding.require_planar()
            labels.append("planar-two-body")
        except IqpError:
            pass
    if not labels:
        labels.append("general")
    return labels


def cmd_classify(args: argparse.Namespace) -> int:
    circuit, planar = _load(args.file)
    labels = _classification_labels(circuit, planar)
    if args.json:
        print(json.dumps({"kinds": labels}))
    else:
        print(" ".join(labels))
    return 0


def _best_probability(
    circuit: IqpCircuit, planar: "PlanarIsingInstance | None", bits: Sequence[int], cap: int
) -> tuple[float, str]:
    kind = sparse.classify(circuit).kind
    if kind is not sparse.SparseKind.GENERAL:
        return sparse.sparse_probability(circuit, bits), "sparse"
    if planar is not None:
        return planar_joint_probability(planar, bits), "planar"
    return ising.joint_probability(circuit, bits, cap=cap), "bruteforce"


def cmd_prob(args: argparse.Namespace) -> int:
    circuit, planar = _load(args.file)
    bits = _parse_outcome(args.outcome, circuit.n)
    p, engine = _best_probability(circuit, planar, bits, args.cap)
    verified = None
    if args.verify:
        if circuit.n <= min(args.cap, oracle.DEFAULT_STATE_CAP):
            reference = oracle.xbasis_probability(oracle.simulate_statevector(circuit), bits)
            verified = abs(p - reference) <= 1e-8
            print(f"verify: engine={engine} oracle={reference!r}", file=sys.stderr)
            if not verified:
                print(f"verify FAILED: {p!r} vs {reference!r}", file=sys.stderr)
                return 3
        else:
            print("verify skipped: beyond oracle cap", file=sys.stderr)
    if args.json:
        doc = {"probability": p, "engine": engine}
        if verified is not None:
            doc["verified"] = verified
        print(json.dumps(doc))
    else:
        print(format_float(p))
    return 0


def cmd_marginal(args: argparse.Namespace) -> int:
    circuit, planar = _load(args.file)
    qubits = [int(tok) for tok in args.qubits.split(",") if tok]
    bits = _parse_outcome(args.outcome, len(qubits))
    if planar is not None:
        p = marginal_probability(planar, qubits, bits)
        engine = "planar"
    elif circuit.n <= min(args.cap, oracle.DEFAULT_STATE_CAP):
        p = oracle.xbasis_marginal(oracle.simulate_statevector(circuit), qubits, bits)
        engine = "oracle"
    else:
        raise CapExceededError("no marginal engine: need an embedding or n within cap")
    if args.verify:
        if circuit.n <= min(args.cap, oracle.DEFAULT_STATE_CAP):
            reference = oracle.xbasis_marginal(
                oracle.simulate_statevector(circuit), qubits, bits
            )
            print(f"verify: engine={engine} oracle={reference!r}", file=sys.stderr)
            if abs(p - reference) > 1e-8:
                print(f"verify FAILED: {p!r} vs {reference!r}", file=sys.stderr)
                return 3
        else:
            print("verify skipped: beyond oracle cap", file=sys.stderr)
    if args.json:
        print(json.dumps({"probability": p, "engine": engine}))
    else:
        print(format_float(p))
    return 0


def cmd_partition(args: argparse.Namespace) -> int:
    circuit, planar = _load(args.file)
    bits = _parse_outcome(args.fields, circuit.n)
    if planar is not None:
        z = planar_partition_function_with_fields(planar, bits)
        engine = "planar"
    else:
        z = ising.partition_function_bruteforce(
            ising.IsingInstance.from_circuit(circuit, bits), cap=args.cap
        )
        engine = "bruteforce"
    if args.verify:
        if circuit.n <= args.cap:
            reference = ising.partition_function_bruteforce(
                ising.IsingInstance.from_circuit(circuit, bits), cap=args.cap
            )
            print(f"verify: engine={engine} bruteforce={reference!r}", file=sys.stderr)
            if abs(z - reference) > 1e-8 * max(1.0, abs(reference)):
                print(f"verify FAILED: {z!r} vs {reference!r}", file=sys.stderr)
                return 3
        else:
            print("verify skipped: beyond brute-force cap", file=sys.stderr)
    if args.json:
        print(json.dumps({"re": z.real, "im": z.imag, "engine": engine}))
    else:
        print(format_complex(z))
    return 0


def _table_samples(circuit: IqpCircuit, count: int, rng, cap: int) -> list[str]:
    table = ising.probability_vector(circuit, cap=cap)
    draws = rng.choice(len(table), size=count, p=table / table.sum())
    return [format(int(z), f"0{circuit.n}b") for z in draws]


def cmd_sample(args: argparse.Namespace) -> int:
    circuit, planar = _load(args.file)
    kind = sparse.classify(circuit).kind
    rng = np.random.default_rng(args.seed)
    if kind is not sparse.SparseKind.GENERAL:
        rows = sparse.sample_outcomes(circuit, args.count, rng)
        outcomes = ["".join(str(int(b)) for b in row) for row in rows]
        engine = "sparse"
    elif planar is not None:
        try:
            sampler = PlanarSampler(planar, rng=rng)
            outcomes = [
                "".join(str(b) for b in sampler.sample()) for _ in range(args.count)
            ]
            engine = "planar"
        except MergeError as exc:
            if circuit.n > min(args.cap, ising.DEFAULT_TABLE_CAP):
                raise
            print(f"note: planar sampler unavailable ({exc}); using the exact table",
                  file=sys.stderr)
            outcomes = _table_samples(circuit, args.count, np.random.default_rng(args.seed), args.cap)
            engine = "table"
    elif circuit.n <= min(args.cap, ising.DEFAULT_TABLE_CAP):
        outcomes = _table_samples(circuit, args.count, rng, args.cap)
        engine = "table"
    else:
        raise CapExceededError("no sampler: circuit is general and beyond the table cap")
    if args.json:
        print(json.dumps({"engine": engine, "outcomes": outcomes}))
    else:
        for line in outcomes:
            print(line)
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    kind = args.lattice
    if kind != "grid":
        raise FileFormatError(f"unknown lattice {kind!r}")
    rows_cols = args.shape.lower().split("x")
    if len(rows_cols) != 2:
        raise FileFormatError("shape must look like RxC, e.g. 3x4")
    rows, cols = int(rows_cols[0]), int(rows_cols[1])
    theta = parse_angle(args.theta)
    circuit, embedding = grid_instance(rows, cols, theta)
    if args.out:
        save_circuit_file(args.out, circuit, embedding)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        from .files import circuit_document

        print(json.dumps(circuit_document(circuit, embedding), indent=2))
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    results = run_selftest()
    failed = [name for name, ok, _ in results if not ok]
    for name, ok, detail in results:
        line = f"{'PASS' if ok else 'FAIL'} {name}"
        if detail and not ok:
            line += f" ({detail})"
        print(line)
    if args.json:
        print(
            json.dumps(
                {"pass": not failed, "results": [[n, ok, d] for n, ok, d in results]}
            )
        )
    print(("PASS" if not failed else "FAIL") + f" {len(results) - len(failed)}/{len(results)}")
    return 0 if not failed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iqpsim", description="Exact simulation of IQP (commuting-gate) circuits"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="brute-force size cap")
        p.add_argument("--verify", action="store_true", help="cross-check with the oracle")
        p.add_argument("--seed", type=int, default=0, help="random seed")

    p = sub.add_parser("classify", help="report applicable fast paths")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("prob", help="joint outcome probability")
    p.add_argument("file")
    p.add_argument("outcome", help="bit string, qubit 1 first")
    common(p)
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("marginal", help="marginal outcome probability")
    p.add_argument("file")
    p.add_argument("--qubits", required=True, help="comma-separated 1-based qubits")
    p.add_argument("--outcome", required=True, help="bits for the listed qubits")
    common(p)
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("partition", help="Ising partition function Z")
    p.add_argument("file")
    p.add_argument("fields", help="field bit string, qubit 1 first")
    common(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("sample", help="draw outcomes")
    p.add_argument("file")
    p.add_argument("--count", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("gen", help="generate lattice circuit files")
    p.add_argument("lattice", choices=["grid"])
    p.add_argument("shape", help="RxC")
    p.add_argument("--theta", default="1*pi/8")
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", help="reduced-scale acceptance checks")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IqpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
