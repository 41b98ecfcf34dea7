"""Circuit files and the CLI surface."""

import importlib
from pathlib import Path
import json
import math
import subprocess
import sys
import pytest

from iqpsim.angles import Angle
from iqpsim.cli import format_complex, format_float, main
from iqpsim.files import (
    FileFormatError,
    circuit_document,
    load_circuit_file,
    parse_angle,
    parse_circuit_document,
    save_circuit_file,
)
from iqpsim.generators import grid_instance
from iqpsim.selftest import run_selftest


def test_parse_angle_forms():
    assert parse_angle("pi/2").pi_frac is not None
    assert parse_angle("pi/2").cos() == 0.0
    assert parse_angle("3*pi/4").rad == pytest.approx(3 * math.pi / 4)
    assert parse_angle("-pi/4").rad == pytest.approx(7 * math.pi / 4)
    assert parse_angle(0.5).rad == pytest.approx(0.5)
    assert parse_angle("0").pi_frac == 0
    assert parse_angle(2).rad == pytest.approx(2.0)
    with pytest.raises(FileFormatError):
        parse_angle("pi/0")
    with pytest.raises(FileFormatError):
        parse_angle("two pi")


def test_document_round_trip(tmp_path):
    circuit, embedding = grid_instance(2, 3, Angle.from_pi_fraction(1, 8))
    path = tmp_path / "grid.json"
    save_circuit_file(path, circuit, embedding)
    loaded, emb = load_circuit_file(path)
    assert loaded == circuit
    assert emb is not None
    assert emb.rotations == embedding.rotations
    assert emb.outer_dart == embedding.outer_dart


def test_unknown_fields_rejected():
    with pytest.raises(FileFormatError):
        parse_circuit_document({"n": 1, "gates": [], "extra": 1})
    with pytest.raises(FileFormatError):
        parse_circuit_document(
            {"n": 1, "gates": [{"qubits": [1], "theta": 0.1, "oops": 2}]}
        )
    with pytest.raises(FileFormatError):
        parse_circuit_document({"n": 1})
    with pytest.raises(FileFormatError):
        parse_circuit_document({"n": 2, "gates": [{"qubits": [1, 3], "theta": 0.1}]})


def test_embedding_validation():
    doc = {
        "n": 2,
        "gates": [{"qubits": [1, 2], "theta": "pi/8"}],
        "embedding": {"rotations": [[1], [1]]},
    }
    circuit, emb = parse_circuit_document(doc)
    assert emb is not None
    bad = {
        "n": 2,
        "gates": [{"qubits": [1], "theta": "pi/8"}],
        "embedding": {"rotations": [[1], []]},
    }
    with pytest.raises(FileFormatError):
        parse_circuit_document(bad)


def test_format_helpers():
    assert format_float(1.0) == "1.000000000000"
    assert format_float(0.0) == "0.000000000000"
    assert format_float(math.sin(math.pi / 8) ** 2) == "0.146446609407"
    assert format_complex(2 + 0j) == "2.000000000000+0.000000000000i"
    assert format_complex(-1 - 2j) == "-1.000000000000-2.000000000000i"


def run_cli(*argv: str) -> tuple[int, str]:
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


@pytest.fixture
def grid_file(tmp_path):
    circuit, embedding = grid_instance(2, 3, Angle.from_pi_fraction(1, 8))
    path = tmp_path / "grid23.json"
    save_circuit_file(path, circuit, embedding)
    return str(path)


@pytest.fixture
def worked_ifrb_file(tmp_path):
    path = tmp_path / "ifrb_worked.json"
    path.write_text(
        json.dumps(
            {
                "n": 3,
                "gates": [
                    {"qubits": [1, 2], "theta": "pi/8"},
                    {"qubits": [2], "theta": "pi/8"},
                    {"qubits": [1, 2, 3], "theta": "pi/8"},
                ],
            }
        )
    )
    return str(path)


def test_cmd_classify(grid_file, worked_ifrb_file, tmp_path):
    code, out = run_cli("classify", worked_ifrb_file)
    assert code == 0 and out.strip() == "IFRB"
    code, out = run_cli("classify", grid_file)
    assert code == 0 and out.strip() == "planar-two-body"
    general = tmp_path / "gen.json"
    general.write_text(
        json.dumps(
            {
                "n": 3,
                "gates": [
                    {"qubits": [1, 2], "theta": 0.1},
                    {"qubits": [2, 3], "theta": 0.1},
                    {"qubits": [1, 3], "theta": 0.1},
                    {"qubits": [1, 2, 3], "theta": 0.1},
                ],
            }
        )
    )
    code, out = run_cli("classify", str(general))
    assert code == 0 and out.strip() == "general"


def test_cmd_prob(tmp_path, grid_file):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"n": 3, "gates": []}))
    code, out = run_cli("prob", str(empty), "000")
    assert code == 0 and out.strip() == "1.000000000000"

    edge = tmp_path / "edge.json"
    edge.write_text(
        json.dumps({"n": 2, "gates": [{"qubits": [1, 2], "theta": "pi/8"}]})
    )
    code, out = run_cli("prob", str(edge), "11")
    assert code == 0
    assert out.strip() == format_float(math.sin(math.pi / 8) ** 2)

    code, out = run_cli("prob", grid_file, "000000", "--verify")
    assert code == 0

    code, out = run_cli("prob", grid_file, "000000", "--json")
    assert json.loads(out)["engine"] == "planar"


def test_cmd_partition(tmp_path, grid_file):
    single = tmp_path / "single.json"
    single.write_text(json.dumps({"n": 1, "gates": []}))
    code, out = run_cli("partition", str(single), "0")
    assert code == 0 and out.strip() == "2.000000000000+0.000000000000i"

    edge = tmp_path / "edge.json"
    edge.write_text(
        json.dumps({"n": 2, "gates": [{"qubits": [1, 2], "theta": "pi/3"}]})
    )
    code, out = run_cli("partition", str(edge), "00")
    assert code == 0 and out.strip() == "2.000000000000+0.000000000000i"

    code, _ = run_cli("partition", grid_file, "000000", "--verify")
    assert code == 0


def test_cmd_sample_determinism(grid_file, tmp_path):
    code, out1 = run_cli("sample", grid_file, "--count", "5", "--seed", "9")
    code2, out2 = run_cli("sample", grid_file, "--count", "5", "--seed", "9")
    assert code == code2 == 0
    assert out1 == out2
    assert all(len(line) == 6 for line in out1.strip().splitlines())

    zeros = tmp_path / "zeros.json"
    zeros.write_text(
        json.dumps({"n": 3, "gates": [{"qubits": [1], "theta": 0}]})
    )
    code, out = run_cli("sample", str(zeros), "--count", "3")
    assert code == 0 and out.strip().splitlines() == ["000", "000", "000"]


def test_cmd_sample_binomial(tmp_path):
    edge = tmp_path / "edge.json"
    edge.write_text(
        json.dumps(
            {
                "n": 2,
                "gates": [{"qubits": [1, 2], "theta": "pi/4"}],
                "embedding": {"rotations": [[1], [1]]},
            }
        )
    )
    draws = 100_000
    code, out = run_cli("sample", str(edge), "--count", str(draws), "--seed", "3")
    assert code == 0
    lines = out.strip().splitlines()
    counts = {"00": 0, "11": 0}
    for line in lines:
        counts[line] += 1
    # 3 sigma of Binomial(draws, 1/2)
    assert abs(counts["00"] - draws / 2) < 3 * math.sqrt(draws * 0.25)


def test_cmd_partition_4x4_verify(tmp_path):
    out_path = tmp_path / "g44.json"
    code, _ = run_cli("gen", "grid", "4x4", "--theta", "pi/8", "--out", str(out_path))
    assert code == 0
    code, out = run_cli("partition", str(out_path), "0" * 16, "--verify")
    assert code == 0
    assert out.strip().endswith("i")


def test_cmd_marginal(grid_file):
    code, out = run_cli("marginal", grid_file, "--qubits", "1,2", "--outcome", "00", "--verify")
    assert code == 0
    value = float(out.strip())
    assert 0 <= value <= 1


def test_cmd_gen_round_trip(tmp_path):
    out_path = tmp_path / "gen.json"
    code, _ = run_cli("gen", "grid", "3x4", "--theta", "pi/8", "--out", str(out_path))
    assert code == 0
    circuit, emb = load_circuit_file(out_path)
    assert circuit.n == 12
    assert emb is not None
    code, out = run_cli("classify", str(out_path))
    assert out.strip() == "planar-two-body"


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run_cli("classify", str(bad))
    assert code == 2


def test_selftest_pass_and_fault_injection(monkeypatch):
    results = run_selftest()
    assert all(ok for _, ok, _ in results)

    pfaffian_module = importlib.import_module("iqpsim.planar.pfaffian")
    real = pfaffian_module.pfaffian

    def corrupted(a, **kwargs):
        return -real(a, **kwargs)

    monkeypatch.setattr(pfaffian_module, "pfaffian", corrupted)
    results = run_selftest()
    failures = [name for name, ok, _ in results if not ok]
    assert "pfaffian" in failures


def test_selftest_runtime_budget():
    import time

    start = time.perf_counter()
    results = run_selftest()
    elapsed = time.perf_counter() - start
    assert all(ok for _, ok, _ in results)
    assert elapsed < 60.0


def test_docs_examples_parse_and_gen_reproduces():
    root = Path(__file__).resolve().parent.parent
    examples = root / "docs" / "examples"
    for path in sorted(examples.glob("*.json")):
        circuit, _ = load_circuit_file(path)
        assert circuit.n >= 1
    circuit, embedding = grid_instance(2, 3, Angle.from_pi_fraction(1, 8))
    regenerated = json.dumps(circuit_document(circuit, embedding), indent=2) + "\n"
    assert regenerated == (examples / "grid_2x3.json").read_text()


def test_cli_entry_point_subprocess(grid_file):
    proc = subprocess.run(
        [sys.executable, "-m", "iqpsim.cli", "prob", grid_file, "000000"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == format_float(
        float(run_cli("prob", grid_file, "000000")[1])
    )


def test_cmd_sample_merge_fallback(tmp_path):
    """An embedding whose BFS order hits a non-planar merge falls back to
    exact table sampling within the cap."""
    doc = {
        "n": 6,
        "gates": [
            {"qubits": [1, 2], "theta": 0.4},
            {"qubits": [1, 3], "theta": 0.8},
            {"qubits": [2, 4], "theta": 1.1},
            {"qubits": [3, 4], "theta": 0.2},
            {"qubits": [4, 5], "theta": 0.9},
            {"qubits": [4, 6], "theta": 1.4},
        ],
        "embedding": {"rotations": [[1, 2], [1, 3], [2, 4], [3, 5, 4, 6], [5], [6]]},
    }
    path = tmp_path / "pendants.json"
    path.write_text(json.dumps(doc))
    code, out = run_cli("sample", str(path), "--count", "4", "--seed", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4 and all(len(line) == 6 for line in lines)
    code, out_json = run_cli("sample", str(path), "--count", "4", "--seed", "1", "--json")
    assert json.loads(out_json)["engine"] == "table"
