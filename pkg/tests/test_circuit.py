"""Circuit model: conversions, outcome transforms, the MBIQP contract."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iqpsim.angles import Angle
from iqpsim.circuit import (
    IqpCircuit,
    circuit_to_graph,
    gate,
    graph_to_circuit,
    iqp_to_mbiqp_outcome,
    mbiqp_to_iqp_outcome,
    pack_bits,
    unpack_bits,
)
from iqpsim.errors import LengthMismatchError
from iqpsim.oracle import simulate_statevector, xbasis_probability

from conftest import mbiqp_probability, random_circuit


def test_gate_validation():
    with pytest.raises(ValueError):
        gate([], 0.1)
    with pytest.raises(ValueError):
        gate([1, 1], 0.1)
    with pytest.raises(ValueError):
        gate([0], 0.1)
    with pytest.raises(ValueError):
        IqpCircuit.build(2, [((3,), 0.1)])
    with pytest.raises(ValueError):
        IqpCircuit(n=0, gates=())


def test_circuit_to_graph_definition():
    circuit = IqpCircuit.build(2, [((1, 2), Angle.from_pi_fraction(1, 4))])
    graph = circuit_to_graph(circuit)
    assert graph.n_qubits == 2
    assert graph.neighborhoods == (frozenset({1, 2}),)
    assert graph.weights[0].pi_frac is not None
    assert graph_to_circuit(graph) == circuit


def test_circuit_to_graph_mixed_arities():
    circuit = IqpCircuit.build(3, [((1, 2), 0.1), ((2,), 0.2), ((1, 2, 3), 0.3)])
    graph = circuit_to_graph(circuit)
    assert [sorted(nb) for nb in graph.neighborhoods] == [[1, 2], [2], [1, 2, 3]]


def test_empty_gate_list():
    graph = circuit_to_graph(IqpCircuit.build(3, []))
    assert graph.n_gates == 0


@given(st.data())
@settings(max_examples=40, deadline=None, derandomize=True)
def test_conversion_bijection(data):
    n = data.draw(st.integers(1, 6))
    n_gates = data.draw(st.integers(0, 8))
    seed = data.draw(st.integers(0, 2**32 - 1))
    circuit = random_circuit(np.random.default_rng(seed), n, n_gates)
    assert graph_to_circuit(circuit_to_graph(circuit)) == circuit


def test_outcome_transform_trivial_cases():
    graph = circuit_to_graph(IqpCircuit.build(2, [((1, 2), 0.4)]))
    assert mbiqp_to_iqp_outcome((0, 0), (1,), graph) == (1, 1)
    assert mbiqp_to_iqp_outcome((0, 1), (0,), graph) == (0, 1)
    assert iqp_to_mbiqp_outcome((1, 1), (1,), graph) == ((0, 0), (1,))
    with pytest.raises(LengthMismatchError):
        mbiqp_to_iqp_outcome((0,), (1,), graph)
    with pytest.raises(LengthMismatchError):
        mbiqp_to_iqp_outcome((0, 0), (1, 0), graph)


def test_outcome_transforms_round_trip(rng):
    for _ in range(30):
        circuit = random_circuit(rng, 4, 5)
        graph = circuit_to_graph(circuit)
        mv = tuple(int(b) for b in rng.integers(0, 2, size=4))
        mu = tuple(int(b) for b in rng.integers(0, 2, size=5))
        s = mbiqp_to_iqp_outcome(mv, mu, graph)
        assert iqp_to_mbiqp_outcome(s, mu, graph) == (mv, mu)


def test_mbiqp_probability_contract(rng):
    """P_MBIQP(mv, mu) = 2^-|U_B| P_IQP(s) under the outcome transform."""
    for _ in range(10):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 5))
        circuit = random_circuit(rng, n, m)
        graph = circuit_to_graph(circuit)
        state = simulate_statevector(circuit)
        for _ in range(4):
            mv = tuple(int(b) for b in rng.integers(0, 2, size=n))
            mu = tuple(int(b) for b in rng.integers(0, 2, size=m))
            s = mbiqp_to_iqp_outcome(mv, mu, graph)
            lhs = mbiqp_probability(graph, mv, mu)
            rhs = xbasis_probability(state, s) / 2.0**m
            assert lhs == pytest.approx(rhs, abs=1e-10)


def test_pack_unpack_round_trip():
    bits = (1, 0, 1, 1, 0)
    assert pack_bits(bits) == 0b10110
    assert unpack_bits(pack_bits(bits), 5) == bits
