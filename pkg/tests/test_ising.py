"""Brute-force Ising partition functions and the probability map."""

import math

import numpy as np
import pytest

from iqpsim.angles import Angle
from iqpsim.circuit import IqpCircuit, unpack_bits
from iqpsim.errors import CapExceededError
from iqpsim.ising import (
    IsingInstance,
    joint_probability,
    partition_function_bruteforce,
    probability_table,
    probability_vector,
)
from iqpsim.oracle import simulate_statevector, xbasis_distribution, xbasis_probability

from conftest import random_circuit


def z_of(circuit, bits):
    return partition_function_bruteforce(IsingInstance.from_circuit(circuit, bits))


def test_single_site_values():
    empty = IqpCircuit.build(1, [])
    assert z_of(empty, (0,)) == pytest.approx(2.0)
    assert abs(z_of(empty, (1,))) == pytest.approx(0.0, abs=1e-12)
    theta = 0.7
    circuit = IqpCircuit.build(1, [((1,), theta)])
    assert z_of(circuit, (0,)) == pytest.approx(2.0 * math.cos(theta))


def test_cap_enforced():
    circuit = IqpCircuit.build(30, [])
    with pytest.raises(CapExceededError):
        partition_function_bruteforce(IsingInstance.from_circuit(circuit, (0,) * 30))


def test_joint_probability_examples():
    circuit = IqpCircuit.build(1, [((1,), Angle.from_pi_fraction(1, 4))])
    assert joint_probability(circuit, (0,)) == pytest.approx(0.5, abs=1e-12)
    two = IqpCircuit.build(2, [((1, 2), 0.9)])
    assert joint_probability(two, (0, 1)) == pytest.approx(0.0, abs=1e-12)
    assert joint_probability(two, (0, 0)) == pytest.approx(math.cos(0.9) ** 2, abs=1e-12)


# all 8 outcome probabilities of a fixed 3-qubit circuit, frozen from a
# statevector oracle run (gates: Z12 pi/8, Z23 pi/4, Z123 3pi/8, Z2 pi/16)
_N3_TABLE = (
    0.08641771452281809,
    0.08641771452281813,
    0.038582285477181885,
    0.0385822854771819,
    0.3747380851323651,
    0.04809734391327107,
    0.0002619148676348239,
    0.3269026560867289,
)


def _n3_circuit():
    return IqpCircuit.build(
        3,
        [
            ((1, 2), Angle.from_pi_fraction(1, 8)),
            ((2, 3), Angle.from_pi_fraction(1, 4)),
            ((1, 2, 3), Angle.from_pi_fraction(3, 8)),
            ((2,), Angle.from_pi_fraction(1, 16)),
        ],
    )


def test_frozen_probability_table():
    circuit = _n3_circuit()
    for idx, expected in enumerate(_N3_TABLE):
        bits = unpack_bits(idx, 3)
        assert joint_probability(circuit, bits) == pytest.approx(expected, abs=1e-12)


def test_probability_table_cases():
    empty = IqpCircuit.build(2, [])
    table = probability_table(empty)
    assert table[(0, 0)] == pytest.approx(1.0)
    assert sum(table.values()) == pytest.approx(1.0, abs=1e-9)

    one = IqpCircuit.build(1, [((1,), Angle.from_pi_fraction(1, 4))])
    table = probability_table(one)
    assert table[(0,)] == pytest.approx(0.5, abs=1e-12)
    assert table[(1,)] == pytest.approx(0.5, abs=1e-12)

    theta = 0.8
    two = IqpCircuit.build(2, [((1, 2), theta)])
    table = probability_table(two)
    assert table[(0, 0)] == pytest.approx(math.cos(theta) ** 2, abs=1e-12)
    assert table[(1, 1)] == pytest.approx(math.sin(theta) ** 2, abs=1e-12)
    assert table[(0, 1)] == pytest.approx(0.0, abs=1e-12)
    assert table[(1, 0)] == pytest.approx(0.0, abs=1e-12)


def test_normalization_random(rng):
    for _ in range(10):
        n = int(rng.integers(1, 7))
        circuit = random_circuit(rng, n, int(rng.integers(0, 3 * n + 1)))
        vec = probability_vector(circuit)
        assert float(vec.sum()) == pytest.approx(1.0, abs=1e-9)


def test_field_flip_nullity(rng):
    for _ in range(10):
        n = int(rng.integers(1, 8))
        circuit = IqpCircuit.build(n, [])
        bits = tuple(int(b) for b in rng.integers(0, 2, size=n))
        if not any(bits):
            bits = (1,) + bits[1:]
        assert abs(z_of(circuit, bits)) == pytest.approx(0.0, abs=1e-10)


def test_z_bound(rng):
    for _ in range(20):
        n = int(rng.integers(1, 7))
        circuit = random_circuit(rng, n, int(rng.integers(0, 3 * n + 1)))
        bits = tuple(int(b) for b in rng.integers(0, 2, size=n))
        assert abs(z_of(circuit, bits)) <= 2.0**n + 1e-9


def test_ising_map_vs_oracle(rng):
    worst = 0.0
    for _ in range(30):
        n = int(rng.integers(1, 9))
        circuit = random_circuit(rng, n, int(rng.integers(0, 3 * n + 1)))
        state = simulate_statevector(circuit)
        for _ in range(4):
            bits = tuple(int(b) for b in rng.integers(0, 2, size=n))
            worst = max(
                worst,
                abs(joint_probability(circuit, bits) - xbasis_probability(state, bits)),
            )
    assert worst <= 1e-10


def test_gate_order_invariance_bitwise(rng):
    """Permuted gate lists give bitwise-identical values (canonical order)."""
    for _ in range(10):
        n = int(rng.integers(2, 6))
        circuit = random_circuit(rng, n, 6)
        perm = rng.permutation(6)
        shuffled = IqpCircuit(n=n, gates=tuple(circuit.gates[j] for j in perm))
        bits = tuple(int(b) for b in rng.integers(0, 2, size=n))
        a = z_of(circuit, bits)
        b = z_of(shuffled, bits)
        assert a.real == b.real and a.imag == b.imag
        va = probability_vector(circuit)
        vb = probability_vector(shuffled)
        assert np.array_equal(va, vb)


def test_full_table_vs_oracle_n8(rng):
    """Full 2^8 table: Ising map against the statevector oracle."""
    circuit = random_circuit(rng, 8, 20)
    table = probability_vector(circuit)
    oracle = xbasis_distribution(simulate_statevector(circuit))
    assert np.max(np.abs(table - oracle)) <= 1e-10
