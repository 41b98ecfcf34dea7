"""Reduced-scale acceptance checks runnable from the CLI.

Each check is a scaled-down version of one acceptance criterion; the full
suite lives in the test tree.  Everything here is seeded and finishes in a
few seconds.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import ising, oracle, sparse
from .angles import Angle
from .circuit import (
    IqpCircuit,
    circuit_to_graph,
    iqp_to_mbiqp_outcome,
    mbiqp_to_iqp_outcome,
    pack_bits,
)
from .approx import epsilon_budget, gate_norm_error, per_step_error_compose
from .generators import grid_instance
from .gf2 import GF2Matrix, solve
import importlib

# the module, not the function of the same name: selftest calls through the
# module attribute so fault injection on iqpsim.planar.pfaffian.pfaffian bites
pfaffian_module = importlib.import_module("iqpsim.planar.pfaffian")
from .planar.engine import PlanarSampler, marginal_probability, planar_joint_probability
from .planar.instance import PlanarIsingInstance

Result = tuple[str, bool, str]


def _random_circuit(rng: np.random.Generator, n: int, gates: int) -> IqpCircuit:
    terms = []
    for _ in range(gates):
        size = int(rng.integers(1, min(3, n) + 1))
        qubits = rng.choice(n, size=size, replace=False) + 1
        terms.append((tuple(int(q) for q in qubits), Angle.from_radians(rng.uniform(0, 2 * np.pi))))
    return IqpCircuit.build(n, terms)


def _check_ising_map(rng: np.random.Generator) -> Result:
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 7))
        circuit = _random_circuit(rng, n, int(rng.integers(1, 3 * n)))
        state = oracle.simulate_statevector(circuit)
        for _ in range(4):
            bits = tuple(int(b) for b in rng.integers(0, 2, size=n))
            worst = max(
                worst,
                abs(ising.joint_probability(circuit, bits) - oracle.xbasis_probability(state, bits)),
            )
    return ("ising-map", worst <= 1e-10, f"worst |diff| = {worst:.3g}")


def _check_sparse(rng: np.random.Generator) -> Result:
    worked = IqpCircuit.build(
        3, [((1, 2), 0.3), ((2,), 0.5), ((1, 2, 3), 0.7)]
    )
    cls = sparse.classify(worked)
    if cls.kind is not sparse.SparseKind.IFRB:
        return ("sparse", False, f"worked example classified {cls.kind}")
    matrix = GF2Matrix.from_graph(circuit_to_graph(worked))
    if solve(matrix, (0, 0, 1)) != (1, 0, 1):
        return ("sparse", False, "worked example solve mismatch")
    worst = 0.0
    for _ in range(10):
        n = int(rng.integers(2, 6))
        # random invertible incidence matrix via randomized column set
        while True:
            cols = [
                tuple(int(q) + 1 for q in np.nonzero(rng.integers(0, 2, size=n))[0])
                for _ in range(n)
            ]
            if all(cols) and sparse.classify(
                IqpCircuit.build(n, [(c, 0.1) for c in cols])
            ).kind is sparse.SparseKind.IFRB:
                break
        circuit = IqpCircuit.build(
            n, [(c, Angle.from_radians(rng.uniform(0, 2 * np.pi))) for c in cols]
        )
        state = oracle.simulate_statevector(circuit)
        for _ in range(4):
            bits = tuple(int(b) for b in rng.integers(0, 2, size=n))
            worst = max(
                worst,
                abs(sparse.sparse_probability(circuit, bits) - oracle.xbasis_probability(state, bits)),
            )
    return ("sparse", worst <= 1e-10, f"worst |diff| = {worst:.3g}")


def _check_pfaffian(rng: np.random.Generator) -> Result:
    # the sign-sensitive definition cases catch a corrupted sign that
    # Pf^2 = det alone cannot see
    two = np.array([[0.0, 2.5], [-2.5, 0.0]], dtype=complex)
    if abs(pfaffian_module.pfaffian(two) - 2.5) > 1e-12:
        return ("pfaffian", False, "2x2 definition value wrong")
    worst = 0.0
    for _ in range(20):
        dim = int(rng.integers(1, 7)) * 2
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a = a - a.T
        pf = pfaffian_module.pfaffian(a)
        det = np.linalg.det(a)
        worst = max(worst, abs(pf * pf - det) / max(abs(det), 1e-12))
        if dim == 4:
            expansion = a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
            if abs(pf - expansion) > 1e-8 * max(1.0, abs(expansion)):
                return ("pfaffian", False, "4x4 expansion mismatch")
    odd = pfaffian_module.pfaffian(np.zeros((3, 3), dtype=complex))
    return ("pfaffian", worst <= 1e-8 and odd == 0, f"worst rel = {worst:.3g}")


def _check_planar_z(rng: np.random.Generator) -> Result:
    worst = 0.0
    for rows, cols in ((2, 2), (2, 3)):
        n_edges = 2 * rows * cols - rows - cols
        thetas = [Angle.from_radians(t) for t in rng.uniform(0, 2 * np.pi, n_edges)]
        circuit, embedding = grid_instance(rows, cols, thetas)
        pinst = PlanarIsingInstance.from_circuit(circuit, embedding)
        state = oracle.simulate_statevector(circuit)
        for bits in itertools.product((0, 1), repeat=circuit.n):
            worst = max(
                worst,
                abs(planar_joint_probability(pinst, bits) - oracle.xbasis_probability(state, bits)),
            )
    return ("planar-z", worst <= 1e-8, f"worst |diff| = {worst:.3g}")


def _check_marginal(rng: np.random.Generator) -> Result:
    circuit, embedding = grid_instance(2, 2, Angle.from_pi_fraction(1, 8))
    pinst = PlanarIsingInstance.from_circuit(circuit, embedding)
    state = oracle.simulate_statevector(circuit)
    order = [1, 2, 3, 4]
    worst = 0.0
    for k in range(1, 5):
        for bits in itertools.product((0, 1), repeat=k):
            worst = max(
                worst,
                abs(
                    marginal_probability(pinst, order[:k], bits)
                    - oracle.xbasis_marginal(state, order[:k], bits)
                ),
            )
    return ("marginal", worst <= 1e-8, f"worst |diff| = {worst:.3g}")


def _check_sampler(rng: np.random.Generator) -> Result:
    circuit, embedding = grid_instance(2, 2, Angle.from_pi_fraction(1, 8))
    pinst = PlanarIsingInstance.from_circuit(circuit, embedding)
    exact = oracle.xbasis_distribution(oracle.simulate_statevector(circuit))
    sampler = PlanarSampler(pinst, rng=rng)
    counts = np.zeros(16)
    draws = 4000
    for _ in range(draws):
        counts[pack_bits(sampler.sample())] += 1
    tv = 0.5 * float(np.abs(counts / draws - exact).sum())
    return ("sampler", tv < 0.05, f"TV = {tv:.4f}")


def _check_mbiqp(rng: np.random.Generator) -> Result:
    circuit = _random_circuit(rng, 3, 3)
    graph = circuit_to_graph(circuit)
    mv = tuple(int(b) for b in rng.integers(0, 2, size=3))
    mu = tuple(int(b) for b in rng.integers(0, 2, size=3))
    s = mbiqp_to_iqp_outcome(mv, mu, graph)
    mv_back, mu_back = iqp_to_mbiqp_outcome(s, mu, graph)
    return ("mbiqp", mv_back == mv and mu_back == mu, "")


def _check_formulas(_: np.random.Generator) -> Result:
    ok = abs(epsilon_budget(1) - (math.sqrt(2) - 1) / (math.sqrt(2) + 1)) <= 1e-12
    ok = ok and gate_norm_error(math.pi) == 4.0
    factor = per_step_error_compose([epsilon_budget(10)] * 10)
    ok = ok and factor <= math.sqrt(2) + 1e-12
    return ("formulas", ok, "")


def run_selftest(seed: int = 0) -> list[Result]:
    rng = np.random.default_rng(seed)
    checks = (
        _check_ising_map,
        _check_mbiqp,
        _check_sparse,
        _check_pfaffian,
        _check_planar_z,
        _check_marginal,
        _check_sampler,
        _check_formulas,
    )
    results = []
    for check in checks:
        try:
            results.append(check(rng))
        except Exception as exc:  # a crash is a failure, not an abort
            results.append((check.__name__.removeprefix("_check_"), False, repr(exc)))
    return results


__all__ = ["run_selftest"]
