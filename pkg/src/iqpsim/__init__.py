"""Exact classical simulation of IQP (commuting-gate) circuits.

The package exposes three evaluation routes for the same outcome
distributions: a brute-force Ising partition-function map, an independent
dense statevector oracle, and two provably efficient fast paths (GF(2)
renormalization for sparse circuits, Pfaffians of planar Ising models for
planar two-body circuits), plus multiplicative-error analysis tools and a
file/CLI front end.
"""

from .angles import Angle, as_angle
from .circuit import (
    BipartiteInteractionGraph,
    GateTerm,
    IqpCircuit,
    OutcomeString,
    circuit_to_graph,
    gate,
    graph_to_circuit,
    iqp_to_mbiqp_outcome,
    mbiqp_to_iqp_outcome,
    pack_bits,
    unpack_bits,
)
from .ising import (
    IsingInstance,
    joint_probability,
    partition_function_bruteforce,
    probability_table,
    probability_vector,
)
from .oracle import (
    simulate_statevector,
    xbasis_distribution,
    xbasis_marginal,
    xbasis_probability,
)
from .sparse import (
    SparseClassification,
    SparseKind,
    classify,
    padded_circuit,
    renormalized_angles,
    sample_outcomes,
    sparse_probability,
    sparse_sample,
)
from .planar import (
    MergedGraph,
    PlanarEmbedding,
    PlanarIsingInstance,
    PlanarSampler,
    kasteleyn_orient,
    marginal_probability,
    merge_for_marginal,
    parity_admissible,
    path_renormalize,
    pfaffian,
    planar_joint_probability,
    planar_partition_function,
    planar_sample,
    verify_kasteleyn,
)
from .approx import (
    ErrorReport,
    epsilon_budget,
    gate_norm_error,
    multiplicative_error,
    per_step_error_compose,
)
from .generators import grid_instance, grid_planar_instance

__version__ = "0.1.0"
