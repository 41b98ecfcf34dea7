"""Planar-circuit fast path: embeddings, Fisher decoration, Pfaffians, marginals."""

from .embedding import PlanarEmbedding, kasteleyn_orient, verify_kasteleyn
from .engine import (
    PlanarIsingInstance,
    PlanarSampler,
    marginal_probability,
    parity_admissible,
    path_renormalize,
    planar_joint_probability,
    planar_partition_function,
    planar_sample,
)
from .merged import MergedGraph, merge_for_marginal
from .pfaffian import pfaffian

__all__ = [
    "PlanarEmbedding",
    "kasteleyn_orient",
    "verify_kasteleyn",
    "PlanarIsingInstance",
    "PlanarSampler",
    "parity_admissible",
    "path_renormalize",
    "planar_partition_function",
    "planar_joint_probability",
    "marginal_probability",
    "planar_sample",
    "MergedGraph",
    "merge_for_marginal",
    "pfaffian",
]
