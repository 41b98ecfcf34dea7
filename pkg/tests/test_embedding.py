"""Rotation systems: faces, Euler verification, Kasteleyn orientations."""

import pytest

from iqpsim.angles import Angle
from iqpsim.errors import EmbeddingError
from iqpsim.generators import grid_instance
from iqpsim.planar.embedding import (
    PlanarEmbedding,
    face_parities,
    kasteleyn_orient,
    verify_kasteleyn,
)


def triangle_embedding():
    return PlanarEmbedding(
        n_vertices=3,
        edges=((0, 1), (1, 2), (2, 0)),
        rotations=((0, 2), (1, 0), (2, 1)),
    )


def test_validation_rejects_bad_rotations():
    with pytest.raises(EmbeddingError):
        PlanarEmbedding(n_vertices=2, edges=((0, 1),), rotations=((0,), ()))
    with pytest.raises(EmbeddingError):
        PlanarEmbedding(n_vertices=2, edges=((0, 0),), rotations=((0, 0), ()))
    with pytest.raises(EmbeddingError):
        PlanarEmbedding(n_vertices=3, edges=((0, 1),), rotations=((0,), (0,), (0,)))


def test_grid_faces_and_euler():
    _, embedding = grid_instance(3, 4, Angle.from_pi_fraction(1, 8))
    faces = embedding.faces()
    # 2x3 bounded squares plus the outer face
    assert len(faces) == 7
    assert embedding.genus() == 0
    sizes = sorted(len(f) for f in faces)
    assert sizes == [4, 4, 4, 4, 4, 4, 10]


def test_twisted_rotation_is_detected():
    """Swapping two rotation entries at one grid vertex bumps the genus."""
    _, embedding = grid_instance(3, 3, Angle.from_pi_fraction(1, 8))
    rotations = [list(r) for r in embedding.rotations]
    center = 4
    rotations[center][0], rotations[center][1] = rotations[center][1], rotations[center][0]
    twisted = PlanarEmbedding(
        n_vertices=embedding.n_vertices,
        edges=embedding.edges,
        rotations=tuple(tuple(r) for r in rotations),
    )
    assert twisted.genus() > 0
    with pytest.raises(EmbeddingError):
        twisted.require_planar()


def test_single_edge_orientation():
    embedding = PlanarEmbedding(n_vertices=2, edges=((0, 1),), rotations=((0,), (0,)))
    orientation = kasteleyn_orient(embedding)
    assert verify_kasteleyn(embedding, orientation)


def test_triangle_orientation():
    embedding = triangle_embedding()
    orientation = kasteleyn_orient(embedding)
    assert verify_kasteleyn(embedding, orientation)
    # one face is exempt, the other must be odd
    parities = face_parities(embedding, orientation)
    assert any(p % 2 == 1 for p in parities)


def test_grid_5x5_all_inner_faces_odd():
    _, embedding = grid_instance(5, 5, Angle.from_pi_fraction(1, 8))
    orientation = kasteleyn_orient(embedding)
    assert verify_kasteleyn(embedding, orientation)
    faces = embedding.faces()
    outer = max(range(len(faces)), key=lambda i: len(faces[i]))
    parities = face_parities(embedding, orientation)
    inner = [p for i, p in enumerate(parities) if i != outer]
    assert len(inner) == 16
    assert all(p % 2 == 1 for p in inner)


def test_disconnected_components():
    # two disjoint single edges
    embedding = PlanarEmbedding(
        n_vertices=4,
        edges=((0, 1), (2, 3)),
        rotations=((0,), (0,), (1,), (1,)),
    )
    assert embedding.genus() == 0
    orientation = kasteleyn_orient(embedding)
    assert verify_kasteleyn(embedding, orientation)
