"""
Tests for developing the reflection tiling and querying developed planes
and edges.
"""
import math

import numpy as np
import pytest

from src.geometry.develop import (
    BlowUpError,
    DepthExceededError,
    EdgeNotCoplanarError,
    PlaneKind,
    PlaneNotInStateError,
    coplanar_edges,
    develop,
    develop_around_edge,
    observation_report,
    side_planes,
)
from src.geometry.mink import Plane, inner, planes_equal, reflection
from src.geometry.tetgen import Edge, TetSpec, realize_spec


@pytest.fixture(scope="module")
def ideal_tet():
    return realize_spec(TetSpec.parse("2,6,3;2,6,3"))


@pytest.fixture(scope="module")
def truncated_tet():
    return realize_spec(TetSpec.parse("4,4,4;4,4,4"))


class TestDevelop:
    """Test tile growth, plane collection and guards"""

    def test_depth_zero(self, ideal_tet):
        state = develop(ideal_tet, 0)
        assert len(state.tiles) == 1
        assert state.tiles[0].word == ()
        assert len(state.face_planes) == 4
        assert len(state.edges) == 6
        assert state.truncation_planes == []

    def test_depth_one(self, ideal_tet):
        state = develop(ideal_tet, 1)
        assert len(state.tiles) == 5
        assert sorted(t.word for t in state.tiles) == [(), (0,), (1,), (2,), (3,)]

    def test_no_word_repeats_a_letter(self, ideal_tet):
        state = develop(ideal_tet, 4)
        for tile in state.tiles:
            assert all(a != b for a, b in zip(tile.word, tile.word[1:]))

    def test_tiles_are_distinct(self, ideal_tet):
        state = develop(ideal_tet, 4)
        keys = {t.motion.key() for t in state.tiles}
        assert len(keys) == len(state.tiles)

    def test_truncation_planes_collected(self, truncated_tet):
        state = develop(truncated_tet, 1)
        assert len(state.truncation_planes) >= 4
        assert all(p.kind is PlaneKind.TRUNCATION for p in state.truncation_planes)
        assert state.truncation_normals().shape[1] == 4

    def test_lookup(self, ideal_tet):
        state = develop(ideal_tet, 1)
        found = state.lookup(ideal_tet.faces[2].flipped())
        assert found is not None
        assert found.kind is PlaneKind.FACE
        assert state.lookup(Plane(np.array([1.0, 0.3, 0.2, 0.1]))) is None

    @pytest.mark.parametrize("depth", [-1, 13])
    def test_depth_guard(self, ideal_tet, depth):
        with pytest.raises(DepthExceededError):
            develop(ideal_tet, depth)

    def test_tile_cap(self, ideal_tet):
        with pytest.raises(BlowUpError):
            develop(ideal_tet, 6, tile_cap=20)


class TestEdges:
    """Test coplanar edges and side planes"""

    @pytest.fixture
    def state(self, ideal_tet):
        return develop(ideal_tet, 6)

    def test_coplanar_base_edges(self, ideal_tet, state):
        edges = coplanar_edges(state, ideal_tet.faces[0])
        # F_A holds BC, CD and BD
        base = [e for e in edges if e.word == ()]
        assert {e.edge for e in base} == {Edge.BC, Edge.CD, Edge.BD}
        assert edges[:3] == base
        for e in edges:
            for end in e.endpoints:
                assert abs(inner(end.unit, ideal_tet.faces[0].normal)) < 1e-7

    def test_unknown_plane(self, state):
        with pytest.raises(PlaneNotInStateError):
            coplanar_edges(state, Plane.from_vector([1.0, 0.37, 0.21, 0.13]))

    def test_side_planes_around_edge(self, ideal_tet, state):
        edge = next(e for e in state.edges if e.word == () and e.edge is Edge.AD)
        k = ideal_tet.spec.label(Edge.AD)
        pi_f = ideal_tet.faces[Edge.AD.faces[0]]
        sides = side_planes(state, edge, pi_f)
        assert len(sides) == k - 1
        assert [s.angle for s in sides] == pytest.approx([j * math.pi / k for j in range(1, k)])
        other = ideal_tet.faces[Edge.AD.faces[1]]
        assert any(planes_equal(s.plane, other) for s in sides)

    def test_side_plane_angle_matches_normals(self, ideal_tet, state):
        edge = next(e for e in state.edges if e.word == () and e.edge is Edge.AB)
        pi_f = ideal_tet.faces[Edge.AB.faces[0]]
        (side,) = side_planes(state, edge, pi_f)
        assert side.angle == pytest.approx(math.pi / 2)
        assert abs(inner(side.plane.normal, pi_f.normal)) < 1e-9

    def test_edge_not_in_plane(self, ideal_tet, state):
        edge = next(e for e in state.edges if e.word == () and e.edge is Edge.AB)
        with pytest.raises(EdgeNotCoplanarError):
            side_planes(state, edge, ideal_tet.faces[0])

    def test_develop_around_edge(self, ideal_tet):
        k = ideal_tet.spec.label(Edge.AD)
        tiles = develop_around_edge(ideal_tet, Edge.AD)
        assert len(tiles) == 2 * k
        closing = reflection(ideal_tet.faces[Edge.AD.faces[1]]).m
        assert np.allclose(tiles[-1].motion.m @ closing, np.eye(4), atol=1e-8)


class TestObservations:
    """Test the disjointness checks on developments"""

    def test_truncated_development(self, truncated_tet):
        report = observation_report(develop(truncated_tet, 3))
        assert report.passed
        assert report.truncation_pairs > 0
        assert report.edge_pairs > 0
        assert report.face_truncation_pairs == 4 * len(develop(truncated_tet, 3).tiles)

    def test_mixed_truncated_development(self):
        tet = realize_spec(TetSpec.parse("2,7,3;2,8,3"))
        report = observation_report(develop(tet, 3))
        assert report.passed
        assert report.spec == "2,7,3;2,8,3"
