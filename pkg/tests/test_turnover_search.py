"""
Tests for the turnover search: angle recognition, invariant planes and
end-to-end searches on small developments.
"""
import importlib
import math

import numpy as np
import pytest

from src.geometry.develop import develop
from src.geometry.mink import Plane, inner, planes_equal
from src.geometry.tetgen import TetSpec, realize_spec
from src.turnover.lattice import TriangleType
from src.turnover.search import (
    InvalidSearchConfigError,
    NonSpacelikeError,
    RankDeficientError,
    SearchConfig,
    angle_as_submultiple,
    TurnoverWitness,
    common_perpendicular,
    filter_vertex_parallel,
    found_types,
    search,
    triangle_angles,
    turnover_type,
)


class TestAngles:
    """Test recognition of submultiples of pi and triangle orientation"""

    @pytest.mark.parametrize("c", [2, 3, 7, 12, 100])
    def test_exact_submultiples(self, c):
        assert angle_as_submultiple(math.pi / c) == c

    def test_perturbed_angle_rejected(self):
        assert angle_as_submultiple(math.pi / 7 + 1e-4) is None

    def test_out_of_range(self):
        assert angle_as_submultiple(0.0) is None
        assert angle_as_submultiple(math.pi) is None
        assert angle_as_submultiple(2 * math.pi / 3) is None
        assert angle_as_submultiple(math.pi / 150, cmax=100) is None

    def test_tolerance_scales(self):
        assert angle_as_submultiple(math.pi / 5 + 1e-8, eps=1e-7) == 5
        assert angle_as_submultiple(math.pi / 5 + 1e-6, eps=1e-7) is None

    def test_triangle_orientation(self):
        oriented = triangle_angles(0.0, -0.5, -math.cos(math.pi / 7))
        assert oriented is not None
        e1, e2, angles = oriented
        assert (e1, e2) == (1, 1)
        assert angles == pytest.approx((math.pi / 2, math.pi / 3, math.pi / 7))

    def test_flipped_plane_is_reoriented(self):
        e1, e2, angles = triangle_angles(0.0, 0.5, math.cos(math.pi / 7))
        assert e2 == -1
        assert sum(angles) < math.pi

    def test_no_triangle(self):
        # three mutually perpendicular planes: angle sum pi/2 * 3 for every pattern
        assert triangle_angles(0.0, 0.0, 0.0) is None

    def test_turnover_type_must_be_hyperbolic(self):
        assert turnover_type(7, 3, 2) == TriangleType(2, 3, 7)
        with pytest.raises(ValueError):
            turnover_type(2, 3, 6)


class TestCommonPerpendicular:
    """Test the invariant plane of a plane triple"""

    def test_planes_through_vertical_axis(self):
        p1 = Plane(np.array([1.0, 0, 0, 0]))
        p2 = Plane(np.array([0, 1.0, 0, 0]))
        p3 = Plane(np.array([-1.0, -1.0, 0, 1.0]))
        w = common_perpendicular(p1, p2, p3)
        assert planes_equal(w, Plane(np.array([0, 0, 1.0, 0])))
        for p in (p1, p2, p3):
            assert abs(inner(w.normal, p.normal)) < 1e-12

    def test_spherical_triple(self):
        planes = [Plane(np.eye(4)[i]) for i in range(3)]
        with pytest.raises(NonSpacelikeError):
            common_perpendicular(*planes)

    def test_rank_deficient(self):
        p1 = Plane(np.array([1.0, 0, 0, 0]))
        p2 = Plane(np.array([0, 1.0, 0, 0]))
        with pytest.raises(RankDeficientError):
            common_perpendicular(p1, p2, p1.flipped())


class TestSearchConfig:
    """Test search configuration validation"""

    def test_defaults(self):
        cfg = SearchConfig()
        assert cfg.depth == 8
        assert cfg.cmax == 100

    @pytest.mark.parametrize("kwargs", [{"depth": 1}, {"cmax": 1}, {"eps": 0.0}, {"angle_eps": -1.0}, {"tile_cap": 0}])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidSearchConfigError):
            SearchConfig(**kwargs)


class TestSearch:
    """End-to-end searches on realized tetrahedra"""

    @pytest.fixture(scope="class")
    def truncated(self):
        tet = realize_spec(TetSpec.parse("4,4,4;4,4,4"))
        cfg = SearchConfig(depth=4)
        return tet, cfg, develop(tet, cfg.depth), search(tet, cfg)

    def test_witness_geometry(self, truncated):
        _, cfg, _, witnesses = truncated
        for w in witnesses:
            assert w.type.is_hyperbolic()
            for p in (w.pi_f, w.pi_1, w.pi_2):
                assert abs(inner(w.invariant_plane.normal, p.normal)) < 1e-7
            angles = [
                math.acos(-inner(w.pi_f.normal, w.pi_1.normal)),
                math.acos(-inner(w.pi_f.normal, w.pi_2.normal)),
                math.acos(-inner(w.pi_1.normal, w.pi_2.normal)),
            ]
            orders = sorted(round(math.pi / a) for a in angles)
            assert tuple(orders) == w.type.entries()

    def test_truncation_turnovers_filtered(self, truncated):
        _, _, state, witnesses = truncated
        for w in witnesses:
            assert not any(planes_equal(w.invariant_plane, p.plane) for p in state.truncation_planes)

    def test_filter_rejects_truncation_plane(self, truncated):
        _, _, state, witnesses = truncated
        assert all(filter_vertex_parallel(w, state) for w in witnesses)
        truncation = state.truncation_planes[0].plane
        face = next(p.plane for p in state.planes if p.plane.key() != truncation.key())
        vertex_parallel = TurnoverWitness(
            type=TriangleType(4, 4, 4),
            pi_f=face,
            pi_1=face,
            pi_2=face,
            e1=None,
            e2=None,
            invariant_plane=truncation,
        )
        assert not filter_vertex_parallel(vertex_parallel, state)

    def test_witnesses_unique_and_sorted(self, truncated):
        _, _, _, witnesses = truncated
        keys = [(w.type, w.invariant_plane.key()) for w in witnesses]
        assert len(keys) == len(set(keys))
        assert keys == sorted(keys)
        assert found_types(witnesses) == sorted({w.type for w in witnesses})

    def test_supergroups_annotated(self, truncated):
        _, _, _, witnesses = truncated
        for w in witnesses:
            assert w.type not in w.supergroups
            assert all(isinstance(s, TriangleType) for s in w.supergroups)

    def test_reuses_deeper_state(self, truncated):
        tet, cfg, state, witnesses = truncated
        again = search(tet, cfg, state=state)
        assert [w.sort_key() for w in again] == [w.sort_key() for w in witnesses]

    @pytest.mark.slow
    def test_thread_count_does_not_change_result(self):
        tet = realize_spec(TetSpec.parse("2,7,3;2,8,3"))
        single = search(tet, SearchConfig(depth=5, threads=1))
        pooled = search(tet, SearchConfig(depth=5, threads=4))
        assert [w.sort_key() for w in single] == [w.sort_key() for w in pooled]

    @pytest.mark.slow
    def test_finds_predicted_turnover(self):
        tet = realize_spec(TetSpec.parse("2,6,3;2,6,3"))
        types = found_types(search(tet, SearchConfig(depth=8)))
        assert TriangleType(3, 6, 6) in types


class TestPackageExports:
    """Test that the package keeps its submodules reachable"""

    def test_search_submodule_not_shadowed(self):
        package = importlib.import_module("src.turnover")
        module = importlib.import_module("src.turnover.search")
        assert package.search is module
        assert module.SearchConfig is SearchConfig
        assert package.search_turnovers is search
