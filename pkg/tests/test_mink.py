"""
Tests for the Lorentzian primitives: inner products, planes, reflections
and plane relations.
"""
import math

import numpy as np
import pytest

from src.geometry.mink import (
    J,
    Motion,
    NonUnitNormalError,
    Plane,
    PointClass,
    RelationKind,
    ZeroVectorError,
    apply,
    apply_plane,
    canonical_keys,
    compose,
    gram_of,
    inner,
    plane_relation,
    planes_equal,
    point_class,
    quantize,
    random_motion,
    reflection,
    vec4,
)


class TestInnerProduct:
    """Test the (3,1) form and vector classification"""

    def test_signature(self):
        assert inner([1, 0, 0, 0], [1, 0, 0, 0]) == 1.0
        assert inner([0, 0, 0, 1], [0, 0, 0, 1]) == -1.0
        assert inner([1, 2, 3, 4], [4, 3, 2, 1]) == 4 + 6 + 6 - 4

    def test_gram_of_matches_inner(self):
        rows = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0.5], [0.2, 0.1, 0, 1.0]])
        g = gram_of(rows)
        for i in range(3):
            for j in range(3):
                assert g[i, j] == pytest.approx(inner(rows[i], rows[j]))

    def test_point_classes(self):
        assert point_class([0, 0, 0, 1]) is PointClass.TIME_LIKE
        assert point_class([1, 0, 0, 1]) is PointClass.LIGHT_LIKE
        assert point_class([1, 0, 0, 0]) is PointClass.SPACE_LIKE

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVectorError):
            point_class([0, 0, 0, 0])

    def test_vec4_shape(self):
        assert vec4(1, 2, 3, 4).tolist() == [1, 2, 3, 4]
        with pytest.raises(ValueError):
            vec4(1, 2, 3)


class TestPlane:
    """Test plane construction and keys"""

    def test_from_vector_normalizes(self):
        p = Plane.from_vector([2.0, 0, 0, 1.0])
        assert inner(p.normal, p.normal) == pytest.approx(1.0)
        assert p.is_unit()

    def test_time_like_vector_rejected(self):
        with pytest.raises(NonUnitNormalError):
            Plane.from_vector([0, 0, 0, 1.0])

    def test_normal_is_read_only(self):
        p = Plane(np.array([1.0, 0, 0, 0]))
        with pytest.raises(ValueError):
            p.normal[0] = 2.0

    def test_key_ignores_orientation(self):
        p = Plane.from_vector([0.3, -0.2, 1.0, 0.4])
        assert p.key() == p.flipped().key()
        assert planes_equal(p, p.flipped())

    def test_quantize_removes_negative_zero(self):
        q = quantize(np.array([-0.0, -1e-12, 0.5]))
        assert q.tobytes() == np.array([0.0, 0.0, 0.5]).tobytes()

    def test_canonical_keys_rowwise(self):
        rows = np.array([[1.0, 0, 0, 0], [-1.0, 0, 0, 0], [0, 1.0, 0, 0]])
        keys = canonical_keys(rows)
        assert keys[0] == keys[1]
        assert keys[0] != keys[2]


class TestReflection:
    """Test reflections and motions"""

    @pytest.fixture
    def plane(self):
        return Plane.from_vector([0.6, -0.3, 0.8, 0.5])

    def test_reflection_is_lorentzian_involution(self, plane):
        r = reflection(plane)
        assert r.is_lorentzian()
        assert np.allclose(compose(r, r).m, np.eye(4))

    def test_reflection_flips_own_normal(self, plane):
        image = apply_plane(reflection(plane), plane)
        assert np.allclose(image.normal, -plane.normal)

    def test_reflection_fixes_points_on_plane(self, plane):
        # a point on the plane: time-like vector orthogonal to n
        x = np.array([0.0, 0.0, 0.0, 1.0])
        x = x - inner(x, plane.normal) * plane.normal
        assert np.allclose(apply(reflection(plane), x), x)

    def test_non_unit_normal_rejected(self):
        with pytest.raises(NonUnitNormalError):
            reflection(Plane(np.array([2.0, 0, 0, 0])))

    def test_inverse(self, plane):
        m = compose(reflection(plane), reflection(Plane.from_vector([1.0, 0.2, 0, 0.3])))
        assert np.allclose(compose(m, m.inverse()).m, np.eye(4))
        assert np.allclose(m.m.T @ J @ m.m, J)

    def test_random_motion_word(self):
        planes = [Plane(np.eye(4)[i]) for i in range(3)]
        motion, word = random_motion(planes, 5, np.random.default_rng(7))
        assert len(word) == 5
        assert all(0 <= i < 3 for i in word)
        assert motion.is_lorentzian()

    def test_identity(self):
        assert Motion.identity().is_lorentzian()


class TestPlaneRelation:
    """Test intersecting, parallel and ultraparallel plane pairs"""

    def test_perpendicular_planes(self):
        rel = plane_relation(Plane(np.array([1.0, 0, 0, 0])), Plane(np.array([0, 1.0, 0, 0])))
        assert rel.kind is RelationKind.INTERSECTING
        assert rel.angle == pytest.approx(math.pi / 2)

    def test_equal_planes(self):
        p = Plane(np.array([1.0, 0, 0, 0]))
        assert plane_relation(p, p.flipped()).kind is RelationKind.EQUAL

    def test_ultraparallel_distance(self):
        d = 0.7
        p = Plane(np.array([1.0, 0, 0, 0]))
        q = Plane(np.array([math.cosh(d), 0, 0, math.sinh(d)]))
        rel = plane_relation(p, q)
        assert rel.kind is RelationKind.ULTRAPARALLEL
        assert rel.distance == pytest.approx(d)
        assert rel.angle is None

    def test_parallel(self):
        p = Plane(np.array([1.0, 0, 0, 0]))
        q = Plane(np.array([1.0, 1.0, 0, 1.0]))
        assert plane_relation(p, q).kind is RelationKind.PARALLEL
