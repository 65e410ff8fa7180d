import math

import numpy as np
import pytest

from orbitope_kit.errors import OrbitopeKitError
from orbitope_kit.modules.circle_geometry import TWO_PI, geodesic_dist, regular_polygon
from orbitope_kit.modules.moment_curve import sm
from orbitope_kit.modules.orbitope_b4 import (
    EDGE_BOUND,
    THIRD_TURN,
    BoundaryPointB4,
    EdgeFace,
    FaceType,
    TriangleFace,
    VertexFace,
    arc_face_cone_check,
    classify_face,
    edge_point,
    edge_predicate_b2k,
    face_atoms,
    face_cone_separator,
    gauge,
    iota,
    radial_project,
    triangle_point,
    validate_boundary_point,
    vertex_point,
)


# shorter edges pin their endpoints only to third order in the coordinates
WELL_CONDITIONED_EDGE = 0.05


def random_boundary_point(rng: np.random.Generator) -> BoundaryPointB4:
    kind = rng.integers(0, 3)
    t = rng.uniform(0.0, TWO_PI)
    if kind == 0:
        return vertex_point(t)
    if kind == 1:
        length = EDGE_BOUND * (1.0 - rng.uniform())
        return edge_point(t, t + length, rng.uniform())
    return triangle_point(t, rng.dirichlet(np.ones(3)))


def assert_recovers(b: BoundaryPointB4, original: BoundaryPointB4, tol: float = 1e-6) -> None:
    """b is a valid boundary point with the coordinates, face and atoms of original."""
    validate_boundary_point(b)
    assert np.allclose(b.as_array(), original.as_array(), atol=1e-8)
    face = original.face
    if isinstance(face, EdgeFace) and geodesic_dist(face.t1, face.t2) < WELL_CONDITIONED_EDGE:
        assert b.face.face in ("edge", "vertex")
        return
    assert b.face.face == face.face
    angles, weights = face_atoms(b.face)
    for t, w in zip(*face_atoms(face)):
        j = int(np.argmin([geodesic_dist(t, s) for s in angles]))
        assert geodesic_dist(t, angles[j]) <= tol
        assert abs(w - weights[j]) <= tol


class TestBoundaryPoints:
    def test_vertex_coordinates(self):
        b = vertex_point(0.4)
        assert np.allclose(b.as_array(), sm(2, 0.4))
        assert b.face == VertexFace(t=0.4)

    def test_edge_is_stored_counterclockwise(self):
        b = edge_point(1.0, 0.2, 0.3)
        assert isinstance(b.face, EdgeFace)
        assert b.face.t1 == pytest.approx(0.2)
        assert b.face.t2 == pytest.approx(1.0)
        assert b.face.weight == pytest.approx(0.7)
        assert np.allclose(b.as_array(), 0.3 * sm(2, 1.0) + 0.7 * sm(2, 0.2))

    def test_triangle_is_rebased_into_first_third(self):
        b = triangle_point(4.5, [0.2, 0.3, 0.5])
        assert isinstance(b.face, TriangleFace)
        assert 0.0 <= b.face.t < THIRD_TURN
        expected = 0.2 * sm(2, 4.5) + 0.3 * sm(2, 4.5 + THIRD_TURN) + 0.5 * sm(2, 4.5 + 2 * THIRD_TURN)
        assert np.allclose(b.as_array(), expected)

    def test_example_file_point_is_valid(self):
        b = edge_point(0.0, 1.0, 0.5)
        validate_boundary_point(b)
        assert np.allclose(
            b.as_array(),
            [0.7701511529340699, 0.42073549240394825, 0.005003751699777301, 0.07056000402993361],
        )

    def test_long_edge_rejected(self):
        face = EdgeFace(t1=0.0, t2=2.5, weight=0.5)
        coords = 0.5 * sm(2, 0.0) + 0.5 * sm(2, 2.5)
        with pytest.raises(OrbitopeKitError, match="invalid-boundary-point"):
            validate_boundary_point(BoundaryPointB4(face=face, coordinates=tuple(coords)))

    def test_mismatched_coordinates_rejected(self):
        b = vertex_point(0.0)
        moved = BoundaryPointB4(face=b.face, coordinates=(1.0, 0.1, 1.0, 0.0))
        with pytest.raises(OrbitopeKitError, match="invalid-boundary-point"):
            validate_boundary_point(moved)

    def test_triangle_needs_three_weights(self):
        with pytest.raises(OrbitopeKitError, match="invalid-boundary-point"):
            triangle_point(0.0, [0.5, 0.5])

    def test_json_round_trip(self):
        b = triangle_point(1.0, [0.2, 0.3, 0.5])
        assert BoundaryPointB4.model_validate_json(b.model_dump_json()) == b


class TestGauge:
    def test_k1_is_exact(self):
        result = gauge([3.0, 4.0], k=1)
        assert result.scale == pytest.approx(0.2)
        assert result.refined
        assert result.support[0][0] == pytest.approx(math.atan2(4.0, 3.0))

    def test_vertex_direction(self):
        result = gauge(0.5 * sm(2, 1.3))
        assert result.refined
        assert result.scale == pytest.approx(2.0, abs=1e-9)
        assert isinstance(result.face, VertexFace)
        assert result.face.t == pytest.approx(1.3, abs=1e-8)

    def test_grid_answer_is_a_lower_bound(self):
        result = gauge(edge_point(0.3, 1.5, 0.4).as_array())
        assert result.lp_scale <= result.scale + 1e-12
        assert result.scale == pytest.approx(1.0, abs=1e-9)

    def test_homogeneity(self):
        x = np.array([0.1, -0.2, 0.05, 0.3])
        assert gauge(2.0 * x).scale == pytest.approx(gauge(x).scale / 2.0, rel=1e-8)

    def test_higher_order_reports_lp_support(self):
        result = gauge(sm(3, 0.7), grid=360, k=3)
        assert not result.refined
        assert result.face is None
        assert sum(w for _, w in result.support) == pytest.approx(1.0)
        assert result.scale == pytest.approx(1.0, abs=1e-2)

    def test_zero_vector(self):
        with pytest.raises(OrbitopeKitError, match="zero-vector"):
            gauge([0.0, 0.0, 0.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(OrbitopeKitError, match="dimension-mismatch"):
            gauge([1.0, 0.0, 0.0])

    def test_grid_too_coarse(self):
        with pytest.raises(OrbitopeKitError, match="grid-too-coarse"):
            gauge(sm(2, 0.0), grid=10)


class TestRadialProjection:
    def test_vertex_round_trip(self):
        b = radial_project(3.0 * sm(2, 2.2))
        assert isinstance(b.face, VertexFace)
        assert b.face.t == pytest.approx(2.2, abs=1e-8)

    def test_edge_round_trip(self):
        original = edge_point(5.9, 0.9, 0.35)
        b = radial_project(0.4 * original.as_array())
        assert isinstance(b.face, EdgeFace)
        assert geodesic_dist(b.face.t1, original.face.t1) <= 1e-8
        assert geodesic_dist(b.face.t2, original.face.t2) <= 1e-8
        assert b.face.weight == pytest.approx(0.35, abs=1e-8)

    def test_triangle_round_trip(self):
        original = triangle_point(0.8, [0.25, 0.35, 0.4])
        b = radial_project(original.as_array())
        assert isinstance(b.face, TriangleFace)
        assert np.allclose(b.as_array(), original.as_array(), atol=1e-8)
        assert b.face.t == pytest.approx(original.face.t, abs=1e-8)

    @pytest.mark.parametrize(
        "t1, t2, weight",
        [
            (2.5337, 2.5406, 0.787),
            (5.9562, 6.0191, 0.9945),
            (1.0, 1.004, 0.3),
            (0.2, 2.2, 0.999),
            (4.0, 4.0 + EDGE_BOUND, 0.002),
        ],
    )
    def test_short_and_lopsided_edges(self, t1, t2, weight):
        original = edge_point(t1, t2, weight)
        b = radial_project(1.7 * original.as_array())
        assert isinstance(b.face, EdgeFace)
        assert geodesic_dist(b.face.t1, original.face.t1) <= 1e-6
        assert geodesic_dist(b.face.t2, original.face.t2) <= 1e-6
        assert b.face.weight == pytest.approx(original.face.weight, abs=1e-6)

    def test_point_next_to_a_vertex(self):
        original = edge_point(3.0, 3.3, 1.0 - 1e-4)
        b = radial_project(original.as_array())
        assert_recovers(b, original)

    def test_random_round_trips(self):
        rng = np.random.default_rng(12)
        for _ in range(40):
            original = random_boundary_point(rng)
            scale = rng.uniform(0.2, 3.0)
            assert_recovers(radial_project(scale * original.as_array()), original)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", [2024, 0, 7])
    def test_acceptance_round_trips(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(1000):
            original = random_boundary_point(rng)
            assert_recovers(radial_project(original.as_array()), original)


class TestIota:
    def test_vertex_gives_dirac(self):
        mu = iota(vertex_point(1.0))
        assert len(mu) == 1
        assert mu.atoms[0].angle == pytest.approx(1.0)

    def test_edge_atoms(self):
        mu = iota(edge_point(0.0, 1.0, 0.5))
        assert np.allclose(sorted(mu.angles), [0.0, 1.0])
        assert np.allclose(mu.weights, 0.5)
        assert mu.diameter <= EDGE_BOUND

    def test_triangle_atoms(self):
        mu = iota(triangle_point(0.3, [0.2, 0.3, 0.5]))
        assert len(mu) == 3
        assert mu.diameter == pytest.approx(THIRD_TURN)
        assert mu.weights.sum() == pytest.approx(1.0)

    def test_invalid_point_rejected(self):
        b = BoundaryPointB4(face=VertexFace(t=0.0), coordinates=(0.0, 0.0, 0.0, 0.0))
        with pytest.raises(OrbitopeKitError, match="invalid-boundary-point"):
            iota(b)


class TestFaceStructure:
    @pytest.mark.parametrize(
        "points, expected",
        [
            ([0.5], FaceType.VERTEX),
            ([0.0, 1.0], FaceType.EDGE),
            ([0.0, 2.0], FaceType.EDGE),
            ([0.0, 2.2], FaceType.NOT_A_FACE),
            (list(regular_polygon(3, offset=0.4)), FaceType.TRIANGLE),
            ([0.0, 1.0, 2.0], FaceType.NOT_A_FACE),
            ([0.0, 0.5, 1.0, 1.5], FaceType.NOT_A_FACE),
        ],
    )
    def test_classify_face(self, points, expected):
        assert classify_face(points) is expected

    def test_classify_rejects_duplicates(self):
        with pytest.raises(OrbitopeKitError, match="degenerate-configuration"):
            classify_face([1.0, 1.0])

    @pytest.mark.parametrize(
        "k, t1, expected",
        [(2, 2.0, True), (2, 2.2, False), (3, 2.5, True), (3, 2.6, False), (1, 0.5, False)],
    )
    def test_edge_predicate(self, k, t1, expected):
        assert edge_predicate_b2k(k, 0.0, t1) is expected

    def test_edge_predicate_rejects_coincident_points(self):
        with pytest.raises(OrbitopeKitError, match="degenerate-configuration"):
            edge_predicate_b2k(2, 1.0, 1.0)


class TestConeSeparation:
    ARC = [0.0, 0.3, 0.6]

    @pytest.mark.parametrize(
        "face_points",
        [
            list(regular_polygon(3, offset=1.5)),
            [2.5, 3.5],
            [4.0],
            list(regular_polygon(3, offset=1.0)),
        ],
    )
    def test_separator_signs(self, face_points):
        y = face_cone_separator(self.ARC, face_points)
        assert all(sm(2, t) @ y > 0 for t in self.ARC)
        assert all(sm(2, s) @ y < 0 for s in face_points)

    def test_lp_check_agrees(self):
        result = arc_face_cone_check(self.ARC, regular_polygon(3, offset=1.5))
        assert result.status == "trivial-intersection-certified"

    def test_long_arc_rejected(self):
        with pytest.raises(OrbitopeKitError, match="invalid-parameter"):
            face_cone_separator([0.0, 1.0, 2.5], [4.0])

    def test_face_inside_arc_rejected(self):
        with pytest.raises(OrbitopeKitError, match="invalid-parameter"):
            face_cone_separator([0.0, 0.6], [0.3])

    def test_overlapping_sets_rejected(self):
        with pytest.raises(OrbitopeKitError, match="invalid-parameter"):
            face_cone_separator([0.0, 0.6], [0.6, 3.0])
