import math

import numpy as np
import pytest

from orbitope_kit.errors import OrbitopeKitError
from orbitope_kit.modules.circle_geometry import TWO_PI, regular_polygon
from orbitope_kit.modules.moment_curve import sm_matrix
from orbitope_kit.modules.raked_poly import (
    RakedPolynomial,
    evaluate,
    from_coefficients,
    from_roots,
    min_on_set,
    positive_raked_poly,
    root_parity_sign,
    roots,
    sample_series,
    separating_poly,
    sign_pattern,
)


def spread_roots(rng: np.random.Generator, count: int) -> np.ndarray:
    """Random roots with no coincident or antipodal pair."""
    while True:
        v = rng.uniform(0.0, TWO_PI, size=count)
        sines = np.abs(np.sin(v[:, None] - v[None, :]))
        if np.all(sines[np.triu_indices(count, k=1)] > 0.05):
            return v


class TestRakedPolynomial:
    def test_coefficients_interleave(self):
        p = RakedPolynomial(k=2, a=(1.0, 2.0), b=(3.0, 4.0))
        assert p.coefficients.tolist() == [1.0, 3.0, 2.0, 4.0]
        assert p.degree == 3

    def test_length_validation(self):
        with pytest.raises(ValueError, match="length 2"):
            RakedPolynomial(k=2, a=(1.0,), b=(1.0, 2.0))

    def test_evaluate_scalar_and_array(self):
        p = from_coefficients(2, [0.0, 0.0, 1.0, 0.0])
        assert evaluate(p, 0.0) == pytest.approx(1.0)
        assert np.allclose(p(np.array([0.0, math.pi / 3])), [1.0, -1.0])

    def test_antipodal_sign_flip(self):
        p = from_coefficients(3, [0.3, -1.2, 0.5, 0.1, -0.7, 0.9])
        t = np.linspace(0.0, TWO_PI, 17)
        assert np.allclose(p(t + math.pi), -p(t), atol=1e-12)

    def test_separating_poly_dimension(self):
        with pytest.raises(OrbitopeKitError, match="dimension-mismatch"):
            separating_poly(2, [1.0, 0.0, 0.0])


class TestFromRoots:
    def test_triple_angle_identity(self):
        p = from_roots([0.0, 2 * math.pi / 3, 4 * math.pi / 3])
        assert np.allclose(p.a, [0.0, 0.0], atol=1e-9)
        assert np.allclose(p.b, [0.0, 0.25], atol=1e-9)

    def test_single_root(self):
        p = from_roots([1.0])
        assert p.a[0] == pytest.approx(math.sin(1.0))
        assert p.b[0] == pytest.approx(-math.cos(1.0))

    @pytest.mark.parametrize("k", [2, 3])
    def test_prescribed_zeros_and_sign_alternation(self, k):
        rng = np.random.default_rng(20 + k)
        for _ in range(25):
            v = spread_roots(rng, 2 * k - 1)
            p = from_roots(v)
            assert np.max(np.abs(p(np.concatenate([v, v + math.pi])))) <= 1e-9
            for t in rng.uniform(0.0, TWO_PI, size=10):
                direct = float(np.prod(np.sin(v - t)))
                if abs(direct) > 1e-6:
                    assert np.sign(p(t)) == root_parity_sign(v, t)
                    assert p(t) == pytest.approx(direct, abs=1e-9)

    def test_even_count_rejected(self):
        with pytest.raises(OrbitopeKitError, match="invalid-cardinality"):
            from_roots([0.0, 1.0])

    def test_duplicate_roots_rejected(self):
        with pytest.raises(OrbitopeKitError, match="degenerate-roots"):
            from_roots([0.0, 0.0, 1.0])

    def test_antipodal_roots_rejected(self):
        with pytest.raises(OrbitopeKitError, match="degenerate-roots"):
            from_roots([0.0, math.pi, 1.0])


class TestPositivity:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_min_on_regular_polygon_is_nonpositive(self, k):
        rng = np.random.default_rng(5 + k)
        polygon = regular_polygon(2 * k + 1, offset=0.3)
        for _ in range(40):
            p = from_coefficients(k, rng.normal(size=2 * k))
            value, _ = min_on_set(p, polygon)
            assert value <= 1e-12

    def test_positive_poly_on_short_arc(self):
        points = [0.0, 0.4, 0.8, 1.2, 1.6, 2.0]
        p = positive_raked_poly(2, points)
        assert p is not None
        assert np.all(p(np.asarray(points)) > 0)

    def test_no_positive_poly_on_pentagon(self):
        assert positive_raked_poly(2, regular_polygon(5)) is None

    def test_positive_poly_matches_certificate_direction(self):
        points = np.array([0.1, 0.5, 0.9])
        p = positive_raked_poly(1, points)
        values = sm_matrix(1, points).T @ p.coefficients
        assert np.all(values > 0)

    def test_min_on_empty_set(self):
        with pytest.raises(OrbitopeKitError, match="empty-configuration"):
            min_on_set(from_roots([1.0]), [])


class TestRoots:
    @pytest.fixture
    def triple(self):
        return from_coefficients(2, [0.0, 0.0, 0.0, 1.0])

    def test_roots_of_sin_3t(self, triple):
        found = roots(triple, 64)
        assert found.size == 6
        assert np.allclose(found, np.arange(6) * math.pi / 3, atol=1e-9)

    def test_sign_pattern_alternates(self, triple):
        arcs = sign_pattern(triple, 64)
        assert len(arcs) == 6
        signs = [arc.sign for arc in arcs]
        assert all(a == -b for a, b in zip(signs, signs[1:]))
        assert arcs[0].sign == 1

    def test_roots_of_constructed_polynomial(self):
        v = [0.2, 1.5, 2.4]
        found = roots(from_roots(v), 256)
        expected = np.sort(np.mod(np.concatenate([v, np.asarray(v) + math.pi]), TWO_PI))
        assert np.allclose(found, expected, atol=1e-8)

    def test_grid_too_coarse(self, triple):
        with pytest.raises(OrbitopeKitError, match="grid-too-coarse"):
            roots(triple, 8)

    def test_zero_polynomial(self):
        with pytest.raises(OrbitopeKitError, match="invalid-parameter"):
            roots(from_coefficients(1, [0.0, 0.0]), 16)

    def test_sample_series(self, triple):
        series = sample_series(triple, 8)
        assert len(series) == 8
        t, value = series[1]
        assert t == pytest.approx(TWO_PI / 8)
        assert value == pytest.approx(math.sin(3 * TWO_PI / 8))
