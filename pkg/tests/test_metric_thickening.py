import math
from unittest.mock import Mock

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbitope_kit.errors import ConsistencyError, OrbitopeKitError
from orbitope_kit.modules import orbitope_b4
from orbitope_kit.modules.circle_geometry import TWO_PI, regular_polygon
from orbitope_kit.modules.metric_thickening import (
    DiscreteMeasure,
    dirac,
    homotopy_probe,
    homotopy_step,
    make_measure,
    pushforward_sm,
    sample_measure,
    union_support_excess,
    wasserstein1,
)
from orbitope_kit.modules.moment_curve import sm, sm_matrix
from orbitope_kit.modules.orbitope_b4 import EDGE_BOUND, GaugeResult


@pytest.fixture
def rng():
    return np.random.default_rng(31)


def grid_atoms(pairs):
    angles = [TWO_PI * j / 64 for j, _ in pairs]
    mass = np.array([m for _, m in pairs], dtype=float)
    return angles, mass / mass.sum()


atom_lists = st.lists(
    st.tuples(st.integers(0, 63), st.integers(1, 9)), min_size=1, max_size=4
).map(grid_atoms)


class TestMakeMeasure:
    def test_two_atoms(self):
        mu = make_measure([0.0, math.pi / 2], [0.5, 0.5], math.pi)
        assert len(mu) == 2
        assert mu.diameter == pytest.approx(math.pi / 2)

    def test_close_atoms_are_merged(self):
        mu = make_measure([1.0, 1.0 + 1e-12], [0.25, 0.75], 1.0)
        assert len(mu) == 1
        assert mu.atoms[0].weight == pytest.approx(1.0)
        assert mu.atoms[0].angle == pytest.approx(1.0)

    def test_merge_across_zero(self):
        mu = make_measure([1e-13, TWO_PI - 1e-13], [0.5, 0.5], 0.1)
        assert len(mu) == 1

    def test_tiny_weights_dropped(self):
        mu = make_measure([0.0, 3.0], [1.0, 1e-13], 0.5)
        assert len(mu) == 1
        assert mu.atoms[0].angle == 0.0

    def test_angles_are_canonical(self):
        mu = make_measure([-0.5], [1.0], 0.0)
        assert mu.atoms[0].angle == pytest.approx(TWO_PI - 0.5)

    @pytest.mark.parametrize(
        "points, weights, match",
        [
            ([0.0, 1.0], [1.0], "one weight per point"),
            ([], [], "at least one atom"),
            ([0.0, 1.0], [1.5, -0.5], "nonnegative"),
            ([0.0, 1.0], [0.5, 0.4], "sum to"),
        ],
    )
    def test_invalid_weights(self, points, weights, match):
        with pytest.raises(OrbitopeKitError, match=match):
            make_measure(points, weights, math.pi)

    def test_negative_scale(self):
        with pytest.raises(OrbitopeKitError, match="invalid-scale"):
            make_measure([0.0], [1.0], -1.0)

    def test_diameter_exceeds_scale(self):
        with pytest.raises(OrbitopeKitError, match="diameter-exceeds-scale"):
            make_measure([0.0, 2.0], [0.5, 0.5], 1.0)

    def test_sampled_measures_respect_scale(self, rng):
        for _ in range(50):
            mu = sample_measure(1.7, rng)
            assert isinstance(mu, DiscreteMeasure)
            assert mu.diameter <= 1.7 + 1e-12
            assert mu.weights.sum() == pytest.approx(1.0)


class TestWasserstein:
    def test_antipodal_diracs(self):
        distance, plan = wasserstein1(dirac(0.0), dirac(math.pi))
        assert distance == pytest.approx(math.pi)
        assert plan.entries == ((0, 0, 1.0),)

    def test_split_mass_to_midpoint(self):
        mu = make_measure([0.0, math.pi / 2], [0.5, 0.5], math.pi)
        distance, _ = wasserstein1(mu, dirac(math.pi / 4))
        assert distance == pytest.approx(math.pi / 4)

    def test_rotation_by_small_angle(self):
        mu = make_measure([0.0, math.pi / 2], [0.5, 0.5], math.pi)
        nu = make_measure([0.1, math.pi / 2 + 0.1], [0.5, 0.5], math.pi)
        distance, plan = wasserstein1(mu, nu)
        assert distance == pytest.approx(0.1, abs=1e-9)
        assert {(i, j) for i, j, _ in plan.entries} == {(0, 0), (1, 1)}

    def test_identical_measures(self):
        mu = make_measure([0.3, 1.0, 1.4], [0.2, 0.5, 0.3], math.pi)
        distance, _ = wasserstein1(mu, mu)
        assert distance == pytest.approx(0.0, abs=1e-12)

    def test_metric_axioms(self, rng):
        measures = [sample_measure(math.pi, rng, max_support=4) for _ in range(8)]
        d = np.array([[wasserstein1(a, b)[0] for b in measures] for a in measures])
        assert np.allclose(d, d.T, atol=1e-9)
        assert np.all(d >= 0.0)
        assert np.all(d <= math.pi + 1e-9)
        for i in range(len(measures)):
            for j in range(len(measures)):
                for k in range(len(measures)):
                    assert d[i, k] <= d[i, j] + d[j, k] + 1e-9

    def test_plan_marginals(self, rng):
        mu = sample_measure(2.0, rng, max_support=5)
        nu = sample_measure(2.0, rng, max_support=5)
        _, plan = wasserstein1(mu, nu)
        rows = np.zeros(len(mu))
        cols = np.zeros(len(nu))
        for i, j, mass in plan.entries:
            rows[i] += mass
            cols[j] += mass
        assert np.allclose(rows, mu.weights, atol=1e-9)
        assert np.allclose(cols, nu.weights, atol=1e-9)


class TestPushforward:
    def test_dirac_maps_to_curve(self):
        assert np.allclose(pushforward_sm(2, dirac(0.8)), sm(2, 0.8))

    def test_matches_weighted_sum(self):
        mu = make_measure([0.2, 0.9, 1.1], [0.2, 0.3, 0.5], math.pi)
        expected = sm_matrix(3, [0.2, 0.9, 1.1]) @ np.array([0.2, 0.3, 0.5])
        assert np.allclose(pushforward_sm(3, mu), expected)

    def test_pentagon_lands_on_origin(self):
        mu = make_measure(regular_polygon(5), np.full(5, 0.2), 4 * math.pi / 5 + 1e-9)
        assert np.linalg.norm(pushforward_sm(2, mu)) <= 1e-12

    def test_short_arc_stays_away_from_origin(self, rng):
        for _ in range(30):
            mu = sample_measure(2.4, rng)
            assert np.linalg.norm(pushforward_sm(2, mu)) > 0.0

    @given(atom_lists, atom_lists, st.floats(min_value=0.05, max_value=0.95), st.integers(1, 3))
    def test_linear_in_mixtures(self, first, second, c, k):
        mu = make_measure(*first, math.pi)
        nu = make_measure(*second, math.pi)
        mixture = make_measure(
            np.concatenate([mu.angles, nu.angles]),
            np.concatenate([c * mu.weights, (1.0 - c) * nu.weights]),
            math.pi,
        )
        expected = c * pushforward_sm(k, mu) + (1.0 - c) * pushforward_sm(k, nu)
        assert np.allclose(pushforward_sm(k, mixture), expected, atol=1e-12)


class TestHomotopyStep:
    @pytest.fixture
    def mu(self):
        return make_measure([0.1, 0.7, 1.5], [0.3, 0.3, 0.4], EDGE_BOUND)

    def test_zero_time_is_identity(self, mu):
        assert homotopy_step(mu, 0.0) == mu

    def test_dirac_is_fixed(self):
        result = homotopy_step(dirac(0.5), 0.5)
        assert np.allclose(result.angles, 0.5, atol=1e-8)
        assert result.diameter <= 1e-8

    def test_face_measure_barycenter_is_fixed(self):
        triple = make_measure(regular_polygon(3, offset=0.2), np.full(3, 1.0 / 3.0), EDGE_BOUND)
        result = homotopy_step(triple, 0.5)
        assert np.allclose(pushforward_sm(2, result), pushforward_sm(2, triple), atol=1e-8)
        assert result.diameter <= EDGE_BOUND + 1e-8

    @pytest.mark.parametrize("s", np.linspace(0.0, 1.0, 11).tolist())
    def test_diameter_along_the_path(self, mu, s):
        result = homotopy_step(mu, s)
        assert result.diameter <= EDGE_BOUND + 1e-8
        assert result.weights.sum() == pytest.approx(1.0)

    def test_endpoint_is_a_face_measure(self, mu):
        end = homotopy_step(mu, 1.0)
        assert 1 <= len(end) <= 3

    def test_invalid_time(self, mu):
        with pytest.raises(OrbitopeKitError, match="invalid-parameter"):
            homotopy_step(mu, 1.5)

    def test_wide_measure_rejected(self):
        wide = make_measure([0.0, 2.4], [0.5, 0.5], math.pi)
        with pytest.raises(OrbitopeKitError, match="diameter-exceeds-scale"):
            homotopy_step(wide, 0.5)

    @pytest.mark.parametrize(
        "angles, weights",
        [
            ([2.53372, 2.54058], [0.787, 0.213]),
            ([5.9562, 6.0191], [0.9945, 0.0055]),
            ([1.0, 1.03], [0.5, 0.5]),
            ([4.0, 4.004], [0.3, 0.7]),
        ],
    )
    def test_close_atom_pairs(self, angles, weights):
        mu = make_measure(angles, weights, EDGE_BOUND)
        half = homotopy_step(mu, 0.5)
        assert half.diameter <= EDGE_BOUND + 1e-8
        end = homotopy_step(mu, 1.0)
        assert len(end) == 2
        assert np.allclose(end.angles, mu.angles, atol=1e-6)
        assert np.allclose(end.weights, mu.weights, atol=1e-6)


class TestHomotopyExcess:
    def test_circle_case_has_no_excess(self):
        report = homotopy_probe(1, 0.5, n_trials=40, seed=3)
        assert report.trials == 40
        assert report.max_excess <= 1e-12

    @pytest.mark.parametrize("seed", [0, 2, 8])
    def test_orbitope_case_small_run(self, seed):
        report = homotopy_probe(2, EDGE_BOUND, n_trials=30, seed=seed)
        assert report.max_excess <= 1e-6
        assert report.mean_excess <= report.max_excess

    def test_worker_count_does_not_change_report(self):
        single = homotopy_probe(1, 1.0, n_trials=20, seed=4, workers=1)
        pooled = homotopy_probe(1, 1.0, n_trials=20, seed=4, workers=3)
        assert single == pooled

    def test_union_excess_for_a_dirac(self):
        assert union_support_excess(2, dirac(1.0)) == pytest.approx(0.0, abs=1e-8)

    def test_union_excess_needs_an_exact_face(self, monkeypatch):
        unresolved = GaugeResult(
            scale=1.0, lp_scale=1.0, support=((1.0, 0.5), (3.5, 0.5)), refined=False
        )
        monkeypatch.setattr(orbitope_b4, "gauge", Mock(return_value=unresolved))
        mu = make_measure([0.9, 1.1], [0.5, 0.5], EDGE_BOUND)
        with pytest.raises(ConsistencyError, match="face-not-resolved"):
            union_support_excess(2, mu)

    @pytest.mark.parametrize("k, r", [(2, 1.0), (2, 2.6), (1, 2.5)])
    def test_scale_outside_window(self, k, r):
        with pytest.raises(OrbitopeKitError, match="invalid-scale"):
            homotopy_probe(k, r, n_trials=1, seed=0)

    def test_needs_trials(self):
        with pytest.raises(OrbitopeKitError, match="invalid-parameter"):
            homotopy_probe(1, 0.5, n_trials=0, seed=0)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", [0, 1, 2, 4, 5, 6])
    def test_many_seeds(self, seed):
        report = homotopy_probe(2, EDGE_BOUND, n_trials=150, seed=seed)
        assert report.max_excess <= 1e-8

    @pytest.mark.slow
    def test_acceptance_sweep(self):
        report = homotopy_probe(2, EDGE_BOUND, n_trials=1000, seed=2024)
        assert report.max_excess <= 1e-8
