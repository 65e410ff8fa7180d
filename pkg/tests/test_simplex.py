import numpy as np
import pytest

from orbitope_kit.config import LPConfig
from orbitope_kit.errors import OrbitopeKitError
from orbitope_kit.modules.simplex import LPStatus, solve_lp


class TestDenseSimplex:
    """Two-phase simplex on small textbook programs."""

    @pytest.fixture(params=["bland", "dantzig"])
    def settings(self, request):
        return LPConfig(pivot_rule=request.param)

    def test_inequality_program(self, settings):
        res = solve_lp(
            [-1.0, -1.0],
            A_ub=[[1.0, 2.0], [3.0, 1.0]],
            b_ub=[4.0, 6.0],
            settings=settings,
        )
        assert res.status is LPStatus.OPTIMAL
        assert res.fun == pytest.approx(-14 / 5)
        assert np.allclose(res.x, [8 / 5, 6 / 5])

    def test_equality_program_with_duals(self, settings):
        res = solve_lp([1.0, 2.0, 3.0], A_eq=[[1.0, 1.0, 1.0]], b_eq=[1.0], settings=settings)
        assert res.success
        assert np.allclose(res.x, [1.0, 0.0, 0.0])
        assert res.eq_duals.shape == (1,)
        assert res.eq_duals[0] == pytest.approx(1.0)

    def test_degenerate_program_terminates(self, settings):
        # classic cycling example for largest-coefficient pricing
        c = [-0.75, 20.0, -0.5, 6.0]
        A_ub = [[0.25, -8.0, -1.0, 9.0], [0.5, -12.0, -0.5, 3.0], [0.0, 0.0, 1.0, 0.0]]
        res = solve_lp(c, A_ub=A_ub, b_ub=[0.0, 0.0, 1.0], settings=settings)
        assert res.status is LPStatus.OPTIMAL
        assert res.fun == pytest.approx(-1.25)

    def test_infeasible_program_has_farkas_vector(self, settings):
        A_eq = np.array([[1.0, 1.0]])
        b_eq = np.array([-1.0])
        res = solve_lp([0.0, 0.0], A_eq=A_eq, b_eq=b_eq, settings=settings)
        assert res.status is LPStatus.INFEASIBLE
        assert b_eq @ res.farkas > 0
        assert np.all(A_eq.T @ res.farkas <= 1e-12)

    def test_unbounded_program(self, settings):
        res = solve_lp([-1.0, 0.0], A_ub=[[1.0, -1.0]], b_ub=[1.0], settings=settings)
        assert res.status is LPStatus.UNBOUNDED

    def test_bounds_shift_variables(self, settings):
        high = solve_lp([-1.0], bounds=[(-1.0, 2.0)], settings=settings)
        low = solve_lp([1.0], bounds=[(-1.0, 2.0)], settings=settings)
        assert high.x[0] == pytest.approx(2.0)
        assert low.x[0] == pytest.approx(-1.0)

    def test_iteration_limit(self):
        res = solve_lp(
            [-1.0, -1.0],
            A_ub=[[1.0, 2.0], [3.0, 1.0]],
            b_ub=[4.0, 6.0],
            settings=LPConfig(max_iterations=1),
        )
        assert res.status is LPStatus.ITERATION_LIMIT


class TestSolveLpValidation:
    def test_width_mismatch(self):
        with pytest.raises(OrbitopeKitError, match="dimension-mismatch"):
            solve_lp([1.0, 1.0], A_eq=[[1.0, 1.0, 1.0]], b_eq=[1.0])

    def test_rhs_mismatch(self):
        with pytest.raises(OrbitopeKitError, match="dimension-mismatch"):
            solve_lp([1.0, 1.0], A_eq=[[1.0, 1.0]], b_eq=[1.0, 2.0])

    def test_infinite_lower_bound_rejected(self):
        with pytest.raises(OrbitopeKitError, match="lower bounds must be finite"):
            solve_lp([1.0], bounds=[(None, 1.0)])


class TestAgainstHighs:
    """The in-house simplex and scipy's HiGHS agree on random bounded programs."""

    def test_random_programs(self):
        rng = np.random.default_rng(11)
        highs = LPConfig(backend="highs")
        for _ in range(25):
            n, m = 6, 4
            c = rng.normal(size=n)
            A_ub = rng.normal(size=(m, n))
            b_ub = rng.uniform(0.5, 2.0, size=m)
            A_eq = np.ones((1, n))
            bounds = [(0.0, 1.0)] * n
            ours = solve_lp(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds)
            theirs = solve_lp(
                c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds, settings=highs
            )
            assert ours.status is theirs.status
            if ours.success:
                assert ours.fun == pytest.approx(theirs.fun, abs=1e-8)
                assert theirs.backend == "highs"

    def test_highs_reports_infeasible(self):
        res = solve_lp(
            [0.0, 0.0], A_eq=[[1.0, 1.0]], b_eq=[-1.0], settings=LPConfig(backend="highs")
        )
        assert res.status is LPStatus.INFEASIBLE
        assert res.farkas is None
