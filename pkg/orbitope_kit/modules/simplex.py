"""
Dense two-phase tableau simplex for the small linear programs used across
orbitope_kit (convex-hull membership, gauge evaluation, transport, cone
separation).

Problems are accepted in linprog shape

    minimize c @ x  s.t.  A_ub @ x <= b_ub,  A_eq @ x == b_eq,  lo <= x <= hi

with finite lower bounds, and are rewritten into standard form
min c'x', A x' = b, x' >= 0 before pivoting. The standard-form rows are
ordered [equalities; inequalities; upper bounds].
"""

from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import linprog

from orbitope_kit.config import LPConfig, config
from orbitope_kit.errors import OrbitopeKitError
from orbitope_kit.utils.logging_config import lp_logger

Bound = tuple[Optional[float], Optional[float]]


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration-limit"


class LPResult(BaseModel):
    """Outcome of a linear program in the caller's variables."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    status: LPStatus
    x: Optional[np.ndarray] = None
    fun: Optional[float] = None
    eq_duals: Optional[np.ndarray] = None
    # Phase-one dual over the standard-form rows: b @ y > 0 and A.T @ y <= 0
    farkas: Optional[np.ndarray] = None
    infeasibility: float = 0.0
    iterations: int = 0
    backend: str = "simplex"

    @property
    def success(self) -> bool:
        return self.status is LPStatus.OPTIMAL


class DenseSimplex:
    """
    Tableau simplex on min c'x, A x = b, x >= 0.

    Phase one starts from an artificial identity basis; artificials that
    remain basic at level zero after phase one mark redundant rows and are
    barred from re-entering in phase two. Entering columns follow Bland's
    rule (or Dantzig pricing, falling back to Bland after a run of
    degenerate pivots); leaving rows take the minimum ratio with the
    smallest basic index on ties.
    """

    def __init__(self, settings: Optional[LPConfig] = None, feasibility_tol: Optional[float] = None):
        self.settings = settings or config.lp
        self.feasibility_tol = (
            feasibility_tol if feasibility_tol is not None else config.numerics.feasibility_tol
        )

    def solve(self, c: np.ndarray, A: np.ndarray, b: np.ndarray) -> LPResult:
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        c = np.asarray(c, dtype=float).reshape(-1)
        m, n = A.shape
        if b.size != m or c.size != n:
            raise OrbitopeKitError("dimension-mismatch", "inconsistent LP dimensions")

        row_sign = np.where(b < 0, -1.0, 1.0)
        A = A * row_sign[:, None]
        b = b * row_sign

        tableau = np.zeros((m + 1, n + m + 1))
        tableau[:m, :n] = A
        tableau[:m, n : n + m] = np.eye(m)
        tableau[:m, -1] = b
        basis = np.arange(n, n + m)

        # Phase one: minimize the sum of artificials
        phase_one_cost = np.concatenate([np.zeros(n), np.ones(m)])
        self._price(tableau, basis, phase_one_cost)
        allowed = np.ones(n + m, dtype=bool)
        status, iterations = self._iterate(tableau, basis, allowed)
        infeasibility = float(-tableau[-1, -1])

        if status is LPStatus.ITERATION_LIMIT:
            lp_logger.warning(f"phase one hit the iteration limit after {iterations} pivots")
            return LPResult(status=status, infeasibility=infeasibility, iterations=iterations)

        if infeasibility > self.feasibility_tol:
            duals = phase_one_cost[n:] - tableau[-1, n : n + m]
            lp_logger.debug(f"LP infeasible, phase-one objective {infeasibility:.3e}")
            return LPResult(
                status=LPStatus.INFEASIBLE,
                farkas=row_sign * duals,
                infeasibility=infeasibility,
                iterations=iterations,
            )

        self._drive_out_artificials(tableau, basis, n)

        # Phase two on the original costs; artificials may not re-enter
        phase_two_cost = np.concatenate([c, np.zeros(m)])
        self._price(tableau, basis, phase_two_cost)
        allowed[n:] = False
        status, more = self._iterate(tableau, basis, allowed)
        iterations += more

        if status is not LPStatus.OPTIMAL:
            lp_logger.debug(f"phase two ended with status {status.value}")
            return LPResult(status=status, infeasibility=infeasibility, iterations=iterations)

        values = np.zeros(n + m)
        values[basis] = tableau[:m, -1]
        x = np.maximum(values[:n], 0.0)
        duals = -tableau[-1, n : n + m]
        return LPResult(
            status=LPStatus.OPTIMAL,
            x=x,
            fun=float(c @ x),
            eq_duals=row_sign * duals,
            infeasibility=infeasibility,
            iterations=iterations,
        )

    @staticmethod
    def _price(tableau: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> None:
        m = basis.size
        cb = cost[basis]
        tableau[-1, :-1] = cost - cb @ tableau[:m, :-1]
        tableau[-1, -1] = -cb @ tableau[:m, -1]

    @staticmethod
    def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
        tableau[row] /= tableau[row, col]
        factors = tableau[:, col].copy()
        factors[row] = 0.0
        tableau -= np.outer(factors, tableau[row])
        rhs = tableau[:-1, -1]
        rhs[(rhs < 0.0) & (rhs > -1e-13)] = 0.0

    def _iterate(
        self, tableau: np.ndarray, basis: np.ndarray, allowed: np.ndarray
    ) -> tuple[LPStatus, int]:
        settings = self.settings
        use_bland = settings.pivot_rule == "bland"
        degenerate_run = 0

        for iteration in range(settings.max_iterations):
            reduced = tableau[-1, :-1]
            candidates = np.flatnonzero((reduced < -settings.optimality_tol) & allowed)
            if candidates.size == 0:
                return LPStatus.OPTIMAL, iteration

            if use_bland or degenerate_run >= settings.degenerate_switch:
                col = int(candidates[0])
            else:
                col = int(candidates[np.argmin(reduced[candidates])])

            column = tableau[:-1, col]
            rows = np.flatnonzero(column > settings.pivot_tol)
            if rows.size == 0:
                return LPStatus.UNBOUNDED, iteration

            ratios = tableau[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            row = int(ties[np.argmin(basis[ties])])

            degenerate_run = degenerate_run + 1 if best <= 1e-14 else 0
            self._pivot(tableau, row, col)
            basis[row] = col

        return LPStatus.ITERATION_LIMIT, settings.max_iterations

    def _drive_out_artificials(self, tableau: np.ndarray, basis: np.ndarray, n: int) -> None:
        for row in range(basis.size):
            if basis[row] < n:
                continue
            entries = np.abs(tableau[row, :n])
            nonzero = np.flatnonzero(entries > self.settings.pivot_tol)
            if nonzero.size:
                col = int(nonzero[0])
                self._pivot(tableau, row, col)
                basis[row] = col
            else:
                lp_logger.debug(f"row {row} is redundant; artificial stays basic at zero")


def _as_matrix(A: Optional[Union[np.ndarray, Sequence]], n: int) -> np.ndarray:
    if A is None:
        return np.zeros((0, n))
    matrix = np.atleast_2d(np.asarray(A, dtype=float))
    if matrix.size == 0:
        return np.zeros((0, n))
    if matrix.shape[1] != n:
        raise OrbitopeKitError("dimension-mismatch", "constraint matrix width differs from len(c)")
    return matrix


def _as_bounds(bounds: Optional[Union[Bound, Sequence[Bound]]], n: int) -> tuple[np.ndarray, np.ndarray]:
    if bounds is None:
        bounds = (0.0, None)
    if len(bounds) == 2 and not isinstance(bounds[0], (tuple, list)):
        pairs = [tuple(bounds)] * n  # type: ignore[arg-type]
    else:
        pairs = [tuple(pair) for pair in bounds]  # type: ignore[union-attr]
    if len(pairs) != n:
        raise OrbitopeKitError("dimension-mismatch", "one bound pair per variable required")
    lower = np.empty(n)
    upper = np.empty(n)
    for i, (lo, hi) in enumerate(pairs):
        if lo is None or not np.isfinite(lo):
            raise OrbitopeKitError("invalid-parameter", "lower bounds must be finite")
        lower[i] = float(lo)
        upper[i] = np.inf if hi is None else float(hi)
    if np.any(upper < lower):
        raise OrbitopeKitError("invalid-parameter", "a variable has upper bound below its lower bound")
    return lower, upper


def solve_lp(
    c: Union[np.ndarray, Sequence[float]],
    A_ub: Optional[np.ndarray] = None,
    b_ub: Optional[np.ndarray] = None,
    A_eq: Optional[np.ndarray] = None,
    b_eq: Optional[np.ndarray] = None,
    bounds: Optional[Union[Bound, Sequence[Bound]]] = None,
    settings: Optional[LPConfig] = None,
    feasibility_tol: Optional[float] = None,
) -> LPResult:
    """
    Solve a linear program given in linprog shape.

    The backend comes from settings.backend: "simplex" runs DenseSimplex,
    "highs" delegates to scipy.optimize.linprog (no Farkas vector).
    """
    settings = settings or config.lp
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    A_ub_m = _as_matrix(A_ub, n)
    A_eq_m = _as_matrix(A_eq, n)
    b_ub_v = np.zeros(0) if A_ub_m.shape[0] == 0 else np.asarray(b_ub, dtype=float).reshape(-1)
    b_eq_v = np.zeros(0) if A_eq_m.shape[0] == 0 else np.asarray(b_eq, dtype=float).reshape(-1)
    if b_ub_v.size != A_ub_m.shape[0] or b_eq_v.size != A_eq_m.shape[0]:
        raise OrbitopeKitError("dimension-mismatch", "right-hand side length differs from row count")
    lower, upper = _as_bounds(bounds, n)

    if settings.backend == "highs":
        return _solve_highs(c, A_ub_m, b_ub_v, A_eq_m, b_eq_v, lower, upper)

    # Shift x = lower + x' so every variable is nonnegative
    finite_upper = np.flatnonzero(np.isfinite(upper))
    n_ub, n_eq, n_hi = A_ub_m.shape[0], A_eq_m.shape[0], finite_upper.size
    width = n + n_ub + n_hi

    A_std = np.zeros((n_eq + n_ub + n_hi, width))
    b_std = np.zeros(n_eq + n_ub + n_hi)
    A_std[:n_eq, :n] = A_eq_m
    b_std[:n_eq] = b_eq_v - A_eq_m @ lower
    A_std[n_eq : n_eq + n_ub, :n] = A_ub_m
    A_std[n_eq : n_eq + n_ub, n : n + n_ub] = np.eye(n_ub)
    b_std[n_eq : n_eq + n_ub] = b_ub_v - A_ub_m @ lower
    for offset, var in enumerate(finite_upper):
        row = n_eq + n_ub + offset
        A_std[row, var] = 1.0
        A_std[row, n + n_ub + offset] = 1.0
        b_std[row] = upper[var] - lower[var]

    c_std = np.concatenate([c, np.zeros(n_ub + n_hi)])
    result = DenseSimplex(settings, feasibility_tol).solve(c_std, A_std, b_std)
    lp_logger.debug(
        f"simplex: {A_std.shape[0]} rows, {width} columns, status {result.status.value}, "
        f"{result.iterations} pivots"
    )
    if result.status is not LPStatus.OPTIMAL:
        return result

    assert result.x is not None and result.eq_duals is not None
    x = lower + result.x[:n]
    return result.model_copy(
        update={
            "x": x,
            "fun": float(c @ x),
            "eq_duals": result.eq_duals[:n_eq],
        }
    )


_HIGHS_STATUS = {
    0: LPStatus.OPTIMAL,
    1: LPStatus.ITERATION_LIMIT,
    2: LPStatus.INFEASIBLE,
    3: LPStatus.UNBOUNDED,
}


def _solve_highs(
    c: np.ndarray,
    A_ub: np.ndarray,
    b_ub: np.ndarray,
    A_eq: np.ndarray,
    b_eq: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
) -> LPResult:
    bounds = [(lo, None if np.isinf(hi) else hi) for lo, hi in zip(lower, upper)]
    res = linprog(
        c,
        A_ub=A_ub if A_ub.shape[0] else None,
        b_ub=b_ub if A_ub.shape[0] else None,
        A_eq=A_eq if A_eq.shape[0] else None,
        b_eq=b_eq if A_eq.shape[0] else None,
        bounds=bounds,
        method="highs",
    )
    status = _HIGHS_STATUS.get(res.status, LPStatus.INFEASIBLE)
    lp_logger.debug(f"highs: status {status.value} ({res.message})")
    if status is not LPStatus.OPTIMAL:
        return LPResult(status=status, backend="highs", infeasibility=float("nan"))
    eq_duals = None
    if A_eq.shape[0] and getattr(res, "eqlin", None) is not None:
        eq_duals = np.asarray(res.eqlin.marginals, dtype=float)
    return LPResult(
        status=status,
        x=np.asarray(res.x, dtype=float),
        fun=float(res.fun),
        eq_duals=eq_duals,
        iterations=int(getattr(res, "nit", 0)),
        backend="highs",
    )
