"""
Convex-hull membership of the origin, with certificates either way, and
the Borsuk-Ulam witness searches built on it.

origin_in_conv decides whether 0 lies in conv{v_1, ..., v_n}. It returns a
Feasible certificate (convex weights with small residual) or a Separating
one (a unit vector z with z . v_i bounded below by a positive margin).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Annotated, Callable, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from orbitope_kit.config import config
from orbitope_kit.errors import ConsistencyError, OrbitopeKitError
from orbitope_kit.modules.circle_geometry import (
    TWO_PI,
    ConfigurationLike,
    as_angles,
    diameter,
)
from orbitope_kit.modules.moment_curve import sm_matrix
from orbitope_kit.modules.simplex import LPStatus, solve_lp
from orbitope_kit.utils.logging_config import caratheodory_logger


class Feasible(BaseModel):
    """Convex weights with sum(w_i v_i) ~ 0."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["feasible"] = "feasible"
    weights: tuple[float, ...]
    residual: float


class Separating(BaseModel):
    """Unit vector z with z . v_i >= margin > 0 for every input vector."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["separating"] = "separating"
    z: tuple[float, ...]
    margin: float


ConvexCertificate = Annotated[Union[Feasible, Separating], Field(discriminator="kind")]


def _stack(vectors: Union[np.ndarray, Sequence[Sequence[float]]]) -> np.ndarray:
    try:
        V = np.asarray(vectors, dtype=float)
    except ValueError as e:
        raise OrbitopeKitError("dimension-mismatch", "vectors differ in length") from e
    if V.size == 0:
        raise OrbitopeKitError("empty-input", "no vectors given")
    if V.ndim != 2:
        raise OrbitopeKitError("dimension-mismatch", "expected a list of equal-length vectors")
    if not np.all(np.isfinite(V)):
        raise OrbitopeKitError("invalid-input", "vectors must be finite")
    return V


def _max_margin_separator(V: np.ndarray) -> tuple[np.ndarray, float]:
    """maximize delta s.t. V z >= delta, z in [-1, 1]^d."""
    n, d = V.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-V, np.ones((n, 1))])
    bounds = [(-1.0, 1.0)] * d + [(0.0, None)]
    res = solve_lp(c, A_ub=A_ub, b_ub=np.zeros(n), bounds=bounds)
    if res.status is not LPStatus.OPTIMAL or res.x is None:
        raise ConsistencyError("lp-failure", f"margin LP ended with {res.status.value}")
    z = res.x[:d]
    norm = float(np.linalg.norm(z))
    if norm == 0.0:
        return z, 0.0
    return z / norm, float(np.min(V @ z) / norm)


def origin_in_conv(vectors: Union[np.ndarray, Sequence[Sequence[float]]]) -> Union[Feasible, Separating]:
    """
    Decide 0 in conv{v_i} by phase one of the simplex on
    sum(lam_i) = 1, sum(lam_i v_i) = 0, lam >= 0.

    Infeasible programs yield z from the phase-one dual; when its margin is
    too small a max-margin LP supplies the separator instead.
    """
    V = _stack(vectors)
    n, d = V.shape
    numerics = config.numerics

    A_eq = np.vstack([np.ones(n), V.T])
    b_eq = np.zeros(d + 1)
    b_eq[0] = 1.0
    res = solve_lp(np.zeros(n), A_eq=A_eq, b_eq=b_eq)

    if res.status is LPStatus.OPTIMAL and res.x is not None:
        weights = np.clip(res.x, 0.0, None)
        weights = weights / weights.sum()
        residual = float(np.max(np.abs(V.T @ weights)))
        caratheodory_logger.debug(f"origin in hull of {n} vectors, residual {residual:.3e}")
        return Feasible(weights=tuple(weights.tolist()), residual=residual)

    if res.status is not LPStatus.INFEASIBLE:
        raise ConsistencyError("lp-failure", f"membership LP ended with {res.status.value}")

    z: Optional[np.ndarray] = None
    margin = 0.0
    if res.farkas is not None:
        candidate = -res.farkas[1 : d + 1]
        norm = float(np.linalg.norm(candidate))
        if norm > 0.0:
            z = candidate / norm
            margin = float(np.min(V @ z))
    if z is None or margin < numerics.separation_tol:
        z, margin = _max_margin_separator(V)
    if margin < numerics.separation_tol:
        raise ConsistencyError(
            "farkas-alternative-failed",
            f"LP infeasible but best separation margin is {margin:.3e}",
        )
    caratheodory_logger.debug(f"origin separated from {n} vectors, margin {margin:.3e}")
    return Separating(z=tuple(z.tolist()), margin=margin)


def validate_certificate(
    certificate: Union[Feasible, Separating],
    vectors: Union[np.ndarray, Sequence[Sequence[float]]],
) -> bool:
    """Re-check a certificate against the vectors it was computed for."""
    V = _stack(vectors)
    numerics = config.numerics
    if isinstance(certificate, Feasible):
        w = np.asarray(certificate.weights)
        if w.size != V.shape[0] or np.any(w < -numerics.feasibility_tol):
            return False
        if abs(w.sum() - 1.0) > numerics.feasibility_tol:
            return False
        return bool(np.max(np.abs(V.T @ w)) <= numerics.feasibility_tol)
    z = np.asarray(certificate.z)
    if z.size != V.shape[1]:
        return False
    return bool(np.min(V @ z) >= numerics.separation_tol)


def caratheodory_reduce(
    vectors: Union[np.ndarray, Sequence[Sequence[float]]],
    weights: Sequence[float],
    tol: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Prune a convex representation of the origin to at most d+1 vectors.

    Returns (indices, weights) of the surviving support.
    """
    V = _stack(vectors)
    w = np.asarray(weights, dtype=float).copy()
    d = V.shape[1]
    support = np.flatnonzero(w > tol)

    while support.size > d + 1:
        system = np.vstack([V[support].T, np.ones(support.size)])
        _, _, vh = np.linalg.svd(system)
        eta = vh[-1]
        if not np.any(eta > tol):
            eta = -eta
        positive = eta > tol
        step = float(np.min(w[support][positive] / eta[positive]))
        w[support] -= step * eta
        w[support] = np.where(w[support] <= tol, 0.0, w[support])
        support = support[w[support] > tol]

    kept = w[support] / w[support].sum()
    return support, kept


class MissOriginReport(BaseModel):
    k: int
    points: tuple[float, ...]
    diameter: float
    bound: float
    certificate: ConvexCertificate
    consistent: bool


def miss_origin_bound(k: int) -> float:
    """2 pi k / (2k + 1)."""
    return TWO_PI * k / (2 * k + 1)


def verify_miss_origin(k: int, points: ConfigurationLike) -> MissOriginReport:
    """
    Check that sm(k, .) of a configuration with diameter below 2pi k/(2k+1)
    misses the origin. A Feasible certificate below the bound is reported
    as inconsistent.
    """
    angles = as_angles(points)
    if angles.size == 0:
        raise OrbitopeKitError("empty-configuration", "no points given")
    diam = diameter(angles)
    bound = miss_origin_bound(k)
    certificate = origin_in_conv(sm_matrix(k, angles).T)
    below = diam < bound - config.numerics.angle_eps
    consistent = not (below and isinstance(certificate, Feasible))
    if not consistent:
        caratheodory_logger.error(
            f"origin reached by k={k} configuration of diameter {diam:.6f} < {bound:.6f}"
        )
    return MissOriginReport(
        k=k,
        points=tuple(angles.tolist()),
        diameter=diam,
        bound=bound,
        certificate=certificate,
        consistent=consistent,
    )


class WitnessSet(BaseModel):
    """
    A set of small diameter whose image contains the origin in its hull.

    On S^1 the points are angles; on S^n they are unit vectors.
    """

    angles: Optional[tuple[float, ...]] = None
    unit_vectors: Optional[tuple[tuple[float, ...], ...]] = None
    weights: tuple[float, ...]
    diameter: float


class CircleSearchResult(BaseModel):
    status: Literal["found", "none-found"]
    witness: Optional[WitnessSet] = None
    bound: float
    grid: int
    candidates_checked: int


class SphereSearchResult(BaseModel):
    status: Literal["found", "none-found"]
    witness: Optional[WitnessSet] = None
    bound: float
    n: int
    simplex_diameter: float
    trials_run: int
    closest_separation: Optional[float] = None


class OddMapTable(BaseModel):
    """Values of a map S^1 -> R^d on the uniform grid 2 pi i / grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray

    @property
    def grid(self) -> int:
        return int(self.values.shape[0])

    @property
    def angles(self) -> np.ndarray:
        return TWO_PI * np.arange(self.grid) / self.grid


def tabulate_odd_map(f: Callable[[np.ndarray], np.ndarray], grid: int) -> OddMapTable:
    """Evaluate f (vectorized over an angle array, returning (grid, d)) on the grid."""
    if grid < 3:
        raise OrbitopeKitError("grid-too-coarse", f"grid must be at least 3, got {grid}")
    angles = TWO_PI * np.arange(grid) / grid
    values = np.atleast_2d(np.asarray(f(angles), dtype=float))
    if values.shape[0] != grid:
        values = values.T
    return OddMapTable(values=values)


def moment_curve_map(k: int, pad: int = 0) -> Callable[[np.ndarray], np.ndarray]:
    """t -> sm(k, t), followed by pad zero coordinates."""

    def f(angles: np.ndarray) -> np.ndarray:
        values = sm_matrix(k, angles).T
        if pad:
            values = np.hstack([values, np.zeros((values.shape[0], pad))])
        return values

    return f


def cubic_figure_map(angles: np.ndarray) -> np.ndarray:
    """t -> (cos t, sin t, cos 3t)."""
    angles = np.asarray(angles, dtype=float)
    return np.column_stack([np.cos(angles), np.sin(angles), np.cos(3 * angles)])


def _check_circle_table(table: OddMapTable) -> None:
    grid = table.grid
    if grid < 3:
        raise OrbitopeKitError("grid-too-coarse", f"grid must be at least 3, got {grid}")
    if grid % 2:
        raise OrbitopeKitError(
            "grid-not-antipodal", "oddness can only be checked on an even grid"
        )
    values = table.values
    half = grid // 2
    mismatch = float(np.max(np.abs(values[half:] + values[:half])))
    if mismatch > config.numerics.residual_tol:
        raise OrbitopeKitError("not-odd", f"f(t + pi) + f(t) reaches {mismatch:.3e}")


def _comb_candidates(grid: int, bound: float) -> list[tuple[int, ...]]:
    """
    Index sets of odd combs: p closed windows of width bound - D_p placed
    at evenly spread offsets, for odd p with D_p = 2 pi floor(p/2) / p <= bound.
    """
    eps = config.numerics.angle_eps
    step = TWO_PI / grid
    angles = TWO_PI * np.arange(grid) / grid
    seen: set[frozenset[int]] = set()
    candidates: list[tuple[int, ...]] = []

    p = 1
    while p <= grid:
        spread = TWO_PI * (p // 2) / p
        if spread > bound + eps:
            break
        width = bound - spread
        span = int(math.floor(width / step + 1e-9))
        for anchor in range(grid):
            members: list[int] = []
            for j in range(p):
                start = anchor + int(round(j * grid / p))
                members.extend((start + q) % grid for q in range(span + 1))
            key = frozenset(members)
            if key in seen:
                continue
            seen.add(key)
            ordered = tuple(sorted(key))
            if diameter(angles[list(ordered)]) > bound + eps:
                continue
            candidates.append(ordered)
        p += 2
    return candidates


def bu_circle_search(
    table: OddMapTable,
    diameter_bound: float,
    workers: Optional[int] = None,
) -> CircleSearchResult:
    """
    Search for a subset of the grid of diameter <= diameter_bound whose
    image under an odd map contains the origin in its convex hull.

    Candidates are scanned in a fixed order (comb order p ascending, then
    anchor ascending) and the first Feasible one is returned with its
    support pruned to at most d+1 points. Worker threads evaluate batches;
    the outcome does not depend on their number.
    """
    _check_circle_table(table)
    if diameter_bound <= 0:
        raise OrbitopeKitError("invalid-parameter", "diameter bound must be positive")
    workers = workers or config.search.workers
    batch_size = max(config.search.batch_size, workers)
    angles = table.angles
    candidates = _comb_candidates(table.grid, diameter_bound)
    caratheodory_logger.info(
        f"circle search: grid {table.grid}, bound {diameter_bound:.6f}, "
        f"{len(candidates)} candidate sets"
    )

    def evaluate(indices: tuple[int, ...]) -> Union[Feasible, Separating]:
        return origin_in_conv(table.values[list(indices)])

    checked = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for start in range(0, len(candidates), batch_size):
            batch = candidates[start : start + batch_size]
            outcomes = list(pool.map(evaluate, batch)) if workers > 1 else [evaluate(b) for b in batch]
            for indices, outcome in zip(batch, outcomes):
                checked += 1
                if not isinstance(outcome, Feasible):
                    continue
                support, weights = caratheodory_reduce(table.values[list(indices)], outcome.weights)
                chosen = angles[np.asarray(indices)[support]]
                witness = WitnessSet(
                    angles=tuple(chosen.tolist()),
                    weights=tuple(weights.tolist()),
                    diameter=diameter(chosen),
                )
                caratheodory_logger.info(
                    f"circle search found {len(chosen)}-point witness after {checked} candidates"
                )
                return CircleSearchResult(
                    status="found",
                    witness=witness,
                    bound=diameter_bound,
                    grid=table.grid,
                    candidates_checked=checked,
                )

    caratheodory_logger.info(f"circle search: no witness among {checked} candidates")
    return CircleSearchResult(
        status="none-found", bound=diameter_bound, grid=table.grid, candidates_checked=checked
    )


def sphere_simplex_diameter(n: int) -> float:
    """Diameter arccos(-1/(n+1)) of the regular (n+1)-simplex inscribed in S^n."""
    if n < 1:
        raise OrbitopeKitError("invalid-dimension", f"sphere dimension must be >= 1, got {n}")
    return math.acos(-1.0 / (n + 1))


def regular_simplex_vertices(n: int) -> np.ndarray:
    """The n+2 vertices of a regular simplex inscribed in S^n, shape (n+2, n+1)."""
    if n < 1:
        raise OrbitopeKitError("invalid-dimension", f"sphere dimension must be >= 1, got {n}")
    centered = np.eye(n + 2) - 1.0 / (n + 2)
    # orthonormal basis of the hyperplane sum(x) = 0 in R^{n+2}
    _, _, vh = np.linalg.svd(centered)
    basis = vh[: n + 1]
    vertices = centered @ basis.T
    return vertices / np.linalg.norm(vertices, axis=1, keepdims=True)


def brute_force_simplex_diameter(n: int) -> float:
    vertices = regular_simplex_vertices(n)
    return float(np.max(_sphere_distances(vertices)))


def _sphere_distances(points: np.ndarray) -> np.ndarray:
    return np.arccos(np.clip(points @ points.T, -1.0, 1.0))


def sphere_inclusion_map(pad: int = 0) -> Callable[[np.ndarray], np.ndarray]:
    """The inclusion S^n -> R^{n+1}, followed by pad zero coordinates."""

    def f(points: np.ndarray) -> np.ndarray:
        if pad:
            return np.hstack([points, np.zeros((points.shape[0], pad))])
        return points

    return f


def bu_sphere_search(
    f: Callable[[np.ndarray], np.ndarray],
    diameter_bound: float,
    n: int,
    n_samples: int,
    seed: int,
    n_trials: Optional[int] = None,
    extra_points: Optional[np.ndarray] = None,
) -> SphereSearchResult:
    """
    Randomized search on S^n for a set of diameter <= diameter_bound whose
    image contains the origin in its hull.

    Samples are drawn from a seeded generator and closed under antipodes.
    Each trial grows a set greedily from a random center through the
    samples within diameter_bound of it.
    """
    if n < 2:
        raise OrbitopeKitError("invalid-dimension", f"sphere dimension must be >= 2, got {n}")
    if diameter_bound <= 0:
        raise OrbitopeKitError("invalid-parameter", "diameter bound must be positive")
    eps = config.numerics.angle_eps
    n_trials = n_trials or config.search.sphere_trials
    max_support = config.search.max_support
    rng = np.random.default_rng(seed)

    blocks = []
    if n_samples > 0:
        raw = rng.standard_normal((n_samples, n + 1))
        blocks.append(raw / np.linalg.norm(raw, axis=1, keepdims=True))
    if extra_points is not None:
        extra = np.atleast_2d(np.asarray(extra_points, dtype=float))
        if extra.shape[1] != n + 1:
            raise OrbitopeKitError("dimension-mismatch", f"extra points must lie in R^{n + 1}")
        blocks.append(extra / np.linalg.norm(extra, axis=1, keepdims=True))
    if not blocks:
        raise OrbitopeKitError("empty-input", "no sample points")
    base = np.vstack(blocks)
    points = np.vstack([base, -base])

    values = np.atleast_2d(np.asarray(f(points), dtype=float))
    half = base.shape[0]
    mismatch = float(np.max(np.abs(values[half:] + values[:half])))
    if mismatch > config.numerics.residual_tol:
        raise OrbitopeKitError("not-odd", f"f(-x) + f(x) reaches {mismatch:.3e}")

    distances = _sphere_distances(points)
    compatible = distances <= diameter_bound + eps
    r_n = sphere_simplex_diameter(n)
    closest: Optional[float] = None
    caratheodory_logger.info(
        f"sphere search on S^{n}: {points.shape[0]} points, bound {diameter_bound:.6f}, "
        f"{n_trials} trials"
    )

    for trial in range(1, n_trials + 1):
        center = int(rng.integers(points.shape[0]))
        pool = np.flatnonzero(compatible[center])
        pool = pool[pool != center]
        chosen = [center]
        allowed = compatible[center].copy()
        for idx in rng.permutation(pool):
            if len(chosen) >= max_support:
                break
            if allowed[idx]:
                chosen.append(int(idx))
                allowed &= compatible[idx]

        outcome = origin_in_conv(values[chosen])
        if isinstance(outcome, Separating):
            closest = outcome.margin if closest is None else min(closest, outcome.margin)
            continue

        support, weights = caratheodory_reduce(values[chosen], outcome.weights)
        members = points[np.asarray(chosen)[support]]
        witness = WitnessSet(
            unit_vectors=tuple(tuple(row) for row in members.tolist()),
            weights=tuple(weights.tolist()),
            diameter=float(np.max(_sphere_distances(members))),
        )
        caratheodory_logger.info(f"sphere search found a witness in trial {trial}")
        return SphereSearchResult(
            status="found",
            witness=witness,
            bound=diameter_bound,
            n=n,
            simplex_diameter=r_n,
            trials_run=trial,
            closest_separation=closest,
        )

    caratheodory_logger.info(f"sphere search: no witness in {n_trials} trials")
    return SphereSearchResult(
        status="none-found",
        bound=diameter_bound,
        n=n,
        simplex_diameter=r_n,
        trials_run=n_trials,
        closest_separation=closest,
    )


class ConeCheckResult(BaseModel):
    status: Literal["trivial-intersection-certified", "inconclusive"]
    y: Optional[tuple[float, ...]] = None
    margin: float


def cone_intersection_check(
    U: Union[np.ndarray, Sequence[Sequence[float]]],
    V: Union[np.ndarray, Sequence[Sequence[float]]],
) -> ConeCheckResult:
    """
    Certify cone(U) ∩ cone(V) = {0} by a vector y with u . y >= 0 for all u
    in U and v . y <= -delta < 0 for all v in V (max delta, y in [-1, 1]^d).
    """
    U_m = _stack(U)
    V_m = _stack(V)
    if U_m.shape[1] != V_m.shape[1]:
        raise OrbitopeKitError("dimension-mismatch", "U and V live in different spaces")
    d = U_m.shape[1]
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.vstack(
        [
            np.hstack([-U_m, np.zeros((U_m.shape[0], 1))]),
            np.hstack([V_m, np.ones((V_m.shape[0], 1))]),
        ]
    )
    b_ub = np.zeros(A_ub.shape[0])
    bounds = [(-1.0, 1.0)] * d + [(0.0, None)]
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds)
    if res.status is not LPStatus.OPTIMAL or res.x is None:
        raise ConsistencyError("lp-failure", f"cone LP ended with {res.status.value}")
    y = res.x[:d]
    norm = float(np.linalg.norm(y))
    delta = float(res.x[-1])
    if delta <= config.numerics.separation_tol or norm == 0.0:
        caratheodory_logger.debug(f"cone check inconclusive, delta {delta:.3e}")
        return ConeCheckResult(status="inconclusive", margin=max(delta, 0.0))
    y = y / norm
    margin = float(-np.max(V_m @ y))
    return ConeCheckResult(
        status="trivial-intersection-certified", y=tuple(y.tolist()), margin=margin
    )
