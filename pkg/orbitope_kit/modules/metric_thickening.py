"""
Finitely supported probability measures on S^1 and the Vietoris-Rips
metric thickening VR^m(S^1; r): measures whose support has diameter <= r,
metrized by the 1-Wasserstein distance over geodesic cost.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from orbitope_kit.config import config
from orbitope_kit.errors import ConsistencyError, OrbitopeKitError
from orbitope_kit.modules.circle_geometry import (
    TWO_PI,
    AngleLike,
    ConfigurationLike,
    angle_of,
    as_angles,
    canonical_angle,
    diameter,
    pairwise_geodesic,
)
from orbitope_kit.modules.moment_curve import sm_matrix
from orbitope_kit.modules.simplex import LPStatus, solve_lp
from orbitope_kit.utils.logging_config import thickening_logger


class Atom(BaseModel):
    model_config = ConfigDict(frozen=True)

    angle: float
    weight: float


class DiscreteMeasure(BaseModel):
    """Atoms with distinct canonical angles and positive weights summing to one."""

    model_config = ConfigDict(frozen=True)

    atoms: tuple[Atom, ...]

    @property
    def angles(self) -> np.ndarray:
        return np.array([a.angle for a in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.atoms], dtype=float)

    @property
    def diameter(self) -> float:
        return diameter(self.angles)

    def __len__(self) -> int:
        return len(self.atoms)


def _merge_close_atoms(angles: np.ndarray, weights: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(angles)
    a, w = angles[order], weights[order]
    groups: list[list[int]] = [[0]]
    for i in range(1, a.size):
        if a[i] - a[groups[-1][-1]] <= radius:
            groups[-1].append(i)
        else:
            groups.append([i])
    if len(groups) > 1 and a[groups[0][0]] + TWO_PI - a[groups[-1][-1]] <= radius:
        groups[0] = groups.pop() + groups[0]

    merged_angles, merged_weights = [], []
    for members in groups:
        ga, gw = a[members], w[members]
        if len(members) == 1:
            merged_angles.append(float(ga[0]))
        else:
            merged_angles.append(
                canonical_angle(math.atan2(float(gw @ np.sin(ga)), float(gw @ np.cos(ga))))
            )
        merged_weights.append(float(gw.sum()))
    return np.asarray(merged_angles), np.asarray(merged_weights)


def make_measure(
    points: ConfigurationLike,
    weights: Union[np.ndarray, Sequence[float]],
    r: float,
) -> DiscreteMeasure:
    """
    Build a measure in VR^m(S^1; r).

    Weights below the floor are dropped, atoms closer than the merge radius
    are combined, and the weights are renormalized to sum to one.
    """
    settings = config.thickening
    angles = as_angles(points)
    w = np.asarray(weights, dtype=float).reshape(-1)
    if angles.size != w.size:
        raise OrbitopeKitError("invalid-weights", "one weight per point required")
    if angles.size == 0:
        raise OrbitopeKitError("invalid-weights", "a measure needs at least one atom")
    if not np.all(np.isfinite(w)) or np.any(w < -settings.weight_floor):
        raise OrbitopeKitError("invalid-weights", "weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > 1e-9:
        raise OrbitopeKitError("invalid-weights", f"weights sum to {w.sum():.12g}, not 1")
    if r < 0:
        raise OrbitopeKitError("invalid-scale", f"scale must be nonnegative, got {r}")

    keep = w > settings.weight_floor
    if not np.any(keep):
        raise OrbitopeKitError("invalid-weights", "every weight is below the floor")
    angles, w = _merge_close_atoms(angles[keep], w[keep], settings.merge_radius)
    w = w / w.sum()

    diam = diameter(angles)
    if diam > r + 1e-12:
        raise OrbitopeKitError(
            "diameter-exceeds-scale", f"support diameter {diam:.12g} exceeds r = {r:.12g}"
        )
    return DiscreteMeasure(
        atoms=tuple(Atom(angle=float(a), weight=float(x)) for a, x in zip(angles, w))
    )


def dirac(t: AngleLike) -> DiscreteMeasure:
    return DiscreteMeasure(atoms=(Atom(angle=angle_of(t), weight=1.0),))


class TransportPlan(BaseModel):
    """Nonzero entries (i, j, mass) of an optimal coupling."""

    entries: tuple[tuple[int, int, float], ...]
    cost: float


def wasserstein1(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[float, TransportPlan]:
    """1-Wasserstein distance over geodesic cost, with an optimal plan."""
    a, b = mu.weights, nu.weights
    cost = pairwise_geodesic(np.concatenate([mu.angles, nu.angles]))[: a.size, a.size :]

    if a.size == 1 or b.size == 1:
        plan = np.outer(a, b)
        total = float(np.sum(plan * cost))
        return total, _plan_from_matrix(plan, total)

    m, n = a.size, b.size
    A_eq = np.zeros((m + n, m * n))
    for i in range(m):
        A_eq[i, i * n : (i + 1) * n] = 1.0
    for j in range(n):
        A_eq[m + j, j::n] = 1.0
    res = solve_lp(cost.reshape(-1), A_eq=A_eq, b_eq=np.concatenate([a, b]))
    if res.status is not LPStatus.OPTIMAL or res.x is None:
        raise ConsistencyError("lp-failure", f"transport LP ended with {res.status.value}")
    plan = res.x.reshape(m, n)
    total = float(max(res.fun or 0.0, 0.0))
    thickening_logger.debug(f"W1 over {m}x{n} atoms: {total:.15g}")
    return total, _plan_from_matrix(plan, total)


def _plan_from_matrix(plan: np.ndarray, total: float) -> TransportPlan:
    rows, cols = np.nonzero(plan > 1e-15)
    return TransportPlan(
        entries=tuple((int(i), int(j), float(plan[i, j])) for i, j in zip(rows, cols)),
        cost=total,
    )


def pushforward_sm(k: int, mu: DiscreteMeasure) -> np.ndarray:
    """Barycenter sum_i w_i sm(k, t_i)."""
    vector = sm_matrix(k, mu.angles) @ mu.weights
    bound = TWO_PI * k / (2 * k + 1)
    if mu.diameter < bound - config.numerics.angle_eps and float(np.linalg.norm(vector)) == 0.0:
        raise ConsistencyError("zero-pushforward", "barycenter vanished below the miss-origin bound")
    return vector


def homotopy_step(mu: DiscreteMeasure, s: float) -> DiscreteMeasure:
    """
    (1 - s) mu + s iota(p(SM_4 mu)), a point on the straight-line homotopy
    from the identity to the retraction onto the boundary of B4.
    """
    from orbitope_kit.modules.orbitope_b4 import EDGE_BOUND, iota, radial_project

    if not 0.0 <= s <= 1.0:
        raise OrbitopeKitError("invalid-parameter", f"s must lie in [0, 1], got {s}")
    slack = config.thickening.diameter_slack
    if mu.diameter > EDGE_BOUND + slack:
        raise OrbitopeKitError(
            "diameter-exceeds-scale", f"support diameter {mu.diameter:.12g} exceeds 2pi/3"
        )
    if s == 0.0:
        return mu

    target = iota(radial_project(pushforward_sm(2, mu)))
    angles = np.concatenate([mu.angles, target.angles])
    weights = np.concatenate([(1.0 - s) * mu.weights, s * target.weights])
    try:
        return make_measure(angles, weights, EDGE_BOUND + slack)
    except OrbitopeKitError as e:
        if e.code == "diameter-exceeds-scale":
            raise ConsistencyError("homotopy-not-well-defined", e.detail) from e
        raise


def sample_measure(r: float, rng: np.random.Generator, max_support: Optional[int] = None) -> DiscreteMeasure:
    """
    Random measure supported in an arc of length r: support size uniform in
    1..max_support, arc start uniform, atoms uniform in the arc, flat
    Dirichlet weights.
    """
    max_support = max_support or config.thickening.max_support
    size = int(rng.integers(1, max_support + 1))
    start = rng.uniform(0.0, TWO_PI)
    angles = start + rng.uniform(0.0, r, size=size)
    weights = rng.dirichlet(np.ones(size))
    return make_measure(angles, weights, r)


def union_support_excess(k: int, mu: DiscreteMeasure, grid: Optional[int] = None) -> float:
    """
    diam(supp mu ∪ supp of the gauge representation of SM_{2k} mu) - diam(supp mu).

    For k <= 2 the representation must be the exact face; k >= 3 uses the
    grid LP support.
    """
    from orbitope_kit.modules.orbitope_b4 import gauge

    vector = pushforward_sm(k, mu)
    if float(np.linalg.norm(vector)) < config.numerics.angle_eps:
        raise ConsistencyError("zero-pushforward", "barycenter too close to the origin")
    result = gauge(vector, grid=grid, k=k)
    if k <= 2 and not result.refined:
        raise ConsistencyError(
            "face-not-resolved", f"no exact face for the barycenter of a {len(mu)}-atom measure"
        )
    face_angles = np.array([t for t, _ in result.support], dtype=float)
    return diameter(np.concatenate([mu.angles, face_angles])) - mu.diameter


class ProbeReport(BaseModel):
    k: int
    r: float
    trials: int
    seed: int
    max_excess: float
    mean_excess: float


def homotopy_probe(
    k: int,
    r: float,
    n_trials: int,
    seed: int,
    workers: Optional[int] = None,
    grid: Optional[int] = None,
) -> ProbeReport:
    """
    Sample measures of diameter <= r and record how far the union of their
    support with the support of the projected barycenter grows in diameter.
    """
    if k < 1:
        raise OrbitopeKitError("invalid-order", f"k must be positive, got {k}")
    if n_trials < 1:
        raise OrbitopeKitError("invalid-parameter", "need at least one trial")
    low = TWO_PI * (k - 1) / (2 * k - 1)
    high = TWO_PI * k / (2 * k + 1)
    if not (low - config.numerics.angle_eps <= r < high):
        raise OrbitopeKitError(
            "invalid-scale", f"r must lie in [{low:.6f}, {high:.6f}) for k={k}, got {r}"
        )

    rng = np.random.default_rng(seed)
    measures = [sample_measure(r, rng) for _ in range(n_trials)]
    workers = workers or config.thickening.probe_workers

    def excess(mu: DiscreteMeasure) -> float:
        return union_support_excess(k, mu, grid=grid)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            excesses = np.asarray(list(pool.map(excess, measures)))
    else:
        excesses = np.asarray([excess(mu) for mu in measures])

    report = ProbeReport(
        k=k,
        r=r,
        trials=n_trials,
        seed=seed,
        max_excess=float(excesses.max()),
        mean_excess=float(excesses.mean()),
    )
    thickening_logger.info(
        f"probe k={k} r={r:.6f}: max excess {report.max_excess:.3e} over {n_trials} trials"
    )
    return report
