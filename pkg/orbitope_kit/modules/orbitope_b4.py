"""
The Barvinok-Novik orbitope B4 = conv sm(2, S^1) in R^4.

Its proper faces are vertices sm(2, t), edges [sm(2, t1), sm(2, t2)] with
d(t1, t2) <= 2pi/3, and equilateral triangles with vertices at
t, t + 2pi/3, t + 4pi/3. The gauge LP evaluates the Minkowski functional
on a grid of curve points; for k = 2 the grid answer is polished onto the
exact face by solving the face equations with Levenberg-Marquardt.
"""

import math
from enum import Enum
from itertools import chain
from typing import Annotated, Callable, Iterator, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import least_squares

from orbitope_kit.config import config
from orbitope_kit.errors import ConsistencyError, OrbitopeKitError
from orbitope_kit.modules.caratheodory_lp import ConeCheckResult, cone_intersection_check
from orbitope_kit.modules.circle_geometry import (
    TWO_PI,
    AngleLike,
    ConfigurationLike,
    angle_of,
    as_angles,
    canonical_angle,
    geodesic_dist,
    pairwise_geodesic,
)
from orbitope_kit.modules.metric_thickening import DiscreteMeasure, make_measure
from orbitope_kit.modules.moment_curve import sm, sm_derivative, sm_matrix
from orbitope_kit.modules.raked_poly import from_roots
from orbitope_kit.modules.simplex import LPStatus, solve_lp
from orbitope_kit.utils.logging_config import orbitope_logger

THIRD_TURN = TWO_PI / 3.0
EDGE_BOUND = THIRD_TURN


class FaceType(str, Enum):
    VERTEX = "vertex"
    EDGE = "edge"
    TRIANGLE = "triangle"
    NOT_A_FACE = "not-a-face"


class VertexFace(BaseModel):
    model_config = ConfigDict(frozen=True)

    face: Literal["vertex"] = "vertex"
    t: float


class EdgeFace(BaseModel):
    """Edge from t1 to t2 counterclockwise; weight sits on t1."""

    model_config = ConfigDict(frozen=True)

    face: Literal["edge"] = "edge"
    t1: float
    t2: float
    weight: float


class TriangleFace(BaseModel):
    """Triangle with vertices t, t + 2pi/3, t + 4pi/3 and their weights."""

    model_config = ConfigDict(frozen=True)

    face: Literal["triangle"] = "triangle"
    t: float
    weights: tuple[float, float, float]


Face = Annotated[Union[VertexFace, EdgeFace, TriangleFace], Field(discriminator="face")]


class BoundaryPointB4(BaseModel):
    model_config = ConfigDict(frozen=True)

    face: Face
    coordinates: tuple[float, float, float, float]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coordinates, dtype=float)


class GaugeResult(BaseModel):
    """
    scale s with s * x on the boundary, and the convex combination of curve
    points representing s * x. refined is True when the support was snapped
    onto an exact face.
    """

    scale: float
    lp_scale: float
    support: tuple[tuple[float, float], ...]
    refined: bool
    face: Optional[Face] = None


def face_atoms(face: Union[VertexFace, EdgeFace, TriangleFace]) -> tuple[np.ndarray, np.ndarray]:
    """Angles and weights of the curve points spanning a face point."""
    if isinstance(face, VertexFace):
        return np.array([face.t]), np.array([1.0])
    if isinstance(face, EdgeFace):
        return np.array([face.t1, face.t2]), np.array([face.weight, 1.0 - face.weight])
    angles = canonical_angle(face.t) + THIRD_TURN * np.arange(3)
    return as_angles(angles), np.asarray(face.weights, dtype=float)


def face_coordinates(face: Union[VertexFace, EdgeFace, TriangleFace]) -> np.ndarray:
    angles, weights = face_atoms(face)
    return sm_matrix(2, angles) @ weights


def _canonical_edge(t1: float, t2: float, weight: float) -> EdgeFace:
    a, b = canonical_angle(t1), canonical_angle(t2)
    if canonical_angle(b - a) > math.pi:
        a, b, weight = b, a, 1.0 - weight
    return EdgeFace(t1=a, t2=b, weight=weight)


def _canonical_triangle(t: float, weights: Sequence[float]) -> TriangleFace:
    base = canonical_angle(t)
    turns = int(base // THIRD_TURN)
    base -= turns * THIRD_TURN
    if base >= THIRD_TURN:
        base -= THIRD_TURN
        turns += 1
    if base < 0.0:
        base = 0.0
    w = [float(x) for x in weights]
    start = (-turns) % 3
    # vertex base + j * 2pi/3 was vertex (j - turns) mod 3 of the input
    rotated = (w[(start + 0) % 3], w[(start + 1) % 3], w[(start + 2) % 3])
    return TriangleFace(t=base, weights=rotated)


def vertex_point(t: AngleLike) -> BoundaryPointB4:
    face = VertexFace(t=angle_of(t))
    return BoundaryPointB4(face=face, coordinates=tuple(face_coordinates(face).tolist()))


def edge_point(t1: AngleLike, t2: AngleLike, weight: float) -> BoundaryPointB4:
    face = _canonical_edge(angle_of(t1), angle_of(t2), weight)
    return BoundaryPointB4(face=face, coordinates=tuple(face_coordinates(face).tolist()))


def triangle_point(t: AngleLike, weights: Sequence[float]) -> BoundaryPointB4:
    if len(weights) != 3:
        raise OrbitopeKitError("invalid-boundary-point", "a triangle needs three weights")
    face = _canonical_triangle(angle_of(t), weights)
    return BoundaryPointB4(face=face, coordinates=tuple(face_coordinates(face).tolist()))


def _face_is_valid(face: Union[VertexFace, EdgeFace, TriangleFace], floor: float) -> bool:
    eps = config.numerics.angle_eps
    if isinstance(face, VertexFace):
        return True
    if isinstance(face, EdgeFace):
        d = geodesic_dist(face.t1, face.t2)
        return floor < face.weight < 1.0 - floor and eps < d <= EDGE_BOUND + eps
    w = np.asarray(face.weights)
    return bool(np.all(w > floor) and abs(w.sum() - 1.0) <= 1e-9)


def validate_boundary_point(b: BoundaryPointB4) -> None:
    """Raise invalid-boundary-point unless the face is valid and matches the coordinates."""
    if not _face_is_valid(b.face, 0.0):
        raise OrbitopeKitError("invalid-boundary-point", f"face {b.face.face} violates its invariants")
    gap = float(np.max(np.abs(face_coordinates(b.face) - b.as_array())))
    if gap > 1e-8:
        raise OrbitopeKitError(
            "invalid-boundary-point", f"coordinates differ from the face point by {gap:.3e}"
        )


def _curve(t: float) -> tuple[np.ndarray, np.ndarray]:
    return sm(2, t), sm_derivative(2, t)


def _polish(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
) -> Optional[np.ndarray]:
    settings = config.gauge
    try:
        sol = least_squares(
            fun,
            start,
            jac=jac,
            method="lm",
            xtol=settings.polish_tol,
            ftol=settings.polish_tol,
            gtol=settings.polish_tol,
            max_nfev=settings.polish_max_evaluations,
        )
    except (ValueError, np.linalg.LinAlgError) as e:
        orbitope_logger.debug(f"polish failed to start: {e}")
        return None
    if float(np.max(np.abs(sol.fun))) > settings.acceptance_tol:
        return None
    return sol.x


def _try_vertex(x: np.ndarray, s0: float, t0: float) -> Optional[tuple[float, VertexFace]]:
    def fun(p: np.ndarray) -> np.ndarray:
        return p[0] * x - sm(2, p[1])

    def jac(p: np.ndarray) -> np.ndarray:
        return np.column_stack([x, -sm_derivative(2, p[1])])

    sol = _polish(fun, jac, np.array([s0, t0]))
    if sol is None:
        return None
    return float(sol[0]), VertexFace(t=canonical_angle(sol[1]))


def _try_edge(
    x: np.ndarray, s0: float, t1: float, t2: float, w0: float
) -> Optional[tuple[float, EdgeFace]]:
    def fun(p: np.ndarray) -> np.ndarray:
        s, w, a, b = p
        return s * x - w * sm(2, a) - (1.0 - w) * sm(2, b)

    def jac(p: np.ndarray) -> np.ndarray:
        _, w, a, b = p
        ca, da = _curve(a)
        cb, db = _curve(b)
        return np.column_stack([x, -(ca - cb), -w * da, -(1.0 - w) * db])

    sol = _polish(fun, jac, np.array([s0, w0, t1, t2]))
    if sol is None:
        return None
    return float(sol[0]), _canonical_edge(sol[2], sol[3], float(sol[1]))


def _try_triangle(
    x: np.ndarray, s0: float, t0: float, w0: Sequence[float]
) -> Optional[tuple[float, TriangleFace]]:
    offsets = THIRD_TURN * np.arange(3)

    def fun(p: np.ndarray) -> np.ndarray:
        s, t, w1, w2 = p
        w = np.array([w1, w2, 1.0 - w1 - w2])
        return s * x - sm_matrix(2, t + offsets) @ w

    def jac(p: np.ndarray) -> np.ndarray:
        _, t, w1, w2 = p
        w = np.array([w1, w2, 1.0 - w1 - w2])
        points = [_curve(t + o) for o in offsets]
        dt = sum(wi * d for wi, (_, d) in zip(w, points))
        return np.column_stack(
            [x, -dt, -(points[0][0] - points[2][0]), -(points[1][0] - points[2][0])]
        )

    sol = _polish(fun, jac, np.array([s0, t0, w0[0], w0[1]]))
    if sol is None:
        return None
    weights = (float(sol[2]), float(sol[3]), float(1.0 - sol[2] - sol[3]))
    return float(sol[0]), _canonical_triangle(sol[1], weights)


class _Cluster(BaseModel):
    mean: float
    mass: float
    angles: tuple[float, ...]
    weights: tuple[float, ...]


def _cluster_support(angles: np.ndarray, weights: np.ndarray, threshold: float) -> list[_Cluster]:
    """Group support angles whose circular gaps are at most threshold; heaviest first."""
    order = np.argsort(angles)
    a, w = angles[order], weights[order]
    groups: list[list[int]] = [[0]]
    for i in range(1, a.size):
        if a[i] - a[i - 1] <= threshold:
            groups[-1].append(i)
        else:
            groups.append([i])
    if len(groups) > 1 and a[0] + TWO_PI - a[-1] <= threshold:
        groups[0] = groups.pop() + groups[0]

    clusters = []
    for members in groups:
        ga, gw = a[members], w[members]
        mean = math.atan2(float(gw @ np.sin(ga)), float(gw @ np.cos(ga)))
        clusters.append(
            _Cluster(
                mean=canonical_angle(mean),
                mass=float(gw.sum()),
                angles=tuple(ga.tolist()),
                weights=tuple(gw.tolist()),
            )
        )
    clusters.sort(key=lambda c: -c.mass)
    return clusters


FaceSolution = tuple[float, Union[VertexFace, EdgeFace, TriangleFace]]


def _head_spans(head: _Cluster, step: float) -> list[tuple[float, float, float]]:
    """(t1, t2, weight on t1) starts for an edge lying inside a single cluster."""
    spans = []
    if len(head.angles) > 1:
        offsets = np.array([canonical_angle(a - head.mean + math.pi) - math.pi for a in head.angles])
        low_mass = float(np.asarray(head.weights)[offsets <= 0.0].sum()) / head.mass
        spans.append((head.mean + offsets.min(), head.mean + offsets.max(), min(max(low_mass, 0.1), 0.9)))
    for half in (step, 0.5 * step, 0.25 * step):
        spans.append((head.mean - half, head.mean + half, 0.5))
    return spans


def _edge_scan_seeds(
    x: np.ndarray, anchors: Sequence[float], step: float, count: int = 3
) -> list[tuple[float, float, float, float]]:
    """
    Starts (s, w, t1, t2) for edges whose heavy endpoint t1 sits near an
    anchor. The light endpoint is scanned over 2pi/3 on either side while
    the heavy endpoint is linearized around the anchor, so each candidate
    costs one small least-squares solve.
    """
    half = max(config.gauge.scan_points // 2, 1)
    offsets = EDGE_BOUND * np.arange(-half, half + 1) / half
    offsets = offsets[np.abs(offsets) > 4.0 * step]

    seeds: list[tuple[float, float, float, float, float]] = []
    for a0 in anchors:
        b = a0 + offsets
        curve_b = sm_matrix(2, b).T
        system = np.empty((b.size, 4, 3))
        system[:, :, 0] = x
        system[:, :, 1] = curve_b - sm(2, a0)
        system[:, :, 2] = -sm_derivative(2, a0)
        coef = np.linalg.pinv(system) @ curve_b[:, :, None]
        residual = np.linalg.norm(system @ coef - curve_b[:, :, None], axis=(1, 2))
        s, w, u = coef[:, 0, 0], coef[:, 1, 0], coef[:, 2, 0]
        for i in np.flatnonzero((s > 0.0) & (w > 0.0) & (w < 1.0)):
            seeds.append((float(residual[i]), float(s[i]), float(w[i]), a0 + float(u[i] / w[i]), float(b[i])))
    seeds.sort()
    return [seed[1:] for seed in seeds[:count]]


def _refine(x: np.ndarray, s_lp: float, clusters: list[_Cluster], step: float) -> Optional[FaceSolution]:
    """
    Polish the grid answer onto an exact face.

    Hypotheses are tried lazily, the likeliest first for the number of heavy
    clusters. A polish that lands on a valid face with scale at least the
    grid scale is the boundary point of the ray, whichever hypothesis found it.
    """
    settings = config.gauge
    heavy = [c for c in clusters if c.mass >= settings.cluster_mass_floor] or clusters[:1]
    head = heavy[0]

    def vertex() -> Iterator[Optional[FaceSolution]]:
        yield _try_vertex(x, s_lp, head.mean)

    def pairs() -> Iterator[Optional[FaceSolution]]:
        for other in heavy[1:]:
            yield _try_edge(x, s_lp, head.mean, other.mean, head.mass / (head.mass + other.mass))

    def spans() -> Iterator[Optional[FaceSolution]]:
        for t1, t2, w0 in _head_spans(head, step):
            yield _try_edge(x, s_lp, t1, t2, w0)

    def scans() -> Iterator[Optional[FaceSolution]]:
        by_weight = sorted(zip(head.weights, head.angles), reverse=True)
        anchors = [head.mean] + [a for _, a in by_weight[:2]]
        for s0, w0, t1, t2 in _edge_scan_seeds(x, anchors, step):
            yield _try_edge(x, s0, t1, t2, w0)

    def triangle() -> Iterator[Optional[FaceSolution]]:
        masses = [head.mass, 0.0, 0.0]
        for other in clusters[1:]:
            offset = canonical_angle(other.mean - head.mean)
            j = int(round(offset / THIRD_TURN)) % 3
            if j and abs(offset - j * THIRD_TURN) < 0.5:
                masses[j] += other.mass
        guess = np.maximum(np.asarray(masses), 0.05)
        guess /= guess.sum()
        yield _try_triangle(x, s_lp, head.mean, guess)

    if len(heavy) >= 3:
        order = [triangle, pairs, spans, vertex, scans]
    elif len(heavy) == 2:
        order = [pairs, triangle, spans, vertex, scans]
    else:
        order = [vertex, spans, scans, triangle]

    for outcome in chain.from_iterable(hypothesis() for hypothesis in order):
        if outcome is None:
            continue
        scale, face = outcome
        if scale <= 0.0 or scale < s_lp * (1.0 - 1e-8) - 1e-12:
            continue
        if _face_is_valid(face, settings.weight_floor):
            return outcome
    return None


def _grid_lp(x: np.ndarray, k: int, grid: int, shift: float = 0.0) -> tuple[float, np.ndarray, np.ndarray]:
    """Largest s with s * x a convex combination of sm(k, .) at grid angles offset by shift steps."""
    angles = TWO_PI * (np.arange(grid) + shift) / grid
    curve = sm_matrix(k, angles)

    c = np.zeros(grid + 1)
    c[-1] = -1.0
    A_eq = np.vstack(
        [
            np.hstack([curve, -x[:, None]]),
            np.concatenate([np.ones(grid), [0.0]]),
        ]
    )
    b_eq = np.zeros(2 * k + 1)
    b_eq[-1] = 1.0
    res = solve_lp(c, A_eq=A_eq, b_eq=b_eq)
    if res.status is not LPStatus.OPTIMAL or res.x is None:
        raise ConsistencyError("lp-failure", f"gauge LP ended with {res.status.value}")
    return float(res.x[-1]), angles, res.x[:grid]


def gauge(x: Union[np.ndarray, Sequence[float]], grid: Optional[int] = None, k: int = 2) -> GaugeResult:
    """
    Minkowski functional of conv sm(k, S^1) at x, as the scale s with s * x
    on the boundary, together with the supporting convex combination.

    k = 1 is exact (the unit disk); k = 2 is polished onto an exact face;
    k >= 3 reports the grid LP answer.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if k < 1:
        raise OrbitopeKitError("invalid-order", f"k must be positive, got {k}")
    if x.size != 2 * k:
        raise OrbitopeKitError("dimension-mismatch", f"expected a vector in R^{2 * k}")
    norm = float(np.linalg.norm(x))
    if norm < config.numerics.angle_eps:
        raise OrbitopeKitError("zero-vector", "the gauge needs a nonzero direction")

    if k == 1:
        t = canonical_angle(math.atan2(x[1], x[0]))
        return GaugeResult(
            scale=1.0 / norm,
            lp_scale=1.0 / norm,
            support=((t, 1.0),),
            refined=True,
            face=VertexFace(t=t),
        )

    grid = grid or config.gauge.grid
    if grid < config.gauge.min_grid:
        raise OrbitopeKitError(
            "grid-too-coarse", f"grid must be at least {config.gauge.min_grid}, got {grid}"
        )
    s_lp, angles, lam = _grid_lp(x, k, grid)
    keep = np.flatnonzero(lam > 1e-12)
    support = tuple((float(angles[i]), float(lam[i])) for i in keep)

    if k > 2:
        return GaugeResult(scale=s_lp, lp_scale=s_lp, support=support, refined=False)

    # retry on a half-step shifted grid, then on a doubled one
    refined: Optional[FaceSolution] = None
    s_try = s_lp
    for g, shift in ((grid, 0.0), (grid, 0.5), (2 * grid, 0.0)):
        if shift or g != grid:
            s_try, angles, lam = _grid_lp(x, k, g, shift)
            keep = np.flatnonzero(lam > 1e-12)
        clusters = _cluster_support(angles[keep], lam[keep], config.gauge.cluster_steps * TWO_PI / g)
        refined = _refine(x, s_try, clusters, TWO_PI / g)
        if refined is not None:
            break
        orbitope_logger.debug(f"gauge refinement missed on grid {g} shifted by {shift} steps")

    if refined is None:
        orbitope_logger.warning(
            f"gauge refinement failed for x={np.array2string(x, precision=6)}; "
            f"reporting the grid answer ({len(support)} support points)"
        )
        return GaugeResult(scale=s_lp, lp_scale=s_lp, support=support, refined=False)

    scale, face = refined
    face_angles, face_weights = face_atoms(face)
    orbitope_logger.debug(f"gauge: s={scale:.15g} (grid {s_try:.15g}), face {face.face}")
    return GaugeResult(
        scale=scale,
        lp_scale=s_try,
        support=tuple(zip(face_angles.tolist(), face_weights.tolist())),
        refined=True,
        face=face,
    )


def radial_project(x: Union[np.ndarray, Sequence[float]], grid: Optional[int] = None) -> BoundaryPointB4:
    """The boundary point of B4 on the ray through x, with its face certificate."""
    x = np.asarray(x, dtype=float).reshape(-1)
    result = gauge(x, grid=grid, k=2)
    if not result.refined or result.face is None:
        raise ConsistencyError("face-not-resolved", "could not identify the face hit by the ray")
    point = result.scale * x
    return BoundaryPointB4(face=result.face, coordinates=tuple(point.tolist()))


def iota(b: BoundaryPointB4) -> DiscreteMeasure:
    """The measure on S^1 whose barycenter under sm(2, .) is b."""
    validate_boundary_point(b)
    angles, weights = face_atoms(b.face)
    return make_measure(angles, weights, EDGE_BOUND + config.thickening.diameter_slack)


def classify_face(points: ConfigurationLike) -> FaceType:
    """Which face type, if any, a set of 1 to 3 distinct angles spans."""
    angles = as_angles(points)
    eps = config.numerics.angle_eps
    if angles.size == 0:
        raise OrbitopeKitError("empty-configuration", "no points given")
    if angles.size > 3:
        return FaceType.NOT_A_FACE
    dist = pairwise_geodesic(angles)
    if np.any(dist[np.triu_indices(angles.size, k=1)] <= eps):
        raise OrbitopeKitError("degenerate-configuration", "angles must be distinct")
    if angles.size == 1:
        return FaceType.VERTEX
    if angles.size == 2:
        return FaceType.EDGE if dist[0, 1] <= EDGE_BOUND + eps else FaceType.NOT_A_FACE
    ordered = np.sort(angles)
    gaps = np.diff(np.append(ordered, ordered[0] + TWO_PI))
    if np.all(np.abs(gaps - THIRD_TURN) <= eps):
        return FaceType.TRIANGLE
    return FaceType.NOT_A_FACE


def edge_predicate_b2k(k: int, t0: AngleLike, t1: AngleLike) -> bool:
    """Whether [sm(k, t0), sm(k, t1)] is an edge of B_{2k}: d(t0, t1) <= 2pi(k-1)/(2k-1)."""
    if k < 1:
        raise OrbitopeKitError("invalid-order", f"k must be positive, got {k}")
    d = geodesic_dist(t0, t1)
    if d <= config.numerics.angle_eps:
        raise OrbitopeKitError("degenerate-configuration", "endpoints coincide")
    return d <= TWO_PI * (k - 1) / (2 * k - 1) + config.numerics.angle_eps


def arc_face_cone_check(arc_points: ConfigurationLike, face_points: ConfigurationLike) -> ConeCheckResult:
    """LP certificate that the cones over sm(2, arc points) and sm(2, face points) meet only at 0."""
    return cone_intersection_check(sm_matrix(2, arc_points).T, sm_matrix(2, face_points).T)


def _minimal_arc(angles: np.ndarray) -> tuple[float, float]:
    """Start and length of the shortest closed arc holding every angle."""
    ordered = np.sort(angles)
    gaps = np.diff(np.append(ordered, ordered[0] + TWO_PI))
    widest = int(np.argmax(gaps))
    start = ordered[(widest + 1) % ordered.size]
    return float(start), float(TWO_PI - gaps[widest])


def face_cone_separator(arc_points: ConfigurationLike, face_points: ConfigurationLike) -> np.ndarray:
    """
    Vector y with sm(2, t) . y > 0 on the arc points and sm(2, s) . y < 0 on
    the face points, built as the coefficients of a raked polynomial with
    prescribed roots.

    The arc points must fit in an arc of length at most 2pi/3 and the face
    points must be disjoint from them and not all inside that arc.
    """
    T = as_angles(arc_points)
    S = as_angles(face_points)
    eps = config.numerics.angle_eps
    if T.size == 0 or S.size == 0:
        raise OrbitopeKitError("empty-configuration", "both point sets must be nonempty")
    start, length = _minimal_arc(T)
    if length > EDGE_BOUND + eps:
        raise OrbitopeKitError("invalid-parameter", "arc points span more than 2pi/3")
    if np.min(pairwise_geodesic(np.concatenate([T, S]))[: T.size, T.size :]) <= eps:
        raise OrbitopeKitError("invalid-parameter", "arc and face points must be disjoint")

    # Work in offsets from the arc start; the arc is [0, length]
    t_off = np.mod(T - start, TWO_PI)
    s_off = np.mod(S - start, TWO_PI)
    if np.all(s_off <= length + eps):
        raise OrbitopeKitError("invalid-parameter", "face points lie inside the arc")

    def circular_gap(a: float, others: np.ndarray) -> float:
        d = np.mod(np.abs(others - a), TWO_PI)
        return float(np.min(np.minimum(d, TWO_PI - d))) if others.size else math.pi

    hazards = np.concatenate([t_off, s_off, t_off + math.pi, s_off + math.pi])

    # Half circles Gamma = (g, g + pi) containing [0, length], by face points inside
    samples = length - math.pi + (math.pi - length) * (np.arange(720) + 0.5) / 720
    ranked = []
    for g in samples:
        inside = np.mod(s_off - g, TWO_PI) < math.pi
        margin = min(circular_gap(g, s_off), circular_gap(g + math.pi, s_off))
        ranked.append((int(inside.sum()), -margin, float(g)))
    ranked.sort()

    for count, neg_margin, g in ranked:
        if count > 1 or -neg_margin <= eps:
            continue
        top = g + math.pi
        delta = 0.5 * circular_gap(top, hazards)
        for shrink in (1.0, 0.5, 0.25, 0.1):
            d = delta * shrink
            if count == 0:
                roots = [top - d, top - 2 * d / 3, top - d / 3]
            else:
                inside = np.mod(s_off - g, TWO_PI) < math.pi
                s1 = float(s_off[inside][0])
                rest = s_off[~inside]
                fences = np.concatenate([t_off, t_off + math.pi, rest, rest + math.pi, [g, top - d]])
                e = 0.5 * shrink * circular_gap(s1, fences)
                roots = [s1 - e, s1 + e, top - d]
            try:
                y = from_roots(np.asarray(roots) + start).coefficients
            except OrbitopeKitError:
                continue
            on_arc = sm_matrix(2, T).T @ y
            on_face = sm_matrix(2, S).T @ y
            if np.all(on_arc > 0) and np.all(on_face < 0):
                orbitope_logger.debug(
                    f"face cone separator: {count} face points in the half circle, "
                    f"arc margin {on_arc.min():.3e}, face margin {-on_face.max():.3e}"
                )
                return y
    raise ConsistencyError("separator-not-found", "no half circle produced a separating polynomial")
