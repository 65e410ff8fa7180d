"""
Points, arcs and finite configurations on the circle S^1 = R / 2piZ.

The circle carries the geodesic (arc length) metric, so every distance lies
in [0, pi]. Angles are canonicalized into [0, 2pi) on construction.
"""

import math
from typing import Iterable, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from orbitope_kit.config import config
from orbitope_kit.errors import OrbitopeKitError
from orbitope_kit.utils.logging_config import circle_logger

TWO_PI = 2.0 * math.pi


def canonical_angle(t: float) -> float:
    """Reduce t modulo 2pi into [0, 2pi)."""
    if not math.isfinite(t):
        raise OrbitopeKitError("invalid-input", f"angle must be finite, got {t}")
    value = math.fmod(t, TWO_PI)
    if value < 0.0:
        value += TWO_PI
    # -1e-17 + 2pi rounds to 2pi
    if value >= TWO_PI:
        value = 0.0
    return value


class CirclePoint(BaseModel):
    """A point of S^1 stored as its canonical angle."""

    model_config = ConfigDict(frozen=True)

    angle: float

    @field_validator("angle")
    @classmethod
    def _canonicalize(cls, v: float) -> float:
        return canonical_angle(float(v))

    @classmethod
    def at(cls, t: float) -> "CirclePoint":
        return cls(angle=t)

    def __add__(self, other: Union[float, "CirclePoint"]) -> "CirclePoint":
        return CirclePoint(angle=self.angle + angle_of(other))

    def __sub__(self, other: Union[float, "CirclePoint"]) -> "CirclePoint":
        return CirclePoint(angle=self.angle - angle_of(other))

    def __float__(self) -> float:
        return self.angle

    def antipode(self) -> "CirclePoint":
        return CirclePoint(angle=self.angle + math.pi)


AngleLike = Union[float, int, np.floating, CirclePoint]


def angle_of(t: AngleLike) -> float:
    """Canonical angle of a raw number or a CirclePoint."""
    if isinstance(t, CirclePoint):
        return t.angle
    return canonical_angle(float(t))


class Arc(BaseModel):
    """
    Counterclockwise arc from a to b.

    Open arcs exclude both endpoints (within angle_eps); closed arcs include
    them. An open arc needs distinct endpoints.
    """

    model_config = ConfigDict(frozen=True)

    a: CirclePoint
    b: CirclePoint
    closed: bool = False

    @model_validator(mode="after")
    def _check_endpoints(self) -> "Arc":
        if not self.closed and geodesic_dist(self.a, self.b) <= config.numerics.angle_eps:
            raise ValueError("degenerate-arc: open arcs need distinct endpoints")
        return self

    @classmethod
    def between(cls, a: AngleLike, b: AngleLike, closed: bool = False) -> "Arc":
        return cls(a=CirclePoint(angle=angle_of(a)), b=CirclePoint(angle=angle_of(b)), closed=closed)

    @property
    def length(self) -> float:
        """Counterclockwise length from a to b, in (0, 2pi]."""
        span = canonical_angle(self.b.angle - self.a.angle)
        return span if span > 0.0 else (0.0 if self.closed else TWO_PI)

    def contains(self, t: AngleLike) -> bool:
        return arc_contains(self, t)

    def midpoint(self) -> CirclePoint:
        return self.a + self.length / 2.0


class Configuration(BaseModel):
    """
    A finite ordered list of circle points.

    With ccw=True the listed order must be counterclockwise starting from
    the first point, i.e. strictly increasing after rotating points[0] to 0.
    """

    model_config = ConfigDict(frozen=True)

    points: tuple[CirclePoint, ...]
    ccw: bool = False

    @model_validator(mode="after")
    def _check_order(self) -> "Configuration":
        if self.ccw and len(self.points) > 1:
            start = self.points[0].angle
            offsets = [canonical_angle(p.angle - start) for p in self.points]
            if any(b <= a for a, b in zip(offsets, offsets[1:])):
                raise ValueError("points are not in counterclockwise order")
        return self

    @classmethod
    def from_angles(cls, angles: Iterable[float], ccw: bool = False) -> "Configuration":
        return cls(points=tuple(CirclePoint(angle=float(t)) for t in angles), ccw=ccw)

    @property
    def angles(self) -> np.ndarray:
        return np.array([p.angle for p in self.points], dtype=float)

    def __len__(self) -> int:
        return len(self.points)

    def to_list(self) -> list[float]:
        return [p.angle for p in self.points]


ConfigurationLike = Union[Configuration, Sequence[AngleLike], np.ndarray]


def as_angles(points: ConfigurationLike) -> np.ndarray:
    """Canonical angles of a configuration as a float array."""
    if isinstance(points, Configuration):
        return points.angles
    raw = np.asarray(
        [p.angle if isinstance(p, CirclePoint) else p for p in points], dtype=float
    ).reshape(-1)
    if not np.all(np.isfinite(raw)):
        raise OrbitopeKitError("invalid-input", "angles must be finite")
    reduced = np.mod(raw, TWO_PI)
    reduced[reduced >= TWO_PI] = 0.0
    return reduced


def geodesic_dist(a: AngleLike, b: AngleLike) -> float:
    """Arc-length distance min(|a-b| mod 2pi, 2pi - |a-b| mod 2pi)."""
    delta = canonical_angle(angle_of(a) - angle_of(b))
    return min(delta, TWO_PI - delta)


def pairwise_geodesic(points: ConfigurationLike) -> np.ndarray:
    """Matrix of geodesic distances between all pairs of points."""
    angles = as_angles(points)
    delta = np.mod(np.abs(angles[:, None] - angles[None, :]), TWO_PI)
    return np.minimum(delta, TWO_PI - delta)


def diameter(points: ConfigurationLike) -> float:
    """Largest pairwise geodesic distance; 0 for a single point."""
    angles = as_angles(points)
    if angles.size == 0:
        raise OrbitopeKitError("empty-configuration", "diameter of an empty set")
    return float(pairwise_geodesic(angles).max())


def arc_contains(arc: Arc, t: AngleLike) -> bool:
    """Membership in an arc; endpoints within angle_eps count only for closed arcs."""
    eps = config.numerics.angle_eps
    a, b, x = arc.a.angle, arc.b.angle, angle_of(t)

    near_endpoint = geodesic_dist(x, a) <= eps or geodesic_dist(x, b) <= eps
    if near_endpoint:
        return arc.closed

    if a < b:
        return a < x < b
    if a > b:
        return x > a or x < b
    # a == b only for a closed arc: the single point, handled above
    return False


def validate_nondegenerate(
    points: ConfigurationLike, min_pair_sine: float | None = None
) -> np.ndarray:
    """
    Reject configurations with coincident or antipodal pairs.

    With min_pair_sine set, every pair must also satisfy
    |sin(t_l - t_j)| >= min_pair_sine.
    """
    angles = as_angles(points)
    eps = config.numerics.angle_eps
    if angles.size == 0:
        raise OrbitopeKitError("empty-configuration", "no points given")
    if angles.size == 1:
        return angles
    dist = pairwise_geodesic(angles)
    upper = dist[np.triu_indices(angles.size, k=1)]
    if np.any(upper <= eps):
        raise OrbitopeKitError("degenerate-configuration", "coincident points")
    if np.any(upper >= math.pi - eps):
        raise OrbitopeKitError("degenerate-configuration", "antipodal points")
    if min_pair_sine is not None:
        sines = np.abs(np.sin(angles[:, None] - angles[None, :]))
        if np.any(sines[np.triu_indices(angles.size, k=1)] < min_pair_sine):
            raise OrbitopeKitError(
                "degenerate-configuration",
                f"a pair has |sin(t_l - t_j)| below {min_pair_sine}",
            )
    return angles


def chi_count(points: ConfigurationLike, i: int) -> int:
    """Number of other points in the open arc (t_i + pi, t_i)."""
    angles = validate_nondegenerate(points)
    if not 0 <= i < angles.size:
        raise OrbitopeKitError("invalid-parameter", f"index {i} out of range")
    return int(_chi_vector(angles)[i])


def chi_counts(points: ConfigurationLike) -> list[int]:
    """chi(t_i) for every point of a non-degenerate configuration."""
    angles = validate_nondegenerate(points)
    return [int(c) for c in _chi_vector(angles)]


def _chi_vector(angles: np.ndarray) -> np.ndarray:
    # t_j lies in (t_i + pi, t_i) exactly when (t_j - t_i) mod 2pi exceeds pi
    offsets = np.mod(angles[None, :] - angles[:, None], TWO_PI)
    behind = offsets > math.pi
    np.fill_diagonal(behind, False)
    counts = behind.sum(axis=1)
    circle_logger.debug(f"chi counts for {angles.size} points: {counts.tolist()}")
    return counts


def sort_ccw(points: ConfigurationLike) -> Configuration:
    """
    Sort points by canonical angle, counterclockwise from the smallest one.

    Repeated angles are kept next to each other; the ccw flag is only set
    when the sorted angles are strictly increasing.
    """
    angles = np.sort(as_angles(points))
    strict = bool(np.all(np.diff(angles) > 0.0))
    return Configuration.from_angles(angles.tolist(), ccw=strict)


def regular_polygon(n: int, offset: float = 0.0) -> np.ndarray:
    """Angles of the regular n-gon starting at offset."""
    if n < 1:
        raise OrbitopeKitError("invalid-parameter", "a polygon needs at least one vertex")
    return as_angles(offset + TWO_PI * np.arange(n) / n)
