"""
Raked trigonometric polynomials: odd-frequency polynomials

    p(t) = sum_{j=1..k} a_j cos((2j-1)t) + b_j sin((2j-1)t)

of degree 2k-1. They are exactly the linear functionals z . sm(k, t), so
p(t + pi) = -p(t) and the sign of p alternates across antipodes.
"""

import math
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.optimize import brentq

from orbitope_kit.config import config
from orbitope_kit.errors import ConsistencyError, OrbitopeKitError
from orbitope_kit.modules.caratheodory_lp import Separating, origin_in_conv
from orbitope_kit.modules.circle_geometry import (
    TWO_PI,
    AngleLike,
    Arc,
    ConfigurationLike,
    angle_of,
    as_angles,
    validate_nondegenerate,
)
from orbitope_kit.modules.moment_curve import sm_matrix
from orbitope_kit.utils.logging_config import poly_logger


class RakedPolynomial(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    a: tuple[float, ...]
    b: tuple[float, ...]

    @model_validator(mode="after")
    def _check_lengths(self) -> "RakedPolynomial":
        if self.k < 1:
            raise ValueError("k must be positive")
        if len(self.a) != self.k or len(self.b) != self.k:
            raise ValueError(f"a and b must have length {self.k}")
        return self

    @property
    def degree(self) -> int:
        return 2 * self.k - 1

    @property
    def coefficients(self) -> np.ndarray:
        """Interleaved (a_1, b_1, ..., a_k, b_k), the vector z with p = z . sm(k, .)."""
        z = np.empty(2 * self.k)
        z[0::2] = self.a
        z[1::2] = self.b
        return z

    def __call__(self, t: Union[AngleLike, np.ndarray]) -> Union[float, np.ndarray]:
        return evaluate(self, t)


def evaluate(p: RakedPolynomial, t: Union[AngleLike, np.ndarray]) -> Union[float, np.ndarray]:
    """p(t) for a scalar angle or an array of angles."""
    if isinstance(t, np.ndarray):
        return p.coefficients @ sm_matrix(p.k, t.reshape(-1)) if t.ndim else float(p(float(t)))
    return float(p.coefficients @ sm_matrix(p.k, [angle_of(t)])[:, 0])


def from_coefficients(k: int, z: Union[np.ndarray, Sequence[float]]) -> RakedPolynomial:
    z = np.asarray(z, dtype=float).reshape(-1)
    return RakedPolynomial(k=k, a=tuple(z[0::2].tolist()), b=tuple(z[1::2].tolist()))


def root_parity_sign(roots: ConfigurationLike, t: AngleLike) -> int:
    """
    Sign of prod_l sin(v_l - t): (-1)^rho(t), rho(t) counting the roots in
    the open arc (t + pi, t).
    """
    v = as_angles(roots)
    x = angle_of(t)
    offsets = np.mod(v - x, TWO_PI)
    rho = int(np.count_nonzero(offsets > math.pi))
    return -1 if rho % 2 else 1


def from_roots(roots: ConfigurationLike) -> RakedPolynomial:
    """
    The raked polynomial prod_{l=1..2k-1} sin(v_l - t).

    Coefficients come from interpolation at 2k nodes spread over a half
    circle; distinct non-antipodal nodes make the moment system nonsingular.
    """
    v = as_angles(roots)
    if v.size == 0 or v.size % 2 == 0:
        raise OrbitopeKitError(
            "invalid-cardinality", f"need an odd number of roots, got {v.size}"
        )
    try:
        validate_nondegenerate(v)
    except OrbitopeKitError as e:
        raise OrbitopeKitError("degenerate-roots", e.detail) from e

    k = (v.size + 1) // 2
    nodes = math.pi * (np.arange(2 * k) + 0.5) / (2 * k)
    targets = np.prod(np.sin(v[:, None] - nodes[None, :]), axis=0)
    z = np.linalg.solve(sm_matrix(k, nodes).T, targets)
    p = from_coefficients(k, z)

    check = np.concatenate([v, v + math.pi])
    residual = float(np.max(np.abs(evaluate(p, check))))
    if residual > config.poly.residual_tol:
        raise ConsistencyError(
            "residual-too-large", f"polynomial does not vanish at its roots ({residual:.3e})"
        )
    poly_logger.debug(f"from_roots: k={k}, root residual {residual:.3e}")
    return p


def separating_poly(k: int, z: Union[np.ndarray, Sequence[float]]) -> RakedPolynomial:
    """The polynomial t -> z . sm(k, t)."""
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.size != 2 * k:
        raise OrbitopeKitError("dimension-mismatch", f"need {2 * k} coefficients, got {z.size}")
    return from_coefficients(k, z)


def min_on_set(p: RakedPolynomial, points: ConfigurationLike) -> tuple[float, float]:
    """Minimum of p over a finite set, with the minimizing angle."""
    angles = as_angles(points)
    if angles.size == 0:
        raise OrbitopeKitError("empty-configuration", "no points given")
    values = evaluate(p, angles)
    i = int(np.argmin(values))
    return float(values[i]), float(angles[i])


def positive_raked_poly(k: int, points: ConfigurationLike) -> Optional[RakedPolynomial]:
    """
    A raked polynomial of degree 2k-1 positive on the given points, when
    the origin lies outside conv sm(k, points); None otherwise.
    """
    angles = as_angles(points)
    if angles.size == 0:
        raise OrbitopeKitError("empty-configuration", "no points given")
    certificate = origin_in_conv(sm_matrix(k, angles).T)
    if not isinstance(certificate, Separating):
        return None
    return separating_poly(k, certificate.z)


class SignArc(BaseModel):
    """A maximal open arc on which p keeps one sign."""

    arc: Arc
    sign: int


def _check_grid(p: RakedPolynomial, grid: int) -> None:
    if grid < 8 * p.k:
        raise OrbitopeKitError(
            "grid-too-coarse", f"grid must be at least {8 * p.k} for k={p.k}, got {grid}"
        )


def roots(p: RakedPolynomial, grid: int) -> np.ndarray:
    """
    Sign-changing roots of p on [0, 2pi), bracketed on a uniform grid and
    refined with Brent's method. Tangential roots are not reported.
    """
    _check_grid(p, grid)
    samples = TWO_PI * np.arange(grid) / grid
    values = np.asarray(evaluate(p, samples))
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        raise OrbitopeKitError("invalid-parameter", "the zero polynomial has no sign pattern")
    zero_tol = 1e-12 * scale
    signs = np.where(np.abs(values) <= zero_tol, 0, np.sign(values)).astype(int)

    def at(t: float) -> float:
        return float(evaluate(p, np.array([t]))[0])

    found: list[float] = []
    for i in range(grid):
        j = (i + 1) % grid
        lo = samples[i]
        hi = samples[j] if j else TWO_PI
        if signs[i] == 0:
            before, after = signs[i - 1], signs[j]
            if before != 0 and after != 0 and before != after:
                found.append(lo)
        elif signs[j] != 0 and signs[i] != signs[j]:
            found.append(brentq(at, lo, hi, xtol=config.poly.root_xtol))
    result = np.sort(np.mod(np.asarray(found, dtype=float), TWO_PI))
    result[result >= TWO_PI] = 0.0
    return np.unique(result)


def sign_pattern(p: RakedPolynomial, grid: int) -> list[SignArc]:
    """
    Alternating list of sign arcs of p, starting at its first root in [0, 2pi).
    """
    found = roots(p, grid)
    arcs: list[SignArc] = []
    for i, start in enumerate(found):
        end = found[(i + 1) % found.size]
        span = (end - start) % TWO_PI or TWO_PI
        middle = start + span / 2.0
        sign = 1 if evaluate(p, middle) > 0 else -1
        if arcs and arcs[-1].sign == sign:
            merged = Arc.between(arcs[-1].arc.a, end)
            arcs[-1] = SignArc(arc=merged, sign=sign)
            continue
        arcs.append(SignArc(arc=Arc.between(start, end), sign=sign))
    if len(arcs) > 1 and arcs[0].sign == arcs[-1].sign:
        arcs[0] = SignArc(arc=Arc.between(arcs[-1].arc.a, arcs[0].arc.b), sign=arcs[0].sign)
        arcs.pop()
    poly_logger.debug(f"sign pattern: {len(found)} roots, {len(arcs)} arcs")
    return arcs


def sample_series(p: RakedPolynomial, count: Optional[int] = None) -> list[tuple[float, float]]:
    """(t, p(t)) on a uniform grid of count points over [0, 2pi)."""
    count = count or config.poly.sample_count
    if count < 1:
        raise OrbitopeKitError("invalid-parameter", "sample count must be positive")
    t = TWO_PI * np.arange(count) / count
    values = evaluate(p, t)
    return list(zip(t.tolist(), np.asarray(values).tolist()))
