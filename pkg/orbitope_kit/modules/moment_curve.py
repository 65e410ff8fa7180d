"""
The symmetric moment curve SM_{2k}: S^1 -> R^{2k}.

    sm(k, t) = (cos t, sin t, cos 3t, sin 3t, ..., cos(2k-1)t, sin(2k-1)t)

Every coordinate is an odd function of t, so sm(k, t + pi) = -sm(k, t).
The determinant of 2k moment vectors factors as a constant times the
product of pairwise sines, which gives closed forms for the nullspace of
2k+1 moment vectors and for the signs of its entries.
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from orbitope_kit.config import config
from orbitope_kit.errors import ConsistencyError, OrbitopeKitError
from orbitope_kit.modules.circle_geometry import (
    AngleLike,
    ConfigurationLike,
    angle_of,
    as_angles,
    chi_counts,
    validate_nondegenerate,
)
from orbitope_kit.utils.logging_config import moment_logger


def _check_order(k: int) -> None:
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise OrbitopeKitError("invalid-order", f"k must be a positive integer, got {k}")


def frequencies(k: int) -> np.ndarray:
    """Odd frequencies 1, 3, ..., 2k-1."""
    _check_order(k)
    return 2 * np.arange(1, k + 1) - 1


def sm(k: int, t: AngleLike) -> np.ndarray:
    """Point of the symmetric moment curve in R^{2k}."""
    freqs = frequencies(k)
    x = angle_of(t)
    out = np.empty(2 * k)
    out[0::2] = np.cos(freqs * x)
    out[1::2] = np.sin(freqs * x)
    return out


def sm_derivative(k: int, t: AngleLike) -> np.ndarray:
    """d/dt sm(k, t)."""
    freqs = frequencies(k)
    x = angle_of(t)
    out = np.empty(2 * k)
    out[0::2] = -freqs * np.sin(freqs * x)
    out[1::2] = freqs * np.cos(freqs * x)
    return out


def sm_matrix(k: int, points: ConfigurationLike) -> np.ndarray:
    """Matrix whose columns are sm(k, t_j); shape (2k, n)."""
    freqs = frequencies(k)
    angles = as_angles(points)
    phases = np.outer(freqs, angles)
    out = np.empty((2 * k, angles.size))
    out[0::2] = np.cos(phases)
    out[1::2] = np.sin(phases)
    return out


class MomentMatrix(BaseModel):
    """Moment vectors of a configuration, one column per point."""

    model_config = ConfigDict(frozen=True)

    k: int
    columns: tuple[tuple[float, ...], ...]
    source_angles: tuple[float, ...]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.columns, dtype=float).T


def moment_matrix(k: int, points: ConfigurationLike) -> MomentMatrix:
    matrix = sm_matrix(k, points)
    return MomentMatrix(
        k=k,
        columns=tuple(tuple(col) for col in matrix.T.tolist()),
        source_angles=tuple(as_angles(points).tolist()),
    )


def kappa_magnitude(k: int) -> float:
    """|det / sine_product| for 2k moment vectors: 2^{2k(k-1)}."""
    _check_order(k)
    return float(2.0 ** (2 * k * (k - 1)))


def sine_product(points: ConfigurationLike) -> float:
    """Product over j < l of sin(t_l - t_j), in the listed order."""
    angles = as_angles(points)
    if angles.size < 2 or angles.size % 2:
        raise OrbitopeKitError(
            "invalid-cardinality", f"need an even number (>= 2) of points, got {angles.size}"
        )
    return _pairwise_sine_product(angles)


def _pairwise_sine_product(angles: np.ndarray) -> float:
    j, l = np.triu_indices(angles.size, k=1)
    return float(np.prod(np.sin(angles[l] - angles[j])))


def det_direct(points: ConfigurationLike, k: int) -> float:
    """Determinant of the 2k x 2k matrix [sm(k, t_1) ... sm(k, t_2k)] (LU with partial pivoting)."""
    angles = as_angles(points)
    _check_order(k)
    if angles.size != 2 * k:
        raise OrbitopeKitError(
            "invalid-cardinality", f"need exactly {2 * k} points, got {angles.size}"
        )
    return float(np.linalg.det(sm_matrix(k, angles)))


def singular_values(k: int, points: ConfigurationLike) -> np.ndarray:
    """Singular values of the moment matrix, descending."""
    return np.linalg.svd(sm_matrix(k, points), compute_uv=False)


class NullspaceVector(BaseModel):
    """
    Closed-form kernel vector of the 2k x (2k+1) moment matrix.

    lam_i = (-1)^i prod_{j<l; j,l != i} sin(t_l - t_j)
    alpha_i = prod_{j != i} sin(t_j - t_i)

    lam_i * alpha_i equals the full product prod_{j<l} sin(t_l - t_j) for every i.
    """

    model_config = ConfigDict(frozen=True)

    k: int
    lam: tuple[float, ...]
    alpha: tuple[float, ...]
    residual: float

    @property
    def same_sign(self) -> bool:
        lam = np.asarray(self.lam)
        return bool(np.all(lam > 0) or np.all(lam < 0))

    @property
    def weights(self) -> Optional[tuple[float, ...]]:
        """lam normalized to sum to one, when all entries share a sign."""
        if not self.same_sign:
            return None
        lam = np.asarray(self.lam)
        return tuple((lam / lam.sum()).tolist())


def _validated_odd_configuration(points: ConfigurationLike, k: int) -> np.ndarray:
    _check_order(k)
    angles = as_angles(points)
    if angles.size != 2 * k + 1:
        raise OrbitopeKitError(
            "invalid-cardinality", f"need exactly {2 * k + 1} points, got {angles.size}"
        )
    return validate_nondegenerate(angles, min_pair_sine=config.numerics.min_pair_sine)


def nullspace_lambda(points: ConfigurationLike, k: int) -> NullspaceVector:
    """Closed-form nullspace vector of 2k+1 moment vectors."""
    angles = _validated_odd_configuration(points, k)
    n = angles.size
    lam = np.empty(n)
    alpha = np.empty(n)
    for i in range(n):
        rest = np.delete(angles, i)
        lam[i] = (-1) ** i * _pairwise_sine_product(rest)
        alpha[i] = float(np.prod(np.sin(rest - angles[i])))

    matrix = sm_matrix(k, angles)
    residual = float(np.max(np.abs(matrix @ lam)))
    scale = float(np.max(np.abs(lam)))
    if residual > config.numerics.residual_tol * scale:
        raise ConsistencyError(
            "residual-too-large",
            f"moment matrix times lambda has residual {residual:.3e}",
        )
    moment_logger.debug(f"nullspace lambda for k={k}: residual {residual:.3e}")
    return NullspaceVector(
        k=k,
        lam=tuple(lam.tolist()),
        alpha=tuple(alpha.tolist()),
        residual=residual,
    )


def sign_law_holds(points: ConfigurationLike, k: int) -> bool:
    """sign(alpha_i) == (-1)^{chi(t_i)} for every point."""
    vector = nullspace_lambda(points, k)
    chis = chi_counts(points)
    return all(
        (a > 0) == (c % 2 == 0) for a, c in zip(vector.alpha, chis)
    )


def same_sign_condition(points: ConfigurationLike, k: int) -> bool:
    """
    True iff all lambda_i share a sign, i.e. the origin is in the interior
    of conv{sm(k, t_i)}.

    Cross-checks the chi criterion (every chi(t_i) equal to k) against the
    signs of alpha; a mismatch raises ConsistencyError.
    """
    vector = nullspace_lambda(points, k)
    alpha = np.asarray(vector.alpha)
    by_alpha = bool(np.all(alpha > 0) or np.all(alpha < 0))
    chis = chi_counts(points)
    by_chi = all(c == k for c in chis)
    if by_alpha != by_chi or by_alpha != vector.same_sign:
        moment_logger.error(
            f"sign criteria disagree: alpha={by_alpha}, chi={by_chi}, lambda={vector.same_sign}"
        )
        raise ConsistencyError(
            "sign-law-violated", f"chi counts {chis} disagree with alpha signs"
        )
    return by_chi
