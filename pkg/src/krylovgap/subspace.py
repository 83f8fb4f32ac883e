"""
Principal angles, principal vectors and sin/tan Theta distances.

Angles are computed from the SVD of ``S^T T`` (cosines) and refined from the
SVD of ``(I - T T^T) S`` (sines) whenever ``cos(theta) > 1/sqrt(2)``, so both
tiny and near-right angles keep full relative accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .matrix_core import OrthonormalBasis, as_basis, norm2, normF

RIGHT_ANGLE_MARGIN = 1e-12
_SWITCH = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class PrincipalAngles:
    angles: np.ndarray
    cosines: np.ndarray
    sines: np.ndarray

    def __len__(self):
        return len(self.angles)

    @property
    def max_angle(self):
        return float(self.angles[-1]) if len(self.angles) else 0.0


@dataclass(frozen=True)
class PrincipalVectorPair:
    """Principal vectors ``u_i`` (in S) and ``v_i`` (in T), ordered by angle."""

    u_basis: OrthonormalBasis
    v_basis: OrthonormalBasis
    angles: PrincipalAngles


def _sines_ascending(S, T):
    # requires dim S <= dim T; returns sin(theta_1) <= ... <= sin(theta_s)
    B = S - T @ (T.T @ S)
    sv = np.linalg.svd(B, compute_uv=False)
    sv = np.clip(sv[: S.shape[1]], 0.0, 1.0)
    if len(sv) < S.shape[1]:
        sv = np.concatenate([sv, np.zeros(S.shape[1] - len(sv))])
    return np.sort(sv)


def principal_angles(S, T):
    """Principal angles and vectors between ``R(S)`` and ``R(T)``.

    Parameters
    ----------
    S, T : OrthonormalBasis or array_like
        Isometries with the same number of rows.

    Returns
    -------
    PrincipalVectorPair
        ``min(dim S, dim T)`` non-decreasing angles in ``[0, pi/2]`` with
        matching principal vectors, ``<u_i, v_j> = delta_ij cos(theta_j)``.
    """
    S = as_basis(S, "S").Q
    T = as_basis(T, "T").Q
    if S.shape[0] != T.shape[0]:
        raise InvalidArgument(f"ambient dimensions differ: {S.shape[0]} vs {T.shape[0]}")
    if S.shape[1] == 0 or T.shape[1] == 0:
        raise InvalidArgument("principal angles need subspaces of dimension >= 1")
    k = min(S.shape[1], T.shape[1])
    Y, c, Zt = np.linalg.svd(S.T @ T, full_matrices=False)
    c = np.clip(c[:k], 0.0, 1.0)
    theta = np.arccos(c)
    if np.any(c > _SWITCH):
        if S.shape[1] <= T.shape[1]:
            sines = _sines_ascending(S, T)
        else:
            sines = _sines_ascending(T, S)
        small = c > _SWITCH
        theta[small] = np.arcsin(sines[small])
    theta = np.clip(theta, 0.0, np.pi / 2)
    # cosine-route ordering is authoritative; the sine refinement keeps it
    theta = np.maximum.accumulate(theta)
    u = S @ Y[:, :k]
    v = T @ Zt.T[:, :k]
    angles = PrincipalAngles(theta, np.cos(theta), np.sin(theta))
    return PrincipalVectorPair(OrthonormalBasis(u), OrthonormalBasis(v), angles)


def sin_theta_projector(S, T):
    """Projector route ``||(I - T T^T) S S^T||_{2,F}``; any dimensions."""
    S = as_basis(S, "S").Q
    T = as_basis(T, "T").Q
    B = (S - T @ (T.T @ S)) @ S.T
    return norm2(B), normF(B)


def sin_tan_theta_norms(S, T):
    """Spectral and Frobenius norms of ``sin Theta`` and ``tan Theta``.

    ``dim S <= dim T`` is required (the projector identity behind these
    norms is not symmetric in S and T).  ``tan`` norms are ``inf`` (and
    ``tan_infinite`` set) when some angle is within 1e-12 of pi/2.
    """
    Sb = as_basis(S, "S")
    Tb = as_basis(T, "T")
    if Sb.dim > Tb.dim:
        raise InvalidArgument(
            f"sin/tan Theta norms need dim S <= dim T, got {Sb.dim} > {Tb.dim}"
        )
    ang = principal_angles(Sb, Tb).angles
    sines = ang.sines
    infinite = bool(np.any(ang.angles >= np.pi / 2 - RIGHT_ANGLE_MARGIN))
    if infinite:
        tan2 = tanF = float("inf")
    else:
        tans = np.tan(ang.angles)
        tan2, tanF = float(np.max(tans, initial=0.0)), float(np.linalg.norm(tans))
    return {
        "sin2": float(np.max(sines, initial=0.0)),
        "sinF": float(np.linalg.norm(sines)),
        "tan2": tan2,
        "tanF": tanF,
        "tan_infinite": infinite,
    }


def sin_theta(S, T):
    """``(||sin Theta||_2, ||sin Theta||_F)`` for subspaces in either order.

    Principal angles are symmetric, so this measures the smaller subspace
    against the larger one.  An empty subspace is at distance zero.
    """
    Sb = as_basis(S, "S")
    Tb = as_basis(T, "T")
    if Sb.dim == 0 or Tb.dim == 0:
        return 0.0, 0.0
    sines = principal_angles(Sb, Tb).angles.sines
    return float(np.max(sines)), float(np.linalg.norm(sines))


def orthogonal_difference(T, Tsub, rank_tol=1e-10):
    """Orthonormal basis of ``R(T) (-) R(Tsub)`` for ``R(Tsub) <= R(T)``."""
    T = as_basis(T, "T").Q
    Tsub = as_basis(Tsub, "Tsub").Q
    R = T - Tsub @ (Tsub.T @ T)
    if R.shape[1] == 0:
        return OrthonormalBasis(R)
    U, s, _ = np.linalg.svd(R, full_matrices=False)
    keep = T.shape[1] - Tsub.shape[1]
    keep = max(0, min(keep, int(np.sum(s > rank_tol))))
    return OrthonormalBasis(U[:, :keep])
