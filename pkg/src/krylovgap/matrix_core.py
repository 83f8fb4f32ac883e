"""
Dense real linear-algebra kernels.

Every routine here takes plain ``numpy`` arrays, validates them once, and
returns read-only results.  The SVD is LAPACK's (via ``numpy.linalg.svd``)
with a deterministic sign convention; :func:`jacobi_svd` is an independent
one-sided Jacobi implementation kept as a reference for testing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidInput

DEFAULT_RANK_TOL = 1e-12


def as_matrix(A, name="A"):
    """Return ``A`` as a finite 2-D float64 array (1-D input becomes a column)."""
    try:
        arr = np.array(A, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name} is not a real numeric array") from exc
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidInput(f"{name} must be 2-D, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains NaN or Inf entries")
    return arr


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _rank_threshold(sigma, shape, rank_tol):
    if len(sigma) == 0:
        return 0.0
    return rank_tol * sigma[0] * max(shape)


def _fix_signs(M):
    """Flip columns so that the first non-negligible entry is non-negative."""
    if M.shape[1] == 0:
        return np.ones(0)
    A = np.abs(M)
    scale = A.max(axis=0)
    first = np.argmax(A > 1e-12 * scale, axis=0)
    lead = M[first, np.arange(M.shape[1])]
    return np.where((scale > 0) & (lead < 0), -1.0, 1.0)


@dataclass(frozen=True)
class SVDFactorization:
    """Full SVD ``A = U diag(sigma) V^T`` with partition views at any index.

    ``U`` is m x m, ``V`` is n x n and ``sigma`` has length ``p = min(m, n)``.
    For an index ``l`` the views ``U_head(l) = U_l`` and ``U_tail(l) = U_{l,perp}``
    follow the usual block partition; ``sigma_tail(l)`` holds the diagonal of
    ``Sigma_{l,perp}`` (zero-padded blocks are implicit).
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    rank: int
    rank_tol: float = DEFAULT_RANK_TOL

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    @property
    def p(self):
        return len(self.sigma)

    def _check(self, l):
        if not 0 <= l <= self.p:
            raise InvalidArgument(f"partition index {l} outside [0, {self.p}]")

    def U_head(self, l):
        self._check(l)
        return self.U[:, :l]

    def U_tail(self, l):
        self._check(l)
        return self.U[:, l:]

    def V_head(self, l):
        self._check(l)
        return self.V[:, :l]

    def V_tail(self, l):
        self._check(l)
        return self.V[:, l:]

    def sigma_head(self, l):
        self._check(l)
        return self.sigma[:l]

    def sigma_tail(self, l):
        self._check(l)
        return self.sigma[l:]

    def sigma_at(self, l):
        """1-based access ``sigma_l``; returns 0 beyond ``p``."""
        if l < 1:
            raise InvalidArgument("sigma_0 is the +inf sentinel and is never materialised")
        return float(self.sigma[l - 1]) if l <= self.p else 0.0

    def reconstruct(self):
        m, n = self.shape
        p = self.p
        return (self.U[:, :p] * self.sigma) @ self.V[:, :p].T

    def transpose(self):
        """SVD of ``A^T`` obtained by swapping the factors."""
        return SVDFactorization(self.V, self.sigma, self.U, self.rank, self.rank_tol)


def thin_svd(A, rank_tol=DEFAULT_RANK_TOL):
    """Deterministic SVD of a finite real matrix.

    Parameters
    ----------
    A : array_like, (m, n)
    rank_tol : float
        Singular values ``<= rank_tol * sigma_1 * max(m, n)`` do not count
        towards the numerical rank.

    Returns
    -------
    SVDFactorization
        Full orthogonal factors; the first non-negligible entry of every
        column of ``U`` is non-negative, with ``V`` flipped accordingly.
    """
    A = as_matrix(A)
    m, n = A.shape
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    V = Vt.T
    p = min(m, n)
    su = _fix_signs(U)
    U = U * su
    V[:, :p] *= su[:p]
    if n > p:
        V[:, p:] *= _fix_signs(V[:, p:])
    thresh = _rank_threshold(s, A.shape, rank_tol)
    rank = int(np.sum(s > thresh)) if p else 0
    return SVDFactorization(_frozen(U), _frozen(s), _frozen(V), rank, rank_tol)


def jacobi_svd(A, tol=1e-15, max_sweeps=60):
    """One-sided (Hestenes) Jacobi SVD.

    Bidiagonalization-free reference used to cross-check :func:`thin_svd`.
    Returns ``(U, s, V)`` with ``U`` m x p, ``s`` sorted non-increasing and
    ``V`` n x p.  Intended for small matrices; cost is O(sweeps * n^2 * m).
    """
    A = as_matrix(A)
    transposed = A.shape[0] < A.shape[1]
    W = (A.T if transposed else A).copy()
    m, n = W.shape
    V = np.eye(n)
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = W[:, i] @ W[:, i]
                beta = W[:, j] @ W[:, j]
                gamma = W[:, i] @ W[:, j]
                if gamma == 0.0:
                    continue
                off = max(off, abs(gamma) / np.sqrt(alpha * beta))
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta)) if zeta != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                wi, wj = W[:, i].copy(), W[:, j].copy()
                W[:, i] = c * wi - s * wj
                W[:, j] = s * wi + c * wj
                vi, vj = V[:, i].copy(), V[:, j].copy()
                V[:, i] = c * vi - s * vj
                V[:, j] = s * vi + c * vj
        if off < tol:
            break
    sv = np.linalg.norm(W, axis=0)
    order = np.argsort(-sv, kind="stable")
    sv = sv[order]
    V = V[:, order]
    W = W[:, order]
    U = np.zeros_like(W)
    nz = sv > 0
    U[:, nz] = W[:, nz] / sv[nz]
    if transposed:
        return V, sv, U
    return U, sv, V


def pseudoinverse(A, rank_tol=DEFAULT_RANK_TOL):
    """Moore-Penrose pseudoinverse from an economy SVD.

    Singular values ``<= rank_tol * sigma_1 * max(m, n)`` are treated as zero.
    """
    A = as_matrix(A)
    m, n = A.shape
    if A.size == 0:
        return np.zeros((n, m))
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > _rank_threshold(s, A.shape, rank_tol)))
    return (Vt[:r].T / s[:r]) @ U[:, :r].T


@dataclass(frozen=True)
class OrthonormalBasis:
    """Matrix ``Q`` (ambient_dim x dim) with orthonormal columns."""

    Q: np.ndarray

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        if Q.ndim == 1:
            Q = Q.reshape(-1, 1)
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    @property
    def dim(self):
        return self.Q.shape[1]

    @property
    def ambient_dim(self):
        return self.Q.shape[0]

    def projector(self):
        return self.Q @ self.Q.T

    def complement(self):
        """Orthonormal basis of the orthogonal complement in the ambient space."""
        n, d = self.Q.shape
        if d == 0:
            return OrthonormalBasis(np.eye(n))
        U, _, _ = np.linalg.svd(self.Q, full_matrices=True)
        return OrthonormalBasis(U[:, d:])


def as_basis(S, name="S"):
    """Accept an :class:`OrthonormalBasis` or an array with orthonormal columns."""
    if isinstance(S, OrthonormalBasis):
        return S
    return OrthonormalBasis(as_matrix(S, name))


def orthonormal_range(A, rank_tol=DEFAULT_RANK_TOL):
    """Orthonormal basis of ``R(A)`` whose dimension is the numerical rank."""
    A = as_matrix(A)
    if A.shape[1] == 0:
        return OrthonormalBasis(np.zeros((A.shape[0], 0)))
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > _rank_threshold(s, A.shape, rank_tol))) if s.size else 0
    Q = U[:, :r] * _fix_signs(U[:, :r])
    return OrthonormalBasis(Q)


def truncated_svd_approx(A, i, svd=None):
    """Best rank-``i`` approximation ``A_i = U_i Sigma_i V_i^T``."""
    A = as_matrix(A)
    f = svd if svd is not None else thin_svd(A)
    if not 0 <= i <= f.p:
        raise InvalidArgument(f"truncation rank {i} outside [0, {f.p}]")
    return (f.U[:, :i] * f.sigma[:i]) @ f.V[:, :i].T


def norm2(A):
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def normF(A):
    A = np.asarray(A, dtype=float)
    return float(np.linalg.norm(A)) if A.size else 0.0
