"""
Orthonormal bases of block Krylov spaces.

``K_q(A, X) = R(AX) + R((AA^T)AX) + ... + R((AA^T)^q AX)`` is built one block
at a time: the next raw block is ``A (A^T Q_i)`` for the newest orthonormal
block ``Q_i``, which spans the same space as the monomial generators without
their dynamic range.  Each raw block is projected out of the current basis
twice, rank-revealed by pivoted QR and reorthogonalized once more.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import EmptyKrylov, InvalidArgument
from .matrix_core import OrthonormalBasis, as_matrix

DEFAULT_KRYLOV_TOL = 1e-10


def fingerprint(M):
    M = np.ascontiguousarray(M, dtype=float)
    h = hashlib.sha1(repr(M.shape).encode())
    h.update(M.tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class KrylovBasis:
    """Orthonormal basis ``Y_q`` of ``K_q(A, X)`` plus extension state."""

    basis: OrthonormalBasis
    q: int
    block_dims: tuple
    provenance: tuple
    last_block: np.ndarray = field(repr=False)
    rank_tol: float = DEFAULT_KRYLOV_TOL

    @property
    def Q(self):
        return self.basis.Q

    @property
    def dim(self):
        return self.basis.dim

    @property
    def empty(self):
        return self.basis.dim == 0

    def raise_if_empty(self):
        if self.empty:
            raise EmptyKrylov("A X = 0: every Krylov generator vanishes")
        return self


def _orthogonalize_block(Q, W, rank_tol):
    """Columns of ``W`` orthonormalized against ``Q``; deflated at ``rank_tol``."""
    ref = np.max(np.linalg.norm(W, axis=0), initial=0.0)
    if ref == 0.0:
        return np.zeros((W.shape[0], 0))
    for _ in range(2):
        W = W - Q @ (Q.T @ W)
    Qw, R, _ = scipy.linalg.qr(W, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    keep = int(np.sum(diag > rank_tol * ref))
    if keep == 0:
        return np.zeros((W.shape[0], 0))
    new = Qw[:, :keep]
    new = new - Q @ (Q.T @ new)
    new, _ = np.linalg.qr(new)
    return new


def _step(A, Q, block, rank_tol):
    if block.shape[1] == 0:
        return Q, block
    W = A @ (A.T @ block)
    new = _orthogonalize_block(Q, W, rank_tol)
    return np.hstack([Q, new]), new


def krylov_basis(A, X, q, rank_tol=DEFAULT_KRYLOV_TOL):
    """Orthonormal basis of ``K_q(A, X)``.

    Parameters
    ----------
    A : array_like, (m, n)
    X : array_like, (n, r)
    q : int
        Power order, ``q >= 0``.
    rank_tol : float
        Deflation threshold, relative to the largest raw column norm of each block.

    Returns
    -------
    KrylovBasis
        ``dim == 0`` (``empty``) when ``A X = 0``.
    """
    A = as_matrix(A)
    X = as_matrix(X, "X")
    if A.shape[1] != X.shape[0]:
        raise InvalidArgument(f"A is {A.shape}, X is {X.shape}: inner dimensions differ")
    if q < 0 or int(q) != q:
        raise InvalidArgument(f"q must be a non-negative integer, got {q!r}")
    m = A.shape[0]
    Q = _orthogonalize_block(np.zeros((m, 0)), A @ X, rank_tol)
    block = Q
    dims = [Q.shape[1]]
    for _ in range(int(q)):
        Q, block = _step(A, Q, block, rank_tol)
        dims.append(block.shape[1])
    return KrylovBasis(
        basis=OrthonormalBasis(Q),
        q=int(q),
        block_dims=tuple(dims),
        provenance=(fingerprint(A), fingerprint(X)),
        last_block=block,
        rank_tol=rank_tol,
    )


def extend(kb, A, X):
    """``K_{q+1}`` from ``K_q`` without rebuilding the earlier blocks."""
    A = as_matrix(A)
    X = as_matrix(X, "X")
    if kb.provenance != (fingerprint(A), fingerprint(X)):
        raise InvalidArgument("Krylov basis was built from a different (A, X)")
    Q, block = _step(A, kb.Q, kb.last_block, kb.rank_tol)
    return replace(
        kb,
        basis=OrthonormalBasis(Q),
        q=kb.q + 1,
        block_dims=kb.block_dims + (block.shape[1],),
        last_block=block,
    )


def krylov_sequence(A, X, q_max, rank_tol=DEFAULT_KRYLOV_TOL):
    """``[K_0, K_1, ..., K_{q_max}]`` built incrementally."""
    kb = krylov_basis(A, X, 0, rank_tol)
    out = [kb]
    for _ in range(q_max):
        kb = extend(kb, A, X)
        out.append(kb)
    return out


def krylov_generators(A, X, q):
    """Raw block matrix ``(AX, (AA^T)AX, ..., (AA^T)^q AX)``.

    Only sensible for small ``q``; monomial blocks lose the small singular
    directions to rounding as ``q`` grows.
    """
    A = as_matrix(A)
    X = as_matrix(X, "X")
    blocks = [A @ X]
    for _ in range(q):
        blocks.append(A @ (A.T @ blocks[-1]))
    return np.hstack(blocks)


def augmented_subspace(A, X, q, t, rank_tol=DEFAULT_KRYLOV_TOL):
    """Basis of ``K*_{q,t} = R((A^TA)X) + ... + R((A^TA)^(q+t+1) X)``.

    Built as ``K_t(A^T, Y_q)`` with ``Y_q`` the basis of ``K_q(A, X)``.

    Raises
    ------
    EmptyKrylov
        If ``A X = 0``.
    """
    A = as_matrix(A)
    Y = krylov_basis(A, X, q, rank_tol).raise_if_empty()
    return krylov_basis(A.T, Y.Q, t, rank_tol).basis
