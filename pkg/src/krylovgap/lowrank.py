"""
Low-rank approximation from a block Krylov space, with certified errors.

:func:`proto_algorithm` compresses ``A`` onto an orthonormal basis of the
Krylov block and keeps the top ``h`` left singular directions of the
compression.  :func:`lowrank_certificate` turns the two-term distance bound
for ``K*_{q,t}`` into per-index excess errors ``delta_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .amplifier import build_amplifier
from .bounds import BoundCertificate, GaplessProblem, SOUNDNESS_SLACK, deflation_coefficient
from .errors import InsufficientKrylovRank, InvalidArgument, NoGapAtIndex
from .krylov import DEFAULT_KRYLOV_TOL, krylov_basis
from .matrix_core import (
    DEFAULT_RANK_TOL, OrthonormalBasis, as_basis, as_matrix, norm2, normF,
    orthonormal_range, pseudoinverse, thin_svd, truncated_svd_approx,
)
from .subspace import principal_angles, sin_tan_theta_norms


@dataclass
class LowRankResult:
    """Output of :func:`proto_algorithm`; per-index arrays hold ``i = 1..h``."""

    U_hat: np.ndarray = field(repr=False)
    h: int
    ell: int
    krylov_dim: int
    errors2: np.ndarray
    errorsF: np.ndarray
    opt_errors2: np.ndarray
    opt_errorsF: np.ndarray
    row_norms: np.ndarray
    deltas: np.ndarray | None = None
    condition_lhs: float | None = None
    theta0: float | None = None

    @property
    def orthonormality_defect(self):
        return normF(self.U_hat.T @ self.U_hat - np.eye(self.h))

    def as_dict(self):
        out = {
            "h": self.h,
            "ell": self.ell,
            "krylov_dim": self.krylov_dim,
            "errors2": self.errors2.tolist(),
            "errorsF": self.errorsF.tolist(),
            "opt_errors2": self.opt_errors2.tolist(),
            "opt_errorsF": self.opt_errorsF.tolist(),
            "row_norms": self.row_norms.tolist(),
            "orthonormality_defect": self.orthonormality_defect,
        }
        if self.deltas is not None:
            out.update(deltas=self.deltas.tolist(), condition_lhs=self.condition_lhs, theta0=self.theta0)
        return out


def approx_error(A, U):
    """``(||A - U U^T A||_2, ||A - U U^T A||_F)``."""
    A = as_matrix(A)
    U = as_basis(U, "U").Q
    R = A - U @ (U.T @ A)
    return {"err2": norm2(R), "errF": normF(R)}


def optimal_errors(sigma, h):
    """``||A - A_i||_{2,F}`` for ``i = 1..h`` from the singular values."""
    s = np.asarray(sigma, dtype=float)
    tail_sq = np.concatenate([np.cumsum((s ** 2)[::-1])[::-1], [0.0]])
    pad = np.concatenate([s, np.zeros(h + 1)])
    opt2 = np.array([pad[i] for i in range(1, h + 1)])
    optF = np.sqrt(np.array([tail_sq[min(i, len(s))] for i in range(1, h + 1)]))
    return opt2, optF


def proto_algorithm(A, X, h, ell, rank_tol=DEFAULT_KRYLOV_TOL, svd=None):
    """Rank-``h`` approximation ``U_hat U_hat^T A`` from ``K_ell(A, X)``.

    Parameters
    ----------
    A : array_like, (m, n)
    X : array_like, (n, r)
    h : int
        Rank parameter.
    ell : int
        Power parameter, ``ell >= 0``.
    svd : SVDFactorization, optional
        SVD of ``A`` for the optimal reference errors.

    Raises
    ------
    InsufficientKrylovRank
        When ``dim K_ell < h``.
    """
    A = as_matrix(A)
    if ell < 0 or int(ell) != ell:
        raise InvalidArgument(f"ell must be a non-negative integer, got {ell!r}")
    if h < 1:
        raise InvalidArgument(f"h must be positive, got {h}")
    kb = krylov_basis(A, X, int(ell), rank_tol)
    d = kb.dim
    if d < h:
        raise InsufficientKrylovRank(d, h)
    UK = kb.Q
    W = UK.T @ A
    Wsvd = thin_svd(W)
    U_hat = UK @ Wsvd.U[:, :h]
    svd = svd if svd is not None else thin_svd(A)
    err2, errF = np.empty(h), np.empty(h)
    for i in range(1, h + 1):
        e = approx_error(A, U_hat[:, :i])
        err2[i - 1], errF[i - 1] = e["err2"], e["errF"]
    opt2, optF = optimal_errors(svd.sigma, h)
    rows = np.linalg.norm(U_hat.T @ A, axis=1)
    return LowRankResult(U_hat, h, int(ell), d, err2, errF, opt2, optF, rows)


def lowrank_certificate(svd, X, h, q, t, theta0=np.pi / 4, A=None, problem=None, **kw):
    """Certified errors for ``proto_algorithm`` with power ``q + t + 1``.

    The condition value is the spectral form of the two-term ``K*_{q,t}``
    bound; the certificate applies when it is ``<= sin(theta0)``.  Then for
    ``1 <= i <= h``::

        ||A - U_i U_i^T A||_{2,F} <= ||A - A_i||_{2,F} + delta_i,
        delta_i = sigma_{i+1} * (Frobenius form of the bound) / cos(theta0).

    Returns
    -------
    (BoundCertificate, LowRankResult)
        The certificate's ``lhs`` is the worst excess
        ``max_i(error_i - opt_i - delta_i)`` (checked against ``rhs = 0``)
        and is ``None`` when the condition fails.
    """
    if not 0 < theta0 < np.pi / 2:
        raise InvalidArgument(f"theta0 must lie in (0, pi/2), got {theta0}")
    if problem is None:
        problem = GaplessProblem(svd.reconstruct() if A is None else A, X, h, svd=svd, **kw)
    problem.require_compatible()
    svd = problem.svd
    base = problem.thm33_rhs(q, t)
    cond = base.rhs2
    applicable = bool(cond <= np.sin(theta0))
    opt2, _ = optimal_errors(svd.sigma, h)
    deltas = opt2 * base.rhsF / np.cos(theta0)
    res = proto_algorithm(problem.A, problem.X, h, q + t + 1, problem.krylov_tol, svd)
    res.deltas, res.condition_lhs, res.theta0 = deltas, cond, float(theta0)
    ex2 = float(np.max(res.errors2 - res.opt_errors2 - deltas))
    exF = float(np.max(res.errorsF - res.opt_errorsF - deltas))
    cert = BoundCertificate(
        "T37", 0.0, 0.0, ex2 if applicable else None, exF if applicable else None,
        problem._params(q=q, t=t, ell=q + t + 1, theta0=float(theta0)),
        base.omitted, base.terms,
        {"compatible": True, "condition_lhs": cond, "applicable": applicable,
         "krylov_dim": res.krylov_dim},
        extras={"deltas": deltas.tolist(), "excess2": ex2, "excessF": exF,
                "frobenius_bracket": base.rhsF},
    )
    return cert, res


def gap_case_lowrank(A, X, k, q, svd=None, cluster_tol=None, slack=SOUNDNESS_SLACK):
    """Gap-at-``k`` low-rank checks for ``proto_algorithm(A, X, k, q)``.

    Requires ``sigma_k > sigma_{k+1} > 0`` and ``rank(V_k^T X) = k``.  Uses the
    Chebyshev amplifier ``phi`` of degree ``2q + 1``; with
    ``Delta = ||phi(Sigma_perp)||_2 ||V_perp^T X (V_k^T X)^+||_F`` checks

    * ``||A - U_i U_i^T A|| <= ||A - A_i|| + Delta``;
    * ``sigma_i - Delta <= ||u_i^T A||_2 <= sigma_i``;
    * the same error bound with ``Delta(X, q, k)_F sigma_{k+1}`` in place of ``Delta``.
    """
    A = as_matrix(A)
    svd = svd if svd is not None else thin_svd(A)
    kw = {} if cluster_tol is None else {"cluster_tol": cluster_tol}
    if not 1 <= k < svd.rank:
        raise NoGapAtIndex(k, svd.sigma_at(k), svd.sigma_at(k + 1))
    dc = deflation_coefficient(svd, X, q, k, "right", require_full_rank=True, **kw)
    phi = build_amplifier(svd.sigma_at(k), svd.sigma_at(k + 1), q)
    tail = float(np.max(np.abs(np.atleast_1d(phi(svd.sigma_tail(k)))), initial=0.0))
    delta = tail * dc.rawF
    delta24 = dc.deltaF * svd.sigma_at(k + 1)
    res = proto_algorithm(A, X, k, q, svd=svd)
    sig = svd.sigma[:k]
    tol = slack * (1.0 + sig[0])
    checks = {
        "error2": bool(np.all(res.errors2 <= res.opt_errors2 + delta + tol)),
        "errorF": bool(np.all(res.errorsF <= res.opt_errorsF + delta + tol)),
        "row_lower": bool(np.all(sig - delta <= res.row_norms + tol)),
        "row_upper": bool(np.all(res.row_norms <= sig + tol)),
        "error2_delta": bool(np.all(res.errors2 <= res.opt_errors2 + delta24 + tol)),
        "errorF_delta": bool(np.all(res.errorsF <= res.opt_errorsF + delta24 + tol)),
    }
    return {"delta": delta, "delta_coefficient": delta24, "checks": checks, "result": res}


# ---------------------------------------------------------------------------
# range-restricted approximation


def best_rank_i_from_range(C, A, i, norm="F", rank_tol=DEFAULT_RANK_TOL):
    """``C Y`` with ``rank(Y) <= i`` minimising ``||A - C Y||``.

    Computed as ``Q (Q^T A)_i`` for ``Q`` an orthonormal basis of ``R(C)``.
    This is the exact Frobenius minimiser; in the spectral norm it is exact
    whenever ``rank(A) <= i`` and an upper bound on the minimum otherwise.
    """
    if norm not in ("2", "F"):
        raise InvalidArgument(f"norm must be '2' or 'F', got {norm!r}")
    C = as_matrix(C, "C")
    A = as_matrix(A)
    Q = orthonormal_range(C, rank_tol).Q
    if not 0 <= i <= Q.shape[1]:
        raise InvalidArgument(f"i={i} exceeds rank(C)={Q.shape[1]}")
    if i == 0:
        return np.zeros_like(A)
    B = Q.T @ A
    # a rank cap at or above min(B.shape) is no constraint
    return Q @ (B if i >= min(B.shape) else truncated_svd_approx(B, i))


def sketch_residual_sides(A1, A2, Z, norm="F"):
    """Both sides of ``||A1 - P_{C,i}(A1)|| <= ||A2 Z (V1^T Z)^+||`` with ``C = (A1 + A2) Z``.

    ``i = rank(A1)`` and ``V1`` spans its top right singular vectors.
    """
    A1, A2, Z = as_matrix(A1), as_matrix(A2), as_matrix(Z, "Z")
    s1 = thin_svd(A1)
    i = s1.rank
    V1 = s1.V_head(i)
    C = (A1 + A2) @ Z
    P = best_rank_i_from_range(C, A1, i, norm)
    f = norm2 if norm == "2" else normF
    return f(A1 - P), f(A2 @ Z @ pseudoinverse(V1.T @ Z))


def range_projection_tangent_sides(A, i, K, svd=None):
    """Both sides of ``||A_i - (AQ)(AQ)^+ A_i|| <= ||A - A_i||_2 ||tan Theta(K, V_i)||``.

    ``Q`` spans the ``i`` principal vectors of ``K`` paired with ``R(V_i)``.
    Returns ``{"lhs2", "lhsF", "rhs2", "rhsF"}``; tangent norms may be ``inf``.
    """
    A = as_matrix(A)
    svd = svd if svd is not None else thin_svd(A)
    Kb = as_basis(K, "K")
    V1 = svd.V_head(i)
    pv = principal_angles(Kb, V1)
    Q = pv.u_basis.Q[:, :i]
    A1 = truncated_svd_approx(A, i, svd)
    AQ = A @ Q
    R = A1 - AQ @ (pseudoinverse(AQ) @ A1)
    tan = sin_tan_theta_norms(V1, Kb)
    s = svd.sigma_at(i + 1)
    return {"lhs2": norm2(R), "lhsF": normF(R), "rhs2": s * tan["tan2"], "rhsF": s * tan["tanF"]}
