"""
Compatibility tests, deflation coefficients and bound certificates.

A certificate evaluates a theorem's right-hand side from the SVD of ``A``
and compares it with the distance actually achieved between a Krylov-type
subspace and a *witness* dominant subspace.  The existence statements are
made concrete in two ways:

* ``proof`` witness: the explicit construction ``U_k (H' + H'')`` built from
  principal vectors of ``R(V_k^T X)`` and ``span(e_1..e_j)``;
* ``nearest`` witness: ``U_j + (principal directions of U_k - U_j closest to
  the target)``, which is optimal for the Frobenius distance.

The smaller achieved distance (per norm) is reported.  Should a certificate
still fail, a search over the Grassmannian of cluster subspaces is run
before a violation is declared.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import scipy.optimize

from .amplifier import build_amplifier, decay_factor, is_admissible, odd_monomial
from .errors import InvalidArgument, NoGapAtIndex, NotCompatible
from .krylov import DEFAULT_KRYLOV_TOL, extend, krylov_basis
from .matrix_core import (
    DEFAULT_RANK_TOL, OrthonormalBasis, as_basis, as_matrix, norm2, normF,
    orthonormal_range, pseudoinverse, thin_svd,
)
from .spectrum import DEFAULT_CLUSTER_TOL, partition_svd
from .subspace import (
    RIGHT_ANGLE_MARGIN, orthogonal_difference, principal_angles, sin_theta,
)

SOUNDNESS_SLACK = 1e-8
THEOREMS = ("T21", "T24", "T31", "C32", "T33", "T34", "T35", "T37")


@dataclass(frozen=True)
class DominantSubspace:
    side: str
    basis: OrthonormalBasis
    h: int

    def is_dominant(self, svd, rtol=1e-9):
        """``sigma_i(P_S A) = sigma_i(A)`` for ``i <= h`` (left side), or the
        analogous statement for ``A P_S`` (right side)."""
        A = svd.reconstruct()
        P = self.basis.projector()
        M = P @ A if self.side == "left" else A @ P
        s = np.linalg.svd(M, compute_uv=False)[: self.h]
        ref = svd.sigma[: self.h]
        return bool(np.all(np.abs(s - ref) <= rtol * max(1.0, svd.sigma[0])))


@dataclass(frozen=True)
class Compatibility:
    compatible: bool
    witness: DominantSubspace | None
    margin_angle: float
    max_angle: float


@dataclass(frozen=True)
class DeflationCoefficient:
    """``Delta = 4 raw / 2^((2 power + 1) min(sqrt(gamma), 1))`` at one index."""

    delta2: float
    deltaF: float
    raw2: float
    rawF: float
    gamma: float | None
    index: int
    power: int
    side: str
    omitted: bool
    rank: int


@dataclass
class BoundCertificate:
    """Evaluated right-hand side, achieved left-hand side and provenance."""

    theorem: str
    rhs2: float
    rhsF: float
    lhs2: float | None
    lhsF: float | None
    parameters: dict
    omitted: dict
    terms: dict = field(default_factory=dict)
    hypotheses: dict = field(default_factory=dict)
    witness: OrthonormalBasis | None = field(default=None, repr=False)
    witness_source: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def violations(self, slack=SOUNDNESS_SLACK):
        """Norms (``"2"``, ``"F"``) in which ``lhs > rhs + slack (1 + rhs)``."""
        bad = []
        for name, lhs, rhs in (("2", self.lhs2, self.rhs2), ("F", self.lhsF, self.rhsF)):
            if lhs is not None and lhs > rhs + slack * (1.0 + rhs):
                bad.append(name)
        return bad

    def sound(self, slack=SOUNDNESS_SLACK):
        return not self.violations(slack)

    def as_dict(self):
        return {
            "theorem": self.theorem,
            "parameters": self.parameters,
            "rhs2": self.rhs2,
            "rhsF": self.rhsF,
            "lhs2": self.lhs2,
            "lhsF": self.lhsF,
            "sound": self.sound(),
            "omitted": self.omitted,
            "terms": self.terms,
            "hypotheses": self.hypotheses,
            "witness_source": self.witness_source,
            "extras": self.extras,
        }


# ---------------------------------------------------------------------------
# coefficient kernels


def _pinv_tail_ratio(head, tail, W, rank_tol=DEFAULT_RANK_TOL):
    """``||tail^T W (head^T W)^+||_{2,F}`` and the numerical rank of ``head^T W``."""
    M = head.T @ W
    if M.size == 0:
        return 0.0, 0.0, 0
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > rank_tol * max(M.shape) * s[0])) if s[0] > 0 else 0
    R = (tail.T @ W) @ ((Vt[:rank].T / s[:rank]) @ U[:, :rank].T)
    return norm2(R), normF(R), rank


def _gap(svd, l, cluster_tol):
    hi, lo = svd.sigma_at(l), svd.sigma_at(l + 1)
    if hi - lo <= cluster_tol * svd.sigma[0]:
        raise NoGapAtIndex(l, hi, lo)
    return (hi - lo) / lo if lo > 0 else float("inf")


def deflation_coefficient(svd, W, power, index, side="right",
                          cluster_tol=DEFAULT_CLUSTER_TOL, require_full_rank=True):
    """``Delta(W, power, index)`` (right side, V factors) or ``Delta*`` (left, U).

    Parameters
    ----------
    svd : SVDFactorization
    W : array_like or OrthonormalBasis
        ``n x l`` (right) or ``m x l`` (left).
    power : int
    index : int
        Partition index ``l``; ``0`` and ``rank(A)`` give an omitted (zero) term.
    require_full_rank : bool
        Demand ``rank(V_l^T W) = l``; otherwise only ``rank >= 1`` is needed.

    Raises
    ------
    NoGapAtIndex
        ``sigma_l == sigma_{l+1}`` within ``cluster_tol``.
    NotCompatible
        The head projection ``V_l^T W`` is rank deficient.
    """
    W = W.Q if isinstance(W, OrthonormalBasis) else as_matrix(W, "W")
    if side not in ("left", "right"):
        raise InvalidArgument(f"side must be 'left' or 'right', got {side!r}")
    if not 0 <= index <= svd.rank:
        raise InvalidArgument(f"index {index} outside [0, rank={svd.rank}]")
    if index == 0 or index == svd.rank:
        return DeflationCoefficient(0.0, 0.0, 0.0, 0.0, None, index, power, side, True, 0)
    gamma = _gap(svd, index, cluster_tol)
    if side == "right":
        head, tail = svd.V_head(index), svd.V_tail(index)
    else:
        head, tail = svd.U_head(index), svd.U_tail(index)
    if W.shape[0] != head.shape[0]:
        raise InvalidArgument(f"W has {W.shape[0]} rows, expected {head.shape[0]}")
    raw2, rawF, rank = _pinv_tail_ratio(head, tail, W)
    if rank == 0 or (require_full_rank and rank < index):
        raise NotCompatible(f"rank of head projection is {rank}, need {index if require_full_rank else 1}")
    f = 4.0 * decay_factor(gamma, power)
    return DeflationCoefficient(f * raw2, f * rawF, raw2, rawF, gamma, index, power, side, False, rank)


def residual_coefficient(svd, Y, k_index):
    """``||U_{k,perp}^T Y (U_k^T Y)^+||_{2,F}``; non-increasing in q once q >= q0."""
    Y = Y.Q if isinstance(Y, OrthonormalBasis) else as_matrix(Y, "Y")
    val2, valF, rank = _pinv_tail_ratio(svd.U_head(k_index), svd.U_tail(k_index), Y)
    if rank == 0:
        raise NotCompatible("U_k^T Y = 0")
    return {"val2": val2, "valF": valF, "rank": rank}


# ---------------------------------------------------------------------------
# dominant subspaces and witnesses


def _factors(svd, side):
    return (svd.U, svd.V) if side == "left" else (svd.V, svd.U)


def best_dominant_subspace(svd, target, h, side="left", criterion="angle",
                           partition=None, cluster_tol=DEFAULT_CLUSTER_TOL):
    """Dominant subspace ``U_j + U`` with ``U`` inside ``U_k - U_j`` chosen
    against ``target``.

    ``criterion="angle"`` takes the ``h - j`` principal directions of the
    cluster closest to ``target`` (optimal for the Frobenius distance).
    ``criterion="rank"`` first removes the shadow ``P_target U_j`` from the
    target, which maximises the chance that ``target^T (U_j + U)`` has full
    rank; this is the form used by :func:`is_h_compatible`.
    """
    part = partition or partition_svd(svd, h, cluster_tol)
    j, k = part.j, part.k
    F, _ = _factors(svd, side)
    head = F[:, :j]
    if k == h:
        return DominantSubspace(side, OrthonormalBasis(F[:, :h]), h)
    C = F[:, j:k]
    T = as_basis(target, "target").Q
    if criterion == "angle":
        Ufull, _, _ = np.linalg.svd(C.T @ T, full_matrices=True)
        sel = C @ Ufull[:, : h - j]
    elif criterion == "rank":
        B = T.T @ head
        Pb = orthonormal_range(B).Q if j else np.zeros((T.shape[1], 0))
        M = T.T @ C
        M = M - Pb @ (Pb.T @ M)
        _, _, Vt = np.linalg.svd(M, full_matrices=True)
        sel = C @ Vt.T[:, : h - j]
    else:
        raise InvalidArgument(f"unknown criterion {criterion!r}")
    return DominantSubspace(side, OrthonormalBasis(np.hstack([head, sel])), h)


def is_h_compatible(svd, X, h, tol=RIGHT_ANGLE_MARGIN, cluster_tol=DEFAULT_CLUSTER_TOL,
                    partition=None):
    """Decide whether some h-dimensional right dominant subspace ``S`` has all
    principal angles with ``R(X)`` below ``pi/2`` (margin ``tol``)."""
    if not 1 <= h <= svd.rank:
        raise InvalidArgument(f"h={h} must satisfy 1 <= h <= rank={svd.rank}")
    part = partition or partition_svd(svd, h, cluster_tol)
    Xb = orthonormal_range(as_matrix(X, "X"))
    if Xb.dim == 0:
        return Compatibility(False, None, 0.0, np.pi / 2)
    wit = best_dominant_subspace(svd, Xb, h, "right", "rank", part)
    if Xb.dim < h:
        return Compatibility(False, wit, 0.0, np.pi / 2)
    ang = principal_angles(wit.basis, Xb).angles
    max_angle = ang.max_angle
    margin = np.pi / 2 - max_angle
    return Compatibility(bool(margin > tol), wit, float(margin), float(max_angle))


def proof_witness(out_head, coords, phi_vals, j, h, target=None, rank_tol=1e-10):
    """Explicit dominant subspace ``F_k (H' + H'')`` from the existence proof.

    Parameters
    ----------
    out_head : ndarray, (N, k)
        ``U_k`` for a left witness (``V_k`` for a right one).
    coords : ndarray, (k, r)
        Generator coordinates in the cluster basis, e.g. ``V_k^T X``.
    phi_vals : ndarray, (k,)
        ``phi(sigma_1), ..., phi(sigma_k)`` of an admissible odd polynomial.
    target : OrthonormalBasis, optional
        Only used when ``j = 0`` to pick the h-dimensional subspace of
        ``R(Phi_k)`` closest to the Krylov space.
    """
    k = out_head.shape[1]
    W = orthonormal_range(coords, rank_tol)
    if W.dim < h:
        return None
    T = orthonormal_range(phi_vals[:, None] * W.Q, rank_tol)
    if T.dim < h:
        return None
    if j == 0:
        cand = out_head @ T.Q
        if target is None:
            return OrthonormalBasis(cand[:, :h])
        Ufull, _, _ = np.linalg.svd(cand.T @ as_basis(target).Q, full_matrices=True)
        return OrthonormalBasis(cand @ Ufull[:, :h])
    eye = np.eye(k)
    Hp = eye[:, :j]
    Wp = principal_angles(W, Hp).u_basis.Q
    Tp = orthonormal_range(phi_vals[:, None] * Wp, rank_tol)
    Tpp = orthogonal_difference(T, Tp)
    if Tpp.dim < h - j:
        return None
    Z = principal_angles(Tpp, eye[:, j:]).v_basis.Q[:, : h - j]
    return OrthonormalBasis(out_head @ np.hstack([Hp, Z]))


def _sin_gram(S, K):
    R = S - K @ (K.T @ S)
    return R.T @ R


def _witness_objective(G, j, Yflat, d, p, norm):
    Y, _ = np.linalg.qr(Yflat.reshape(d, p))
    B = np.zeros((j + d, j + p))
    B[:j, :j] = np.eye(j)
    B[j:, j:] = Y
    ev = np.clip(np.linalg.eigvalsh(B.T @ G @ B), 0.0, None)
    return np.sqrt(ev[-1]) if norm == "2" else np.sqrt(ev.sum())


def _sphere_grid(d, step_deg):
    """Unit vectors of R^d up to sign on a hyperspherical grid (d <= 4)."""
    step = np.deg2rad(step_deg)
    if d == 1:
        return np.ones((1, 1))
    a = np.arange(0.0, np.pi, step)
    if d == 2:
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    b = np.arange(0.0, np.pi + step / 2, step)
    if d == 3:
        A, B = np.meshgrid(a, b, indexing="ij")
        return np.stack([np.cos(B), np.sin(B) * np.cos(A), np.sin(B) * np.sin(A)], -1).reshape(-1, 3)
    A, B, C = np.meshgrid(a, b, b, indexing="ij")
    return np.stack([
        np.cos(C), np.sin(C) * np.cos(B), np.sin(C) * np.sin(B) * np.cos(A),
        np.sin(C) * np.sin(B) * np.sin(A),
    ], -1).reshape(-1, 4)


def search_witness(svd, partition, K, side, norm, starts=(), step_deg=1.0, seed=0):
    """Minimise ``||sin Theta(K, F_j + F_C Y)||`` over cluster subspaces ``Y``.

    Projective cases (``h - j = 1`` or ``k - h = 1``) with ``k - j <= 4`` use an
    exhaustive grid at ``step_deg`` resolution; every case is then polished
    with Nelder-Mead from the supplied starts and a few seeded random ones.
    Returns ``(value, basis)``.
    """
    j, k, h = partition.j, partition.k, partition.h
    F, _ = _factors(svd, side)
    Fk = F[:, :k]
    Kq = as_basis(K).Q
    G = _sin_gram(Fk, Kq)
    d, p = k - j, h - j
    best_val, best_Y = np.inf, None
    if d <= 4 and p in (1, d - 1) and d >= 2:
        lines = _sphere_grid(d, step_deg)
        if p == 1:
            cands = lines[:, :, None]
        else:
            cands = []
            for v in lines:
                Qc, _ = np.linalg.qr(np.hstack([v[:, None], np.eye(d)]))
                cands.append(Qc[:, 1:d])
            cands = np.array(cands)
        Gj = G[:j, :j]
        Gx = G[:j, j:]
        Gc = G[j:, j:]
        n_c = cands.shape[0]
        Bt = np.zeros((n_c, j + p, j + p))
        Bt[:, :j, :j] = Gj
        Bt[:, :j, j:] = Gx @ cands
        Bt[:, j:, :j] = np.transpose(Bt[:, :j, j:], (0, 2, 1))
        Bt[:, j:, j:] = np.transpose(cands, (0, 2, 1)) @ Gc @ cands
        ev = np.clip(np.linalg.eigvalsh(Bt), 0.0, None)
        vals = np.sqrt(ev[:, -1]) if norm == "2" else np.sqrt(ev.sum(axis=1))
        i = int(np.argmin(vals))
        best_val, best_Y = float(vals[i]), cands[i]
    rng = np.random.default_rng(seed)
    start_list = [np.asarray(s).reshape(d, p) for s in starts]
    if best_Y is not None:
        start_list.append(best_Y)
    start_list += [rng.standard_normal((d, p)) for _ in range(4)]
    for Y0 in start_list:
        res = scipy.optimize.minimize(
            lambda y: _witness_objective(G, j, y, d, p, norm), Y0.ravel(),
            method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000},
        )
        if res.fun < best_val:
            best_val, best_Y = float(res.fun), np.linalg.qr(res.x.reshape(d, p))[0]
    basis = np.hstack([F[:, :j], F[:, j:k] @ best_Y])
    return best_val, OrthonormalBasis(basis)


# ---------------------------------------------------------------------------
# certificate engine


class GaplessProblem:
    """Cached context for certificates on one ``(A, X, h)`` triple.

    Parameters
    ----------
    A : array_like, (m, n)
    X : array_like, (n, r)
        Starting guess.
    h : int
        Target dimension, ``1 <= h <= rank(A)``.
    svd : SVDFactorization, optional
        Any SVD of ``A``; computed when omitted.
    """

    def __init__(self, A, X, h, svd=None, cluster_tol=DEFAULT_CLUSTER_TOL,
                 krylov_tol=DEFAULT_KRYLOV_TOL, compat_tol=RIGHT_ANGLE_MARGIN,
                 slack=SOUNDNESS_SLACK, search=True):
        self.A = as_matrix(A)
        self.X = as_matrix(X, "X")
        if self.A.shape[1] != self.X.shape[0]:
            raise InvalidArgument(f"A is {self.A.shape}, X is {self.X.shape}")
        self.svd = svd if svd is not None else thin_svd(self.A)
        self.h = int(h)
        self.cluster_tol = cluster_tol
        self.krylov_tol = krylov_tol
        self.compat_tol = compat_tol
        self.slack = slack
        self.search = search
        self.partition = partition_svd(self.svd, self.h, cluster_tol)
        self._Y = []
        self._W = []
        self._Kstar = {}
        self._coefs = {}
        self._rhs = {}

    # -- cached objects -----------------------------------------------------
    @cached_property
    def compatibility(self):
        return is_h_compatible(self.svd, self.X, self.h, self.compat_tol,
                               self.cluster_tol, self.partition)

    def require_compatible(self):
        c = self.compatibility
        if not c.compatible:
            raise NotCompatible(
                f"(A, X) is not {self.h}-compatible (largest angle {c.max_angle!r})"
            )
        return c

    def Y(self, q):
        """Basis of ``K_q(A, X)``."""
        if not self._Y:
            self._Y.append(krylov_basis(self.A, self.X, 0, self.krylov_tol))
        while len(self._Y) <= q:
            self._Y.append(extend(self._Y[-1], self.A, self.X))
        return self._Y[q]

    def Wq(self, q):
        """Basis of ``K_q(A^T, A X)``."""
        if not self._W:
            self._AX = self.A @ self.X
            self._W.append(krylov_basis(self.A.T, self._AX, 0, self.krylov_tol))
        while len(self._W) <= q:
            self._W.append(extend(self._W[-1], self.A.T, self._AX))
        return self._W[q]

    def Kstar(self, q, t):
        """Basis of ``K*_{q,t} = K_t(A^T, Y_q)``."""
        key = (q, t)
        if key not in self._Kstar:
            Yq = self.Y(q).raise_if_empty().Q
            if t == 0:
                kb = krylov_basis(self.A.T, Yq, 0, self.krylov_tol)
            else:
                kb = extend(self.Kstar(q, t - 1), self.A.T, Yq)
            self._Kstar[key] = kb
        return self._Kstar[key]

    @property
    def j(self):
        return self.partition.j

    @property
    def k(self):
        return self.partition.k

    def sigma(self, l):
        return self.svd.sigma_at(l)

    def amplifier(self, power):
        """Gap amplifier at ``k``; ``x^(2 power + 1)`` when ``k = rank`` (no gap)."""
        if self.partition.k_omitted:
            return odd_monomial(power)
        return build_amplifier(self.sigma(self.k), self.sigma(self.k + 1), power)

    def _params(self, **extra):
        p = {
            "h": self.h, "j": self.j, "k": self.k, "rank": self.svd.rank,
            "q0": self.partition.q0, "gamma_j": self.partition.gamma_j,
            "gamma_k": self.partition.gamma_k, "shape": list(self.A.shape),
            "r": self.X.shape[1], "cluster_tol": self.cluster_tol,
            "krylov_tol": self.krylov_tol, "compat_tol": self.compat_tol,
        }
        p.update(extra)
        return p

    def _hypotheses(self):
        c = self.require_compatible()
        return {"compatible": True, "margin_angle": c.margin_angle}

    # -- witnesses -----------------------------------------------------------
    def _achieved(self, cert, K, side, proof):
        near = best_dominant_subspace(self.svd, K, self.h, side, "angle", self.partition)
        cands = {"nearest": near.basis}
        if proof is not None:
            cands["proof"] = proof
        vals = {name: sin_theta(K, B) for name, B in cands.items()}
        best2 = min(vals, key=lambda n: vals[n][0])
        bestF = min(vals, key=lambda n: vals[n][1])
        cert.lhs2, cert.lhsF = vals[best2][0], vals[bestF][1]
        cert.witness_source = {"2": best2, "F": bestF}
        cert.witness = cands[bestF]
        cert.extras["witness_values"] = {n: list(v) for n, v in vals.items()}
        if self.search and not cert.sound(self.slack):
            self._search(cert, K, side, cands)
        return cert

    def _search(self, cert, K, side, cands):
        F, _ = _factors(self.svd, side)
        j, k = self.j, self.k
        starts = []
        for B in cands.values():
            coords = F[:, j:k].T @ B.Q
            U, _, _ = np.linalg.svd(coords, full_matrices=False)
            starts.append(U[:, : self.h - j])
        for norm in cert.violations(self.slack):
            val, basis = search_witness(self.svd, self.partition, K, side, norm, starts)
            if norm == "2" and val < cert.lhs2:
                cert.lhs2 = val
                cert.witness_source["2"] = "search"
            if norm == "F" and val < cert.lhsF:
                cert.lhsF = val
                cert.witness_source["F"] = "search"
                cert.witness = basis

    # -- theorems ------------------------------------------------------------
    def _first_term_angles(self, Xmat):
        """``||sin Theta(R(V_k^T X), V_k^T V_j)||`` and the 'moreover' check."""
        j, k = self.j, self.k
        W = orthonormal_range(self.svd.V_head(k).T @ Xmat)
        Hp = np.eye(k)[:, :j]
        s2, sF = sin_theta(W, Hp)
        ang_w = principal_angles(W, Hp).angles.angles
        ang_x = principal_angles(orthonormal_range(Xmat), self.svd.V_head(j)).angles.angles
        moreover = bool(np.all(ang_w <= ang_x + 1e-9))
        return s2, sF, moreover

    def thm31(self, q, phi=None):
        """Left dominant subspace near ``K_q(A, X)`` for an admissible odd ``phi``."""
        hyp = self._hypotheses()
        j, k, svd = self.j, self.k, self.svd
        phi = phi if phi is not None else self.amplifier(q)
        head_vals = np.atleast_1d(phi(svd.sigma_head(k)))
        if not is_admissible(phi, svd.sigma_head(k)):
            raise InvalidArgument("phi must satisfy phi(sigma_1) >= ... >= phi(sigma_k) > 0")
        terms = {}
        first2 = firstF = 0.0
        if j >= 1:
            s2, sF, moreover = self._first_term_angles(self.X)
            first2, firstF = 4 * s2, 4 * sF
            terms["sin_W_H"] = [s2, sF]
            hyp["moreover_inequality"] = moreover
        second2 = secondF = 0.0
        if not self.partition.k_omitted:
            tail = np.abs(np.atleast_1d(phi(svd.sigma_tail(k))))
            tail_norm = float(np.max(tail, initial=0.0))
            head_inv = 1.0 / float(np.min(head_vals))
            raw2, rawF, _ = _pinv_tail_ratio(svd.V_head(k), svd.V_tail(k), self.X)
            second2, secondF = tail_norm * head_inv * raw2, tail_norm * head_inv * rawF
            terms.update(phi_tail=tail_norm, phi_head_inv=head_inv, raw=[raw2, rawF])
        hyp["phi_admissible"] = True
        cert = BoundCertificate(
            "T31", first2 + second2, firstF + secondF, None, None,
            self._params(q=q, phi_degree=int(getattr(phi, "degree", 2 * q + 1))),
            {"first": j == 0, "second": self.partition.k_omitted},
            terms | {"first": [first2, firstF], "second": [second2, secondF]}, hyp,
        )
        K = self.Y(q).basis
        proof = proof_witness(svd.U_head(k), svd.V_head(k).T @ self.X, head_vals, j, self.h, K)
        return self._achieved(cert, K, "left", proof)

    def cor32(self, q):
        """The ``thm31`` bound with the Chebyshev amplifier folded into ``Delta(X, q, k)``."""
        hyp = self._hypotheses()
        j, k, svd = self.j, self.k, self.svd
        first2 = firstF = 0.0
        terms = {}
        if j >= 1:
            s2, sF = sin_theta(orthonormal_range(self.X), svd.V_head(j))
            first2, firstF = 4 * s2, 4 * sF
            terms["sin_X_Vj"] = [s2, sF]
        second2 = secondF = 0.0
        if not self.partition.k_omitted:
            d = self.coefficient("X", self.X, q, k, "right", False)
            ratio = self.sigma(k + 1) / self.sigma(k)
            second2, secondF = d.delta2 * ratio, d.deltaF * ratio
            terms["Delta_X_q_k"] = [d.delta2, d.deltaF]
        cert = BoundCertificate(
            "C32", first2 + second2, firstF + secondF, None, None, self._params(q=q),
            {"first": j == 0, "second": self.partition.k_omitted},
            terms | {"first": [first2, firstF], "second": [second2, secondF]}, hyp,
        )
        phi = self.amplifier(q)
        K = self.Y(q).basis
        proof = proof_witness(svd.U_head(k), svd.V_head(k).T @ self.X,
                              np.atleast_1d(phi(svd.sigma_head(k))), j, self.h, K)
        return self._achieved(cert, K, "left", proof)

    def _two_term(self, name, first_coef, second_coef, q, t):
        j, k = self.j, self.k
        first2 = firstF = 0.0
        if j >= 1:
            rj = self.sigma(j + 1) / self.sigma(j)
            first2, firstF = 4 * first_coef.delta2 * rj, 4 * first_coef.deltaF * rj
        second2 = secondF = 0.0
        if not self.partition.k_omitted:
            rk = self.sigma(k + 1) / self.sigma(k)
            second2, secondF = second_coef.delta2 * rk, second_coef.deltaF * rk
        terms = {
            "first": [first2, firstF], "second": [second2, secondF],
            "first_coefficient": [first_coef.delta2, first_coef.deltaF, first_coef.raw2, first_coef.rawF],
            "second_coefficient": [second_coef.delta2, second_coef.deltaF, second_coef.raw2, second_coef.rawF],
        }
        return BoundCertificate(
            name, first2 + second2, firstF + secondF, None, None, self._params(q=q, t=t),
            {"first": j == 0, "second": self.partition.k_omitted}, terms,
        )

    def coefficient(self, key, W, power, index, side, require_full_rank):
        """Cached ``deflation_coefficient``; the raw part does not depend on ``power``."""
        ck = (key, index, side, require_full_rank)
        base = self._coefs.get(ck)
        if base is None:
            base = deflation_coefficient(self.svd, W, 0, index, side, self.cluster_tol, require_full_rank)
            self._coefs[ck] = base
        if base.omitted:
            return replace(base, power=power)
        f = 4.0 * decay_factor(base.gamma, power)
        return replace(base, delta2=f * base.raw2, deltaF=f * base.rawF, power=power)

    def thm33_rhs(self, q, t):
        key = ("T33", q, t)
        if key not in self._rhs:
            d1 = self.coefficient("X", self.X, q, self.j, "right", True)
            d2 = self.coefficient(("Y", q), self.Y(q).Q, t, self.k, "left", False)
            self._rhs[key] = self._two_term("T33", d1, d2, q, t)
        return replace(self._rhs[key], terms=dict(self._rhs[key].terms), hypotheses={}, extras={})

    def thm33(self, q, t):
        """Right dominant subspace near ``K*_{q,t}``."""
        hyp = self._hypotheses()
        cert = self.thm33_rhs(q, t)
        cert.hypotheses = hyp
        svd, k = self.svd, self.k
        K = self.Kstar(q, t).basis
        phi = self.amplifier(t)
        proof = proof_witness(svd.V_head(k), svd.U_head(k).T @ self.Y(q).Q,
                              np.atleast_1d(phi(svd.sigma_head(k))), self.j, self.h, K)
        return self._achieved(cert, K, "right", proof)

    def thm34_rhs(self, q, t):
        key = ("T34", q, t)
        if key not in self._rhs:
            if not hasattr(self, "_AX"):
                self._AX = self.A @ self.X
            d1 = self.coefficient("AX", self._AX, q, self.j, "left", True)
            d2 = self.coefficient(("W", q), self.Wq(q).Q, t, self.k, "right", False)
            self._rhs[key] = self._two_term("T34", d1, d2, q, t)
        return replace(self._rhs[key], terms=dict(self._rhs[key].terms), hypotheses={}, extras={})

    def thm34(self, q, t):
        """Left dominant subspace near ``K_{q+t+1}(A, X)``."""
        hyp = self._hypotheses()
        cert = self.thm34_rhs(q, t)
        cert.hypotheses = hyp
        svd, k = self.svd, self.k
        K = self.Y(q + t + 1).basis
        phi = self.amplifier(t)
        proof = proof_witness(svd.U_head(k), svd.V_head(k).T @ self.Wq(q).Q,
                              np.atleast_1d(phi(svd.sigma_head(k))), self.j, self.h, K)
        return self._achieved(cert, K, "left", proof)

    def residual_series(self, q_from, q_to):
        """``residual_coefficient`` of ``Y_q`` for ``q_from <= q <= q_to``."""
        return [residual_coefficient(self.svd, self.Y(q).Q, self.k) for q in range(q_from, q_to + 1)]

    def thm35(self, span=5, slack=1e-10):
        """Monotonicity of the residual coefficient over ``q0 .. q0 + span``."""
        self.require_compatible()
        q0 = self.partition.q0
        series = self.residual_series(q0, q0 + span)
        ok = {}
        for norm, key in (("2", "val2"), ("F", "valF")):
            vals = [s[key] for s in series]
            ok[norm] = all(b <= a + slack * (1 + a) for a, b in zip(vals, vals[1:]))
        return {
            "q0": q0, "series2": [s["val2"] for s in series],
            "seriesF": [s["valF"] for s in series], "monotone": ok,
        }

    def gap_case(self, q):
        """Gap-at-``k`` bounds (k = k(h) with ``sigma_k > sigma_{k+1}``): the
        sin Theta estimate with an explicit amplifier and its Delta form.

        Requires ``rank(V_k^T X) = k``.
        """
        svd, k = self.svd, self.k
        if self.partition.k_omitted:
            raise NoGapAtIndex(k, self.sigma(k), self.sigma(k + 1))
        d = deflation_coefficient(svd, self.X, q, k, "right", self.cluster_tol, True)
        phi = self.amplifier(q)
        tail = float(np.max(np.abs(np.atleast_1d(phi(svd.sigma_tail(k)))), initial=0.0))
        head_inv = 1.0 / float(np.min(np.atleast_1d(phi(svd.sigma_head(k)))))
        ratio = self.sigma(k + 1) / self.sigma(k)
        K = self.Y(q).basis
        lhs2, lhsF = sin_theta(K, svd.U_head(k))
        params = self._params(q=q)
        omitted = {"first": True, "second": False}
        t21 = BoundCertificate(
            "T21", tail * head_inv * d.raw2, tail * head_inv * d.rawF, lhs2, lhsF, params, omitted,
            {"phi_tail": tail, "phi_head_inv": head_inv, "raw": [d.raw2, d.rawF]},
        )
        t24 = BoundCertificate(
            "T24", d.delta2 * ratio, d.deltaF * ratio, lhs2, lhsF, params, omitted,
            {"Delta_X_q_k": [d.delta2, d.deltaF]},
        )
        return t21, t24


# ---------------------------------------------------------------------------
# functional front-ends


def _problem(svd, X, h, A, **kw):
    A = svd.reconstruct() if A is None else A
    return GaplessProblem(A, X, h, svd=svd, **kw)


def thm31_bound(svd, X, h, q, phi=None, A=None, **kw):
    return _problem(svd, X, h, A, **kw).thm31(q, phi)


def cor32_bound(svd, X, h, q, A=None, **kw):
    return _problem(svd, X, h, A, **kw).cor32(q)


def thm33_bound(svd, X, h, q, t, A=None, **kw):
    return _problem(svd, X, h, A, **kw).thm33(q, t)


def thm34_bound(svd, X, h, q, t, A=None, **kw):
    return _problem(svd, X, h, A, **kw).thm34(q, t)


def certificate_grid(problem, q_values, t_values, theorems=("T31", "C32", "T33", "T34")):
    """Certificates for every requested theorem over a ``(q, t)`` grid, sorted by ``(q, t)``."""
    out = []
    for q, t in itertools.product(q_values, t_values):
        if "T31" in theorems:
            out.append(problem.thm31(q))
        if "C32" in theorems:
            out.append(problem.cor32(q))
        if "T33" in theorems:
            out.append(problem.thm33(q, t))
        if "T34" in theorems:
            out.append(problem.thm34(q, t))
    return out
