"""Clustering of a singular spectrum around a (possibly gapless) index h."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .matrix_core import DEFAULT_RANK_TOL

DEFAULT_CLUSTER_TOL = 1e-10


@dataclass(frozen=True)
class SpectrumPartition:
    """Enclosing indices ``j < h <= k`` and the relative gaps around them.

    ``j = 0`` stands for the sentinel ``sigma_0 = +inf``; in that case
    ``gamma_j`` is ``None``.  Likewise ``gamma_k`` is ``None`` when
    ``k == rank``.  Indices are 1-based as in the usual notation.
    """

    h: int
    j: int
    k: int
    rank: int
    gamma_j: float | None
    gamma_k: float | None
    q0: int
    clusters: tuple
    sigma: tuple = field(repr=False)
    cluster_tol: float = DEFAULT_CLUSTER_TOL

    @property
    def j_omitted(self):
        return self.j == 0

    @property
    def k_omitted(self):
        return self.k == self.rank

    @property
    def gap_at_h(self):
        return self.k == self.h

    def sigma_at(self, l):
        if l < 1:
            raise InvalidArgument("sigma_0 is the +inf sentinel")
        return self.sigma[l - 1] if l <= len(self.sigma) else 0.0

    def as_dict(self):
        return {
            "h": self.h,
            "j": self.j,
            "k": self.k,
            "rank": self.rank,
            "gamma_j": self.gamma_j,
            "gamma_k": self.gamma_k,
            "q0": self.q0,
            "clusters": [list(c) for c in self.clusters],
            "j_omitted": self.j_omitted,
            "k_omitted": self.k_omitted,
            "cluster_tol": self.cluster_tol,
        }


def cluster_spectrum(sigma, cluster_tol=DEFAULT_CLUSTER_TOL, rank=None):
    """Group 1-based indices ``1..rank`` into runs of equal singular values.

    Neighbours closer than ``cluster_tol * sigma_1`` share a cluster.
    """
    s = np.asarray(sigma, dtype=float)
    rank = len(s) if rank is None else rank
    if rank == 0:
        return ()
    eps = cluster_tol * s[0]
    clusters, current = [], [1]
    for i in range(2, rank + 1):
        if s[i - 2] - s[i - 1] <= eps:
            current.append(i)
        else:
            clusters.append(tuple(current))
            current = [i]
    clusters.append(tuple(current))
    return tuple(clusters)


def numerical_rank(sigma, rank_tol=DEFAULT_RANK_TOL, max_dim=None):
    s = np.asarray(sigma, dtype=float)
    if s.size == 0 or s[0] <= 0:
        return 0
    scale = max_dim if max_dim is not None else len(s)
    return int(np.sum(s > rank_tol * s[0] * scale))


def partition_at(sigma, h, cluster_tol=DEFAULT_CLUSTER_TOL, rank=None,
                 rank_tol=DEFAULT_RANK_TOL):
    """Compute ``j(h)``, ``k(h)``, the gaps ``gamma_j``, ``gamma_k`` and ``q0``.

    Parameters
    ----------
    sigma : sequence of float
        Non-increasing singular values.
    h : int
        Target index, ``1 <= h <= rank``.
    cluster_tol : float
        Relative tolerance (against ``sigma_1``) for declaring equality.
    rank : int, optional
        Numerical rank; by default counted with ``rank_tol``.
    """
    s = np.asarray(sigma, dtype=float)
    if s.ndim != 1 or not np.all(np.isfinite(s)):
        raise InvalidArgument("sigma must be a finite 1-D sequence")
    if np.any(np.diff(s) > 0) or np.any(s < 0):
        raise InvalidArgument("sigma must be non-negative and non-increasing")
    if rank is None:
        rank = numerical_rank(s, rank_tol)
    if not 1 <= h <= rank:
        raise InvalidArgument(f"h={h} must satisfy 1 <= h <= rank(A)={rank}")
    clusters = cluster_spectrum(s, cluster_tol, rank)
    ci = next(i for i, c in enumerate(clusters) if h in c)
    j = clusters[ci][0] - 1
    k = clusters[ci][-1]
    gamma_j = None if j == 0 else float((s[j - 1] - s[j]) / s[j])
    gamma_k = None if k == rank else float((s[k - 1] - s[k]) / s[k])
    q0 = ci
    assert q0 < h
    return SpectrumPartition(
        h=h, j=j, k=k, rank=rank, gamma_j=gamma_j, gamma_k=gamma_k, q0=q0,
        clusters=clusters, sigma=tuple(float(x) for x in s), cluster_tol=cluster_tol,
    )


def partition_svd(svd, h, cluster_tol=DEFAULT_CLUSTER_TOL):
    """:func:`partition_at` on the spectrum and rank of an SVD."""
    return partition_at(svd.sigma, h, cluster_tol=cluster_tol, rank=svd.rank)
