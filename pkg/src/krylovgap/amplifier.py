"""
Odd gap-amplifying polynomials and generalized matrix function filters.

An odd polynomial ``phi(x) = x psi(x^2)`` acts on a matrix through its SVD,
``U phi(Sigma) V^T X = psi(A A^T) A X``; the latter form needs only matrix
products, so the SVD is never formed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .matrix_core import as_matrix


def rate_exponent(gamma):
    """``min(sqrt(gamma), 1)``, the exponent base of the convergence rate."""
    return min(np.sqrt(gamma), 1.0)


def decay_factor(gamma, power):
    """``2 ** -((2 power + 1) min(sqrt(gamma), 1))``."""
    return 2.0 ** (-(2 * power + 1) * rate_exponent(gamma))


def tail_bound(sigma_k, sigma_k1, q):
    """Amplifier ceiling on the tail: ``4 sigma_{k+1} / 2^((2q+1) min(sqrt(gamma_k), 1))``."""
    gamma = (sigma_k - sigma_k1) / sigma_k1
    return 4.0 * sigma_k1 * decay_factor(gamma, q)


@dataclass(frozen=True)
class OddPolynomial:
    """``phi(x) = sum_i c_i x^(2i+1)``; only odd-power coefficients are stored."""

    coefficients: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coefficients)
        if not c:
            raise InvalidArgument("an odd polynomial needs at least one coefficient")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self):
        return 2 * len(self.coefficients) - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        x2 = x * x
        acc = np.full_like(x2, self.coefficients[-1])
        for c in reversed(self.coefficients[:-1]):
            acc = acc * x2 + c
        return x * acc

    def apply(self, A, X):
        Z = A @ X
        R = self.coefficients[-1] * Z
        for c in reversed(self.coefficients[:-1]):
            R = A @ (A.T @ R) + c * Z
        return R


def chebyshev_t(n, y):
    """First-kind Chebyshev ``T_n(y)`` with a cos/cosh branch split at ``|y| = 1``."""
    y = np.asarray(y, dtype=float)
    inside = np.abs(y) <= 1.0
    out = np.empty_like(y)
    out[inside] = np.cos(n * np.arccos(y[inside]))
    ay = np.abs(y[~inside])
    sign = np.where(y[~inside] < 0, (-1.0) ** n, 1.0)
    out[~inside] = sign * np.cosh(n * np.arccosh(ay))
    return out


@dataclass(frozen=True)
class ChebyshevAmplifier:
    """``phi(x) = sigma_k T_{2q+1}(x / sigma_{k+1}) / T_{2q+1}(sigma_k / sigma_{k+1})``.

    Fixes ``phi(sigma_k) = sigma_k``, grows super-linearly above ``sigma_k``
    and stays below ``sigma_k / T_{2q+1}(1 + gamma_k)`` on ``[-sigma_{k+1}, sigma_{k+1}]``.
    """

    sigma_k: float
    sigma_k1: float
    q: int

    @property
    def degree(self):
        return 2 * self.q + 1

    @property
    def gamma(self):
        return (self.sigma_k - self.sigma_k1) / self.sigma_k1

    @property
    def normaliser(self):
        return float(chebyshev_t(self.degree, np.array([self.sigma_k / self.sigma_k1]))[0])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = np.atleast_1d(x / self.sigma_k1)
        val = self.sigma_k * chebyshev_t(self.degree, y) / self.normaliser
        return val.reshape(x.shape) if x.ndim else float(val[0])

    def tail_bound(self):
        return tail_bound(self.sigma_k, self.sigma_k1, self.q)

    @property
    def coefficients(self):
        """Expanded odd coefficients (export only, degree <= 9)."""
        if self.q > 4:
            raise InvalidArgument("coefficient export is limited to q <= 4")
        cheb = np.zeros(self.degree + 1)
        cheb[-1] = 1.0
        power = np.polynomial.chebyshev.cheb2poly(cheb)
        scale = self.sigma_k / self.normaliser
        return tuple(float(scale * power[d] / self.sigma_k1 ** d) for d in range(1, self.degree + 1, 2))

    def apply(self, A, X):
        s = self.sigma_k1
        prev = cur = (A @ X) / s
        for _ in range(self.q):
            # T_{2i+3} = 2 T_2 T_{2i+1} - T_{2i-1},  T_2(y) <-> 2 A A^T / s^2 - I
            nxt = 2.0 * (2.0 * (A @ (A.T @ cur)) / (s * s) - cur) - prev
            prev, cur = cur, nxt
        return (self.sigma_k / self.normaliser) * cur


def build_amplifier(sigma_k, sigma_k1, q):
    """Scaled Chebyshev gap amplifier of degree ``2q + 1``.

    Raises
    ------
    InvalidArgument
        If ``sigma_k <= sigma_{k+1}`` (no gap to amplify), ``sigma_{k+1} <= 0``
        or ``q < 0``.
    """
    sigma_k, sigma_k1 = float(sigma_k), float(sigma_k1)
    if q < 0 or int(q) != q:
        raise InvalidArgument(f"q must be a non-negative integer, got {q!r}")
    if not sigma_k1 > 0:
        raise InvalidArgument("sigma_(k+1) must be positive")
    if not sigma_k > sigma_k1:
        raise InvalidArgument(f"no gap to amplify: sigma_k={sigma_k} <= sigma_(k+1)={sigma_k1}")
    return ChebyshevAmplifier(sigma_k, sigma_k1, int(q))


def odd_monomial(q):
    """``phi(x) = x^(2q+1)``, the plain power-iteration filter."""
    return OddPolynomial((0.0,) * q + (1.0,))


def apply_odd_polynomial(A, phi, X):
    """``Phi = psi(A A^T) A X`` for ``phi(x) = x psi(x^2)``, equal to ``U phi(Sigma) V^T X``."""
    A = as_matrix(A)
    X = as_matrix(X, "X")
    if A.shape[1] != X.shape[0]:
        raise InvalidArgument(f"A is {A.shape}, X is {X.shape}: inner dimensions differ")
    return phi.apply(A, X)


def is_admissible(phi, sigma_head, rtol=1e-12):
    """``phi(sigma_1) >= ... >= phi(sigma_k) > 0`` up to ``rtol`` relative slack."""
    vals = np.atleast_1d(phi(np.asarray(sigma_head, dtype=float)))
    if vals.size == 0:
        return True
    slack = rtol * np.max(np.abs(vals))
    return bool(vals[-1] > 0 and np.all(np.diff(vals) <= slack))
