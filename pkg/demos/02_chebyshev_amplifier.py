"""The scaled Chebyshev amplifier behind the convergence rates.

phi(x) = sigma_k T_{2q+1}(x / sigma_{k+1}) / T_{2q+1}(sigma_k / sigma_{k+1})
fixes sigma_k, grows above it and is tiny on [0, sigma_{k+1}].  The tail
ceiling 4 sigma_{k+1} 2^{-(2q+1) min(sqrt(gamma), 1)} is what makes small
relative gaps slow and gaps of size one or more fast.
"""
import numpy as np

from krylovgap import build_amplifier

sigma_k1 = 1.0
print(f"{'gamma':>6} {'q':>3} {'max tail':>12} {'ceiling':>12} {'phi(sigma_k)':>13}")
for gamma in (0.05, 0.5, 1.0, 4.0):
    sigma_k = sigma_k1 * (1 + gamma)
    for q in (0, 2, 4, 8):
        phi = build_amplifier(sigma_k, sigma_k1, q)
        tail = np.max(np.abs(phi(np.linspace(0, sigma_k1, 401))))
        print(f"{gamma:6.2f} {q:3d} {tail:12.3e} {phi.tail_bound():12.3e} {phi(sigma_k):13.6f}")

# applying phi(A A^T) A X by the three-term recurrence matches the SVD route
rng = np.random.default_rng(0)
A = rng.standard_normal((8, 6))
X = rng.standard_normal((6, 2))
U, s, Vt = np.linalg.svd(A, full_matrices=False)
phi = build_amplifier(s[1], s[2], 3)
direct = U @ np.diag(phi(s)) @ Vt @ X
print("recurrence vs SVD route:", np.linalg.norm(phi.apply(A, X) - direct) / np.linalg.norm(direct))
