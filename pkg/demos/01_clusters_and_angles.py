"""Where the gap is missing: clusters, enclosing gaps and subspace distances.

A spectrum like 3, 2, 2, 2, 1 has no gap at h = 2, so "the" dominant
2-dimensional subspace is not unique.  The partition reports the nearest gaps
below and above the cluster that contains h, and the starting guess is
checked for compatibility: some dominant subspace must sit at an angle below
pi/2 from its range.
"""
import numpy as np

from krylovgap import is_h_compatible, partition_svd, sin_theta, thin_svd
from krylovgap.harness import generate_guess, generate_test_matrix

A = generate_test_matrix("3,2*3,1", 12, 9, seed=0)
svd = thin_svd(A)
print("singular values:", np.round(svd.sigma, 12))

part = partition_svd(svd, h=2)
print(f"h=2 sits in the cluster ending at k={part.k}; the gap below starts after j={part.j}")
print(f"relative gaps: gamma_j={part.gamma_j:.3f}, gamma_k={part.gamma_k:.3f}; q0={part.q0}")

# two different bases of dominant 2-dimensional subspaces are far apart,
# yet both are optimal
V = svd.V
first = V[:, [0, 1]]
second = V[:, [0, 2]]
print("sin Theta between two dominant choices (2, F):", sin_theta(first, second))

for mode in ("random", "adversarial-orthogonal"):
    X = generate_guess(svd, 2, mode, seed=1)
    c = is_h_compatible(svd, X, 2)
    print(f"{mode:>24}: compatible={c.compatible}, largest angle={c.max_angle:.4f}")
