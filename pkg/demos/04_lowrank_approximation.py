"""Certified low-rank approximation from a block Krylov space.

Once the condition value drops below sin(theta0) the rank-i errors are
within delta_i of the truncated SVD errors, for every i <= h.
"""
import numpy as np

from krylovgap import GaplessProblem, lowrank_certificate, thin_svd
from krylovgap.harness import generate_guess, generate_test_matrix

A = generate_test_matrix("4,2*3,1,0.5*4", 40, 32, seed=5)
svd = thin_svd(A)
X = generate_guess(svd, 2, "random", seed=6)
P = GaplessProblem(A, X, 2, svd=svd)

for q, t in ((0, 0), (1, 1), (3, 3), (6, 6)):
    cert, res = lowrank_certificate(None, X, 2, q, t, theta0=np.pi / 4, problem=P)
    cond = cert.hypotheses["condition_lhs"]
    status = "applies" if cert.hypotheses["applicable"] else "not yet"
    print(f"q={q} t={t} condition={cond:.3e} ({status})")
    for i in range(2):
        print(f"   i={i + 1}: errF={res.errorsF[i]:.6f} optF={res.opt_errorsF[i]:.6f} "
              f"delta={res.deltas[i]:.3e}")
