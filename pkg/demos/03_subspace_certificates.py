"""Distance certificates for block Krylov spaces without a gap at h.

For a random start, each certificate compares the measured distance from a
Krylov space to some dominant subspace (lhs) against the two-term bound (rhs).
The augmented spaces K*_{q,t} and K_{q+t+1}(A, X) trade extra
multiplications (t) for the second gap.
"""
from krylovgap import GaplessProblem, thin_svd
from krylovgap.harness import generate_guess, generate_test_matrix

A = generate_test_matrix("5,4,2*4,1*2,0.5*12,0.2*6", 40, 32, seed=3)
svd = thin_svd(A)
X = generate_guess(svd, 4, "random", seed=4)
P = GaplessProblem(A, X, 4, svd=svd)
print("partition:", P.partition.as_dict())

print(f"{'cert':>4} {'q':>2} {'t':>2} {'lhs2':>10} {'rhs2':>10} {'lhsF':>10} {'rhsF':>10}")
for q in range(0, 7, 2):
    for cert in (P.thm31(q), P.cor32(q)):
        print(f"{cert.theorem:>4} {q:2d} {'':>2} {cert.lhs2:10.3e} {cert.rhs2:10.3e} "
              f"{cert.lhsF:10.3e} {cert.rhsF:10.3e}")
    for t in (0, 2):
        for cert in (P.thm33(q, t), P.thm34(q, t)):
            print(f"{cert.theorem:>4} {q:2d} {t:2d} {cert.lhs2:10.3e} {cert.rhs2:10.3e} "
                  f"{cert.lhsF:10.3e} {cert.rhsF:10.3e}")

mono = P.thm35(span=5)
print("residual coefficient from q0:", [f"{v:.3e}" for v in mono["series2"]], mono["monotone"])
