import numpy as np
import pytest
from hypothesis import given, strategies as st

from krylovgap import (
    GaplessProblem, InvalidArgument, NoGapAtIndex, NotCompatible, OddPolynomial,
    SVDFactorization, best_dominant_subspace, cor32_bound, deflation_coefficient,
    is_h_compatible, proof_witness, residual_coefficient, search_witness, sin_theta,
    thin_svd, thm31_bound, thm33_bound, thm34_bound,
)
from krylovgap.amplifier import decay_factor
from krylovgap.harness import generate_test_matrix
from krylovgap.spectrum import partition_svd
import oracles

D221 = np.diag([2.0, 2.0, 1.0])
e = np.eye(3)


def seeded_problem(spec="3,2,2,2,1,0.5", m=10, n=8, h=2, seed=11, r=2):
    A = generate_test_matrix(spec, m, n, seed)
    X = np.random.default_rng(seed + 1).standard_normal((n, r))
    return GaplessProblem(A, X, h)


# -- compatibility --------------------------------------------------------------

def test_compatibility_examples():
    svd = thin_svd(D221)
    c = is_h_compatible(svd, e[:, [0]], 1)
    assert c.compatible and max(sin_theta(c.witness.basis, e[:, [0]])) < 1e-12
    assert not is_h_compatible(svd, e[:, [2]], 1).compatible
    c = is_h_compatible(svd, e[:, :2], 2)
    assert c.compatible and c.margin_angle == pytest.approx(np.pi / 2)
    with pytest.raises(InvalidArgument):
        is_h_compatible(svd, e[:, :2], 4)


def test_compatibility_needs_shadow_removal():
    # the cluster direction closest to R(X) only repeats the shadow of e1
    A = np.diag([3.0, 2.0, 2.0, 1.0])
    X = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 0.3], [0.0, 0.95]])
    c = is_h_compatible(thin_svd(A), X, 2)
    assert c.compatible
    naive = best_dominant_subspace(thin_svd(A), np.linalg.qr(X)[0], 2, "right", "angle")
    M = np.linalg.qr(X)[0].T @ naive.basis.Q
    assert np.linalg.svd(M, compute_uv=False).min() < 1e-12


def test_random_guesses_are_compatible():
    count = 0
    for seed in range(200):
        A = generate_test_matrix("3,2*3,1", 8, 6, seed)
        X = np.random.default_rng(seed).standard_normal((6, 2))
        count += is_h_compatible(thin_svd(A), X, 2).compatible
    assert count == 200


# -- coefficients ---------------------------------------------------------------

def test_deflation_example():
    X = np.array([[1.0, 0.0], [0.0, 1 / np.sqrt(2)], [0.0, 1 / np.sqrt(2)]])
    d = deflation_coefficient(thin_svd(D221), X, 1, 2, "right")
    assert d.raw2 == pytest.approx(1.0) and d.gamma == pytest.approx(1.0)
    assert d.delta2 == pytest.approx(0.5)
    r2, rF = oracles.raw_coefficient(np.eye(3)[:, :2], np.eye(3)[:, 2:], X)
    assert d.raw2 == pytest.approx(r2) and d.rawF == pytest.approx(rF)


def test_deflation_aligned_and_omitted():
    svd = thin_svd(D221)
    d = deflation_coefficient(svd, e[:, :2], 3, 2, "left")
    assert d.raw2 == 0 and d.delta2 == 0
    d = deflation_coefficient(svd, e[:, :2], 3, 3, "right")
    assert d.omitted and (d.delta2, d.deltaF) == (0.0, 0.0)
    with pytest.raises(NoGapAtIndex):
        deflation_coefficient(svd, e[:, :2], 1, 1, "right")
    with pytest.raises(NotCompatible):
        deflation_coefficient(svd, e[:, [0, 2]], 1, 2, "right")
    assert deflation_coefficient(svd, e[:, [0, 2]], 1, 2, "right", require_full_rank=False).raw2 == pytest.approx(0.0)
    with pytest.raises(NotCompatible):
        deflation_coefficient(svd, e[:, [2]], 1, 2, "right", require_full_rank=False)


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 5.0), st.integers(0, 10))
def test_rate_identity(seed, gamma, q):
    ratio = decay_factor(gamma, q + 1) / decay_factor(gamma, q)
    assert ratio == pytest.approx(2 ** (-2 * min(np.sqrt(gamma), 1)), rel=1e-12)


def test_residual_coefficient():
    svd = thin_svd(D221)
    assert residual_coefficient(svd, e[:, :2], 2)["val2"] == 0
    v = residual_coefficient(svd, e, 2)
    assert np.isfinite(v["val2"]) and v["val2"] == pytest.approx(0.0)
    with pytest.raises(NotCompatible):
        residual_coefficient(svd, e[:, [2]], 2)


def test_residual_monotone_seeded():
    P = seeded_problem()
    mono = P.thm35(span=4)
    assert mono["q0"] == 1 and all(mono["monotone"].values())
    s2 = mono["series2"]
    assert all(b <= a + 1e-10 for a, b in zip(s2, s2[1:]))


def test_uniformised_right_coefficient():
    P = seeded_problem("4,2*3,1,0.5", 12, 9, 2, 5, r=2)
    q0 = P.partition.q0
    base = P.coefficient(("W", q0), P.Wq(q0).Q, 0, P.k, "right", False).raw2
    for q in range(q0, q0 + 4):
        for t in range(4):
            d = P.coefficient(("W", q), P.Wq(q).Q, t, P.k, "right", False)
            assert d.delta2 <= 4 * base * decay_factor(P.partition.gamma_k, t) + 1e-10


# -- dominant subspaces and witnesses -----------------------------------------------

def test_best_dominant_examples():
    svd = thin_svd(D221)
    line = np.array([[1.0], [1.0], [0.0]]) / np.sqrt(2)
    d = best_dominant_subspace(svd, line, 1)
    assert max(sin_theta(d.basis, line)) < 1e-12 and d.is_dominant(svd)
    svd = thin_svd(np.diag([3.0, 2.0, 1.0]))
    d = best_dominant_subspace(svd, e[:, [2]], 2)
    assert max(sin_theta(d.basis, e[:, :2])) < 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_best_dominant_beats_random_candidates(seed):
    rng = np.random.default_rng(seed)
    A = generate_test_matrix("3,2*4,1", 9, 7, seed)
    svd = thin_svd(A)
    target = np.linalg.qr(rng.standard_normal((9, 3)))[0]
    d = best_dominant_subspace(svd, target, 3)
    assert d.is_dominant(svd)
    best = sin_theta(d.basis, target)[1]
    for _ in range(100):
        cand = oracles.random_dominant(svd.U[:, :5], 1, 3, rng)
        assert best <= sin_theta(cand, target)[1] + 1e-12


def test_proof_witness_is_dominant():
    P = seeded_problem()
    svd = P.svd
    phi = P.amplifier(2)
    W = proof_witness(svd.U_head(P.k), svd.V_head(P.k).T @ P.X, phi(svd.sigma_head(P.k)), P.j, P.h)
    from krylovgap.bounds import DominantSubspace
    assert W.dim == P.h and DominantSubspace("left", W, P.h).is_dominant(svd)


def test_search_never_worse_than_greedy():
    P = seeded_problem("3,2*3,1", 8, 6, 2, 3, r=2)
    K = P.Y(0).basis
    greedy = best_dominant_subspace(P.svd, K, 2, "left")
    g2, gF = sin_theta(K, greedy.basis)
    v2, B = search_witness(P.svd, P.partition, K, "left", "2")
    vF, _ = search_witness(P.svd, P.partition, K, "left", "F")
    assert v2 <= g2 + 1e-9 and vF <= gF + 1e-9
    assert sin_theta(K, B)[0] == pytest.approx(v2, abs=1e-9)


# -- certificates ---------------------------------------------------------------------

FROZEN_T31 = {1: (2.5338936691833394, 2.5387103278426157),
              2: (2.504592456518247, 2.504938404377753),
              3: (2.502487889903355, 2.502512727889301)}
FROZEN_T33 = {(1, 1): (3.4661815290232543, 3.4661815290232543), (2, 0): (1.286535872994765, 1.286535872994765)}
FROZEN_T34 = {(1, 1): (1.6980589035522171, 1.6980589035522173), (2, 0): (0.6328734630880428, 0.632873463088043)}


def test_frozen_seeded_values():
    P = seeded_problem()
    for q, (r2, rF) in FROZEN_T31.items():
        c = P.thm31(q)
        assert (c.rhs2, c.rhsF) == pytest.approx((r2, rF), rel=1e-9) and c.sound()
        assert c.hypotheses["moreover_inequality"]
    for (q, t), (r2, rF) in FROZEN_T33.items():
        c = P.thm33(q, t)
        assert (c.rhs2, c.rhsF) == pytest.approx((r2, rF), rel=1e-9) and c.sound()
    for (q, t), (r2, rF) in FROZEN_T34.items():
        c = P.thm34(q, t)
        assert (c.rhs2, c.rhsF) == pytest.approx((r2, rF), rel=1e-9) and c.sound()


def test_aligned_start():
    A = generate_test_matrix("3,2,2,2,1", 8, 6, 4)
    svd = thin_svd(A)
    X = np.array(svd.V[:, :2])
    c = thm31_bound(svd, X, 2, 1, A=A)
    assert c.terms["first"] == [0.0, 0.0] or max(c.terms["first"]) < 1e-12
    c = cor32_bound(svd, X, 2, 1, A=A)
    assert max(c.terms["first"]) < 1e-12 and c.sound()
    for t in range(3):
        c = thm33_bound(svd, X, 2, 0, t, A=A)
        assert max(c.terms["first"]) < 1e-12 and c.sound()


def test_j_zero_omits_first_term():
    A = generate_test_matrix("2,2,2,1", 7, 5, 2)
    X = np.random.default_rng(0).standard_normal((5, 2))
    P = GaplessProblem(A, X, 2)
    for c in (P.thm31(1), P.cor32(1), P.thm33(1, 1), P.thm34(1, 1)):
        assert c.omitted["first"] and c.terms["first"] == [0.0, 0.0] and c.sound()


def test_k_rank_omits_second_term():
    A = generate_test_matrix("3,2,2", 6, 5, 1)
    X = np.random.default_rng(0).standard_normal((5, 2))
    P = GaplessProblem(A, X, 2)
    for c in (P.thm31(1), P.cor32(1), P.thm33(1, 1), P.thm34(1, 1)):
        assert c.omitted["second"] and c.terms["second"] == [0.0, 0.0] and c.sound()
        assert np.isfinite(c.rhs2) and np.isfinite(c.lhs2)


def test_incompatible_and_bad_phi():
    svd = thin_svd(D221)
    with pytest.raises(NotCompatible):
        thm31_bound(svd, e[:, [2]], 1, 1)
    with pytest.raises(NotCompatible):
        thm34_bound(svd, e[:, [2]], 1, 1, 1)
    with pytest.raises(InvalidArgument):
        thm31_bound(svd, e[:, [0]], 1, 1, phi=OddPolynomial((1.0, -1.0)))


def test_user_supplied_phi():
    P = seeded_problem()
    c = P.thm31(2, phi=OddPolynomial((0.0, 0.0, 1.0)))
    assert c.sound() and c.parameters["phi_degree"] == 5


@pytest.mark.parametrize("seed", range(6))
def test_seeded_grid_sound(seed):
    spec = ["3,2,2,2,1,0.5", "5,4,2*4,1*2"][seed % 2]
    h = [2, 4][seed % 2]
    P = seeded_problem(spec, 14, 12, h, 100 + seed, r=h)
    for q in range(4):
        assert P.thm31(q).sound() and P.cor32(q).sound()
        for t in range(3):
            assert P.thm33(q, t).sound() and P.thm34(q, t).sound()


def test_svd_independence_inside_cluster():
    A = generate_test_matrix("3,2*3,1,0.5", 9, 7, 21)
    X = np.random.default_rng(3).standard_normal((7, 2))
    s1 = thin_svd(A)
    R = np.linalg.qr(np.random.default_rng(4).standard_normal((3, 3)))[0]
    U, V = np.array(s1.U), np.array(s1.V)
    U[:, 1:4] = U[:, 1:4] @ R
    V[:, 1:4] = V[:, 1:4] @ R
    s2 = SVDFactorization(U, s1.sigma, V, s1.rank, s1.rank_tol)
    assert np.linalg.norm(s2.reconstruct() - A) < 1e-12
    P1, P2 = GaplessProblem(A, X, 2, svd=s1), GaplessProblem(A, X, 2, svd=s2)
    for q, t in [(0, 0), (1, 2), (3, 1)]:
        for f in ("thm33_rhs", "thm34_rhs"):
            a, b = getattr(P1, f)(q, t), getattr(P2, f)(q, t)
            assert a.rhs2 == pytest.approx(b.rhs2, rel=1e-9, abs=1e-12)
            assert a.rhsF == pytest.approx(b.rhsF, rel=1e-9, abs=1e-12)


def test_certificate_serialises():
    import json
    from krylovgap.io import dumps
    d = json.loads(dumps(seeded_problem().thm34(1, 1).as_dict()))
    assert d["theorem"] == "T34" and d["sound"] and d["parameters"]["q"] == 1


def test_gap_case_subspace_bounds():
    A = generate_test_matrix("4,3,2,1,0.5", 9, 7, 2)
    X = np.random.default_rng(1).standard_normal((7, 3))
    P = GaplessProblem(A, X, 3)
    assert P.partition.gap_at_h
    for q in range(4):
        t21, t24 = P.gap_case(q)
        assert t21.sound() and t24.sound() and t21.rhs2 <= t24.rhs2 * (1 + 1e-9)
