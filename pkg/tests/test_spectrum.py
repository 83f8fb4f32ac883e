import numpy as np
import pytest
from hypothesis import given, strategies as st

from krylovgap import InvalidArgument, cluster_spectrum, partition_at, partition_svd, thin_svd
import oracles


def test_cluster_in_the_middle():
    p = partition_at([3, 2, 2, 1], 2)
    assert (p.j, p.k, p.q0) == (1, 3, 1)
    assert p.gamma_j == pytest.approx(0.5) and p.gamma_k == pytest.approx(1.0)
    assert not p.j_omitted and not p.k_omitted


def test_gap_case():
    p = partition_at([3, 2, 1], 2)
    assert (p.j, p.k, p.q0) == (1, 2, 1) and p.gamma_k == pytest.approx(1.0) and p.gap_at_h


def test_fully_degenerate_cluster():
    p = partition_at([2, 2, 2], 2)
    assert (p.j, p.k) == (0, 3)
    assert p.j_omitted and p.k_omitted and p.gamma_j is None and p.gamma_k is None


def test_errors():
    with pytest.raises(InvalidArgument):
        partition_at([3, 2, 0], 3)
    with pytest.raises(InvalidArgument):
        partition_at([1, 2], 1)
    with pytest.raises(InvalidArgument):
        partition_at([3, 2], 0)


def test_rank_from_svd():
    p = partition_svd(thin_svd(np.diag([2.0, 2.0, 1.0, 0.0])), 3)
    assert (p.j, p.k, p.rank) == (2, 3, 3) and p.k_omitted
    assert p.as_dict()["clusters"] == [[1, 2], [3]]


spectra = st.lists(st.sampled_from([5.0, 4.0, 3.0, 2.0, 1.0, 0.5]), min_size=1, max_size=9).map(
    lambda v: sorted(v, reverse=True))


@given(spectra, st.data())
def test_matches_definitions(s, data):
    h = data.draw(st.integers(1, len(s)))
    p = partition_at(s, h)
    j, k, gj, gk, q0 = oracles.brute_partition(s, h)
    assert (p.j, p.k, p.q0) == (j, k, q0)
    assert (p.gamma_j is None) == (gj is None) and (p.gamma_k is None) == (gk is None)
    if gj is not None:
        assert p.gamma_j == pytest.approx(gj)
    if gk is not None:
        assert p.gamma_k == pytest.approx(gk)
    assert 0 <= p.j < h <= p.k <= p.rank and p.q0 < h


@given(spectra)
def test_indices_constant_inside_cluster(s):
    for c in cluster_spectrum(s):
        parts = {(partition_at(s, h).j, partition_at(s, h).k) for h in c}
        assert len(parts) == 1


@given(spectra)
def test_tolerance_scaling_stable(s):
    assert cluster_spectrum(s, 1e-10) == cluster_spectrum(s, 2e-10)


def test_near_cluster_straddle_uses_tolerance():
    s = [3.0, 2.0, 2.0 - 1e-11, 1.0]
    assert partition_at(s, 2).k == 3
    assert partition_at(s, 2, cluster_tol=1e-13).k == 2
