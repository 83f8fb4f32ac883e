import pytest

from appendix_checks import CHECKS

TRIALS = 120


@pytest.mark.parametrize("name", list(CHECKS))
def test_appendix_property(name):
    fn, tol = CHECKS[name]
    vals = [fn(seed) for seed in range(TRIALS)]
    bad = [(s, v) for s, v in enumerate(vals) if v > tol]
    assert not bad, bad[:5]
