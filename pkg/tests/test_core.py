import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixbound.core import (Alphabet, CapExceededError, HammingConfig, SpecError,
                           StochasticityError, as_probvec, check_kernel, hamming_distance,
                           is_balanced, lipschitz_constant, tv_norm)

from conftest import prob_vectors


def test_tv_examples():
    assert tv_norm(np.array([0.5, 0.5]) - np.array([0.5, 0.5])) == 0.0
    assert tv_norm(np.array([1.0, 0.0]) - np.array([0.0, 1.0])) == 1.0
    assert tv_norm(np.array([0.9, 0.1]) - np.array([0.2, 0.8])) == pytest.approx(0.7, abs=1e-15)


@given(prob_vectors(4), prob_vectors(4), prob_vectors(4))
def test_tv_is_a_metric_on_distributions(p, q, r):
    d = tv_norm(p - q)
    assert d == pytest.approx(tv_norm(q - p), abs=1e-15)
    assert -1e-15 <= d <= 1 + 1e-12
    assert tv_norm(p - r) <= d + tv_norm(q - r) + 1e-12
    assert tv_norm(p - p) == 0.0


def test_hamming_examples():
    assert hamming_distance("xyz", "xyz") == 0
    assert hamming_distance("aa", "ab") == 1
    assert hamming_distance("abc", "cba") == 2
    with pytest.raises(SpecError):
        hamming_distance("ab", "abc")


words = st.lists(st.integers(0, 2), min_size=5, max_size=5)


@given(words, words, words)
def test_hamming_is_a_metric(x, y, z):
    d = hamming_distance
    assert (d(x, y) == 0) == (x == y)
    assert d(x, y) == d(y, x)
    assert d(x, z) <= d(x, y) + d(y, z)


def test_alphabet_roundtrip():
    A = Alphabet(["a", "b", "c"])
    assert A.size == 3 and len(A) == 3
    assert A.encode("cab") == (2, 0, 1)
    assert A.decode([2, 0, 1]) == ("c", "a", "b")
    with pytest.raises(SpecError):
        Alphabet(["a", "a"])
    with pytest.raises(SpecError):
        Alphabet([])
    with pytest.raises(SpecError):
        A.index("z")


def test_hamming_config():
    assert HammingConfig(4).lipschitz_budget == 0.25
    assert HammingConfig(4, "root").lipschitz_budget == 0.5
    with pytest.raises(SpecError):
        HammingConfig(0)
    with pytest.raises(SpecError):
        HammingConfig(3, "other")


def test_probvec_renormalizes_only_within_tolerance():
    p = as_probvec([0.5, 0.5 + 5e-10])
    assert p.sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(StochasticityError):
        as_probvec([0.5, 0.49])
    with pytest.raises(StochasticityError):
        as_probvec([1.5, -0.5])


def test_kernel_diagnostic_names_column():
    K = np.array([[0.9, 0.18], [0.1, 0.8]])
    with pytest.raises(StochasticityError) as exc:
        check_kernel(K, name="kernels[1]", labels=["a", "b"])
    assert exc.value.where == "kernels[1]"
    assert exc.value.column == "b"
    assert "column 'b'" in str(exc.value) and "0.98" in str(exc.value)


def test_balanced():
    assert is_balanced([0.3, -0.3])
    assert not is_balanced([0.3, -0.2])


def _brute_lipschitz(f, n, k):
    # every ordered pair, outer loop over the second argument
    idx = [np.unravel_index(r, (k,) * n) for r in range(k ** n)]
    best = 0.0
    for b in range(len(idx)):
        for a in range(len(idx)):
            d = sum(u != v for u, v in zip(idx[a], idx[b]))
            if d:
                best = max(best, abs(f[idx[a]] - f[idx[b]]) / d)
    return best


def test_lipschitz_examples(rng):
    n, k = 4, 3
    assert lipschitz_constant(np.full((k,) * n, 3.0), HammingConfig(n)) == 0.0
    ref = (0, 1, 2, 0)
    f = np.zeros((k,) * n)
    for x in np.ndindex(*f.shape):
        f[x] = hamming_distance(x, ref) / n
    assert lipschitz_constant(f, HammingConfig(n)) == pytest.approx(1 / n)
    for _ in range(20):
        g = rng.normal(size=(2, 2))
        assert lipschitz_constant(g, HammingConfig(2)) == pytest.approx(_brute_lipschitz(g, 2, 2))
    g = rng.normal(size=(3,) * 3)
    assert lipschitz_constant(g.ravel(), HammingConfig(3)) == pytest.approx(
        _brute_lipschitz(g, 3, 3))


def test_lipschitz_cap():
    with pytest.raises(CapExceededError):
        lipschitz_constant(np.zeros((2,) * 10), HammingConfig(10), cap=1000)
