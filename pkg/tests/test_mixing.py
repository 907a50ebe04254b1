import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixbound.core import SpecError
from mixbound.generators import binary_symmetric_chain
from mixbound.mixing import (EtaMatrix, build_matrices, delta_inf_norm, envelope_kontram,
                             envelope_marton, envelope_mcdiarmid, envelope_samson,
                             envelope_table, gamma_2_norm, marton_threshold)
from mixbound.report import bound_matrix

unit = st.floats(0.0, 1.0)


def closed_form_gamma2(b):
    """Largest singular value of [[1, b], [0, 1]]."""
    # G^T G = [[1, b], [b, 1 + b^2]]
    tr, det = 2 + b * b, 1.0
    return math.sqrt((tr + math.sqrt(tr * tr - 4 * det)) / 2)


def test_build_matrices_examples():
    z = build_matrices(EtaMatrix(np.zeros((4, 4))))
    assert np.array_equal(z.delta, np.eye(4)) and np.array_equal(z.gamma, np.eye(4))
    m = build_matrices(bound_matrix(binary_symmetric_chain(3, 0.5)))
    assert m.delta[0, 1:] == pytest.approx([0.5, 0.25]) and m.delta[1, 2] == pytest.approx(0.5)
    assert np.array_equal(np.diag(m.delta), np.ones(3))
    g = build_matrices(EtaMatrix(np.array([[0, 0.49], [0, 0]])))
    assert g.gamma[0, 1] == pytest.approx(0.7, abs=1e-15)


def test_eta_matrix_validation():
    with pytest.raises(SpecError):
        EtaMatrix(np.array([[0, 1.5], [0, 0]]))
    with pytest.raises(SpecError):
        EtaMatrix(np.array([[0, -0.1], [0, 0]]))
    with pytest.raises(SpecError):
        EtaMatrix(np.zeros((2, 3)))
    e = EtaMatrix.from_function(3, lambda i, j: 0.1 * (j - i), exact=True)
    assert e.values[0, 2] == pytest.approx(0.2) and e.exact[0, 2] and not e.exact[1, 0]


def test_delta_examples():
    assert delta_inf_norm(build_matrices(EtaMatrix(np.zeros((5, 5))))) == 1.0
    m = build_matrices(bound_matrix(binary_symmetric_chain(3, 0.5)))
    assert delta_inf_norm(m) == 1.75


@given(st.integers(2, 6), st.floats(0.0, 0.99))
def test_delta_geometric_bound(n, theta):
    m = build_matrices(bound_matrix(binary_symmetric_chain(n, theta)))
    d = delta_inf_norm(m)
    assert d == pytest.approx(sum(theta ** k for k in range(n)), abs=1e-12)
    assert d <= 1 / (1 - theta) + 1e-12


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(
    st.lists(unit, min_size=n * n, max_size=n * n), st.integers(0, n * n - 1), unit)))
def test_delta_monotone_in_entries(args):
    flat, pos, bump = args
    n = int(math.isqrt(len(flat)))
    v = np.array(flat).reshape(n, n)
    w = v.copy()
    w.flat[pos] = max(w.flat[pos], bump)
    a = delta_inf_norm(build_matrices(EtaMatrix(v)))
    assert delta_inf_norm(build_matrices(EtaMatrix(w))) >= a


def test_gamma2_examples():
    g = gamma_2_norm(np.eye(3))
    assert g.value == pytest.approx(1.0) and g.gershgorin_upper == pytest.approx(1.0)
    g = gamma_2_norm(np.array([[1.0, 0.7], [0.0, 1.0]]))
    assert g.value == pytest.approx(1.4094810050208545, abs=1e-9)
    assert g.gershgorin_upper == pytest.approx(math.sqrt(2.19), abs=1e-15)
    assert g.converged


def test_gamma2_closed_form_random(rng):
    for b in rng.uniform(0, 1, 1000):
        g = gamma_2_norm(np.array([[1.0, b], [0.0, 1.0]]))
        assert abs(g.value - closed_form_gamma2(b)) <= 1e-8
        assert g.value <= g.gershgorin_upper + 1e-10


@given(st.integers(2, 6).flatmap(lambda n: st.lists(unit, min_size=n * n, max_size=n * n)))
def test_gamma2_between_one_and_gershgorin(flat):
    n = int(math.isqrt(len(flat)))
    m = build_matrices(EtaMatrix(np.array(flat).reshape(n, n)))
    g = gamma_2_norm(m)
    assert 1.0 - 1e-12 <= g.value <= g.gershgorin_upper + 1e-10
    assert g.value == pytest.approx(np.linalg.norm(m.gamma, 2), abs=1e-4)


def test_gamma2_flags_nonconvergence():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        g = gamma_2_norm(np.array([[1.0, 0.9, 0.4], [0, 1, 0.8], [0, 0, 1]]), max_iter=1)
    assert not g.converged and any("converge" in str(x.message) for x in w)
    with pytest.raises(SpecError):
        gamma_2_norm(np.eye(2), tol=0)


def test_envelope_values():
    assert envelope_mcdiarmid(0, 7) == 2.0
    assert envelope_mcdiarmid(1, 1) == pytest.approx(2 * math.exp(-2), abs=1e-15)
    assert envelope_mcdiarmid(1, 1) == pytest.approx(0.27067, abs=1e-5)
    assert envelope_samson(0, 3) == 2.0
    assert envelope_samson(1, 1) == pytest.approx(1.21306, abs=1e-5)
    assert envelope_kontram(0, 2) == 2.0
    assert envelope_kontram(1, 1) == pytest.approx(2 * math.exp(-0.5), abs=1e-15)
    assert envelope_kontram(1, 1.75) == pytest.approx(1.6987316331366249, rel=1e-14)
    assert envelope_kontram(0.5, 1) == pytest.approx(1.7649938051691908, abs=1e-15)


def test_mcdiarmid_doubling_n_squares_factor():
    t = 0.3
    assert envelope_mcdiarmid(t, 10) / 2 == pytest.approx((envelope_mcdiarmid(t, 5) / 2) ** 2)


def test_marton():
    n, th, t = 100, 0.5, 0.5
    # independent transcription of the formula
    want = 2 * math.exp(-2 * n * (t * (1 - th) - math.sqrt(math.log(2) / (2 * n))) ** 2)
    assert envelope_marton(t, n, th) == pytest.approx(want, rel=1e-14)
    assert envelope_marton(t, n, th) == pytest.approx(0.0013428650003923223, rel=1e-12)
    assert envelope_marton(0.01, 100, 0.5) == 2.0
    with pytest.raises(SpecError):
        envelope_marton(0.5, 10, 1.0)
    # theta = 0, large n: above McDiarmid, converging to it
    t, sizes = 0.1, (100, 1000, 10000)
    for n in sizes:
        assert envelope_marton(t, n, 0) >= envelope_mcdiarmid(t, n)
    ratio = [math.log(envelope_marton(t, n, 0) / 2) / math.log(envelope_mcdiarmid(t, n) / 2)
             for n in sizes]
    assert ratio[0] < ratio[1] < ratio[2] < 1
    assert marton_threshold(2) == pytest.approx(math.sqrt(math.log(2) / 4))


grid = st.lists(st.floats(0, 10), min_size=2, max_size=20).map(sorted)


@given(grid, st.integers(1, 50), st.floats(0, 0.95), st.floats(1, 5), st.floats(1, 5))
def test_envelopes_nonincreasing_and_start_at_two(ts, n, th, g2, d):
    tab = envelope_table([0.0] + ts, n=n, theta=th, gamma2=g2, delta_inf=d)
    for name, v in tab.raw.items():
        assert v[0] == 2.0
        assert np.all(np.diff(v) <= 1e-15)
        assert np.all(tab.capped[name] <= 1.0)
        assert np.array_equal(tab.vacuous(name), v >= 1.0)


@given(st.floats(0, 10), st.floats(1, 5), st.floats(0, 3))
def test_envelopes_monotone_in_norm(t, base, extra):
    assert envelope_kontram(t, base) <= envelope_kontram(t, base + extra)
    assert envelope_samson(t, base) <= envelope_samson(t, base + extra)


def test_envelope_table_requires_inputs():
    with pytest.raises(SpecError, match="requires n"):
        envelope_table([0, 1], which=["mcdiarmid"])
    with pytest.raises(SpecError):
        envelope_table([0, 1], n=3, which=["nope"])
    with pytest.raises(SpecError):
        envelope_table([-1], n=3, which=["mcdiarmid"])
