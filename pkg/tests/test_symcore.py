import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from symtrace.errors import NonIntegerDegree, NonPolyhomogeneous, RankMismatch
from symtrace.symcore import (Angular, bracket, classify_case, classify_pair, commutator,
                              leibniz_compose, log_symbol, parity_classify, symbol_sum, term,
                              theta, validate, xi_derivative)

coef = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@st.composite
def angulars(draw, n=None, max_deg=4):
    n = n or draw(st.sampled_from([1, 2]))
    k = draw(st.integers(1, 4))
    d = {}
    for _ in range(k):
        alpha = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        d[(0, 0, alpha)] = draw(coef)
    return Angular(n, 1, d)


def unit(n, phi):
    return np.array([np.cos(phi)]) if n == 1 else np.array([np.cos(phi), np.sin(phi)])


@given(st.floats(0, 3))
def test_cutoff_profile(rho):
    v = float(theta(rho))
    assert 0.0 <= v <= 1.0
    if rho <= 0.5:
        assert v == 0.0
    if rho >= 1.0:
        assert v == 1.0


def test_cutoff_monotone_and_smooth():
    r = np.linspace(0.5, 1.0, 2001)
    v = theta(r)
    assert np.all(np.diff(v) >= -1e-15)
    assert np.all(np.asarray(bracket(np.array([2.0, 3.0]))) > 0)


@given(angulars(n=2), st.floats(0, 2 * np.pi))
def test_reduction_preserves_values_on_sphere(ang, phi):
    """Reduction mod |omega|^2 = 1 must not change the function on the circle."""
    om = unit(2, phi)
    raw = 0j
    # rebuild from unreduced input: evaluate each reduced monomial vs its own value
    for (_, _, alpha), c in ang.coeffs.items():
        raw += c * np.prod(om ** np.array(alpha))
    assert ang.evaluate(om)[0, 0] == pytest.approx(raw, abs=1e-9)
    unred = Angular(2, 1, {(0, 0, (2, 2)): 1.0})
    assert unred.evaluate(om)[0, 0] == pytest.approx((om[0] * om[1]) ** 2, abs=1e-12)


def test_reduction_canonical():
    a = Angular(2, 1, {(0, 0, (2, 0)): 1.0, (0, 0, (0, 2)): 1.0})
    assert a == Angular.identity(2, 1)
    b = Angular(1, 1, {(0, 0, (3,)): 2.0})
    assert b == Angular(1, 1, {(0, 0, (1,)): 2.0})


@given(angulars(), angulars(), st.floats(0, 2 * np.pi))
def test_angular_linear(a, b, phi):
    assume(a.n == b.n)
    om = unit(a.n, phi)
    np.testing.assert_allclose((a + b).evaluate(om), a.evaluate(om) + b.evaluate(om), atol=1e-9)


@given(angulars(), st.floats(0, 2 * np.pi))
def test_parity_matches_values(a, phi):
    par = a.parity()
    om = unit(a.n, phi)
    if par in (1, -1):
        np.testing.assert_allclose(a.evaluate(-om), par * a.evaluate(om), atol=1e-9)


@given(st.integers(-6, 3), st.sampled_from([1, 2]))
def test_case1_iff_order_below_minus_n(d, n):
    label = classify_case(term(n, d))
    assert (label == "case1") == (d < -n)


@given(st.fractions(-5, 3).filter(lambda f: f.denominator > 1))
def test_non_integer_order_is_case2(d):
    assume(float(d) >= -1)
    assert classify_case(term(1, d)) == "case2"


def test_parity_examples():
    assert parity_classify(term(1, 0)) == "even-even"
    assert parity_classify(term(1, -1, {(1,): 1.0})) == "even-even"
    assert parity_classify(term(1, -1)) == "even-odd"
    assert classify_case(term(1, 0)) == "case3"
    assert classify_case(symbol_sum([term(2, 0, {(1, 0): 1.0}), term(2, -1)])) == "case4"
    assert classify_case(term(1, 1)) == "none"
    with pytest.raises(NonIntegerDegree):
        parity_classify(term(1, 0.5))


@given(st.integers(-3, 2), st.integers(-3, 2), st.sampled_from([1, 2]))
def test_classify_pair_symmetric(d1, d2, n):
    a, b = term(n, d1), term(n, d2, {(1,) + (0,) * (n - 1): 1.0})
    assert classify_pair(a, b) == classify_pair(b, a)


def test_validate_rejects_non_integer_steps():
    with pytest.raises(NonPolyhomogeneous):
        symbol_sum([term(1, 0.5), term(1, -1)])
    with pytest.raises(RankMismatch):
        term(1, 0) + term(2, 0)


@given(coef, coef)
def test_sum_commutes_and_merges(c1, c2):
    a, b = term(1, -1, c1), term(1, -1, c2)
    s1, s2 = a + b, b + a
    assert s1 == s2
    assert len(s1.terms) <= 1


@given(st.floats(1.5, 50), st.floats(1.5, 50))
def test_multiplier_composition_is_pointwise_product(x, y):
    a = symbol_sum([term(2, 1, {(1, 0): 1.0}), term(2, -1)])
    b = symbol_sum([term(2, 2), term(2, 0, 3.0)])
    c = leibniz_compose(a, b, 6)
    xi = np.array([x, -y])
    lhs = c.evaluate(xi, strict=True)
    rhs = a.evaluate(xi, strict=True) @ b.evaluate(xi, strict=True)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


@given(st.floats(2.0, 40))
def test_derivative_matches_finite_difference(x):
    a = symbol_sum([term(1, -1, sigma=1), term(1, 2, {(1,): 1.0})])
    da = xi_derivative(a, 0)
    h = 1e-5 * x
    fd = (a.evaluate(np.array([x + h]), strict=True) - a.evaluate(np.array([x - h]), strict=True)) / (2 * h)
    np.testing.assert_allclose(da.evaluate(np.array([x])), fd, rtol=1e-7)


def test_commutator_of_multipliers_vanishes():
    a = term(1, 1, {(1,): 1.0})
    b = term(1, -2)
    assert not commutator(a, b, 4).terms


def test_commutator_with_shift():
    # [e^{ix}, theta |xi|]: leading term e^{ix} (|xi - 1| - |xi|) ~ -e^{ix} omega
    a = term(1, 0, xmode=(1,))
    b = term(1, 1)
    c = commutator(a, b, 3)
    lead = [t for t in c.terms if float(t.degree) == 0]
    assert lead
    assert lead[0].angular == Angular(1, 1, {(0, 0, (1,)): -1.0})


@given(st.floats(5.0, 200.0))
def test_log_symbol_converges(x):
    p = symbol_sum([term(1, 2), term(1, 0)])
    ell = log_symbol(p, 8)
    v = ell.evaluate(np.array([x]), strict=True)[0, 0].real
    # degrees down to -J are kept; the first omitted term is x^{-10} / 5
    assert abs(v - np.log(x * x + 1)) <= x ** -10 / 4 + 1e-14


def test_validate_sorts_descending():
    s = validate(symbol_sum([term(1, -2), term(1, 0), term(1, -1)]))
    assert [float(t.degree) for t in s.terms] == [0.0, -1.0, -2.0]
