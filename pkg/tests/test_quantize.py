import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symtrace import oracles
from symtrace.asympt import identity_operator
from symtrace.errors import InsufficientN, ParseError, PreconditionError
from symtrace.fpint import finite_part
from symtrace.quantize import (Multiplier, choose_radius, csum, gaussian, heat_trace,
                               lattice_ball, operator_trace, poisson_correction,
                               resolvent_trace, word, word_diagonal)
from symtrace.symcore import symbol_sum, term

P1 = Multiplier("k**2 + 1", 1)


def test_lattice_ball_counts():
    assert len(lattice_ball(1, 3.5)) == 7
    assert len(lattice_ball(2, 1.0)) == 5


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50), st.randoms())
def test_csum_order_independent(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert csum(np.array(xs)) == csum(np.array(ys))


def test_operator_trace_zeta3():
    tv = operator_trace(term(1, -3))
    assert tv.value == pytest.approx(oracles.two_zeta(3), abs=1e-10)
    assert tv.tail_bound < 1e-8


def test_heat_trace_against_direct_sum():
    t = 0.3
    direct = sum(math.exp(-t * (k * k + 1)) for k in range(-200, 201))
    tv = heat_trace(identity_operator(1), P1, t)
    assert tv.value.real == pytest.approx(direct, rel=1e-14)


def test_resolvent_trace_against_closed_form():
    # sum_k (k^2 + 2)^{-2} with a = sqrt 2
    a = math.sqrt(2)
    ref = math.pi * (1 / math.tanh(math.pi * a) + math.pi * a / math.sinh(math.pi * a) ** 2) / (2 * a ** 3)
    tv = resolvent_trace(identity_operator(1), P1, [-1.0], 2, R=4000)[0]
    assert tv.value.real == pytest.approx(ref, abs=2 * tv.tail_bound + 1e-13)


def test_resolvent_needs_large_N():
    with pytest.raises(InsufficientN):
        resolvent_trace(identity_operator(1), P1, [-1.0], 0)


def test_choose_radius_meets_tolerance():
    t_min = 1e-3
    R = choose_radius(identity_operator(1), P1, t_min, 1e-14)
    tv = heat_trace(identity_operator(1), P1, t_min, R=R)
    assert tv.tail_bound <= 1e-14


def test_word_diagonal_shift_pair():
    shift = term(1, 0, xmode=(1,))
    back = term(1, 0, xmode=(-1,))
    k = np.array([[3], [-3]])
    d = word_diagonal(word(shift, back), k)
    np.testing.assert_allclose(d[:, 0, 0], [1.0, 1.0])


def test_poisson_gaussian():
    g = gaussian(1)
    pc = poisson_correction(g)
    assert (oracles.gaussian_integral(1) + pc.total).real == pytest.approx(
        oracles.jacobi_theta_sum(1), abs=1e-13)


@pytest.mark.parametrize("sym", [term(1, -3), term(1, -2.5, 1 - 0.5j),
                                 symbol_sum([term(1, -3), term(1, -4, sigma=1)])])
def test_trace_equals_fp_plus_poisson(sym):
    tv = operator_trace(sym)
    fp = finite_part(sym).integrate()
    pc = poisson_correction(sym)
    assert tv.value == pytest.approx(fp + pc.total, abs=1e-8)


def test_thread_count_does_not_change_results(monkeypatch):
    ts = np.geomspace(1e-3, 1.0, 9)
    monkeypatch.setenv("SYMTRACE_THREADS", "1")
    one = [v.value for v in heat_trace(identity_operator(1), P1, ts)]
    monkeypatch.setenv("SYMTRACE_THREADS", "4")
    four = [v.value for v in heat_trace(identity_operator(1), P1, ts)]
    assert one == four


def test_multiplier_parsing():
    m = Multiplier.parse("k1**2 + k2**2 + 1", 2)
    assert m is not None
    with pytest.raises(ParseError):
        Multiplier.parse("k**2 +", 1)


def test_multiplier_symbol_of_polynomial():
    s = P1.symbol()
    assert [float(t.degree) for t in s.terms] == [2.0, 0.0]
    with pytest.raises(PreconditionError):
        heat_trace(identity_operator(1), P1, -1.0)


def test_heat_trace_unit_time():
    # sum_k exp(-(k^2 + 1)) = e^{-1} theta_3(0, e^{-1}) = 0.65211...
    tv = heat_trace(identity_operator(1), P1, 1.0)
    assert tv.value.real == pytest.approx(math.exp(-1) * oracles.jacobi_theta_sum(1), rel=1e-15)
    assert tv.value.real == pytest.approx(0.6521168, abs=1e-7)
