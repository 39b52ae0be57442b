import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symtrace import oracles
from symtrace.asympt import (ExpansionModel, eta_value, fit_expansion,
                             higher_laurent, identity_operator, log_det, mellin_basis_coeffs,
                             mult_anomaly, parity_regular, zeta_laurent)
from symtrace.errors import IllConditioned, PreconditionError, ZeroModeWithoutConvention
from symtrace.quantize import Multiplier
from symtrace.symcore import term

P1 = Multiplier("k**2 + 1", 1)


def test_heat_model_exponents():
    m = ExpansionModel.heat(-1, 1, 2, e_max=2)
    exps = sorted({e for e, _ in m.basis})
    assert exps == [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]
    # integer exponents carry one extra log power
    assert (Fraction(0), 1) in m.basis and (Fraction(1, 2), 1) not in m.basis
    reg = ExpansionModel.heat(-1, 1, 2, e_max=2, regular_integers=True)
    assert (Fraction(0), 1) not in reg.basis
    assert max(e for e, _ in reg.reduced().basis) == Fraction(3, 2)


coefs = st.floats(-3, 3, allow_nan=False)


@given(st.lists(coefs, min_size=4, max_size=4))
def test_fit_recovers_synthetic_expansion(c):
    model = ExpansionModel("heat", [(Fraction(-1, 2), 0), (Fraction(0), 0), (Fraction(0), 1),
                                    (Fraction(1, 2), 0)])
    t = np.geomspace(1e-4, 0.1, 40)
    y = c[0] * t ** -0.5 + c[1] + c[2] * np.log(t) + c[3] * t ** 0.5
    fit = fit_expansion(t, y, model)
    got = [fit.get(e, s).real for e, s in model.basis]
    np.testing.assert_allclose(got, c, atol=1e-8)
    assert fit.c_prime(0) == pytest.approx(-c[2], abs=1e-8)


def test_fit_preconditions():
    model = ExpansionModel("heat", [(Fraction(0), 0), (Fraction(1), 0)])
    with pytest.raises(PreconditionError):
        fit_expansion(np.array([0.1, 0.2]), np.zeros(2), model)
    bad = ExpansionModel("heat", [(Fraction(0), 0), (Fraction(0), 0)])
    with pytest.raises(IllConditioned):
        fit_expansion(np.geomspace(0.01, 0.1, 10), np.ones(10), bad)


@pytest.mark.parametrize("e,s", [(0.5, 0), (0.5, 2), (-0.5, 1), (0.0, 0), (0.0, 2), (1.0, 1)])
def test_mellin_coefficients_against_direct_integral(e, s):
    T = 0.01
    co = mellin_basis_coeffs(e, s, T, -(s + 1), 2)

    def laurent(z):
        return sum(c * z ** r for r, c in co.items())
    # the integral converges for Re(z + e) > 0; compare on a small circle there
    z = 0.8 - e if e <= 0 else 0.05
    with mpmath.workdps(30):
        direct = mpmath.quad(lambda t: t ** (z + e - 1) * mpmath.log(t) ** s, [0, T])
        # the Laurent polynomial is a truncation; compare the exact function instead
        ref = mpmath.diff(lambda zz: T ** (zz + e) / (zz + e), z, s) if s else T ** (z + e) / (z + e)
    assert float(direct) == pytest.approx(float(ref), rel=1e-12)
    if e != 0:
        # Taylor coefficients of T^{z+e}/(z+e) derivatives at z = 0
        with mpmath.workdps(30):
            tay = mpmath.taylor(lambda zz: mpmath.diff(lambda y: T ** (y + e) / (y + e), zz, s),
                                0, 2)
        for r in range(3):
            assert co[r] == pytest.approx(float(tay[r]), rel=1e-10, abs=1e-14)
    else:
        assert co[-(s + 1)] == pytest.approx((-1) ** s * math.factorial(s), rel=1e-14)


def test_zeta_of_trace_class_word():
    ser = zeta_laurent(term(1, -3), P1, 1)
    assert ser[0].real == pytest.approx(oracles.two_zeta(3), abs=1e-9)
    assert abs(ser[-1]) < 1e-9
    assert ser.error(0) < 1e-8


def test_zeta_identity_and_logdet():
    ser = zeta_laurent(identity_operator(1), P1, 2)
    ref = oracles.laurent_shifted_square(1.0, 2)
    assert abs(ser[0]) < 1e-8
    assert ser[1].real == pytest.approx(ref[1], abs=1e-8)
    assert ser[2].real == pytest.approx(ref[2], abs=1e-6)
    v, err = log_det(P1)
    assert v.real == pytest.approx(oracles.logdet_shifted_square(1.0), abs=1e-8)
    assert err < 1e-6


def test_higher_laurent_l1():
    v, err = higher_laurent(identity_operator(1), P1, 1)
    assert v.real == pytest.approx(-oracles.logdet_shifted_square(1.0), abs=1e-6)


def test_parity_regular_detection():
    P2 = Multiplier("k1**2 + k2**2 + 1", 2)
    assert parity_regular(identity_operator(1), P1)
    assert not parity_regular(identity_operator(2), P2)


def test_eta_symmetric_spectrum():
    D = Multiplier("k + 1/2", 1)
    v, err, _ = eta_value(D)
    assert abs(v) < 1e-6


def test_anomaly_commuting_scalars():
    # log det of a product of commuting operators; the closed forms give the anomaly
    A = Multiplier("k**2 + 1", 1)
    B = Multiplier("k**2 + 4", 1)
    v, err, parts = mult_anomaly(A, B)
    ld = lambda a: 2 * math.log(2 * math.sinh(math.pi * a))
    assert parts["logdet_A"].real == pytest.approx(ld(1), abs=1e-6)
    assert parts["logdet_B"].real == pytest.approx(ld(2), abs=1e-6)
    assert parts["logdet_AB"].real == pytest.approx(ld(1) + ld(2), abs=1e-5)
    # log((k^2+1)/(k^2+4)) is even with only even degrees, so the residue formula
    # for the anomaly gives zero on T^1
    assert abs(v) < 1e-5
    assert err < 1e-4


def test_zero_mode_needs_convention():
    P = Multiplier("k**2", 1)
    with pytest.raises(ZeroModeWithoutConvention):
        zeta_laurent(identity_operator(1), P, 0)


def test_anomaly_self_consistency():
    # zeta(P^2, s) = zeta(P, 2s), so log det P^2 = 2 log det P
    v, err, parts = mult_anomaly(P1, P1)
    assert abs(v) <= max(err, 1e-7)
    assert parts["logdet_AB"].real == pytest.approx(2 * oracles.logdet_shifted_square(1.0), abs=1e-6)
