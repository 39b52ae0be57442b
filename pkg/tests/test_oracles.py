"""Frozen reference values; each oracle is computed by an independent route."""
import math

import pytest
import sympy

from symtrace import oracles
from symtrace.symcore import term


def test_two_zeta():
    assert oracles.two_zeta(3) == pytest.approx(2.4041138063191885, rel=1e-15)


def test_logdet_closed_form_and_continuation():
    assert oracles.logdet_shifted_square(1.0) == pytest.approx(6.279446930026116, rel=1e-15)
    assert oracles.logdet_continuation(1.0) == pytest.approx(6.279446930026116, rel=1e-13)


def test_shifted_square_laurent():
    c = oracles.laurent_shifted_square(1.0, 2)
    assert abs(c[0]) < 1e-14
    assert c[1] == pytest.approx(-6.279446930026117, rel=1e-13)
    assert c[2] == pytest.approx(-3.8498633176041475, rel=1e-12)


def test_shifted_square_zeta_convergent_region():
    # direct sum of (k^2 + 1)^{-2}: pi (coth pi + pi csch^2 pi) / 2
    ref = math.pi * (1 / math.tanh(math.pi) + math.pi / math.sinh(math.pi) ** 2) / 2
    assert float(oracles.shifted_square_zeta(2.0, 1.0)) == pytest.approx(ref, rel=1e-14)
    assert ref == pytest.approx(1.6136739508458174, rel=1e-15)


def test_jacobi_theta():
    assert oracles.jacobi_theta_sum(1) == pytest.approx(1.772637204826652, rel=1e-15)
    assert oracles.jacobi_theta_sum(2, 0.5) == pytest.approx(6.283185374416908, rel=1e-14)
    direct = sum(math.exp(-k * k) for k in range(-40, 41))
    assert oracles.jacobi_theta_sum(1) == pytest.approx(direct, rel=1e-15)


def test_series_residues():
    x = sympy.Symbol("x", real=True)
    assert oracles.residue_series_1d(1 / sympy.Abs(x), x) == 2.0
    assert oracles.residue_series_1d(x / (x ** 2 + 1), x) == 0.0
    assert oracles.residue_defect_series(sympy.Abs(x), x ** 2 + 1, x ** 2 + 2, x, 2) == 1.0


@pytest.mark.parametrize("eps,mass,expected", [(0.5, 0.0, 2.0), (0.8, 0.0, 4.0),
                                               (-0.5, 0.3, -2.0), (0.1, 0.0, 0.0)])
def test_eta_dirac_counting(eps, mass, expected):
    assert oracles.eta_dirac_t2((0.25, 0.1), eps, mass) == expected


def test_eta_dirac_rejects_zero_mode():
    with pytest.raises(ValueError):
        oracles.eta_dirac_t2((0.0, 0.0), 1.0)


@pytest.mark.parametrize("sym,value", [
    (term(1, -2), 2.699426382965204),
    (term(1, -3, sigma=1), 0.40923041168742275),
    (term(2, -3), 8.480498093629954),
    (term(2, -4, {(2, 0): 1.0}), 2.8973023201431847),
])
def test_fp_quadrature_frozen(sym, value):
    assert oracles.fp_quadrature(sym).real == pytest.approx(value, rel=1e-12)
