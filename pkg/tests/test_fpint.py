import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symtrace import oracles
from symtrace.errors import FlaggedCompositionInput, LogTermAtResidueDegree, NotIntegrableAtOrigin
from symtrace.fpint import (Density, canonical_trace_fp, finite_part, fp_strict_hom,
                            mu_cutoff_profile, residue, residue_commutator, residue_defect,
                            sphere_integral)
from symtrace.symcore import Angular, leibniz_compose, symbol_sum, term


def test_sphere_integral_normalization():
    # int_{S^1} dS = 2 pi, normalized by (2 pi)^{-2}
    assert sphere_integral(Angular.identity(2, 1))[0, 0] == pytest.approx(1 / (2 * math.pi))
    # int_{S^0} omega^2 = 2
    assert sphere_integral(Angular(1, 1, {(0, 0, (1,)): 1.0}), 1)[0, 0] == 0
    assert sphere_integral(Angular.identity(1, 1))[0, 0] == pytest.approx(1 / math.pi)


@given(st.integers(0, 4), st.integers(0, 4), st.floats(-1.9, 3.0))
def test_strict_homogeneous_fp_vanishes(a1, a2, d):
    ang = Angular(2, 1, {(0, 0, (a1, a2)): 1.0})
    assert np.all(fp_strict_hom(d, 0, ang, 2) == 0)


def test_strict_homogeneous_requires_integrable_origin():
    with pytest.raises(NotIntegrableAtOrigin):
        fp_strict_hom(-2, 0, Angular.identity(2, 1), 2)


@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_finite_part_linear(c1, c2):
    a, b = term(1, -1), term(1, 2, sigma=1)
    lhs = finite_part(symbol_sum([a.scale(c1), b.scale(c2)])).integrate()
    rhs = c1 * finite_part(a).integrate() + c2 * finite_part(b).integrate()
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("sym", [term(1, -1.5), term(1, -2, sigma=2), term(2, -2.5),
                                 term(2, -3, {(1, 1): 2.0, (2, 0): 1.0})])
def test_fp_matches_quadrature_for_integrable(sym):
    assert finite_part(sym).integrate() == pytest.approx(oracles.fp_quadrature(sym), rel=1e-9)


def test_fp_mode_bookkeeping():
    s = symbol_sum([term(1, -2), term(1, -2, 3.0, xmode=(1,))])
    d = finite_part(s)
    assert isinstance(d, Density)
    assert set(d.modes) == {(0,), (1,)}
    assert d.integrate() == finite_part(term(1, -2)).integrate()


def test_canonical_trace_origin_conventions():
    s = term(1, 1)
    assert canonical_trace_fp(s, "homogeneous") == 0
    assert canonical_trace_fp(s) == finite_part(s).integrate()


@pytest.mark.parametrize("sym", [term(1, 0), term(1, 1, sigma=1), term(2, -1, {(1, 1): 1.0})])
def test_cutoff_profile_constant_is_finite_part(sym):
    prof = mu_cutoff_profile(sym)
    assert prof.constant == pytest.approx(np.trace(finite_part(sym).mode()), abs=1e-7)


def test_residues():
    assert residue(term(1, -1)) == pytest.approx(2.0)
    assert residue(term(2, -2)) == pytest.approx(2 * math.pi)
    assert residue(term(2, -2, {(2, 0): 1.0})) == pytest.approx(math.pi)
    assert residue(term(1, -1, {(1,): 1.0})) == 0
    assert residue(term(1, -2)) == 0
    with pytest.raises(LogTermAtResidueDegree):
        residue(term(1, -1, sigma=1))


def test_composition_results_are_flagged():
    c = leibniz_compose(term(1, 1), term(1, -3), 3)
    with pytest.raises(FlaggedCompositionInput):
        finite_part(c)


def test_residue_defect_oracle():
    p = symbol_sum([term(1, 2), term(1, 0)])
    pp = symbol_sum([term(1, 2), term(1, 0, 2.0)])
    assert residue_defect(term(1, 1), p, pp) == pytest.approx(1.0, abs=1e-12)


def test_residue_commutator_outside_cases():
    a = symbol_sum([term(1, 1, xmode=(1,))])
    b = term(1, 0, xmode=(-1,))
    p = symbol_sum([term(1, 2), term(1, 0)])
    assert residue_commutator(a, b, p) == pytest.approx(1.0, abs=1e-12)
