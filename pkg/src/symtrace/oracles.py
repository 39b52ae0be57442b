"""Independent reference values used by the acceptance suite and the tests.

Each oracle avoids the code path it is compared against: quadrature instead of
sphere factors, Bessel-series continuation instead of heat fits, series
expansion in sympy instead of the symbol calculus.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np
import sympy
from scipy import integrate

from .symcore import SymbolExpansion


# ---------------------------------------------------------------------------
# integrals

def fp_quadrature(sym: SymbolExpansion, tol=1e-13) -> complex:
    """int tr v(xi) dxi over R^n by adaptive quadrature (degrees < -n, f = 0 part).

    n = 1: quad on +-[1/2, 1] and +-[1, inf).  n = 2: polar coordinates with the
    periodic trapezoid rule in the angle (exact for trigonometric polynomials of
    degree < 2 * nphi) and adaptive quadrature in the radius.
    """
    f0 = sym.mode((0,) * sym.n)
    if sym.n == 1:
        def g(x, part):
            v = np.trace(f0.evaluate(np.array([[x], [-x]])), axis1=1, axis2=2).sum()
            return v.real if part == 0 else v.imag
        out = 0j
        for part in (0, 1):
            tot = 0.0
            for a, b in ((0.5, 1.0), (1.0, np.inf)):
                v, _ = integrate.quad(g, a, b, args=(part,), epsabs=tol, epsrel=tol, limit=400)
                tot += v
            out += tot if part == 0 else 1j * tot
        return out
    if sym.n == 2:
        nphi = 96
        phi = 2 * math.pi * np.arange(nphi) / nphi
        om = np.stack([np.cos(phi), np.sin(phi)], axis=-1)

        def g(rho, part):
            v = np.trace(f0.evaluate(rho * om), axis1=1, axis2=2).sum() * (2 * math.pi / nphi) * rho
            return v.real if part == 0 else v.imag
        out = 0j
        for part in (0, 1):
            tot = 0.0
            for a, b in ((0.5, 1.0), (1.0, np.inf)):
                v, _ = integrate.quad(g, a, b, args=(part,), epsabs=tol, epsrel=tol, limit=400)
                tot += v
            out += tot if part == 0 else 1j * tot
        return out
    raise ValueError("fp_quadrature supports n = 1, 2")


def gaussian_integral(n=1, scale=1.0) -> float:
    return (math.pi / scale) ** (n / 2)


def jacobi_theta_sum(n=1, scale=1.0, dps=30) -> float:
    """sum_{k in Z^n} exp(-scale |k|^2) via the modular transformation."""
    with mpmath.workdps(dps):
        s = mpmath.mpf(scale)
        one = mpmath.sqrt(mpmath.pi / s) * (1 + 2 * mpmath.nsum(
            lambda j: mpmath.exp(-mpmath.pi ** 2 * j ** 2 / s), [1, mpmath.inf]))
        return float(one ** n)


def two_zeta(s=3) -> float:
    """sum_{k != 0} |k|^{-s} on Z."""
    return float(2 * mpmath.zeta(s))


# ---------------------------------------------------------------------------
# zeta functions of k^2 + a^2 on Z

def shifted_square_zeta(s, a=1.0, dps=30, jmax=None):
    """sum_k (k^2 + a^2)^{-s} continued in s (Bessel-series form)."""
    with mpmath.workdps(dps):
        s = mpmath.mpmathify(s)
        a = mpmath.mpf(a)
        head = mpmath.sqrt(mpmath.pi) * mpmath.gamma(s - 0.5) * mpmath.rgamma(s) * a ** (1 - 2 * s)
        pref = 4 * mpmath.pi ** s * mpmath.rgamma(s)
        jmax = jmax or int(dps * 1.2 / (2 * math.pi * float(a))) + 8
        tail = mpmath.fsum((j / a) ** (s - 0.5) * mpmath.besselk(s - 0.5, 2 * mpmath.pi * j * a)
                           for j in range(1, jmax + 1))
        return head + pref * tail


def logdet_shifted_square(a=1.0) -> float:
    """Closed form log det(-d^2/dx^2 + a^2) on the circle of length 2 pi."""
    return float(2 * mpmath.log(2 * mpmath.sinh(mpmath.pi * a)))


def logdet_continuation(a=1.0, dps=30) -> float:
    """-d/ds of the continued zeta at 0, by high-precision differentiation."""
    with mpmath.workdps(dps):
        return float(-mpmath.diff(lambda s: shifted_square_zeta(s, a, 2 * dps), mpmath.mpf(0)))


def zeta_shifted_square_at_zero(a=1.0) -> float:
    return float(shifted_square_zeta(0, a))


def laurent_shifted_square(a=1.0, order=2, dps=30):
    """Taylor coefficients C_0..C_order of the continued zeta at 0."""
    with mpmath.workdps(dps):
        # the inner evaluation needs more digits than the finite differences consume
        co = mpmath.taylor(lambda s: shifted_square_zeta(s, a, 2 * dps), mpmath.mpf(0), order)
        return [float(c) for c in co]


# ---------------------------------------------------------------------------
# residues from series expansions (n = 1, scalar multipliers)

def residue_series_1d(expr, var) -> float:
    """c_+ + c_-: coefficients of |xi|^{-1} in the expansions at +inf and -inf.

    On T^1 the normalized sphere integral of a degree -1 term is (1/2pi)(c_+ + c_-),
    and the residue carries the factor 2pi.
    """
    y = sympy.Symbol("y", positive=True)
    total = 0
    for sgn in (1, -1):
        e = sympy.simplify(expr.subs(var, sgn / y))
        ser = sympy.series(e, y, 0, 3).removeO()
        total += ser.coeff(y, 1)
    return float(sympy.nsimplify(total))


def residue_defect_series(a_expr, p_expr, pp_expr, var, m) -> float:
    """(1/m) res(a (log p' - log p)) for scalar multipliers on T^1 by series expansion."""
    return residue_series_1d(a_expr * sympy.log(pp_expr / p_expr), var) / m


# ---------------------------------------------------------------------------
# eta of a Dirac-type multiplier on T^2

def eta_dirac_t2(alpha, eps, mass=0.0) -> float:
    """eta(0) of D(k) = sigma.(k + alpha) + mass sigma_3 + eps I on T^2.

    The eigenvalues are eps +- r_k with r_k = sqrt(|k + alpha|^2 + mass^2).  Pairs
    with r_k > |eps| contribute (r+eps)^{-s} - (r-eps)^{-s}; expanding in eps gives
    sum_j odd 2 binom(-s, j) eps^j r^{-s-j}, each a multiple of s times an Epstein
    sum whose poles sit at even values of s + j, hence regular at s = 0; these pairs
    contribute nothing at s = 0.  Pairs with r_k < |eps| contribute 2 sign(eps) each.
    """
    if abs(eps) < 1e-14:
        return 0.0
    R = int(abs(eps) + abs(alpha[0]) + abs(alpha[1]) + 2)
    k = np.arange(-R, R + 1)
    K1, K2 = np.meshgrid(k, k, indexing="ij")
    r = np.sqrt((K1 + alpha[0]) ** 2 + (K2 + alpha[1]) ** 2 + mass ** 2)
    if np.any(np.abs(r - abs(eps)) < 1e-12):
        raise ValueError("zero mode: eps equals some r_k")
    return float(2 * np.sign(eps) * np.count_nonzero(r < abs(eps)))


def commutator_sum_oracle() -> float:
    """Regularized sum of the diagonal of [e^{ix} theta |D|, e^{-ix} theta] on T^1.

    The diagonal is d(k) = theta(k) theta(k-1) |k-1| - theta(k) theta(k+1) |k|:
    -1 for k >= 2, +1 for k <= -2, d(-1) = 2, d(0) = 0, d(1) = -1.  Against any even
    P the pairs k, -k (|k| >= 2) cancel, leaving d(-1) + d(1) = 1.
    """
    return 1.0
