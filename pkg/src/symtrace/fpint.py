"""Finite-part integrals, canonical-trace densities and residues of symbols.

Integrals use the normalized measure dbar xi = (2 pi)^{-n} d xi.  For an excised
term theta P(omega) |xi|^d L^sigma the finite part splits into the radial
integral over the ball and an exact sphere factor:

    fp = [rho(d, sigma) + kappa(d, sigma)] * int_S P dbar S,
    rho(d, sigma)   = int_{1/2}^1 theta L^sigma r^{d+n-1} dr,
    kappa(d, sigma) = (1 - delta_{d,-n}) (-1)^{sigma+1} sigma! / (d+n)^{sigma+1}.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import (FlaggedCompositionInput, IllConditionedFit, LogTermAtResidueDegree,
                     NonIntegerDegree, NotIntegrableAtOrigin, OrderMismatch, PreconditionError)
from .symcore import (Angular, SymbolExpansion, as_degree, is_integer_degree, leibniz_compose,
                      log_profile, log_symbol, theta)

RADIAL_TOL = 1e-13


# ---------------------------------------------------------------------------
# sphere integrals

@functools.lru_cache(maxsize=None)
def sphere_monomial(alpha: tuple) -> float:
    """int_{S^{n-1}} omega^alpha dS (unnormalized surface measure)."""
    if any(a % 2 for a in alpha):
        return 0.0
    beta = [(a + 1) / 2 for a in alpha]
    return 2.0 * math.exp(sum(gammaln(b) for b in beta) - gammaln(sum(beta)))


def sphere_area(n):
    return sphere_monomial((0,) * n)


def sphere_integral(ang: Angular, n=None) -> np.ndarray:
    """Entrywise int_S P dbar S = (2 pi)^{-n} int_S P dS, an r x r matrix."""
    n = ang.n if n is None else n
    out = np.zeros((ang.r, ang.r), dtype=complex)
    for (i, j, alpha), c in ang.coeffs.items():
        w = sphere_monomial(alpha)
        if w:
            out[i, j] += c * w
    return out / (2 * math.pi) ** n


# ---------------------------------------------------------------------------
# radial factors

@functools.lru_cache(maxsize=None)
def _rho(a: float, sigma: int) -> float:
    """int_{1/2}^1 theta(r) L(r)^sigma r^{a-1} dr."""
    def f(r):
        v = theta(r) * r ** (a - 1)
        return v * log_profile(r) ** sigma if sigma else v
    val, _ = integrate.quad(f, 0.5, 1.0, epsabs=RADIAL_TOL * 0.1, epsrel=1e-13, limit=200)
    return float(val)


def _kappa(a, sigma: int) -> float:
    if a == 0:
        return 0.0
    a = float(a)
    return (-1.0) ** (sigma + 1) * math.factorial(sigma) / a ** (sigma + 1)


@dataclass(frozen=True)
class RadialFactorTable:
    """Cached radial factors rho(d, sigma) and kappa(d, sigma) in dimension n."""

    n: int

    def rho(self, d, sigma: int) -> float:
        return _rho(float(as_degree(d) + self.n), int(sigma))

    def kappa(self, d, sigma: int) -> float:
        a = as_degree(d) + self.n
        return _kappa(a if isinstance(a, Fraction) else float(a), int(sigma))

    def factor(self, d, sigma: int) -> float:
        return self.rho(d, sigma) + self.kappa(d, sigma)


# ---------------------------------------------------------------------------
# densities

@dataclass
class Density:
    """Per-xmode r x r matrices D_f of the finite-part density."""

    n: int
    r: int
    modes: dict = field(default_factory=dict)
    breakdown: list = field(default_factory=list)

    def mode(self, f=None):
        f = (0,) * self.n if f is None else tuple(f)
        return self.modes.get(f, np.zeros((self.r, self.r), dtype=complex))

    def integrate(self) -> complex:
        """(2 pi)^n tr D_0; the f != 0 modes integrate to zero over the torus."""
        return complex((2 * math.pi) ** self.n * np.trace(self.mode()))


def _require_excised(sym, what):
    if sym.strict:
        raise FlaggedCompositionInput(
            "composition results are only valid for |xi| >= 1 and have no finite part", what)


def finite_part(sym: SymbolExpansion) -> Density:
    _require_excised(sym, "finite part")
    table = RadialFactorTable(sym.n)
    dens = Density(sym.n, sym.r)
    for t in sym.terms:
        s = sphere_integral(t.angular, sym.n)
        if not s.any():
            continue
        fac = table.factor(t.degree, t.sigma)
        contrib = fac * s
        dens.modes[t.xmode] = dens.mode(t.xmode) + contrib
        dens.breakdown.append({"degree": t.degree, "sigma": t.sigma, "xmode": t.xmode,
                               "rho": table.rho(t.degree, t.sigma),
                               "kappa": table.kappa(t.degree, t.sigma),
                               "trace": complex(np.trace(contrib))})
    return dens


def fp_strict_hom(d, sigma: int, ang: Angular, n=None) -> np.ndarray:
    """Finite part of a strictly homogeneous term extended to the origin.

    The ball integral 1/(d+n) and the sphere term -1/(d+n) cancel exactly.
    """
    n = ang.n if n is None else n
    d = as_degree(d)
    if float(d) <= -n:
        raise NotIntegrableAtOrigin(f"degree {d} <= -n = {-n}", "fp of homogeneous term")
    if sigma:
        raise PreconditionError("log terms are not homogeneous at the origin", "fp of homogeneous term")
    s = sphere_integral(ang, n)
    a = d + n
    a = float(a)
    ball = s / a
    sphere = -s / a
    return ball + sphere


def tr_density(sym: SymbolExpansion, origin: str = "excised") -> Density:
    """Finite-part density; origin='homogeneous' treats terms as unexcised."""
    if origin == "excised":
        return finite_part(sym)
    if origin != "homogeneous":
        raise ValueError(f"unknown origin convention {origin!r}")
    dens = Density(sym.n, sym.r)
    for t in sym.terms:
        contrib = fp_strict_hom(t.degree, t.sigma, t.angular, sym.n)
        dens.modes[t.xmode] = dens.mode(t.xmode) + contrib
    return dens


def canonical_trace_fp(sym: SymbolExpansion, origin: str = "excised") -> complex:
    return tr_density(sym, origin).integrate()


# ---------------------------------------------------------------------------
# residues

def residue(sym: SymbolExpansion, n=None) -> complex:
    """(2 pi)^n tr of the sphere integral of the degree -n, xmode-0 part."""
    n = sym.n if n is None else n
    zero = (0,) * sym.n
    total = np.zeros((sym.r, sym.r), dtype=complex)
    for t in sym.terms:
        if t.xmode != zero:
            continue
        if not is_integer_degree(t.degree):
            continue
        if int(t.degree) != -n:
            continue
        if t.sigma:
            raise LogTermAtResidueDegree(
                f"log power {t.sigma} at degree {-n}; higher residues are not supported", "residue")
        total += sphere_integral(t.angular, n)
    return complex((2 * math.pi) ** n * np.trace(total))


def _auto_order(*syms, n):
    nu = sum(float(s.order) for s in syms if s.terms)
    return max(2, int(math.ceil(nu + n)) + 2)


def residue_defect(a: SymbolExpansion, p: SymbolExpansion, pp: SymbolExpansion, m=None) -> complex:
    """(1/m) res(A (log P' - log P)) for scalar-leading multipliers of one order m."""
    if not a.terms:
        return 0j
    if p.order != pp.order:
        raise OrderMismatch(f"orders {p.order} and {pp.order} differ", "residue defect")
    m = p.order if m is None else m
    K = _auto_order(a, n=a.n)
    diff = log_symbol(pp, K) - log_symbol(p, K)
    if diff.logdepth:
        raise PreconditionError("log terms did not cancel", "residue defect")
    comp = leibniz_compose(a, diff, K)
    return residue(comp) / float(m)


def residue_commutator(a: SymbolExpansion, ap: SymbolExpansion, p: SymbolExpansion, m=None) -> complex:
    """(1/m) res(A [log P, A'])."""
    if not a.terms or not ap.terms:
        return 0j
    for s in (a, ap):
        if not is_integer_degree(s.order):
            raise NonIntegerDegree(f"order {s.order} is not an integer", "residue commutator")
    m = p.order if m is None else m
    K = _auto_order(a, ap, n=a.n)
    lp = log_symbol(p, K)
    br = leibniz_compose(lp, ap, K) - leibniz_compose(ap, lp, K)
    if br.logdepth:
        raise PreconditionError("log terms did not cancel in the bracket", "residue commutator")
    comp = leibniz_compose(a, br, K)
    return residue(comp) / float(m)


# ---------------------------------------------------------------------------
# cutoff-integral profile

def _ball_radial(a: float, sigma: int, mu: float) -> float:
    """int_0^mu theta L^sigma r^{a-1} dr by quadrature on geometric panels."""
    def f(r):
        v = theta(r) * r ** (a - 1)
        return v * log_profile(r) ** sigma if sigma else v
    total, _ = integrate.quad(f, 0.5, 1.0, epsabs=RADIAL_TOL * 0.1, epsrel=1e-13, limit=200)
    lo = 1.0
    while lo < mu:
        hi = min(2 * lo, mu)
        v, _ = integrate.quad(f, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200)
        total += v
        lo = hi
    return total


@dataclass
class MuProfile:
    mu: np.ndarray
    values: np.ndarray
    constant: complex
    residual: float
    condition: float
    basis: list


def mu_cutoff_profile(sym: SymbolExpansion, mu_grid=(8, 16, 32, 64, 128),
                      max_condition=1e12) -> MuProfile:
    """Integrals over |xi| <= mu and the mu-independent constant of their expansion."""
    _require_excised(sym, "cutoff profile")
    n = sym.n
    zero = (0,) * n
    pieces = []
    for t in sym.terms:
        if t.xmode != zero:
            continue
        s = complex(np.trace(sphere_integral(t.angular, n)))
        if s != 0:
            pieces.append((float(t.degree) + n, t.sigma, s))
    exps: dict = {}
    for a, sig, _ in pieces:
        key = round(a, 12)
        if key == 0:
            continue
        exps[key] = max(exps.get(key, 0), sig)
    const_logs = max([sig + 1 for a, sig, _ in pieces if round(a, 12) == 0] + [0])
    basis = [(e, k) for e in sorted(exps) for k in range(exps[e] + 1)]
    basis += [(0.0, k) for k in range(const_logs + 1)]
    mu = [float(x) for x in mu_grid]
    while len(mu) < len(basis) + 2:
        mu.append(2 * mu[-1])
    mu = np.array(mu)
    vals = np.array([sum(s * _ball_radial(a, sig, m) for a, sig, s in pieces) for m in mu],
                    dtype=complex)
    if not pieces:
        return MuProfile(mu, vals, 0j, 0.0, 1.0, basis)
    lm = np.log(mu)
    A = np.array([mu ** e * lm ** k for e, k in basis]).T
    scale = np.linalg.norm(A, axis=0)
    As = A / scale
    sv = np.linalg.svd(As, compute_uv=False)
    cond = float(sv[0] / sv[-1])
    if cond > max_condition:
        raise IllConditionedFit(f"condition number {cond:.3e}", "cutoff profile")
    coef, *_ = np.linalg.lstsq(As.astype(complex), vals, rcond=None)
    coef = coef / scale
    resid = float(np.max(np.abs(A @ coef - vals)))
    const = complex(coef[basis.index((0.0, 0))])
    return MuProfile(mu, vals, const, resid, cond, basis)
