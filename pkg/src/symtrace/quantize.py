"""Torus quantization, exact diagonals of operator words and lattice trace sums.

An operator on L^2(T^n, C^r), T = R / 2 pi Z, acts on Fourier modes by
A e_k = sum_f e_{k+f} a_f(k).  Symbols, multipliers and matrix functions of
Hermitian multipliers all expose this action through ``modes(k)``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
import sympy
from scipy import integrate

from .errors import (InsufficientN, JOutOfRange, NonPositiveP, NotIntegrableAfterM,
                     NotMultiplier, NotScalarLeading, NotTraceClassOrder, PreconditionError,
                     TailBoundExceedsTolerance)
from .fpint import sphere_area, sphere_integral
from .symcore import (Angular, HomTerm, SymbolExpansion, as_degree, is_integer_degree,
                      log_symbol, validate)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("SYMTRACE_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items, workers=None):
    workers = worker_count() if workers is None else workers
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def csum(values) -> complex:
    """Exactly rounded sum of a complex array (independent of any partition)."""
    v = np.asarray(values)
    if np.iscomplexobj(v):
        return complex(math.fsum(v.real.tolist()), math.fsum(v.imag.tolist()))
    return complex(math.fsum(v.tolist()))


def lattice_ball(n: int, R: float) -> np.ndarray:
    """Integer points k with |k| <= R, shape (K, n), in a fixed order."""
    Ri = int(math.floor(R))
    axis = np.arange(-Ri, Ri + 1)
    if n == 1:
        return axis[:, None]
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    keep = (pts.astype(np.int64) ** 2).sum(axis=1) <= int(math.floor(R * R))
    return pts[keep]


# ---------------------------------------------------------------------------
# operator factors

class LatticeOperator:
    """Base class: subclasses implement ``modes(k) -> {f: (K, r, r)}``."""

    n: int
    r: int
    order: object = 0
    logdepth: int = 0

    def modes(self, k: np.ndarray) -> dict:
        raise NotImplementedError

    def __matmul__(self, other):
        return Product([self, other])


class SymbolOperator(LatticeOperator):
    """OP(a) for an excised SymbolExpansion a."""

    def __init__(self, sym: SymbolExpansion):
        if sym.strict:
            raise PreconditionError("composition results cannot be quantized exactly", "quantize")
        self.sym = sym
        self.n, self.r = sym.n, sym.r
        self.order = sym.order
        self.logdepth = sym.logdepth

    def modes(self, k):
        k = np.asarray(k, dtype=float)
        out: dict = {}
        for t in self.sym.terms:
            v = t.value(k)
            out[t.xmode] = out[t.xmode] + v if t.xmode in out else v
        return out


class FunctionMultiplier(LatticeOperator):
    """Multiplier given by a numpy callable k (K, n) -> (K, r, r)."""

    def __init__(self, func, n, r=1, order=0, logdepth=0, name="multiplier", symbol=None):
        self.func = func
        self.n, self.r = n, r
        self.order = as_degree(order)
        self.logdepth = logdepth
        self.name = name
        self.symbol_meta = symbol

    def values(self, k):
        k = np.atleast_2d(np.asarray(k, dtype=float))
        v = np.asarray(self.func(k), dtype=complex)
        if v.ndim == 1:
            v = v[:, None, None]
        return v

    def modes(self, k):
        return {(0,) * self.n: self.values(k)}


_VAR_ALIASES = ("xi", "k", "x")


class Multiplier(FunctionMultiplier):
    """Multiplier defined by a sympy expression (or matrix) in xi1..xin."""

    def __init__(self, expr, n: int, order=None, logdepth=0, symbol=None, name=None):
        self.vars = sympy.symbols(" ".join(f"xi{i + 1}" for i in range(n)), real=True)
        if n == 1:
            self.vars = (self.vars,) if not isinstance(self.vars, tuple) else self.vars
        if isinstance(expr, str):
            expr = self.parse(expr, n)
        mat = expr if isinstance(expr, sympy.MatrixBase) else sympy.Matrix([[expr]])
        self.expr = sympy.Matrix(mat)
        r = self.expr.shape[0]
        self.n, self.r = n, r
        if self.expr.shape != (r, r):
            raise PreconditionError(f"multiplier matrix has shape {self.expr.shape}", "multiplier")
        self._fns = [[sympy.lambdify(self.vars, self.expr[i, j], "numpy") for j in range(r)]
                     for i in range(r)]
        poly = self._polynomial()
        if order is None:
            if poly is None:
                raise PreconditionError("order of a non-polynomial multiplier must be given",
                                        "multiplier")
            order = max(d for d, _ in poly) if poly else float("-inf")
        super().__init__(self._eval, n, r, order, logdepth, name or str(expr), symbol)

    @staticmethod
    def parse(text: str, n: int):
        names = {f"xi{i + 1}": sympy.Symbol(f"xi{i + 1}", real=True) for i in range(n)}
        for alias in _VAR_ALIASES:
            for i in range(n):
                names.setdefault(f"{alias}{i + 1}", names[f"xi{i + 1}"])
            if n == 1:
                names.setdefault(alias, names["xi1"])
        names["I"] = sympy.I
        try:
            obj = sympy.sympify(text, locals=names)
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            from .errors import ParseError
            raise ParseError(f"cannot parse multiplier {text!r}: {exc}") from exc
        if isinstance(obj, (list, tuple)):
            obj = sympy.Matrix(obj)
        return obj

    def _eval(self, k):
        K = k.shape[0]
        out = np.empty((K, self.r, self.r), dtype=complex)
        args = [k[:, i] for i in range(self.n)]
        for i in range(self.r):
            for j in range(self.r):
                out[:, i, j] = np.broadcast_to(self._fns[i][j](*args), (K,))
        return out

    def _polynomial(self):
        """[(degree, Angular)] homogeneous parts if every entry is a polynomial."""
        parts: dict = {}
        for i in range(self.r):
            for j in range(self.r):
                e = sympy.expand(self.expr[i, j])
                if e == 0:
                    continue
                try:
                    P = sympy.Poly(e, *self.vars)
                except sympy.PolynomialError:
                    return None
                for mon, c in P.terms():
                    if not c.is_number:
                        return None
                    d = sum(mon)
                    parts.setdefault(d, {})[(i, j, tuple(mon))] = complex(c)
        return [(d, Angular(self.n, self.r, co)) for d, co in sorted(parts.items(), reverse=True)]

    def symbol(self) -> SymbolExpansion:
        """Excised homogeneous decomposition (polynomials) or the attached metadata."""
        if self.symbol_meta is not None:
            return self.symbol_meta
        poly = self._polynomial()
        if poly is None:
            raise PreconditionError("no symbol expansion known for this multiplier", "multiplier")
        terms = tuple(HomTerm(d, a, 0) for d, a in poly)
        return validate(SymbolExpansion(self.n, self.r, terms))

    def log(self, J: int = 8):
        """log P as a multiplier with its log-polyhomogeneous expansion attached."""
        if self.r != 1:
            return spectral_log_power(self, 1, sign=+1)
        sym = log_symbol(self.symbol(), J)
        return Multiplier(sympy.log(self.expr[0, 0]), self.n, order=0, logdepth=1,
                          symbol=sym, name=f"log({self.name})")

    def is_hermitian(self, k=None) -> bool:
        k = lattice_ball(self.n, 3) if k is None else k
        v = self.values(k)
        return bool(np.allclose(v, np.conj(np.swapaxes(v, -1, -2)), atol=1e-13))


class SpectralFunction(FunctionMultiplier):
    """func applied to the eigenvalues of a Hermitian multiplier, mode by mode."""

    def __init__(self, base: FunctionMultiplier, func: Callable, order=0, logdepth=0, name=None):
        self.base = base
        self.efunc = func
        super().__init__(self._eval, base.n, base.r, order, logdepth,
                         name or f"f({getattr(base, 'name', 'P')})")

    def _eval(self, k):
        v = self.base.values(k)
        lam, V = np.linalg.eigh(v)
        fl = np.asarray(self.efunc(lam), dtype=complex)
        return np.einsum("kij,kj,klj->kil", V, fl, np.conj(V))


def spectral_log_power(P: FunctionMultiplier, l: int, sign=-1):
    """(sign * log P)^l; the default sign gives (-log P)^l."""
    def f(lam):
        if np.any(lam <= 0):
            raise NonPositiveP("log of a non-positive eigenvalue", "spectral log")
        return (sign * np.log(lam)) ** l
    return SpectralFunction(P, f, order=0, logdepth=l, name=f"(-log {getattr(P, 'name', 'P')})^{l}")


def spectral_sign(D: FunctionMultiplier):
    """D|D|^{-1}, defined to vanish on the nullspace of D."""
    return SpectralFunction(D, lambda lam: np.sign(lam), order=0, name=f"sign({D.name})")


def spectral_abs(D: FunctionMultiplier):
    return SpectralFunction(D, np.abs, order=D.order, name=f"|{D.name}|")


def spectral_square(D: FunctionMultiplier):
    return SpectralFunction(D, lambda lam: lam * lam, order=2 * D.order, name=f"({D.name})^2")


def gaussian(n=1, scale=1.0):
    """Built-in Schwartz multiplier exp(-scale |xi|^2)."""
    xs = sympy.symbols(" ".join(f"xi{i + 1}" for i in range(n)), real=True)
    xs = xs if isinstance(xs, tuple) else (xs,)
    return Multiplier(sympy.exp(-scale * sum(x ** 2 for x in xs)), n, order=float("-inf"),
                      name=f"gaussian({scale})")


def power_law(n=1, exponent=-3):
    """Built-in excised power theta(|xi|)|xi|^exponent as an operator factor."""
    from .symcore import term
    return SymbolOperator(term(n, exponent))


def as_operator(obj) -> LatticeOperator:
    if isinstance(obj, LatticeOperator):
        return obj
    if isinstance(obj, SymbolExpansion):
        return SymbolOperator(obj)
    raise TypeError(f"cannot quantize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# words

class Product(LatticeOperator):
    """Composition of factors, leftmost applied last."""

    def __init__(self, factors: Sequence):
        self.factors = [as_operator(f) for f in factors]
        f0 = self.factors[0]
        self.n, self.r = f0.n, f0.r
        for f in self.factors:
            if (f.n, f.r) != (self.n, self.r):
                from .errors import RankMismatch
                raise RankMismatch("factors of a word must share (n, r)", "word")
        orders = [float(f.order) for f in self.factors]
        self.order = sum(orders)
        if all(isinstance(f.order, Fraction) for f in self.factors):
            self.order = sum((f.order for f in self.factors), Fraction(0))
        self.logdepth = sum(f.logdepth for f in self.factors)

    def modes(self, k):
        k = np.asarray(k)
        state = {f: v for f, v in self.factors[-1].modes(k).items()}
        for X in reversed(self.factors[:-1]):
            new: dict = {}
            for f, v in state.items():
                xm = X.modes(k + np.asarray(f)[None, :])
                for h, xv in xm.items():
                    g = tuple(a + b for a, b in zip(f, h))
                    prod = xv @ v
                    new[g] = new[g] + prod if g in new else prod
            state = new
        return state


class OperatorSum(LatticeOperator):
    """Linear combination sum_i c_i W_i of operators."""

    def __init__(self, parts: Sequence):
        self.parts = [(complex(c), as_operator(w)) for c, w in parts]
        w0 = self.parts[0][1]
        self.n, self.r = w0.n, w0.r
        self.order = max((w.order for _, w in self.parts), key=float)
        self.logdepth = max(w.logdepth for _, w in self.parts)

    def modes(self, k):
        out: dict = {}
        for c, w in self.parts:
            for f, v in w.modes(k).items():
                out[f] = out[f] + c * v if f in out else c * v
        return out


def word(*factors) -> LatticeOperator:
    return as_operator(factors[0]) if len(factors) == 1 else Product(factors)


def commutator_word(a, b) -> OperatorSum:
    return OperatorSum([(1, Product([a, b])), (-1, Product([b, a]))])


def word_diagonal(w, k) -> np.ndarray:
    """Exact diagonal blocks <e_k, W e_k>, shape (K, r, r)."""
    w = as_operator(w)
    k = np.atleast_2d(np.asarray(k))
    if k.shape[-1] != w.n:
        k = k.reshape(-1, w.n)
    m = w.modes(k)
    zero = (0,) * w.n
    if zero in m:
        return m[zero]
    return np.zeros((k.shape[0], w.r, w.r), dtype=complex)


# ---------------------------------------------------------------------------
# spectral samples and truncation

@dataclass
class TruncationPlan:
    """Radius plus the constants of the tail comparison integrals."""

    n: int
    R: float
    C: float
    nu: float
    c_min: float
    m: float

    def _shell_integral(self, a: float, t: float) -> float:
        """int_R^inf s^{a-1} exp(-t c s^m) ds."""
        lam = t * self.c_min
        x = lam * self.R ** self.m
        val = mpmath.gammainc(a / self.m, x) * lam ** (-a / self.m) / self.m
        return float(val)

    def _prefactor(self):
        return self.C * sphere_area(self.n) * (1 + 1 / self.R) ** max(self.nu, 0) * 1.5

    def heat_tail(self, t: float) -> float:
        if self.C == 0:
            return 0.0
        return self._prefactor() * self._shell_integral(self.nu + self.n, t)

    def resolvent_tail(self, N: int, shift: float = 0.0) -> float:
        if self.C == 0:
            return 0.0
        a = self.nu + self.n - self.m * N
        if a >= 0:
            return float("inf")
        return self._prefactor() * self.c_min ** (-N) * self.R ** a / (-a)

    def trace_tail(self) -> float:
        if self.C == 0:
            return 0.0
        a = self.nu + self.n
        if a >= 0:
            return float("inf")
        return self._prefactor() * self.R ** a / (-a)


@dataclass
class SpectralSample:
    """Weights w and eigenvalues lam with Tr(W g(P)) = sum w g(lam) over |k| <= R."""

    weights: np.ndarray
    eigenvalues: np.ndarray
    plan: TruncationPlan
    lam_min: float
    total_abs: float = 0.0

    def heat(self, t: float) -> complex:
        cut = np.searchsorted(self.eigenvalues, 745.0 / t + self.eigenvalues[0], side="right")
        lam = self.eigenvalues[:cut]
        return csum(self.weights[:cut] * np.exp(-t * lam))

    def resolvent(self, z: float, N: int) -> complex:
        return csum(self.weights * (self.eigenvalues - z) ** (-float(N)))

    def trace(self) -> complex:
        return csum(self.weights)


def _growth_constants(k, diag_abs, lam_min, nu, m, R):
    rad = np.linalg.norm(np.asarray(k, dtype=float), axis=-1)
    shell = (rad > R / 2) & (rad > 0)
    if not shell.any():
        shell = rad > 0
    C = 1.5 * float(np.max(diag_abs[shell] / (1 + rad[shell]) ** nu)) if shell.any() else 0.0
    c_min = float(np.min(lam_min[shell] / rad[shell] ** m)) if shell.any() else 1.0
    return C, c_min


def spectral_sample(w, P: FunctionMultiplier, R: float, allow_zero=False) -> SpectralSample:
    w = as_operator(w)
    if P.n != w.n or P.r != w.r:
        from .errors import RankMismatch
        raise RankMismatch("word and P must share (n, r)", "spectral sample")
    k = lattice_ball(w.n, R)
    d = word_diagonal(w, k)
    pv = P.values(k)
    if P.r == 1:
        lam = pv[:, 0, 0].real[:, None]
        wts = d[:, 0, 0][:, None]
        if np.max(np.abs(pv[:, 0, 0].imag)) > 1e-12 * max(1.0, np.max(np.abs(lam))):
            raise NonPositiveP("P is not real-valued", "spectral sample")
    else:
        lam, V = np.linalg.eigh(pv)
        wts = np.einsum("kji,kjl,kli->ki", np.conj(V), d, V)
    lo = float(lam.min())
    if lo < 0 or (lo == 0 and not allow_zero):
        raise NonPositiveP(f"smallest eigenvalue of P is {lo}", "spectral sample")
    m = float(P.order)
    nu = float(w.order) + 0.5 * w.logdepth
    C, c_min = _growth_constants(k, np.abs(wts).sum(axis=1), lam.min(axis=1), nu, m, R)
    if C == 0 and np.any(wts):
        C = float(np.max(np.abs(wts)))
    plan = TruncationPlan(w.n, float(R), C, nu, c_min, m)
    flat_l = lam.ravel()
    flat_w = wts.ravel()
    uniq, inv = np.unique(flat_l, return_inverse=True)
    agg = (np.bincount(inv, weights=flat_w.real, minlength=uniq.size)
           + 1j * np.bincount(inv, weights=flat_w.imag, minlength=uniq.size))
    keep = agg != 0
    if not keep.any():
        keep[:1] = True
    return SpectralSample(agg[keep], uniq[keep], plan, lo, float(np.abs(flat_w).sum()))


def choose_radius(w, P: FunctionMultiplier, t_min: float, tol: float = 1e-14,
                  R_max=None) -> float:
    """Smallest radius (from a doubling search) whose heat tail at t_min is below tol."""
    w = as_operator(w)
    n = w.n
    R_max = R_max or {1: 1 << 20, 2: 300, 3: 60}.get(n, 30)
    m = float(P.order)
    k = np.zeros((1, n))
    k[0, 0] = 64.0
    c_guess = float(np.linalg.eigvalsh(P.values(k))[0, 0].real) / 64.0 ** m if P.r > 1 else \
        float(P.values(k)[0, 0, 0].real) / 64.0 ** m
    c_guess = max(c_guess, 1e-12)
    nu = max(float(w.order), 0.0) + 0.5 * w.logdepth
    wk = np.abs(word_diagonal(w, k)).sum() / 64.0 ** float(w.order) if math.isfinite(
        float(w.order)) else 1.0
    extra = math.log(max(wk, 1.0))
    R = 8.0
    for _ in range(4):
        # exponent of the tail must beat the polynomial growth of the summand
        R = max(8.0, (math.log(1 / tol) + 10 + extra + (nu + n) * math.log(R))
                / (t_min * c_guess)) ** (1 / m)
    R = min(math.ceil(R), R_max)
    return float(R)


# ---------------------------------------------------------------------------
# trace values

@dataclass
class TraceValue:
    value: complex
    tail_bound: float
    R: float
    t: float = None
    lam: float = None
    N: int = None

    def record(self):
        out = {"value": [self.value.real, self.value.imag], "tail_bound": self.tail_bound,
               "R": self.R}
        for key in ("t", "lam", "N"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        return out


def heat_trace(w, P, t, R=None, tol=None, sample: SpectralSample = None):
    """Tr(W exp(-tP)) for scalar or array t; returns TraceValue or a list of them."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise PreconditionError("t must be positive", "heat trace")
    if sample is None:
        R = R or choose_radius(w, P, float(ts.min()))
        sample = spectral_sample(w, P, R, allow_zero=True)
    vals = _pmap(sample.heat, ts)
    out = []
    for tv, v in zip(ts, vals):
        tb = sample.plan.heat_tail(float(tv))
        if tol is not None and tb > tol:
            raise TailBoundExceedsTolerance(f"tail bound {tb:.3e} > {tol:.3e} at t={tv}",
                                            "heat trace")
        out.append(TraceValue(v, tb, sample.plan.R, t=float(tv)))
    return out[0] if np.ndim(t) == 0 else out


def resolvent_trace(w, P, lams, N: int, R: float = 2000, tol=None, sample=None):
    """Tr(W (P - lam)^{-N}) on a grid of negative lam."""
    w = as_operator(w)
    m = float(P.order)
    if N <= (float(w.order) + w.n) / m:
        raise InsufficientN(f"N={N} must exceed (nu+n)/m = {(float(w.order) + w.n) / m}",
                            "resolvent trace")
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if np.any(lams >= 0):
        raise PreconditionError("spectral parameter must be negative", "resolvent trace")
    if sample is None:
        sample = spectral_sample(w, P, R, allow_zero=True)
    vals = _pmap(lambda z: sample.resolvent(z, N), lams)
    out = []
    for z, v in zip(lams, vals):
        tb = sample.plan.resolvent_tail(N)
        if tol is not None and tb > tol:
            raise TailBoundExceedsTolerance(f"tail bound {tb:.3e} > {tol:.3e}", "resolvent trace")
        out.append(TraceValue(v, tb, sample.plan.R, lam=float(z), N=N))
    return out


def operator_trace(w, R: float = None, tol=None) -> TraceValue:
    """Tr W for words of order < -n, by the lattice sum of the diagonal."""
    w = as_operator(w)
    nu = float(w.order)
    if nu >= -w.n:
        raise NotTraceClassOrder(f"order {w.order} >= -n = {-w.n}", "operator trace")
    if R is None:
        R = {1: 1 << 20, 2: 1000, 3: 100}.get(w.n, 30)
        if nu == float("-inf"):
            R = {1: 64, 2: 48, 3: 32}.get(w.n, 16)
    k = lattice_ball(w.n, R)
    d = word_diagonal(w, k)
    tr = np.trace(d, axis1=1, axis2=2)
    val = csum(tr)
    if nu == float("-inf"):
        rad = np.linalg.norm(k.astype(float), axis=-1)
        tb = float(np.max(np.abs(tr[rad > R - 2]))) * k.shape[0] if (rad > R - 2).any() else 0.0
    else:
        C, _ = _growth_constants(k, np.abs(tr), np.ones(len(k)), nu, 1.0, R)
        tb = TruncationPlan(w.n, float(R), C, nu, 1.0, 1.0).trace_tail()
    if tol is not None and tb > tol:
        raise TailBoundExceedsTolerance(f"tail bound {tb:.3e} > {tol:.3e}", "operator trace")
    return TraceValue(val, tb, float(R))


# ---------------------------------------------------------------------------
# Poisson correction

def _tail_transform(d, sigma, omega, X, dps=30):
    """int_X^inf x^d log^sigma(x) exp(-i omega x) dx (Abel-regularized), omega > 0."""
    with mpmath.workdps(dps):
        z = mpmath.mpc(0, omega * X)

        def F(dd):
            return mpmath.power(X, dd + 1) * mpmath.expint(-dd, z)

        v = F(mpmath.mpf(float(d))) if sigma == 0 else mpmath.diff(F, mpmath.mpf(float(d)), sigma)
        return complex(v)


@dataclass
class PoissonResult:
    total: complex
    per_j: list
    remainder: float
    j_max: int


def _scalar_eval(g):
    if isinstance(g, SymbolExpansion):
        return lambda x: np.trace(g.evaluate(np.asarray(x, dtype=float)[:, None]), axis1=1, axis2=2)
    return lambda x: np.trace(g.values(np.asarray(x, dtype=float)[:, None]), axis1=1, axis2=2)


def poisson_correction(g, j_max: int = None, X: float = 10.0, tol: float = 1e-13) -> PoissonResult:
    """sum_{j != 0} hat g(2 pi j), hat g(w) = int g(xi) exp(-i w.xi) d xi.

    For n = 1 the transform is a finite-interval oscillatory quadrature on
    [-X, X] plus closed-form incomplete-gamma tails of the homogeneous
    expansion beyond X.  For n = 2 only rapidly decaying evaluators are
    supported (tensor Gauss-Legendre on a box).
    """
    if isinstance(g, SymbolExpansion):
        if g.strict or not g.is_multiplier:
            raise NotMultiplier("need an excised x-independent symbol", "poisson correction")
        n, asym, X, exact_tail = g.n, g, 1.0, True
    else:
        n = g.n
        asym = getattr(g, "symbol_meta", None)
        if asym is None and isinstance(g, Multiplier):
            try:
                asym = g.symbol()
            except PreconditionError:
                asym = None
        exact_tail = False
    rapid = float(getattr(g, "order", 0)) == float("-inf")
    if n == 2:
        if not rapid:
            raise NotIntegrableAfterM("n = 2 requires a rapidly decaying evaluator",
                                      "poisson correction")
        return _poisson_rapid_2d(g, j_max or 6)
    if n != 1:
        raise NotIntegrableAfterM(f"n = {n} is not supported", "poisson correction")
    if not rapid and asym is None:
        raise NotIntegrableAfterM("no asymptotic expansion for the tail", "poisson correction")
    fn = _scalar_eval(g)
    if rapid:
        X = 1.0
        while abs(fn(np.array([X]))[0]) > 1e-18 and X < 1e3:
            X *= 1.5
    tails = []
    if not rapid:
        for t in asym.terms:
            if any(t.xmode):
                continue
            ap = complex(np.trace(t.angular.evaluate(np.array([[1.0]]))[0]))
            am = complex(np.trace(t.angular.evaluate(np.array([[-1.0]]))[0]))
            tails.append((t.degree, t.sigma, ap + am))
    lo = 0.5 if exact_tail else 0.0

    def g_even(x):
        x = np.atleast_1d(x)
        return fn(x) + fn(-x)

    remainder = 0.0
    if not exact_tail and not rapid:
        xs = np.array([X])
        asym_val = sum(c * X ** float(d) * math.log(X) ** s for d, s, c in tails)
        remainder = 4 * abs(g_even(xs)[0] - asym_val)

    gl_x, gl_w = np.polynomial.legendre.leggauss(20)

    def batch(js):
        ws = 2 * math.pi * np.asarray(js, dtype=float)
        panels = max(32, int(math.ceil((X - lo) * ws.max() / 4.0)))
        edges = np.linspace(lo, X, panels + 1)
        half = (edges[1:] - edges[:-1]) / 2
        nodes = ((edges[:-1] + edges[1:]) / 2)[:, None] + half[:, None] * gl_x[None, :]
        wts = (half[:, None] * gl_w[None, :]).ravel()
        nodes = nodes.ravel()
        gv = g_even(nodes) * wts
        # rounding of g and of the phases w x (absolute error ~ eps w X)
        floor[0] = 16 * np.finfo(float).eps * float(np.sum(np.abs(gv))) * (1 + ws.max() * X)
        vals = []
        for w in ws:
            v = complex(np.dot(gv, np.cos(w * nodes)))
            for d, s, c in tails:
                if c != 0:
                    v += c * _tail_transform(d, s, w, X).real
            # hat g(w) + hat g(-w) = 2 int_0^inf (g(x) + g(-x)) cos(w x) dx
            vals.append(2 * v)
        return vals

    j_cap = j_max or 4000
    # roundoff floor of a single transform, updated per batch
    floor = [0.0]
    per_j = []
    total = 0j
    quiet = 0
    j = 1
    size = 16
    while j <= j_cap:
        js = list(range(j, min(j + size, j_cap + 1)))
        for jj, v in zip(js, batch(js)):
            per_j.append((jj, v))
            total += v
            quiet = quiet + 1 if abs(v) < max(tol * 0.1, floor[0]) else 0
        j = js[-1] + 1
        if j_max is None and quiet >= 24:
            break
    rem_tail = (max((abs(v) for _, v in per_j[-8:]), default=0.0) * 8
                + remainder * (1 + math.log(max(j - 1, 1))) + floor[0] * math.sqrt(j))
    return PoissonResult(total, per_j, rem_tail, j - 1)


def _poisson_rapid_2d(g, j_max):
    fn = lambda pts: np.trace(g.values(pts), axis1=1, axis2=2)
    X = 1.0
    while abs(fn(np.array([[X, 0.0]]))[0]) > 1e-18 and X < 200:
        X *= 1.5
    panels = int(math.ceil(2 * X)) * 2
    x, wq = np.polynomial.legendre.leggauss(24)
    edges = np.linspace(-X, X, panels + 1)
    nodes = ((edges[:-1, None] + edges[1:, None]) / 2 + (edges[1:, None] - edges[:-1, None]) / 2
             * x[None, :]).ravel()
    weights = (((edges[1:] - edges[:-1]) / 2)[:, None] * wq[None, :]).ravel()
    A, B = np.meshgrid(nodes, nodes, indexing="ij")
    G = fn(np.stack([A.ravel(), B.ravel()], axis=-1)).reshape(A.shape)
    W = weights[:, None] * weights[None, :]
    per_j = []
    total = 0j
    for j1 in range(-j_max, j_max + 1):
        for j2 in range(-j_max, j_max + 1):
            if j1 == 0 and j2 == 0:
                continue
            ph = np.exp(-2j * math.pi * (j1 * A + j2 * B))
            v = complex(np.sum(W * G * ph))
            per_j.append(((j1, j2), v))
            total += v
    edge = max(abs(v) for (jj, v) in per_j if max(abs(jj[0]), abs(jj[1])) == j_max)
    return PoissonResult(total, per_j, edge * 8 * j_max, j_max)


# ---------------------------------------------------------------------------
# resolvent coefficients from the symbol

def _compositions(total, parts_available):
    """Ordered tuples of drops (each in parts_available) summing to total."""
    if total == 0:
        yield ()
        return
    for d in parts_available:
        if d <= total:
            for rest in _compositions(total - d, parts_available):
                yield (d,) + rest


def resolvent_coeff_cj(p: SymbolExpansion, N: int, j: int) -> complex:
    """c~_j = int q^h_{-mN-j}(xi, 1) dbar xi for (P - lambda)^{-N}, lambda = -mu^m."""
    if isinstance(p, Multiplier):
        p = p.symbol()
    if not p.is_multiplier:
        raise NotMultiplier("resolvent coefficients need a multiplier", "resolvent coefficient")
    n = p.n
    top = p.terms[0]
    m = top.degree
    c = top.angular.is_scalar_constant()
    if not is_integer_degree(m) or c is None or c.imag != 0 or c.real <= 0 or top.sigma:
        raise NotScalarLeading("leading term is not c|xi|^m I", "resolvent coefficient")
    m = int(m)
    if j < 0 or j >= m + n:
        raise JOutOfRange(f"j={j} outside 0 <= j < m+n = {m + n}", "resolvent coefficient")
    c = c.real
    lower = {}
    for t in p.terms[1:]:
        if t.sigma or not is_integer_degree(t.degree):
            raise NotScalarLeading("lower terms must be classical of integer degree",
                                   "resolvent coefficient")
        drop = m - int(t.degree)
        lower[drop] = lower[drop] + t.angular if drop in lower else t.angular
    total = 0j
    for comp in _compositions(j, sorted(lower)):
        k = len(comp)
        ang = Angular.identity(n, p.r)
        for dmp in comp:
            ang = ang.matmul(lower[dmp])
        s = complex(np.trace(sphere_integral(ang, n)))
        if s == 0:
            continue
        a = k * m - j + n
        binom = float(mpmath.binomial(-N, k))
        rad = (c ** (-a / m) * math.gamma(a / m) * math.gamma(N + k - a / m)
               / (m * math.gamma(N + k)))
        total += binom * rad * s
    return total
