"""Classical and log-polyhomogeneous symbols on the torus.

A symbol is a finite sum of terms

    e^{i f.x} theta(|xi|) P(omega) |xi|^d L(|xi|)^sigma ,   omega = xi/|xi|,

with P an r x r matrix of polynomials in omega.  Polynomials are kept reduced
modulo |omega|^2 = 1 (the last coordinate appears with power <= 1), which makes
the representation of a function on the sphere unique.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (InhomogeneousAngular, NonIntegerDegree, NonPolyhomogeneous,
                     NotMultiplier, NotScalarLeading, RankMismatch)

PRUNE_RTOL = 1e-15


# ---------------------------------------------------------------------------
# degrees

def as_degree(x):
    """Exact rational degree when x is (close to) a small rational, else float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("degree cannot be boolean")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return as_degree(Fraction(x.strip()))
    x = float(x)
    if not math.isfinite(x):
        return x
    fr = Fraction(x).limit_denominator(1000)
    if abs(float(fr) - x) <= 1e-12 * max(1.0, abs(x)):
        return fr
    return x


def is_integer_degree(d) -> bool:
    return isinstance(d, Fraction) and d.denominator == 1


def _dkey(d):
    return d if isinstance(d, Fraction) else round(float(d), 12)


def _deg_le(a, b, tol=1e-9):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a <= b
    return float(a) <= float(b) + tol


def degree_to_json(d):
    if isinstance(d, Fraction):
        return int(d) if d.denominator == 1 else f"{d.numerator}/{d.denominator}"
    return float(d)


# ---------------------------------------------------------------------------
# cutoff convention

def _g(u):
    u = np.asarray(u, dtype=float)
    safe = np.where(u > 0, u, 1.0)
    return np.where(u > 0, np.exp(-1.0 / safe), 0.0)


def smooth_step(u):
    """S(u) = g(u)/(g(u)+g(1-u)); 0 for u<=0, 1 for u>=1, smooth in between."""
    u = np.asarray(u, dtype=float)
    a, b = _g(u), _g(1.0 - u)
    out = a / (a + b)
    return out[()] if out.ndim == 0 else out


def theta(rho):
    """Radial excision: 0 on [0, 1/2], 1 on [1, inf)."""
    return smooth_step(2.0 * np.asarray(rho, dtype=float) - 1.0)


def log_profile(rho):
    """L(rho) = theta(rho) log(rho); equals log(rho) for rho >= 1."""
    rho = np.asarray(rho, dtype=float)
    safe = np.where(rho > 0.5, rho, 1.0)
    out = np.where(rho > 0.5, theta(rho) * np.log(safe), 0.0)
    return out[()] if out.ndim == 0 else out


def bracket(rho):
    """[xi] = exp(L(|xi|)), smooth, positive, equal to |xi| for |xi| >= 1."""
    return np.exp(log_profile(rho))


# ---------------------------------------------------------------------------
# angular polynomials

@functools.lru_cache(maxsize=None)
def _reduce_monomial(alpha: tuple) -> tuple:
    """omega^alpha reduced mod |omega|^2 = 1, as ((beta, coeff), ...)."""
    n = len(alpha)
    if n == 1:
        return (((alpha[0] % 2,), 1),)
    if alpha[-1] < 2:
        return ((alpha, 1),)
    out: dict = {}
    base = list(alpha)
    base[-1] -= 2
    pieces = [(tuple(base), 1)]
    for i in range(n - 1):
        b = list(base)
        b[i] += 2
        pieces.append((tuple(b), -1))
    for beta, c in pieces:
        for gamma, cc in _reduce_monomial(beta):
            out[gamma] = out.get(gamma, 0) + c * cc
    return tuple((k, v) for k, v in sorted(out.items()) if v != 0)


class Angular:
    """r x r matrix whose entries are polynomials in omega = xi/|xi|.

    ``coeffs`` maps (i, j, alpha) to a complex coefficient; the input is reduced
    on construction.  Instances are treated as immutable.
    """

    __slots__ = ("n", "r", "coeffs")

    def __init__(self, n: int, r: int, coeffs=None, reduced: bool = False):
        self.n = int(n)
        self.r = int(r)
        acc: dict = {}
        for (i, j, alpha), c in (coeffs or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n or not (0 <= i < self.r and 0 <= j < self.r):
                raise RankMismatch(f"monomial index {(i, j, alpha)} does not fit n={n}, r={r}")
            if reduced:
                acc[(i, j, alpha)] = acc.get((i, j, alpha), 0) + complex(c)
                continue
            for beta, cc in _reduce_monomial(alpha):
                key = (i, j, beta)
                acc[key] = acc.get(key, 0) + complex(c) * cc
        scale = max((abs(v) for v in acc.values()), default=0.0)
        self.coeffs = {k: v for k, v in sorted(acc.items())
                       if v != 0 and abs(v) > PRUNE_RTOL * scale}

    # construction ---------------------------------------------------------
    @classmethod
    def identity(cls, n, r, c=1.0):
        z = (0,) * n
        return cls(n, r, {(i, i, z): c for i in range(r)}, reduced=True)

    @classmethod
    def zero(cls, n, r):
        return cls(n, r, {}, reduced=True)

    @classmethod
    def from_matrix(cls, n, mat):
        """Constant matrix (degree-0 angular part)."""
        mat = np.atleast_2d(np.asarray(mat, dtype=complex))
        r = mat.shape[0]
        z = (0,) * n
        return cls(n, r, {(i, j, z): mat[i, j] for i in range(r) for j in range(r)}, reduced=True)

    @classmethod
    def from_monomials(cls, n, r, entries, q=None):
        """Build from entries[i][j] = [(c, alpha, p), ...] meaning sum c xi^alpha / |xi|^p.

        Every monomial must satisfy |alpha| - p = q; the result is the
        homogeneous-degree-zero part P(omega) with c xi^alpha/|xi|^p = |xi|^q c omega^alpha.
        Returns (Angular, q).
        """
        if len(entries) != r or any(len(row) != r for row in entries):
            raise RankMismatch(f"angular part is not {r}x{r}")
        coeffs = {}
        for i, row in enumerate(entries):
            for j, mons in enumerate(row):
                for c, alpha, p in mons:
                    alpha = tuple(int(a) for a in alpha)
                    if len(alpha) != n:
                        raise RankMismatch(f"multi-index {alpha} has length != n={n}")
                    if int(p) < 0 or min(alpha, default=0) < 0:
                        raise InhomogeneousAngular(f"negative exponent in monomial {alpha}, p={p}")
                    h = sum(alpha) - int(p)
                    if q is None:
                        q = h
                    if h != q:
                        raise InhomogeneousAngular(
                            f"monomial xi^{alpha}/|xi|^{p} has homogeneity {h}, declared {q}")
                    coeffs[(i, j, alpha)] = coeffs.get((i, j, alpha), 0) + complex(c)
        return cls(n, r, coeffs), (0 if q is None else int(q))

    def to_monomials(self):
        """entries[i][j] = [(c, alpha, |alpha|)], the q = 0 normal form."""
        out = [[[] for _ in range(self.r)] for _ in range(self.r)]
        for (i, j, alpha), c in self.coeffs.items():
            out[i][j].append((c, alpha, sum(alpha)))
        return out

    # algebra --------------------------------------------------------------
    def _check(self, other):
        if self.n != other.n or self.r != other.r:
            raise RankMismatch(f"(n, r) = {(self.n, self.r)} vs {(other.n, other.r)}")

    def __add__(self, other):
        self._check(other)
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            acc[k] = acc.get(k, 0) + v
        return Angular(self.n, self.r, acc, reduced=True)

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = complex(c)
        return Angular(self.n, self.r, {k: c * v for k, v in self.coeffs.items()}, reduced=True)

    def matmul(self, other):
        self._check(other)
        acc: dict = {}
        for (i, l, a), c in self.coeffs.items():
            for (l2, j, b), d in other.coeffs.items():
                if l != l2:
                    continue
                alpha = tuple(x + y for x, y in zip(a, b))
                for beta, cc in _reduce_monomial(alpha):
                    key = (i, j, beta)
                    acc[key] = acc.get(key, 0) + c * d * cc
        return Angular(self.n, self.r, acc, reduced=True)

    def is_zero(self):
        return not self.coeffs

    def is_scalar_constant(self):
        """Return c if this is c * identity (constant), else None."""
        z = (0,) * self.n
        c = self.coeffs.get((0, 0, z))
        if c is None:
            return None
        expect = {(i, i, z): c for i in range(self.r)}
        if len(self.coeffs) != self.r or any(self.coeffs.get(k) != v for k, v in expect.items()):
            return None
        return c

    def parity(self):
        """+1 if even under omega -> -omega, -1 if odd, 0 if mixed, None if zero."""
        pars = {(-1) ** sum(alpha) for (_, _, alpha) in self.coeffs}
        if not pars:
            return None
        return pars.pop() if len(pars) == 1 else 0

    def partial(self, i, d):
        """Pieces of d/dxi_i of P(omega)|xi|^d L^sigma.

        Returns (A, B) with the derivative equal to
        A(omega)|xi|^{d-1} L^sigma + sigma B(omega)|xi|^{d-1} L^{sigma-1}.
        """
        a_acc: dict = {}
        b_acc: dict = {}
        dd = complex(float(d))
        for (p, q, alpha), c in self.coeffs.items():
            up = list(alpha)
            up[i] += 1
            up = tuple(up)
            if alpha[i] > 0:
                down = list(alpha)
                down[i] -= 1
                down = tuple(down)
                a_acc[(p, q, down)] = a_acc.get((p, q, down), 0) + c * alpha[i]
            a_acc[(p, q, up)] = a_acc.get((p, q, up), 0) + c * (dd - sum(alpha))
            b_acc[(p, q, up)] = b_acc.get((p, q, up), 0) + c
        return Angular(self.n, self.r, a_acc), Angular(self.n, self.r, b_acc)

    # evaluation -----------------------------------------------------------
    def evaluate(self, omega):
        """Values at unit vectors omega of shape (..., n); returns (..., r, r)."""
        omega = np.asarray(omega, dtype=float)
        shape = omega.shape[:-1]
        out = np.zeros(shape + (self.r, self.r), dtype=complex)
        cache: dict = {}
        for (i, j, alpha), c in self.coeffs.items():
            mono = cache.get(alpha)
            if mono is None:
                mono = np.ones(shape)
                for ax, a in enumerate(alpha):
                    if a:
                        mono = mono * omega[..., ax] ** a
                cache[alpha] = mono
            out[..., i, j] += c * mono
        return out

    def allclose(self, other, tol=1e-12):
        self._check(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeffs.get(k, 0) - other.coeffs.get(k, 0)) <= tol for k in keys)

    def __eq__(self, other):
        if not isinstance(other, Angular):
            return NotImplemented
        return (self.n, self.r, self.coeffs) == (other.n, other.r, other.coeffs)

    def __hash__(self):
        return hash((self.n, self.r, tuple(self.coeffs.items())))

    def __repr__(self):
        return f"Angular(n={self.n}, r={self.r}, {self.coeffs})"


# ---------------------------------------------------------------------------
# terms and expansions

@dataclass(frozen=True)
class HomTerm:
    """e^{i f.x} theta(|xi|) P(omega) |xi|^degree L(|xi|)^sigma."""

    degree: object
    angular: Angular
    sigma: int = 0
    xmode: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "degree", as_degree(self.degree))
        xm = tuple(int(v) for v in self.xmode) if self.xmode else (0,) * self.angular.n
        if len(xm) != self.angular.n:
            raise RankMismatch(f"xmode {xm} has length != n={self.angular.n}")
        object.__setattr__(self, "xmode", xm)
        if int(self.sigma) < 0:
            raise ValueError("sigma must be >= 0")
        object.__setattr__(self, "sigma", int(self.sigma))

    def radial(self, rho, strict=False):
        rho = np.asarray(rho, dtype=float)
        d = float(self.degree)
        if strict:
            safe = np.where(rho > 0, rho, 1.0)
            out = safe ** d * np.log(safe) ** self.sigma if self.sigma else safe ** d
            return np.where(rho > 0, out, 0.0)
        safe = np.where(rho > 0.5, rho, 1.0)
        out = theta(safe) * safe ** d
        if self.sigma:
            out = out * log_profile(safe) ** self.sigma
        return np.where(rho > 0.5, out, 0.0)

    def value(self, xi, strict=False):
        xi = np.asarray(xi, dtype=float)
        rho = np.linalg.norm(xi, axis=-1)
        safe = np.where(rho > 0, rho, 1.0)
        omega = xi / safe[..., None]
        return self.angular.evaluate(omega) * self.radial(rho, strict)[..., None, None]


def _term_sort_key(t: HomTerm):
    return (-float(t.degree), t.sigma, t.xmode)


@dataclass(frozen=True)
class SymbolExpansion:
    """Finite sum of HomTerms.

    ``strict`` marks results of composition, whose terms are only meaningful as
    strictly homogeneous functions on |xi| >= 1.
    """

    n: int
    r: int
    terms: tuple = ()
    strict: bool = False
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def order(self):
        if not self.terms:
            return float("-inf")
        best = self.terms[0].degree
        for t in self.terms[1:]:
            if float(t.degree) > float(best):
                best = t.degree
        return best

    @property
    def logdepth(self):
        return max((t.sigma for t in self.terms), default=0)

    @property
    def xmodes(self):
        return sorted({t.xmode for t in self.terms})

    @property
    def is_multiplier(self):
        return all(not any(t.xmode) for t in self.terms)

    def mode(self, f):
        f = tuple(f)
        return SymbolExpansion(self.n, self.r, tuple(t for t in self.terms if t.xmode == f),
                               self.strict)

    def evaluate(self, xi, xmode=None, strict=None):
        """Sum of term values (restricted to one xmode if given); shape (..., r, r)."""
        strict = self.strict if strict is None else strict
        xi = np.asarray(xi, dtype=float)
        if xi.ndim == 0 or (self.n == 1 and xi.shape[-1:] != (1,)):
            xi = xi[..., None]
        out = np.zeros(xi.shape[:-1] + (self.r, self.r), dtype=complex)
        want = None if xmode is None else tuple(xmode)
        for t in self.terms:
            if want is None or t.xmode == want:
                out += t.value(xi, strict)
        return out

    # arithmetic -----------------------------------------------------------
    def _check(self, other):
        if self.n != other.n or self.r != other.r:
            raise RankMismatch(f"(n, r) = {(self.n, self.r)} vs {(other.n, other.r)}")

    def __add__(self, other):
        self._check(other)
        return validate(SymbolExpansion(self.n, self.r, self.terms + other.terms,
                                        self.strict or other.strict))

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return SymbolExpansion(self.n, self.r,
                               tuple(HomTerm(t.degree, t.angular.scale(c), t.sigma, t.xmode)
                                     for t in self.terms), self.strict)

    def as_strict(self):
        return SymbolExpansion(self.n, self.r, self.terms, True)

    def truncate(self, min_degree):
        return SymbolExpansion(self.n, self.r,
                               tuple(t for t in self.terms if _deg_le(min_degree, t.degree)),
                               self.strict)


def zero_symbol(n, r=1, strict=False):
    return SymbolExpansion(n, r, (), strict)


def term(n, degree, angular=None, sigma=0, xmode=None, r=1):
    """Convenience constructor for a single-term symbol.

    ``angular`` is a scalar, a constant matrix, an Angular, or a dict
    {alpha: c} of omega-monomials (scalar case).
    """
    if angular is None:
        ang = Angular.identity(n, r)
    elif isinstance(angular, Angular):
        ang = angular
    elif isinstance(angular, dict):
        ang = Angular(n, r, {(i, i, a): c for a, c in angular.items() for i in range(r)})
    else:
        arr = np.asarray(angular, dtype=complex)
        ang = Angular.identity(n, r, complex(arr)) if arr.ndim == 0 else Angular.from_matrix(n, arr)
    return SymbolExpansion(n, ang.r, (HomTerm(degree, ang, sigma, xmode or (0,) * n),))


def symbol_sum(parts: Sequence[SymbolExpansion]) -> SymbolExpansion:
    parts = list(parts)
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out


def validate(sym: SymbolExpansion) -> SymbolExpansion:
    """Merge equal (degree, sigma, xmode) terms, drop zeros, sort, check shape."""
    merged: dict = {}
    degs: dict = {}
    for t in sym.terms:
        if t.angular.n != sym.n or t.angular.r != sym.r:
            raise RankMismatch(f"term with (n, r) = {(t.angular.n, t.angular.r)} in a "
                               f"symbol with (n, r) = {(sym.n, sym.r)}")
        key = (_dkey(t.degree), t.sigma, t.xmode)
        if key in merged:
            merged[key] = merged[key] + t.angular
        else:
            merged[key] = t.angular
            degs[key] = t.degree
    terms = [HomTerm(degs[k], a, k[1], k[2]) for k, a in merged.items() if not a.is_zero()]
    terms.sort(key=_term_sort_key)
    out = SymbolExpansion(sym.n, sym.r, tuple(terms), sym.strict, sym.meta)
    if terms:
        nu = out.order
        for t in terms:
            gap = t.degree - nu if isinstance(nu, Fraction) and isinstance(t.degree, Fraction) \
                else float(t.degree) - float(nu)
            if isinstance(gap, Fraction):
                ok = gap.denominator == 1
            else:
                ok = abs(gap - round(gap)) < 1e-9
            if not ok:
                raise NonPolyhomogeneous(
                    f"degree {t.degree} is not an integer step below the order {nu}")
    return out


# ---------------------------------------------------------------------------
# parity and case classification

EVEN_EVEN = "even-even"
EVEN_ODD = "even-odd"
NO_PARITY = "none"


def parity_classify(sym: SymbolExpansion) -> str:
    ee = eo = True
    for t in sym.terms:
        if not is_integer_degree(t.degree):
            raise NonIntegerDegree(f"degree {t.degree} is not an integer", "parity")
        par = t.angular.parity()
        if par is None:
            continue
        s = -1 if int(t.degree) % 2 else 1
        ee &= par == s
        eo &= par == -s
    if ee:
        return EVEN_EVEN
    if eo:
        return EVEN_ODD
    return NO_PARITY


def _integer_order(nu):
    return is_integer_degree(nu) if isinstance(nu, Fraction) else False


def classify_case(sym: SymbolExpansion, n=None) -> str:
    n = sym.n if n is None else n
    nu = sym.order
    if float(nu) < -n:
        return "case1"
    if not _integer_order(nu):
        return "case2"
    par = parity_classify(sym)
    if par == EVEN_EVEN and n % 2 == 1:
        return "case3"
    if par == EVEN_ODD and n % 2 == 0:
        return "case4"
    return "none"


def classify_pair(a: SymbolExpansion, b: SymbolExpansion, n=None) -> str:
    n = a.n if n is None else n
    na, nb = a.order, b.order
    if float(na) + float(nb) < -n:
        return "case1'"
    if isinstance(na, Fraction) and isinstance(nb, Fraction):
        total_int = (na + nb).denominator == 1
    else:
        s = float(na) + float(nb)
        total_int = abs(s - round(s)) < 1e-12
    if not total_int:
        return "case2'"
    if not (_integer_order(na) and _integer_order(nb)):
        return "none"
    pa, pb = parity_classify(a), parity_classify(b)
    if n % 2 == 1 and pa == pb and pa != NO_PARITY:
        return "case3'"
    # the commutator is antisymmetric, so the order of the pair does not matter
    if n % 2 == 0 and {pa, pb} == {EVEN_EVEN, EVEN_ODD}:
        return "case4'"
    return "none"


# ---------------------------------------------------------------------------
# derivative and composition

def xi_derivative(sym: SymbolExpansion, i: int) -> SymbolExpansion:
    """d/dxi_i of the strictly homogeneous terms; result is flagged strict."""
    if not 0 <= i < sym.n:
        raise ValueError(f"axis {i} out of range for n={sym.n}")
    out = []
    for t in sym.terms:
        a, b = t.angular.partial(i, t.degree)
        out.append(HomTerm(t.degree - 1, a, t.sigma, t.xmode))
        if t.sigma:
            out.append(HomTerm(t.degree - 1, b.scale(t.sigma), t.sigma - 1, t.xmode))
    return validate(SymbolExpansion(sym.n, sym.r, tuple(out), True))


def _multi_indices(n, K):
    if n == 0:
        yield ()
        return
    for k in range(K + 1):
        for rest in _multi_indices(n - 1, K - k):
            yield (k,) + rest


def leibniz_compose(left: SymbolExpansion, right: SymbolExpansion, K: int) -> SymbolExpansion:
    """Asymptotic symbol of OP(left) OP(right), degrees below nu_L + nu_R - K dropped."""
    if left.n != right.n or left.r != right.r:
        raise RankMismatch(f"(n, r) = {(left.n, left.r)} vs {(right.n, right.r)}", "compose")
    n = left.n
    if not left.terms or not right.terms:
        return zero_symbol(n, left.r, strict=True)
    floor = float(left.order) + float(right.order) - K
    rx = {t.xmode for t in right.terms}
    deriv = {(0,) * n: left.as_strict()}
    alphas = sorted(_multi_indices(n, K), key=sum) if any(any(f) for f in rx) else [(0,) * n]
    out = []
    for alpha in alphas:
        if alpha not in deriv:
            ax = next(i for i, a in enumerate(alpha) if a > 0)
            prev = list(alpha)
            prev[ax] -= 1
            deriv[alpha] = xi_derivative(deriv[tuple(prev)], ax)
        dl = deriv[alpha]
        fact = math.prod(math.factorial(a) for a in alpha)
        for rt in right.terms:
            # (-i)^|alpha| (i f)^alpha / alpha! = f^alpha / alpha!
            c = math.prod(float(f) ** a for f, a in zip(rt.xmode, alpha)) / fact
            if c == 0:
                continue
            for lt in dl.terms:
                deg = lt.degree + rt.degree
                if float(deg) < floor - 1e-9:
                    continue
                ang = lt.angular.matmul(rt.angular).scale(c)
                xm = tuple(a + b for a, b in zip(lt.xmode, rt.xmode))
                out.append(HomTerm(deg, ang, lt.sigma + rt.sigma, xm))
    return validate(SymbolExpansion(n, left.r, tuple(out), True))


def commutator(a: SymbolExpansion, b: SymbolExpansion, K: int) -> SymbolExpansion:
    return leibniz_compose(a, b, K) - leibniz_compose(b, a, K)


def _strict_product(u: Sequence[HomTerm], v: Sequence[HomTerm], floor):
    out = []
    for s in u:
        for t in v:
            deg = s.degree + t.degree
            if float(deg) < float(floor) - 1e-9:
                continue
            out.append(HomTerm(deg, s.angular.matmul(t.angular), s.sigma + t.sigma,
                               tuple(a + b for a, b in zip(s.xmode, t.xmode))))
    return out


def log_symbol(p: SymbolExpansion, J: int) -> SymbolExpansion:
    """Log-polyhomogeneous symbol of log P for a scalar-leading multiplier p.

    m log-term + log(c) I + sum_k (-1)^{k+1} u^k / k, with u = p/(c|xi|^m) - 1,
    truncated below degree -J.  The result is interpreted with the excision.
    """
    if not p.is_multiplier:
        raise NotMultiplier("log_symbol needs an x-independent symbol", "log_symbol")
    if not p.terms:
        raise NotScalarLeading("zero symbol has no logarithm", "log_symbol")
    top = p.terms[0]
    m = top.degree
    if not is_integer_degree(m) or m <= 0 or top.sigma:
        raise NotScalarLeading(f"leading degree {m} is not a positive integer", "log_symbol")
    heads = [t for t in p.terms if t.degree == m]
    c = top.angular.is_scalar_constant()
    if len(heads) != 1 or c is None or abs(c.imag) > 0 or c.real <= 0:
        raise NotScalarLeading("leading term is not c|xi|^m I with c > 0", "log_symbol")
    c = c.real
    u = []
    for t in p.terms[1:]:
        if t.sigma or not is_integer_degree(t.degree):
            raise NotScalarLeading(f"lower term of degree {t.degree}, sigma {t.sigma}", "log_symbol")
        u.append(HomTerm(t.degree - m, t.angular.scale(1.0 / c), 0, t.xmode))
    n, r = p.n, p.r
    terms = [HomTerm(0, Angular.identity(n, r, float(m)), 1),
             HomTerm(0, Angular.identity(n, r, math.log(c)), 0)]
    power = [t for t in u if float(t.degree) >= -J]
    k = 1
    while power:
        coef = (-1.0) ** (k + 1) / k
        terms.extend(HomTerm(t.degree, t.angular.scale(coef), t.sigma, t.xmode) for t in power)
        power = _strict_product(power, u, -J)
        k += 1
    return validate(SymbolExpansion(n, r, tuple(terms), False))
