"""Asymptotic fits of trace expansions and Laurent coefficients of zeta functions.

The heat trace h(t) = Tr(W exp(-tP)) is fitted near t = 0 by a linear
combination of t^e log^s t on the structural exponent grid.  The continuation of

    Gamma(s) zeta(W, P, s) = int_0^T t^{s-1} h dt + int_T^inf t^{s-1} h dt

uses the fitted expansion on [0, T] (exact Laurent arithmetic) and quadrature of
the lattice sum beyond T.  Dividing by Gamma uses the Taylor series of 1/Gamma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np
import sympy

from .errors import (FitMarginInsufficient, SymtraceError, IllConditioned, NonPositiveP, PreconditionError,
                     ResidualTooLarge, ZeroModeWithoutConvention)
from .quantize import (FunctionMultiplier, Multiplier, Product, SpectralSample, _pmap,
                       SymbolOperator, as_operator, choose_radius, commutator_word, spectral_log_power,
                       spectral_sample, spectral_sign, spectral_square)
from .symcore import SymbolExpansion, as_degree, classify_case, parity_classify, term

EULER_GAMMA = float(mpmath.euler)


# ---------------------------------------------------------------------------
# models and fits

def _exact(e):
    e = as_degree(e)
    return e


def _is_int(e):
    return isinstance(e, Fraction) and e.denominator == 1


@dataclass
class ExpansionModel:
    """Basis x^e log^s x on a structural exponent grid.

    kind 'heat': x = t -> 0, exponents (j - nu - n)/m and integers >= 0.
    kind 'resolvent': x = -lambda -> inf, exponents (nu + n - j)/m - N and -N - k.
    """

    kind: str
    basis: list
    nu: object = 0
    n: int = 1
    m: object = 2
    logdepth: int = 0
    N: int = 0
    e_max: object = 4

    @classmethod
    def heat(cls, nu, n, m, logdepth=0, e_max=4, j_max=None, regular_integers=False):
        """regular_integers drops log powers at integer exponents (parity cases)."""
        nu, m, e_max = _exact(nu), _exact(m), _exact(e_max)
        exps = set()
        j = 0
        while True:
            e = (j - nu - n) / m
            if float(e) > float(e_max) + 1e-12:
                break
            exps.add(_exact(e))
            j += 1
            if j_max is not None and j > j_max:
                break
        for k in range(0, int(math.floor(float(e_max))) + 1):
            exps.add(Fraction(k))
        basis = []
        for e in sorted(exps, key=float):
            if _is_int(e):
                smax = 0 if regular_integers else (logdepth + 1 if e >= 0 else logdepth)
            else:
                smax = logdepth
            basis.extend((e, s) for s in range(smax + 1))
        return cls("heat", basis, nu, n, m, logdepth, 0, e_max)

    @classmethod
    def resolvent(cls, nu, n, m, N, logdepth=0, depth=4):
        nu, m = _exact(nu), _exact(m)
        exps = set()
        lead = (nu + n) / m - N
        for j in range(0, int(depth * float(m)) + 1):
            exps.add(_exact(lead - Fraction(j) / m if isinstance(m, Fraction) else lead - j / m))
        for k in range(0, depth + 1):
            exps.add(Fraction(-N - k))
        basis = []
        for e in sorted(exps, key=float, reverse=True):
            if float(e) < float(lead) - depth - 1e-12:
                continue
            glob = _is_int(e) and e <= -N
            smax = logdepth + 1 if glob else logdepth
            basis.extend((e, s) for s in range(smax + 1))
        return cls("resolvent", basis, nu, n, m, logdepth, N, lead - depth)

    def design(self, x):
        x = np.asarray(x, dtype=float)
        lx = np.log(x)
        return np.stack([x ** float(e) * lx ** s for e, s in self.basis], axis=1)

    def reduced(self):
        """Same model with the highest (heat) or lowest (resolvent) exponent dropped."""
        if self.kind == "heat":
            top = max(float(e) for e, _ in self.basis)
            keep = [b for b in self.basis if float(b[0]) < top - 1e-12]
        else:
            bot = min(float(e) for e, _ in self.basis)
            keep = [b for b in self.basis if float(b[0]) > bot + 1e-12]
        return ExpansionModel(self.kind, keep, self.nu, self.n, self.m, self.logdepth, self.N,
                              self.e_max)


@dataclass
class ExpansionFit:
    model: ExpansionModel
    coef: dict
    stderr: dict
    residual: float
    condition: float
    cov: np.ndarray = field(repr=False, default=None)
    input_error: np.ndarray = field(repr=False, default=None)
    sensitivity: np.ndarray = field(repr=False, default=None)
    noise: np.ndarray = field(repr=False, default=None)

    def get(self, e, s=0):
        return self.coef.get((_exact(e), s), 0j)

    def err(self, e, s=0):
        return self.stderr.get((_exact(e), s), 0.0)

    def c_prime(self, k=0):
        """c'_k: the heat expansion carries -c'_k t^k log t."""
        return -self.get(k, 1)

    def c_dprime(self, k=0):
        return self.get(k, 0)

    def scale(self):
        return max((abs(v) for v in self.coef.values()), default=0.0)

    def record(self):
        return {"coefficients": [{"exponent": str(e), "log_power": s, "value": [v.real, v.imag],
                                  "stderr": self.stderr[(e, s)]}
                                 for (e, s), v in self.coef.items()],
                "residual": self.residual, "condition": self.condition}


def fit_expansion(x, y, model: ExpansionModel, tail_bounds=None, max_condition=1e12,
                  max_residual=None) -> ExpansionFit:
    """Weighted least squares of samples y(x) in the model basis."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=complex)
    p = len(model.basis)
    if len(x) < 2 * p:
        raise PreconditionError(f"{len(x)} samples for {p} basis functions (need {2 * p})",
                                "expansion fit")
    A = model.design(x)
    if model.kind == "heat":
        e_lead = min(float(e) for e, _ in model.basis)
    else:
        e_lead = max(float(e) for e, _ in model.basis)
    wt = x ** (-e_lead)
    Aw = A * wt[:, None]
    yw = y * wt
    colscale = np.linalg.norm(Aw, axis=0)
    colscale[colscale == 0] = 1.0
    As = Aw / colscale
    U, sv, Vt = np.linalg.svd(As, full_matrices=False)
    cond = float(sv[0] / sv[-1])
    if cond > max_condition:
        raise IllConditioned(f"design condition number {cond:.3e} > {max_condition:.1e}",
                             "expansion fit")
    pinv = (Vt.T / sv) @ U.T
    cs = pinv @ yw
    coef = cs / colscale
    res = yw - As @ cs
    resid = float(np.max(np.abs(res)))
    dof = max(len(x) - p, 1)
    s2 = float(np.sum(np.abs(res) ** 2)) / dof
    cov_s = (Vt.T / sv ** 2) @ Vt * s2
    cov = cov_s / np.outer(colscale, colscale)
    err = np.sqrt(np.maximum(np.diag(cov), 0))
    # deterministic input error: rounding of the lattice sums plus truncation tails
    noise = 4 * np.finfo(float).eps * np.abs(y)
    if tail_bounds is not None:
        noise = noise + np.asarray(tail_bounds, dtype=float)
    sens = (np.abs(pinv) / colscale[:, None]) * wt[None, :]
    if max_residual is not None and resid > max_residual:
        raise ResidualTooLarge(f"weighted residual {resid:.3e} > {max_residual:.1e}",
                               "expansion fit")
    keys = [(e, s) for e, s in model.basis]
    return ExpansionFit(model, dict(zip(keys, coef)), dict(zip(keys, err.tolist())), resid, cond,
                        cov, sens @ noise, sens, noise)


# ---------------------------------------------------------------------------
# Laurent arithmetic

def _falling(p, k):
    out = 1
    for i in range(k):
        out *= p - i
    return out


def mellin_basis_coeffs(e, s, T, r_lo, r_hi):
    """Laurent coefficients at s=0 of int_0^T t^{z+e-1} log^s t dt, orders r_lo..r_hi."""
    e = float(e)
    lT = math.log(T)
    out = {}
    if abs(e) < 1e-14:
        # d^s/dz^s of T^z / z = sum_i lT^i z^{i-1} / i!
        for r in range(r_lo, r_hi + 1):
            i = r + s + 1
            out[r] = 0.0 if i < 0 else lT ** i / math.factorial(i) * _falling(i - 1, s)
        return out
    for r in range(r_lo, r_hi + 1):
        if r < 0:
            out[r] = 0.0
            continue
        k = s + r
        tot = 0.0
        for i in range(k + 1):
            tot += math.comb(k, i) * lT ** (k - i) * (-1) ** i * math.factorial(i) / e ** (i + 1)
        out[r] = T ** e * tot / math.factorial(r)
    return out


@dataclass
class LaurentSeries:
    """Coefficients C_r of zeta(W, P, s) = sum_r C_r s^r near s = 0."""

    coeffs: dict
    errors: dict
    fit: Optional[ExpansionFit] = None
    meta: dict = field(default_factory=dict)

    def __getitem__(self, r):
        return self.coeffs.get(r, 0j)

    def error(self, r):
        return self.errors.get(r, 0.0)

    def record(self):
        return {"coefficients": {str(r): [v.real, v.imag] for r, v in sorted(self.coeffs.items())},
                "errors": {str(r): e for r, e in sorted(self.errors.items())}, **self.meta}


def _rgamma_taylor(order):
    with mpmath.workdps(30):
        return [float(c) for c in mpmath.taylor(mpmath.rgamma, 0, order)]


@dataclass
class ZetaConfig:
    t_fit_max: Optional[float] = None
    t_min: Optional[float] = None
    per_octave: int = 8
    e_max: Optional[float] = None
    tail_tol: float = 1e-14
    R: Optional[float] = None
    max_condition: float = 1e12
    quad_panels: int = 24
    regular_integers: bool = False

    def default_e_max(self, n):
        return self.e_max if self.e_max is not None else {1: 4, 2: 3.5}.get(n, 3)

    def fit_top(self, n, m=2):
        """Upper end of the fit window; default times scale as t^(m/2) so that
        t^(1/m) spans the same range for every order of P."""
        if self.t_fit_max is not None:
            return self.t_fit_max
        return {1: 2.0 ** -5}.get(n, 2.0 ** -4) ** (float(m) / 2)


def _heat_samples(sample: SpectralSample, t_min, t_max, per_octave):
    octaves = math.log2(t_max / t_min)
    count = max(int(math.ceil(octaves * per_octave)) + 1, 4)
    ts = np.exp(np.linspace(math.log(t_max), math.log(t_min), count))
    vals = np.array(_pmap(sample.heat, ts))
    tails = np.array([sample.plan.heat_tail(float(t)) for t in ts])
    # rounding of the exponentials: a few ulps of the absolute-value sum
    absw = np.abs(sample.weights)
    habs = np.array([float(np.sum(absw * np.exp(-t * sample.eigenvalues))) for t in ts])
    tails = tails + 4 * np.finfo(float).eps * habs
    return ts, vals, tails


def _prepare(w, P, config: ZetaConfig, need_positive=True):
    w = as_operator(w)
    m = float(P.order)
    if m <= 0:
        raise NonPositiveP("P must have positive order", "zeta")
    if config.R is not None:
        R = config.R
    elif config.t_min is not None:
        R = choose_radius(w, P, config.t_min, config.tail_tol)
    else:
        R = choose_radius(w, P, {1: 2.0 ** -24}.get(w.n, 1e-6) ** (m / 2), config.tail_tol)
    sample = spectral_sample(w, P, R, allow_zero=True)
    if sample.eigenvalues[0] <= 0:
        zero = sample.eigenvalues <= 0
        if np.any(sample.weights[zero] != 0):
            raise ZeroModeWithoutConvention("P has a zero mode carrying nonzero weight", "zeta")
        sample = SpectralSample(sample.weights[~zero], sample.eigenvalues[~zero], sample.plan,
                                0.0, sample.total_abs)
    sample.lam_min = float(sample.eigenvalues[0])
    if config.t_min is not None:
        t_min = config.t_min
    else:
        # smallest t whose heat tail is negligible at this radius
        plan = sample.plan
        t_min = (math.log(1 / config.tail_tol) + 6.0) / (plan.c_min * plan.R ** plan.m)
        t_min = max(t_min, 2.0 ** (-12 * m))
    tb = sample.plan.heat_tail(t_min)
    if tb > 1e-10:
        from .errors import TailBoundExceedsTolerance
        raise TailBoundExceedsTolerance(f"tail bound {tb:.2e} at t_min={t_min:.2e}", "zeta")
    return w, sample, t_min


def _design_condition(model, ts):
    e_lead = min(float(e) for e, _ in model.basis)
    A = model.design(ts) * (ts ** -e_lead)[:, None]
    A = A / np.linalg.norm(A, axis=0)
    sv = np.linalg.svd(A, compute_uv=False)
    return float(sv[0] / sv[-1])


def choose_model(w, P, ts, config: ZetaConfig):
    """Heat model with the largest e_max (half steps down from the default) that keeps
    the design condition a decade inside the guard.  An explicit e_max is used as given."""
    e_max = config.default_e_max(w.n)
    args = (w.order, w.n, P.order, w.logdepth)
    kw = {"regular_integers": config.regular_integers}
    if config.e_max is not None:
        return ExpansionModel.heat(*args, e_max, **kw)
    while True:
        model = ExpansionModel.heat(*args, e_max, **kw)
        if e_max <= 1 or _design_condition(model, ts) <= config.max_condition / 10:
            return model
        e_max -= 0.5


def heat_fit(w, P, config: ZetaConfig = None):
    """Sample the heat trace and fit the structural expansion."""
    config = config or ZetaConfig()
    w, sample, t_min = _prepare(w, P, config)
    ts, vals, tails = _heat_samples(sample, t_min, config.fit_top(w.n, P.order), config.per_octave)
    model = choose_model(w, P, ts, config)
    fit = fit_expansion(ts, vals, model, tails, config.max_condition)
    return fit, sample, (ts, vals, tails), t_min


def _upper_mellin(sample: SpectralSample, T, orders, panels):
    """(1/r!) int_T^inf t^{-1} log^r t h(t) dt for r in orders, with an error estimate."""
    lam0 = sample.lam_min
    scale = max(sample.total_abs, 1.0)
    t_end = (45.0 + math.log(scale)) / lam0
    u0, u1 = math.log(T), math.log(max(t_end, 2 * T))
    edges = np.linspace(u0, u1, panels + 1)
    res = {}
    for npts in (20, 12):
        x, wq = np.polynomial.legendre.leggauss(npts)
        half = (edges[1:] - edges[:-1]) / 2
        u = (((edges[:-1] + edges[1:]) / 2)[:, None] + half[:, None] * x[None, :]).ravel()
        wts = (half[:, None] * wq[None, :]).ravel()
        h = np.array(_pmap(sample.heat, np.exp(u)))
        res[npts] = {r: complex(np.sum(wts * h * u ** r)) / math.factorial(r) for r in orders}
    err = {r: abs(res[20][r] - res[12][r]) for r in orders}
    tail = scale * math.exp(-lam0 * t_end) / (lam0 * t_end)
    return res[20], {r: err[r] + tail * (1 + abs(u1)) ** r for r in orders}


def laurent_from_fit(fit: ExpansionFit, sample: SpectralSample, T: float, L: int,
                     panels: int = 24, upper=None):
    """Laurent coefficients C_r, r = -(l+1)..L, of zeta from a heat fit split at T."""
    l = fit.model.logdepth
    r_lo = -(l + 2)
    basis = fit.model.basis
    keys = list(basis)
    # F(s) = Gamma(s) zeta(s); F_r = sum_b J[r, b] c_b + E_r
    J = {r: np.zeros(len(keys)) for r in range(r_lo, L)}
    for b, (e, s) in enumerate(keys):
        co = mellin_basis_coeffs(e, s, T, r_lo, L - 1)
        for r in range(r_lo, L):
            J[r][b] = co[r]
    if upper is None:
        upper = _upper_mellin(sample, T, list(range(0, max(L, 1))), panels)
    E, Eerr = upper
    c = np.array([fit.coef[k] for k in keys])
    g = _rgamma_taylor(L - r_lo + 2)
    coeffs, errors = {}, {}
    for r in range(r_lo + 1, L + 1):
        vec = np.zeros(len(keys))
        const = 0j
        qerr = 0.0
        for i in range(1, len(g)):
            q = r - i
            if q < r_lo:
                break
            if q >= L:
                continue
            vec += g[i] * J[q]
            if q >= 0:
                const += g[i] * E.get(q, 0j)
                qerr += abs(g[i]) * Eerr.get(q, 0.0)
        coeffs[r] = complex(vec @ c + const)
        # propagate the per-sample input error through the linear map sample -> C_r
        inp = float(np.abs(vec @ fit.sensitivity) @ fit.noise) if fit.sensitivity is not None else 0.0
        errors[r] = inp + qerr
    return coeffs, errors


def zeta_laurent(w, P, L: int = 1, config: ZetaConfig = None) -> LaurentSeries:
    """Laurent coefficients of zeta(W, P, s) at s = 0 with an error budget."""
    config = config or ZetaConfig()
    fit, sample, data, t_min = heat_fit(w, P, config)
    e_top = max(float(e) for e, _ in fit.model.basis)
    if e_top < 1:
        raise FitMarginInsufficient(f"highest fitted exponent {e_top} < 1", "zeta")
    T = t_min
    upper = _upper_mellin(sample, T, list(range(0, max(L, 1))), config.quad_panels)
    coeffs, errors = laurent_from_fit(fit, sample, T, L, upper=upper)
    # model-truncation error: the larger change under a refit on the lower half of
    # the window or a refit without the top exponent
    ts, vals, tails = data
    t_top = float(ts.max())
    sub = ts <= t_top / 2 * (1 + 1e-12)
    trials = [(ts[sub], vals[sub], tails[sub], fit.model),
              (ts, vals, tails, fit.model.reduced())]
    shift = {r: 0.0 for r in coeffs}
    for x, y, tb, model in trials:
        try:
            alt = fit_expansion(x, y, model, tb, config.max_condition)
        except (IllConditioned, PreconditionError):
            continue
        alt_c, _ = laurent_from_fit(alt, sample, T, L, upper=upper)
        for r in coeffs:
            shift[r] = max(shift[r], abs(coeffs[r] - alt_c[r]))
    for r in coeffs:
        errors[r] += shift[r]
    meta = {"t_min": t_min, "t_fit_max": t_top, "R": sample.plan.R,
            "condition": fit.condition, "fit_residual": fit.residual,
            "split": T}
    return LaurentSeries(coeffs, errors, fit, meta)


# ---------------------------------------------------------------------------
# derived quantities

def identity_operator(n, r=1):
    eye = np.eye(r, dtype=complex)
    return FunctionMultiplier(lambda k: np.broadcast_to(eye, (k.shape[0], r, r)).copy(), n, r,
                              order=0, name="I", symbol=term(n, 0, eye if r > 1 else None, r=r))


def symbol_of(op):
    """Symbol expansion attached to an operator, or None."""
    if isinstance(op, SymbolExpansion):
        return op
    if isinstance(op, SymbolOperator):
        return op.sym
    if isinstance(op, Multiplier):
        try:
            return op.symbol()
        except PreconditionError:
            return None
    return getattr(op, "symbol_meta", None)


def parity_regular(A, P) -> bool:
    """True when A is in a parity case and P is even-even, so zeta(A (log P)^l, P, s) is
    regular at the non-positive integers and the heat expansion has no logs there."""
    a, p = symbol_of(A), symbol_of(P)
    if a is None or p is None:
        return False
    try:
        return classify_case(a) in ("case3", "case4") and parity_classify(p) == "even-even"
    except SymtraceError:
        return False


def _log_power_factor(P, l):
    if P.r == 1:
        def f(k):
            v = P.values(k)[:, 0, 0].real
            if np.any(v <= 0):
                raise NonPositiveP("log of a non-positive value", "log power")
            return ((-np.log(v)) ** l)[:, None, None].astype(complex)
        return FunctionMultiplier(f, P.n, 1, order=0, logdepth=l,
                                  name=f"(-log {getattr(P, 'name', 'P')})^{l}")
    return spectral_log_power(P, l)


def higher_laurent(A, P, l: int, config: ZetaConfig = None):
    """C_l(A, P) = C_0(A (-log P)^l, P) / l!; returns (value, error).

    Without an explicit config the log-free integer model is used when the symbols of A
    and P put the pair in a parity case.
    """
    if config is None:
        config = ZetaConfig(regular_integers=parity_regular(A, P))
    if l == 0:
        ser = zeta_laurent(A, P, 0, config)
        return ser[0], ser.error(0)
    w = Product([as_operator(A), _log_power_factor(P, l)])
    ser = zeta_laurent(w, P, 0, config)
    f = math.factorial(l)
    return ser[0] / f, ser.error(0) / f


def log_det(P, config: ZetaConfig = None):
    """log det P = -d/ds zeta(I, P, s) at 0 = -C_1(I, P); returns (value, error)."""
    ser = zeta_laurent(identity_operator(P.n, P.r), P, 1, config)
    return -ser[1].real, ser.error(1)


def eta_value(D, config: ZetaConfig = None):
    """eta(D, 0) = C_0 of zeta(D|D|^{-1}, D^2, s); zero modes of D are dropped."""
    S = spectral_sign(D)
    P2 = spectral_square(D)
    ser = zeta_laurent(S, P2, 0, config)
    return ser[0].real, ser.error(0), ser


def mult_anomaly(A, B, config: ZetaConfig = None):
    """log det(AB) - log det A - log det B for commuting multipliers."""
    if isinstance(A, Multiplier) and isinstance(B, Multiplier):
        AB = Multiplier(A.expr * B.expr, A.n, order=float(A.order) + float(B.order),
                        name=f"({A.name})*({B.name})")
    else:
        AB = FunctionMultiplier(lambda k: A.values(k) @ B.values(k), A.n, A.r,
                                order=float(A.order) + float(B.order))
    ab, e1 = log_det(AB, config)
    a, e2 = log_det(A, config)
    b, e3 = log_det(B, config)
    return ab - a - b, e1 + e2 + e3, {"logdet_AB": ab, "logdet_A": a, "logdet_B": b}


def quasitrace_defect(A, P, Pp, config: ZetaConfig = None):
    s1 = zeta_laurent(A, P, 0, config)
    s2 = zeta_laurent(A, Pp, 0, config)
    return s1[0] - s2[0], s1.error(0) + s2.error(0), (s1, s2)


def commutator_c0(A, Ap, P, config: ZetaConfig = None):
    ser = zeta_laurent(commutator_word(A, Ap), P, 0, config)
    return ser[0], ser.error(0), ser


def tr_log_route(P, J: int = 8):
    """TR(log P) = fp int log p dxi + sum_{j != 0} hat{log p}(2 pi j) for a scalar multiplier on T^1.

    The finite part splits into the exact finite part of the log-polyhomogeneous
    expansion plus the convergent integral of the remainder.  Returns (value, error, parts).
    """
    from scipy import integrate

    from .fpint import finite_part
    from .quantize import poisson_correction
    if P.n != 1 or P.r != 1:
        raise PreconditionError("the TR(log P) route is implemented for scalar P on T^1",
                                "TR(log P)")
    logP = P.log(J)
    ell = logP.symbol_meta
    fp_sym = finite_part(ell).integrate()

    def rem(x):
        xs = np.array([[x], [-x]], dtype=float)
        g = logP.values(xs)[:, 0, 0]
        a = ell.evaluate(xs)[:, 0, 0]
        return float((g - a).real.sum())

    i1, e1 = integrate.quad(rem, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    # beyond X the remainder is below roundoff of g - ell; bound its tail by the
    # first omitted power (degree below -J) instead of integrating noise
    X = 16.0
    i2, e2 = integrate.quad(rem, 1.0, X, epsabs=1e-15, epsrel=1e-13, limit=400)
    e2 += abs(rem(X)) * X / J + 1e-15 * X
    pc = poisson_correction(logP)
    value = fp_sym.real + i1 + i2 + pc.total.real
    parts = {"fp_expansion": fp_sym.real, "remainder_integral": i1 + i2,
             "poisson": pc.total.real, "poisson_terms": pc.j_max}
    return value, e1 + e2 + pc.remainder, parts
