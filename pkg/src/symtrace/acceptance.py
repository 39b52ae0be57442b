"""Acceptance criteria 1-10 as functions returning structured pass/fail results.

Shared by tests/test_acceptance.py and the ``suite`` command.  Tolerances live
in ``Tolerances``; the defaults are the target values.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np
import sympy

from . import oracles
from .asympt import (ZetaConfig, commutator_c0, eta_value, heat_fit, higher_laurent,
                     identity_operator, log_det, quasitrace_defect, tr_log_route, zeta_laurent)
from .fpint import (finite_part, fp_strict_hom, mu_cutoff_profile, residue, residue_commutator,
                    residue_defect)
from .io import parse_operand, parse_symbol
from .quantize import Multiplier, gaussian, operator_trace, poisson_correction
from .symcore import Angular, classify_case, classify_pair, symbol_sum, term


@dataclass
class Tolerances:
    fp_rel: float = 1e-8
    mu_profile: float = 1e-6
    c2_trace: float = 1e-5
    c2_pole: float = 1e-6
    poisson: float = 1e-8
    residue_link: float = 1e-3
    parity_log: float = 1e-5
    parity_coef: float = 1e-4
    parity_c0: float = 1e-4
    parity_pole: float = 1e-4
    defect: float = 1e-3
    commutator_zero: float = 1e-4
    commutator_residue: float = 1e-3
    zeta0: float = 1e-6
    logdet: float = 1e-6
    laurent_l1: float = 1e-4
    tr_log: float = 1e-3
    eta_sym: float = 1e-6
    eta_t2: float = 1e-4
    higher: float = 1e-3


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        worst = max((c["error"] / c["tol"] for c in self.checks if c["tol"] > 0), default=0.0)
        return (f"[{status}] criterion {self.number:2d}: {self.title} "
                f"({len(self.checks)} checks, worst error/tol {worst:.2e}, {self.seconds:.1f}s)")

    def record(self):
        return asdict(self)


class _Checks:
    def __init__(self):
        self.items = []

    def close(self, name, value, target, tol, relative=False):
        value, target = complex(value), complex(target)
        err = abs(value - target)
        if relative:
            err /= max(abs(target), 1e-300)
        self.items.append({"name": name, "value": [value.real, value.imag],
                           "target": [target.real, target.imag], "error": float(err),
                           "tol": float(tol), "ok": bool(err <= tol)})

    def small(self, name, value, tol):
        self.close(name, value, 0.0, tol)

    def true(self, name, cond):
        self.items.append({"name": name, "value": bool(cond), "target": True,
                           "error": 0.0 if cond else 1.0, "tol": 0.0, "ok": bool(cond)})

    @property
    def ok(self):
        return all(c["ok"] for c in self.items)


def _run(number, title, fn, tol):
    t0 = time.perf_counter()
    chk = _Checks()
    fn(chk, tol)
    return CriterionResult(number, title, chk.ok, chk.items, time.perf_counter() - t0)


def corpus_file(name):
    return resources.files("symtrace").joinpath("corpus", f"{name}.json")


def load_corpus(name):
    path = corpus_file(name)
    return parse_operand(path.read_text(), str(name))[0]


def fp_corpus():
    out = []
    for i in range(1, 21):
        name = f"fp{i:02d}"
        sym, _ = parse_symbol(corpus_file(name).read_text(), name)
        out.append((name, sym))
    return out


def _dbar_fp(sym):
    """Finite part in the normalized measure (2 pi)^-n d xi used by the cutoff profile."""
    return np.trace(finite_part(sym).mode())


# ---------------------------------------------------------------------------

def _c1(chk, tol):
    for name, sym in fp_corpus():
        fp = finite_part(sym).integrate()
        ref = oracles.fp_quadrature(sym)
        chk.close(f"{name} fp vs quadrature", fp, ref, tol.fp_rel, relative=True)
    for n in (1, 2):
        for alpha in [(0,) * n, (2,) + (0,) * (n - 1), (1,) * n, (3,) + (1,) * (n - 1)]:
            ang = Angular(n, 1, {(0, 0, alpha): 1.0})
            v = fp_strict_hom(sum(alpha), 0, ang, n)
            chk.true(f"fp_strict_hom xi^{alpha} == 0", np.all(v == 0))
    for name, sym in fp_corpus()[:6] + fp_corpus()[11:14]:
        prof = mu_cutoff_profile(sym)
        chk.close(f"{name} cutoff constant", prof.constant, _dbar_fp(sym), tol.mu_profile)
    for sym in (term(1, 1), symbol_sum([term(1, 0), term(1, -1, sigma=1)])):
        prof = mu_cutoff_profile(sym)
        chk.close(f"cutoff constant order {sym.order}", prof.constant, _dbar_fp(sym),
                  tol.mu_profile)


def _c2(chk, tol):
    P = Multiplier("k**2 + 1", 1)
    A = term(1, -3)
    ser = zeta_laurent(A, P, 0)
    fit = ser.fit
    ref = oracles.two_zeta(3)
    tr = operator_trace(A)
    chk.close("operator_trace = 2 zeta(3)", tr.value, ref, tol.c2_trace)
    chk.close("heat fit c''_0 = 2 zeta(3)", fit.c_dprime(0), ref, tol.c2_trace)
    chk.small("heat fit c'_0", fit.c_prime(0), tol.c2_pole)
    for (e, s), v in fit.coef.items():
        if float(e) < 0:
            chk.small(f"pole coefficient t^{e} log^{s}", v, tol.c2_pole)
    chk.small("C_{-1}", ser[-1], tol.c2_pole)
    chk.close("C_0 = operator_trace", ser[0], tr.value, tol.c2_trace)


def _c3(chk, tol):
    for name in ("fp01", "fp03", "fp06", "fp07", "fp11"):
        sym = parse_symbol(corpus_file(name).read_text(), name)[0]
        tr = operator_trace(sym)
        fp = finite_part(sym).integrate()
        pc = poisson_correction(sym)
        chk.close(f"{name} trace = fp + Poisson", tr.value, fp + pc.total, tol.poisson)
    g = gaussian(1)
    tr = operator_trace(g)
    pc = poisson_correction(g)
    chk.close("gaussian T^1 trace = integral + Poisson", tr.value,
              oracles.gaussian_integral(1) + pc.total, tol.poisson)
    chk.close("gaussian T^1 trace = Jacobi theta", tr.value, oracles.jacobi_theta_sum(1),
              tol.poisson)
    g2 = gaussian(2, 0.5)
    tr = operator_trace(g2)
    pc = poisson_correction(g2)
    chk.close("gaussian T^2 trace = integral + Poisson", tr.value,
              oracles.gaussian_integral(2, 0.5) + pc.total, tol.poisson)
    chk.close("gaussian T^2 trace = Jacobi theta", tr.value, oracles.jacobi_theta_sum(2, 0.5),
              tol.poisson)


def _c4(chk, tol):
    A = term(1, -1)
    P = Multiplier("k**2 + 1", 1)
    x = sympy.Symbol("x", real=True)
    chk.close("residue (symbol side)", residue(A), 2.0, 1e-12)
    chk.close("residue (series oracle)", oracles.residue_series_1d(1 / sympy.Abs(x), x), 2.0, 1e-12)
    ser = zeta_laurent(A, P, 0)
    chk.close("m c'_0 = residue", 2 * ser.fit.c_prime(0), residue(A), tol.residue_link)
    chk.close("C_{-1} = residue / m", ser[-1], 1.0, tol.residue_link)


def _parity_fit_checks(chk, tol, label, ser):
    fit = ser.fit
    scale = fit.scale()
    chk.small(f"{label}: log coefficient c'_0 / scale", fit.c_prime(0) / scale, tol.parity_log)
    for (e, s), v in fit.coef.items():
        if e.denominator == 1 and e < 0:
            chk.small(f"{label}: t^{e} log^{s} / scale", v / scale, tol.parity_coef)
    chk.small(f"{label}: C_(-1)", ser[-1], tol.parity_pole)


def _c5(chk, tol):
    P, Pp = Multiplier("k**2 + 1", 1), Multiplier("2*k**2 + 3", 1)
    t1 = {
        "theta": term(1, 0),
        "theta(|xi|^2 + 1)": symbol_sum([term(1, 2), term(1, 0)]),
        "theta(1 + omega/|xi| + |xi|^-2)": symbol_sum([term(1, 0), term(1, -1, {(1,): 1.0}),
                                                       term(1, -2)]),
        "theta |xi|^-2 + e^{ix} theta": symbol_sum([term(1, -2), term(1, 0, xmode=(1,))]),
    }
    for label, A in t1.items():
        chk.true(f"{label} is case3", classify_case(A) == "case3")
        s1, s2 = zeta_laurent(A, P, 0), zeta_laurent(A, Pp, 0)
        _parity_fit_checks(chk, tol, f"T1 {label} / P", s1)
        _parity_fit_checks(chk, tol, f"T1 {label} / P'", s2)
        chk.close(f"T1 {label}: C_0(A,P) = C_0(A,P')", s1[0], s2[0], tol.parity_c0)
    P2, P2p = Multiplier("k1**2 + k2**2 + 1", 2), Multiplier("k1**2 + k2**2 + 2", 2)
    t2 = {
        "theta(omega_1 + |xi|^-1)": symbol_sum([term(2, 0, {(1, 0): 1.0}), term(2, -1)]),
        "theta(omega_1 omega_2^2 + 2|xi|^-1 + omega_2 |xi|^-2)": symbol_sum(
            [term(2, 0, {(1, 2): 1.0}), term(2, -1, 2.0), term(2, -2, {(0, 1): 1.0})]),
    }
    for label, A in t2.items():
        chk.true(f"{label} is case4", classify_case(A) == "case4")
        s1, s2 = zeta_laurent(A, P2, 0), zeta_laurent(A, P2p, 0)
        _parity_fit_checks(chk, tol, f"T2 {label} / P", s1)
        _parity_fit_checks(chk, tol, f"T2 {label} / P'", s2)
        chk.close(f"T2 {label}: C_0(A,P) = C_0(A,P')", s1[0], s2[0], tol.parity_c0)


def _c6(chk, tol):
    x = sympy.Symbol("x", real=True)
    expected = oracles.residue_defect_series(sympy.Abs(x), x ** 2 + 1, x ** 2 + 2, x, 2)
    chk.close("series oracle = 1", expected, 1.0, 1e-12)
    A = term(1, 1)
    P, Pp = Multiplier("k**2 + 1", 1), Multiplier("k**2 + 2", 1)
    rd = residue_defect(A, P.symbol(), Pp.symbol())
    chk.close("residue_defect = oracle", rd, expected, 1e-10)
    d, err, _ = quasitrace_defect(A, P, Pp)
    chk.close("spectral defect = residue_defect", d, rd, tol.defect)


def _c7(chk, tol):
    P1 = Multiplier("k**2 + 1", 1)
    P2 = Multiplier("k1**2 + k2**2 + 1", 2)
    cases = [
        ("case2'", load_corpus("shift_half"), load_corpus("shift_quarter"), P1),
        ("case3'", load_corpus("shift_abs2"), load_corpus("shift_back"), P1),
        ("case4'", load_corpus("t2_odd_shift"), load_corpus("t2_back"), P2),
    ]
    for label, a, b, P in cases:
        chk.true(f"{label} classified", classify_pair(a, b) == label)
        v, err, ser = commutator_c0(a, b, P)
        scale = max(ser.fit.scale(), 1.0)
        chk.small(f"{label}: C_0([A,A'],P) / scale", v / scale, tol.commutator_zero)
    a, b = load_corpus("shift_abs1"), load_corpus("shift_back")
    chk.true("outside the cases", classify_pair(a, b) == "none")
    rc = residue_commutator(a, b, P1.symbol())
    chk.close("residue_commutator = regularized diagonal sum", rc, oracles.commutator_sum_oracle(),
              1e-10)
    v, err, _ = commutator_c0(a, b, P1)
    chk.close("C_0([A,A'],P) = residue_commutator", v, rc, tol.commutator_residue)


def _c8(chk, tol):
    P = Multiplier("k**2 + 1", 1)
    closed = oracles.logdet_shifted_square(1.0)
    chk.close("closed form = Bessel continuation", closed, oracles.logdet_continuation(1.0), 1e-12)
    ser = zeta_laurent(identity_operator(1), P, 1)
    chk.small("zeta(I,P,0)", ser[0], tol.zeta0)
    chk.small("C_(-1)", ser[-1], tol.zeta0)
    chk.close("log det = -C_1", -ser[1], closed, tol.logdet)
    ld, _ = log_det(P)
    chk.close("log_det vs log(4 sinh^2 pi)", ld, closed, tol.logdet)
    c1, _ = higher_laurent(identity_operator(1), P, 1)
    chk.close("C_0((-log P) I, P) = C_1", c1, ser[1], tol.laurent_l1)
    tr, _, _ = tr_log_route(P)
    chk.close("TR(log P) = -zeta'(0)", tr, -ser[1], tol.tr_log)


def _c9(chk, tol):
    D = load_corpus("D_half")
    v, err, _ = eta_value(D)
    chk.small("eta(k + 1/2)", v, tol.eta_sym)
    a1, a2 = 0.25, 0.1
    for eps, mass in ((0.5, 0.0), (0.8, 0.0), (-0.5, 0.3)):
        k1, k2 = sympy.symbols("xi1 xi2", real=True)
        D = Multiplier(sympy.Matrix([[eps + mass, (k1 + a1) - sympy.I * (k2 + a2)],
                                     [(k1 + a1) + sympy.I * (k2 + a2), eps - mass]]), 2,
                       name=f"dirac(eps={eps}, mass={mass})")
        ref = oracles.eta_dirac_t2((a1, a2), eps, mass)
        v, err, _ = eta_value(D)
        chk.close(f"eta Dirac T^2 eps={eps} mass={mass}", v, ref, tol.eta_t2)


def _c10(chk, tol):
    P = Multiplier("k**2 + 1", 1)
    ser = zeta_laurent(identity_operator(1), P, 2)
    c2, e2 = higher_laurent(identity_operator(1), P, 2)
    chk.close("C_2 = (1/2) C_0((-log P)^2, P)", ser[2], c2, tol.higher)
    chk.small("combined error budget", ser.error(2) + e2, tol.higher)
    ref = oracles.laurent_shifted_square(1.0, 2)[2]
    chk.close("C_2 vs Bessel continuation", ser[2], ref, tol.higher)


CRITERIA = {
    1: ("finite part vs quadrature, homogeneous fp, cutoff profile", _c1),
    2: ("heat fit of theta|xi|^-3: c''_0 = Tr A = 2 zeta(3)", _c2),
    3: ("operator trace = fp + Poisson correction", _c3),
    4: ("residue = m c'_0 = m C_-1", _c4),
    5: ("parity cases: no logs, regular zeta, P-independent C_0", _c5),
    6: ("quasi-trace defect = residue defect", _c6),
    7: ("commutators vanish in the cases, residue formula outside", _c7),
    8: ("zeta(0), log det, C_1 routes, TR(log P)", _c8),
    9: ("eta invariants", _c9),
    10: ("C_2 two routes", _c10),
}


def run_criterion(number: int, tol: Tolerances = None) -> CriterionResult:
    title, fn = CRITERIA[number]
    return _run(number, title, fn, tol or Tolerances())


def run_suite(numbers=None, tol: Tolerances = None, echo=None):
    out = []
    for k in numbers or sorted(CRITERIA):
        res = run_criterion(k, tol)
        if echo:
            echo(res.line())
        out.append(res)
    return out
