"""Command line front end: one subcommand per computation, JSON run records out."""
from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import CRITERIA, Tolerances, run_suite
from .asympt import (ZetaConfig, commutator_c0, eta_value, log_det, mult_anomaly,
                     quasitrace_defect, zeta_laurent)
from .errors import PreconditionError, SymtraceError
from .fpint import finite_part, residue, residue_commutator, residue_defect
from .io import file_hash, read_operand, to_jsonable
from .quantize import (FunctionMultiplier, Multiplier, choose_radius, heat_trace,
                       operator_trace, poisson_correction, resolvent_trace)
from .symcore import SymbolExpansion, classify_case, classify_pair

SUITE_FAILED = 5


@dataclass
class RunRecord:
    command: str
    inputs: dict
    config: dict
    outputs: dict
    errors: dict = field(default_factory=dict)
    version: str = __version__
    timestamp: str = ""

    def to_json(self):
        return json.dumps(to_jsonable(asdict(self)), indent=2, sort_keys=False)


class _Run:
    def __init__(self, args):
        self.args = args
        self.inputs = {}

    def operand(self, path, role):
        obj, meta = read_operand(path)
        self.inputs[role] = {"path": str(path), "sha256": file_hash(path), **meta}
        return obj

    def symbol(self, path, role):
        obj = self.operand(path, role)
        if isinstance(obj, SymbolExpansion):
            return obj
        if isinstance(obj, Multiplier):
            return obj.symbol()
        raise PreconditionError(f"{path} has no symbol expansion", self.args.command)

    def multiplier(self, path, role):
        obj = self.operand(path, role)
        if not isinstance(obj, FunctionMultiplier):
            raise PreconditionError(f"{path} is not a multiplier file", self.args.command)
        return obj

    def need(self, name):
        v = getattr(self.args, name, None)
        if v is None:
            raise PreconditionError(f"--{name.replace('_', '-')} is required",
                                    self.args.command)
        return v


def zeta_config(args) -> ZetaConfig:
    cfg = ZetaConfig()
    if getattr(args, "tmin", None) is not None:
        cfg.t_min = args.tmin
    if getattr(args, "tmax", None) is not None:
        cfg.t_fit_max = args.tmax
    if getattr(args, "radius", None) is not None:
        cfg.R = args.radius
    if getattr(args, "tol", None) is not None:
        cfg.tail_tol = args.tol
    return cfg


def _c(v):
    v = complex(v)
    return [v.real, v.imag]


# ---------------------------------------------------------------------------
# commands; each returns (outputs, error budgets, config dict)

def cmd_case(run, a):
    syms = [run.symbol(p, f"A{i}") for i, p in enumerate(a.symbols)]
    if len(syms) == 1:
        label = classify_case(syms[0])
    elif len(syms) == 2:
        label = classify_pair(syms[0], syms[1])
    else:
        raise PreconditionError("case takes one or two symbol files", "case")
    print(label)
    return {"case": label}, {}, {}


def cmd_fp(run, a):
    sym = run.symbol(a.symbol, "A")
    dens = finite_part(sym)
    out = {"value": _c(dens.integrate()),
           "density": {",".join(map(str, f)): np.asarray(m) for f, m in sorted(dens.modes.items())},
           "breakdown": dens.breakdown}
    print(f"fp = {dens.integrate():.15g}")
    return out, {}, {}


def cmd_tr(run, a):
    w = run.operand(a.symbol, "A")
    tv = operator_trace(w, R=a.radius, tol=a.tol)
    out = {"trace": tv.record()}
    budget = {"tail_bound": tv.tail_bound}
    if isinstance(w, SymbolExpansion) and w.is_multiplier and w.n == 1:
        fp = finite_part(w).integrate()
        pc = poisson_correction(w)
        out.update(fp=_c(fp), poisson=_c(pc.total), poisson_terms=pc.j_max,
                   fp_plus_poisson=_c(fp + pc.total))
        budget["poisson_remainder"] = pc.remainder
    print(f"Tr = {tv.value:.15g}  (tail bound {tv.tail_bound:.2e}, R = {tv.R:g})")
    return out, budget, {"radius": a.radius, "tol": a.tol}


def cmd_res(run, a):
    sym = run.symbol(a.symbol, "A")
    v = residue(sym)
    print(f"res = {v.real!r}" if v.imag == 0 else f"res = {v!r}")
    return {"residue": _c(v)}, {}, {}


def _grid(lo, hi, per_octave):
    if not (0 < lo < hi):
        raise PreconditionError("need 0 < lower < upper for the grid", "grid")
    k = int(np.ceil(np.log2(hi / lo) * per_octave))
    return np.geomspace(lo, hi, k + 1)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        wr.writerows(rows)


def cmd_heat(run, a):
    w = run.operand(a.symbol, "A")
    P = run.multiplier(run.need("P"), "P")
    tmin = a.tmin if a.tmin is not None else 2.0 ** -12
    tmax = a.tmax if a.tmax is not None else 1.0
    ts = _grid(tmin, tmax, a.per_octave)
    R = a.radius or choose_radius(w, P, float(ts.min()), a.tol or 1e-14)
    vals = heat_trace(w, P, ts, R=R, tol=a.tol)
    rows = [(v.t, v.value.real, v.value.imag, v.tail_bound) for v in vals]
    if a.csv:
        _write_csv(a.csv, ["t", "re", "im", "tail_bound"], rows)
    print(f"{len(rows)} heat samples, t in [{tmin:g}, {tmax:g}], R = {R:g}")
    return ({"samples": [v.record() for v in vals]},
            {"max_tail_bound": max(r[3] for r in rows)},
            {"tmin": tmin, "tmax": tmax, "per_octave": a.per_octave, "radius": R, "tol": a.tol})


def cmd_resolvent(run, a):
    w = run.operand(a.symbol, "A")
    P = run.multiplier(run.need("P"), "P")
    N = run.need("N")
    lams = -_grid(a.lam_min, a.lam_max, a.per_octave)
    vals = resolvent_trace(w, P, lams, N, R=a.radius or 2000, tol=a.tol)
    rows = [(v.lam, v.value.real, v.value.imag, v.tail_bound) for v in vals]
    if a.csv:
        _write_csv(a.csv, ["lambda", "re", "im", "tail_bound"], rows)
    print(f"{len(rows)} resolvent samples, N = {N}")
    return ({"samples": [v.record() for v in vals]},
            {"max_tail_bound": max(r[3] for r in rows)},
            {"N": N, "lam_min": a.lam_min, "lam_max": a.lam_max, "radius": a.radius or 2000})


def cmd_zeta(run, a):
    w = run.operand(a.symbol, "A")
    P = run.multiplier(run.need("P"), "P")
    cfg = zeta_config(a)
    ser = zeta_laurent(w, P, a.laurent_order, cfg)
    for r in sorted(ser.coeffs):
        print(f"C_{r} = {ser[r]:.12g}  +- {ser.error(r):.1e}")
    out = ser.record()
    out["heat_fit"] = ser.fit.record()
    return out, {str(r): ser.error(r) for r in ser.coeffs}, asdict(cfg)


def cmd_logdet(run, a):
    P = run.multiplier(run.need("P"), "P")
    cfg = zeta_config(a)
    v, err = log_det(P, cfg)
    print(f"log det = {v.real:.12g}  +- {err:.1e}")
    return {"logdet": _c(v)}, {"logdet": err}, asdict(cfg)


def cmd_eta(run, a):
    D = run.multiplier(a.symbol, "D")
    cfg = zeta_config(a)
    v, err, ser = eta_value(D, cfg)
    print(f"eta = {v:.12g}  +- {err:.1e}")
    return {"eta": v, "zeta": ser.record()}, {"eta": err}, asdict(cfg)


def cmd_defect(run, a):
    w = run.operand(a.symbol, "A")
    P = run.multiplier(run.need("P"), "P")
    Pp = run.multiplier(run.need("Pprime"), "Pprime")
    cfg = zeta_config(a)
    d, err, (s1, s2) = quasitrace_defect(w, P, Pp, cfg)
    out = {"defect": _c(d), "C0_P": _c(s1[0]), "C0_Pprime": _c(s2[0])}
    sym = w if isinstance(w, SymbolExpansion) else w.symbol() if isinstance(w, Multiplier) else None
    if sym is not None:
        rd = residue_defect(sym, P.symbol(), Pp.symbol())
        out["residue_defect"] = _c(rd)
        print(f"defect = {d:.12g}  +- {err:.1e};  residue formula = {rd:.12g}")
    else:
        print(f"defect = {d:.12g}  +- {err:.1e}")
    return out, {"defect": err}, asdict(cfg)


def cmd_commutator(run, a):
    A = run.operand(a.symbols[0], "A")
    Ap = run.operand(a.symbols[1], "Aprime")
    P = run.multiplier(run.need("P"), "P")
    cfg = zeta_config(a)
    v, err, _ = commutator_c0(A, Ap, P, cfg)
    out = {"C0_commutator": _c(v)}
    if isinstance(A, SymbolExpansion) and isinstance(Ap, SymbolExpansion):
        out["case"] = classify_pair(A, Ap)
        rc = residue_commutator(A, Ap, P.symbol())
        out["residue_commutator"] = _c(rc)
        print(f"{out['case']}: C_0([A,A'],P) = {v:.12g}  +- {err:.1e};  residue formula = {rc:.12g}")
    else:
        print(f"C_0([A,A'],P) = {v:.12g}  +- {err:.1e}")
    return out, {"C0_commutator": err}, asdict(cfg)


def cmd_anomaly(run, a):
    A = run.multiplier(a.symbols[0], "A")
    B = run.multiplier(a.symbols[1], "B")
    cfg = zeta_config(a)
    v, err, parts = mult_anomaly(A, B, cfg)
    print(f"log det AB - log det A - log det B = {v:.12g}  +- {err:.1e}")
    return {"anomaly": _c(v), **{k: _c(x) for k, x in parts.items()}}, {"anomaly": err}, asdict(cfg)


def cmd_suite(run, a):
    tol = Tolerances()
    if a.tol_scale != 1.0:
        tol = Tolerances(**{f.name: getattr(tol, f.name) * a.tol_scale for f in fields(tol)})
    numbers = a.criteria or sorted(CRITERIA)
    results = run_suite(numbers, tol, echo=print)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    out = {"criteria": [r.record() for r in results], "passed": passed, "total": len(results)}
    return out, {}, {"level": a.level, "tolerances": asdict(tol)}


# ---------------------------------------------------------------------------

def _common(p, zeta=False):
    p.add_argument("--out", help="write the run record JSON here")
    p.add_argument("--radius", type=float, help="lattice truncation radius R")
    p.add_argument("--tol", type=float, help="tail tolerance")
    if zeta:
        p.add_argument("--tmin", type=float, help="smallest heat time")
        p.add_argument("--tmax", type=float, help="largest heat time used in the fit")


def build_parser():
    ap = argparse.ArgumentParser(prog="symtrace", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("case", help="parity class of a symbol or a pair")
    p.add_argument("symbols", nargs="+")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_case)

    for name, fn, text in (("fp", cmd_fp, "finite-part density and integral"),
                           ("res", cmd_res, "residue")):
        p = sub.add_parser(name, help=text)
        p.add_argument("symbol")
        p.add_argument("--out")
        p.set_defaults(fn=fn)

    p = sub.add_parser("tr", help="operator trace of a trace-class operand")
    p.add_argument("symbol")
    _common(p)
    p.set_defaults(fn=cmd_tr)

    p = sub.add_parser("heat", help="heat traces on a geometric t grid")
    p.add_argument("symbol")
    p.add_argument("--P", required=True)
    p.add_argument("--per-octave", type=int, default=4)
    p.add_argument("--csv")
    _common(p, zeta=True)
    p.set_defaults(fn=cmd_heat)

    p = sub.add_parser("resolvent", help="resolvent traces on a geometric grid of -lambda")
    p.add_argument("symbol")
    p.add_argument("--P", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--lam-min", type=float, default=1.0)
    p.add_argument("--lam-max", type=float, default=1e4)
    p.add_argument("--per-octave", type=int, default=2)
    p.add_argument("--csv")
    _common(p)
    p.set_defaults(fn=cmd_resolvent)

    p = sub.add_parser("zeta", help="Laurent coefficients of zeta(A, P, s) at s = 0")
    p.add_argument("symbol")
    p.add_argument("--P", required=True)
    p.add_argument("--laurent-order", type=int, default=1)
    _common(p, zeta=True)
    p.set_defaults(fn=cmd_zeta)

    p = sub.add_parser("logdet", help="zeta-regularized log determinant of P")
    p.add_argument("--P", required=True)
    _common(p, zeta=True)
    p.set_defaults(fn=cmd_logdet)

    p = sub.add_parser("eta", help="eta invariant of a self-adjoint multiplier")
    p.add_argument("symbol")
    _common(p, zeta=True)
    p.set_defaults(fn=cmd_eta)

    p = sub.add_parser("defect", help="C_0(A, P) - C_0(A, P') and the residue formula")
    p.add_argument("symbol")
    p.add_argument("--P", required=True)
    p.add_argument("--Pprime", required=True)
    _common(p, zeta=True)
    p.set_defaults(fn=cmd_defect)

    p = sub.add_parser("commutator-check", help="C_0 of a commutator [A, A']")
    p.add_argument("symbols", nargs=2)
    p.add_argument("--P", required=True)
    _common(p, zeta=True)
    p.set_defaults(fn=cmd_commutator)

    p = sub.add_parser("anomaly", help="multiplicative anomaly of two commuting multipliers")
    p.add_argument("symbols", nargs=2)
    _common(p, zeta=True)
    p.set_defaults(fn=cmd_anomaly)

    p = sub.add_parser("suite", help="run the acceptance criteria")
    p.add_argument("--level", default="desk", choices=["desk"])
    p.add_argument("--criteria", type=int, nargs="*")
    p.add_argument("--tol-scale", type=float, default=1.0,
                   help="multiply every acceptance tolerance by this factor")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_suite)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    run = _Run(args)
    try:
        outputs, budgets, config = args.fn(run, args)
    except SymtraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    code = 0
    if args.command == "suite" and outputs["passed"] != outputs["total"]:
        code = SUITE_FAILED
    if args.out:
        rec = RunRecord(args.command, run.inputs, config, outputs, budgets,
                        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat())
        Path(args.out).write_text(rec.to_json() + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
