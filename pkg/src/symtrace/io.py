"""Symbol and multiplier files: JSON parsing with source positions, canonical emission.

Symbol file::

    {"name": ..., "description": ..., "expected_case": "case1",
     "n": 1, "r": 1, "order": -1,
     "terms": [{"degree": -1, "q": 0, "sigma": 0, "xmode": [0],
                "angular": [[[{"c": [1.0, 0.0], "alpha": [0], "p": 0}]]]}]}

Multiplier file::

    {"name": "P", "n": 1, "multiplier": "k**2 + 1", "order": 2}
    {"name": "D", "n": 2, "multiplier": [["e", "k1 - I*k2"], ["k1 + I*k2", "-e"]]}
    {"n": 1, "builtin": "gaussian", "scale": 1.0}

Complex numbers are [re, im] pairs, degrees are integers, "p/q" strings or floats.
"""
from __future__ import annotations

import hashlib
import json
import json.decoder
import json.scanner
from pathlib import Path

from .errors import ParseError, SymtraceError
from .symcore import (Angular, HomTerm, SymbolExpansion, as_degree, classify_case,
                      degree_to_json, validate)

FORMAT_VERSION = 1


class _Located(dict):
    """dict that remembers the offset of its opening brace."""

    pos = 0


class _Array(list):
    pos = 0


def _locating_decoder():
    dec = json.JSONDecoder()

    def parse_object(s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo=None):
        s, end = s_and_end
        obj, new_end = json.decoder.JSONObject(s_and_end, strict, scan_once, None, None, memo)
        out = _Located(obj)
        out.pos = end - 1
        return out, new_end

    def parse_array(s_and_end, scan_once):
        s, end = s_and_end
        arr, new_end = json.decoder.JSONArray(s_and_end, scan_once)
        out = _Array(arr)
        out.pos = end - 1
        return out, new_end

    dec.parse_object = parse_object
    dec.parse_array = parse_array
    dec.scan_once = json.scanner.py_make_scanner(dec)
    return dec


def _line_col(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Ctx:
    def __init__(self, text, source):
        self.text = text
        self.source = source

    def fail(self, msg, node=None):
        pos = getattr(node, "pos", 0)
        line, col = _line_col(self.text, pos)
        where = f"{self.source}: " if self.source else ""
        raise ParseError(where + msg, line, col)


def load_json(text: str, source: str = None):
    try:
        return _locating_decoder().decode(text)
    except json.JSONDecodeError as exc:
        where = f"{source}: " if source else ""
        raise ParseError(where + exc.msg, exc.lineno, exc.colno) from exc


def _complex(ctx, v, node):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    ctx.fail(f"expected a number or [re, im] pair, got {v!r}", node)


def _degree(ctx, v, node):
    try:
        return as_degree(v)
    except (ValueError, TypeError, ZeroDivisionError):
        ctx.fail(f"invalid degree {v!r}", node)


def _int_list(ctx, v, n, what, node):
    if not isinstance(v, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in v):
        ctx.fail(f"{what} must be an integer array", node)
    if n is not None and len(v) != n:
        ctx.fail(f"{what} has length {len(v)}, expected n={n}", node)
    return tuple(v)


def _require(ctx, obj, key, kind=None):
    if not isinstance(obj, dict):
        ctx.fail("expected an object", obj)
    if key not in obj:
        ctx.fail(f"missing field {key!r}", obj)
    v = obj[key]
    if kind is not None and (not isinstance(v, kind) or isinstance(v, bool)):
        ctx.fail(f"field {key!r} has the wrong type", obj)
    return v


def _parse_term(ctx, t, n, r):
    deg = _degree(ctx, _require(ctx, t, "degree"), t)
    sigma = t.get("sigma", 0)
    if not isinstance(sigma, int) or isinstance(sigma, bool) or sigma < 0:
        ctx.fail("sigma must be a non-negative integer", t)
    xmode = _int_list(ctx, t.get("xmode", [0] * n), n, "xmode", t)
    ang = _require(ctx, t, "angular", list)
    if len(ang) != r or any(not isinstance(row, list) or len(row) != r for row in ang):
        ctx.fail(f"angular must be an {r}x{r} array of monomial lists", ang)
    entries = []
    for row in ang:
        erow = []
        for cell in row:
            if not isinstance(cell, list):
                ctx.fail("each angular entry is a list of monomials", cell)
            mons = []
            for m in cell:
                c = _complex(ctx, _require(ctx, m, "c"), m)
                alpha = _int_list(ctx, _require(ctx, m, "alpha"), n, "alpha", m)
                p = m.get("p", sum(alpha))
                if not isinstance(p, int) or isinstance(p, bool):
                    ctx.fail("p must be an integer", m)
                mons.append((c, alpha, p))
            erow.append(mons)
        entries.append(erow)
    q = t.get("q")
    try:
        angular, q = Angular.from_monomials(n, r, entries, q)
    except SymtraceError as exc:
        ctx.fail(str(exc), t)
    return HomTerm(deg, angular, sigma, xmode)


def parse_symbol(text: str, source: str = None):
    """Symbol file text -> (SymbolExpansion, metadata)."""
    ctx = _Ctx(text, source)
    doc = load_json(text, source)
    n = _require(ctx, doc, "n", int)
    r = doc.get("r", 1)
    if n < 1 or not isinstance(r, int) or r < 1:
        ctx.fail("n and r must be positive integers", doc)
    terms_node = _require(ctx, doc, "terms", list)
    terms = tuple(_parse_term(ctx, t, n, r) for t in terms_node)
    try:
        sym = validate(SymbolExpansion(n, r, terms))
    except SymtraceError as exc:
        ctx.fail(str(exc), terms_node)
    meta = {k: doc[k] for k in ("name", "description", "expected_case") if k in doc}
    if "order" in doc and sym.terms:
        declared = _degree(ctx, doc["order"], doc)
        if abs(float(declared) - float(sym.order)) > 1e-12:
            ctx.fail(f"declared order {doc['order']} differs from leading degree "
                     f"{degree_to_json(sym.order)}", doc)
    if "expected_case" in meta:
        got = classify_case(sym)
        if got != meta["expected_case"]:
            ctx.fail(f"expected_case {meta['expected_case']!r} but the symbol is {got!r}", doc)
    return sym, meta


def _c_json(c):
    c = complex(c)
    return [c.real, c.imag]


def symbol_to_doc(sym: SymbolExpansion, meta: dict = None) -> dict:
    doc = {}
    for k in ("name", "description", "expected_case"):
        if meta and k in meta:
            doc[k] = meta[k]
    doc["n"], doc["r"] = sym.n, sym.r
    if sym.terms:
        doc["order"] = degree_to_json(sym.order)
    terms = []
    for t in sym.terms:
        mons = t.angular.to_monomials()
        ang = [[[{"c": _c_json(c), "alpha": list(alpha), "p": p} for c, alpha, p in sorted(
            cell, key=lambda m: m[1])] for cell in row] for row in mons]
        terms.append({"degree": degree_to_json(t.degree), "q": 0, "sigma": t.sigma,
                      "xmode": list(t.xmode), "angular": ang})
    doc["terms"] = terms
    return doc


def emit_symbol(sym: SymbolExpansion, meta: dict = None) -> str:
    """Canonical text: q = 0 monomials, validated term order, fixed key order."""
    return json.dumps(symbol_to_doc(sym, meta), indent=2) + "\n"


# ---------------------------------------------------------------------------
# operands

def _expr_text(ctx, v, node):
    if isinstance(v, (int, float, str)) and not isinstance(v, bool):
        return str(v)
    ctx.fail("multiplier entries must be strings or numbers", node)


def parse_operand(text: str, source: str = None):
    """Symbol file -> SymbolExpansion; multiplier or builtin file -> Multiplier.

    Returns (operand, metadata).
    """
    from .quantize import Multiplier, gaussian, power_law
    doc = load_json(text, source)
    ctx = _Ctx(text, source)
    if not isinstance(doc, dict):
        ctx.fail("top level must be an object", doc)
    if "terms" in doc:
        return parse_symbol(text, source)
    meta = {k: doc[k] for k in ("name", "description") if k in doc}
    n = _require(ctx, doc, "n", int)
    if "builtin" in doc:
        kind = doc["builtin"]
        if kind == "gaussian":
            return gaussian(n, float(doc.get("scale", 1.0))), meta
        if kind == "power_law":
            return power_law(n, doc.get("exponent", -3)).sym, meta
        ctx.fail(f"unknown builtin {kind!r}", doc)
    entry = _require(ctx, doc, "multiplier")
    if isinstance(entry, list):
        rows = []
        for row in entry:
            if not isinstance(row, list):
                ctx.fail("matrix multiplier must be a list of rows", entry)
            rows.append([_expr_text(ctx, e, row) for e in row])
        expr_text = "[" + ", ".join("[" + ", ".join(f"({e})" for e in row) + "]" for row in rows) + "]"
    else:
        expr_text = _expr_text(ctx, entry, doc)
    params = doc.get("params", {})
    if not isinstance(params, dict):
        ctx.fail("params must be an object", doc)
    for key, val in params.items():
        expr_text = _substitute(expr_text, key, val)
    try:
        expr = Multiplier.parse(expr_text, n)
        order = doc.get("order")
        m = Multiplier(expr, n, order=None if order is None else float(as_degree(order)),
                       logdepth=int(doc.get("logdepth", 0)), name=meta.get("name"))
    except ParseError as exc:
        ctx.fail(str(exc), doc)
    except SymtraceError as exc:
        ctx.fail(str(exc), doc)
    return m, meta


def _substitute(text, key, val):
    import re
    return re.sub(rf"\b{re.escape(key)}\b", f"({val!r})", text)


def read_operand(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}", 1, 1) from exc
    return parse_operand(text, str(p))


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def to_jsonable(obj):
    """Complex -> [re, im], numpy scalars/arrays -> Python, Fractions -> canonical."""
    import numbers
    from fractions import Fraction

    import numpy as np
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, Fraction):
        return degree_to_json(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Complex) and not isinstance(obj, numbers.Real):
        c = complex(obj)
        return [c.real, c.imag]
    if isinstance(obj, numbers.Real):
        return float(obj)
    return obj
