import json
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symtrace.errors import ParseError
from symtrace.io import emit_symbol, file_hash, parse_operand, parse_symbol, read_operand
from symtrace.quantize import Multiplier
from symtrace.symcore import Angular, HomTerm, SymbolExpansion, validate

CORPUS = resources.files("symtrace").joinpath("corpus")
SYMBOL_FILES = sorted(p.name for p in CORPUS.iterdir()
                      if p.name.endswith(".json") and "terms" in json.loads(p.read_text()))


@pytest.mark.parametrize("name", SYMBOL_FILES)
def test_corpus_round_trip(name):
    text = CORPUS.joinpath(name).read_text()
    sym, meta = parse_symbol(text, name)
    out = emit_symbol(sym, meta)
    again, meta2 = parse_symbol(out)
    assert again == sym
    assert meta2 == meta
    assert emit_symbol(again, meta2) == out


@st.composite
def symbols(draw):
    n = draw(st.sampled_from([1, 2]))
    r = draw(st.sampled_from([1, 2]))
    top = draw(st.integers(-4, 2))
    terms = []
    for _ in range(draw(st.integers(1, 3))):
        deg = top - draw(st.integers(0, 3))
        coeffs = {}
        for _ in range(draw(st.integers(1, 3))):
            i, j = draw(st.integers(0, r - 1)), draw(st.integers(0, r - 1))
            alpha = tuple(draw(st.integers(0, 3)) for _ in range(n))
            c = complex(draw(st.integers(-9, 9)), draw(st.integers(-9, 9))) / 4
            coeffs[(i, j, alpha)] = c
        xm = tuple(draw(st.integers(-1, 1)) for _ in range(n))
        terms.append(HomTerm(deg, Angular(n, r, coeffs), draw(st.integers(0, 2)), xm))
    return validate(SymbolExpansion(n, r, tuple(terms)))


@given(symbols())
def test_emit_parse_identity(sym):
    assert parse_symbol(emit_symbol(sym))[0] == sym


def test_parse_error_reports_position():
    text = '{\n  "n": 1,\n  "terms": [\n    {"degree": -1, "angular": 5}\n  ]\n}\n'
    with pytest.raises(ParseError) as exc:
        parse_symbol(text, "bad.json")
    assert exc.value.line == 4
    assert exc.value.column == 5
    with pytest.raises(ParseError) as exc:
        parse_symbol('{"n": 1,\n "terms": [}', "x")
    assert exc.value.line == 2


def test_expected_case_guard():
    doc = json.loads(CORPUS.joinpath("nu_minus2.json").read_text())
    doc["expected_case"] = "case3"
    with pytest.raises(ParseError, match="expected_case"):
        parse_symbol(json.dumps(doc))


def test_declared_order_guard():
    doc = json.loads(CORPUS.joinpath("nu_minus2.json").read_text())
    doc["order"] = 1
    with pytest.raises(ParseError, match="declared order"):
        parse_symbol(json.dumps(doc))


def test_unreduced_monomials_are_canonicalized():
    text = json.dumps({"n": 2, "terms": [{"degree": -3, "angular": [[[
        {"c": [1, 0], "alpha": [2, 0]}, {"c": [1, 0], "alpha": [0, 2]}]]]}]})
    sym, _ = parse_symbol(text)
    assert sym.terms[0].angular == Angular.identity(2, 1)


def test_multiplier_with_params():
    text = json.dumps({"n": 2, "multiplier": [["e", "k1 - I*k2"], ["k1 + I*k2", "-e"]],
                       "params": {"e": 0.5}})
    m, _ = parse_operand(text)
    assert isinstance(m, Multiplier)
    assert m.is_hermitian()


def test_builtin_and_missing_file(tmp_path):
    m, _ = parse_operand('{"n": 1, "builtin": "gaussian", "scale": 2.0}')
    assert m.n == 1
    with pytest.raises(ParseError):
        parse_operand('{"n": 1, "builtin": "nope"}')
    with pytest.raises(ParseError):
        read_operand(tmp_path / "missing.json")
    p = tmp_path / "a.json"
    p.write_text("{}")
    assert len(file_hash(p)) == 64
