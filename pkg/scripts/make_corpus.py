"""Regenerate the JSON symbol corpus shipped with the package."""
import json
from pathlib import Path

from symtrace.io import emit_symbol
from symtrace.symcore import classify_case, symbol_sum, term

OUT = Path(__file__).resolve().parents[1] / "src" / "symtrace" / "corpus"


def fp_corpus():
    """Twenty symbols with every degree below -n."""
    m2 = [[1.0, 0.5], [0.5, -2.0]]
    items = {
        "fp01": term(1, -3),
        "fp02": term(1, -2),
        "fp03": term(1, -2.5),
        "fp04": term(1, -1.5),
        "fp05": term(1, -2, sigma=1),
        "fp06": term(1, -3, sigma=2),
        "fp07": symbol_sum([term(1, -2, {(1,): 1.0}), term(1, -3, 0.5)]),
        "fp08": symbol_sum([term(1, -2.25), term(1, -3.25, sigma=1)]),
        "fp09": term(1, -2, m2),
        "fp10": symbol_sum([term(1, -2, 2.0), term(1, -2, 1.0, xmode=(1,))]),
        "fp11": term(1, -4, 1 + 2j),
        "fp12": term(2, -3),
        "fp13": term(2, -3, {(2, 0): 1.0}),
        "fp14": term(2, -2.5, {(1, 1): 1.0, (0, 0): 0.25}),
        "fp15": term(2, -4, sigma=1),
        "fp16": symbol_sum([term(2, -3, {(4, 0): 1.0}), term(2, -4, {(0, 2): -1.0})]),
        "fp17": term(2, -3.5),
        "fp18": term(2, -3, m2),
        "fp19": symbol_sum([term(2, -3, {(2, 2): 3.0}), term(2, -3, {(1, 0): 1.0}, xmode=(0, 1))]),
        "fp20": term(2, -5, sigma=2),
    }
    return items


def examples():
    return {
        "res_inv1": (term(1, -1), "theta |xi|^{-1} on T^1; residue 2"),
        "nu_minus2": (term(1, -2), "order -2 on T^1"),
        "inv_cube": (term(1, -3), "theta |xi|^{-3} on T^1; trace 2 zeta(3)"),
        "abs1": (term(1, 1), "theta |xi| on T^1"),
        "shift_abs1": (term(1, 1, xmode=(1,)), "e^{ix} theta |xi|"),
        "shift_back": (term(1, 0, xmode=(-1,)), "e^{-ix} theta"),
        "shift_abs2": (term(1, 2, xmode=(1,)), "e^{ix} theta |xi|^2"),
        "shift_half": (term(1, 0.5, xmode=(1,)), "e^{ix} theta |xi|^{1/2}"),
        "shift_quarter": (term(1, 0.25, xmode=(-1,)), "e^{-ix} theta |xi|^{1/4}"),
        "t2_odd_shift": (term(2, 0, {(1, 0): 1.0}, xmode=(1, 0)), "e^{ix1} theta omega_1 on T^2"),
        "t2_back": (term(2, 0, xmode=(-1, 0)), "e^{-ix1} theta on T^2"),
    }


MULTIPLIERS = {
    "P_k2p1": {"name": "k^2+1", "n": 1, "multiplier": "k**2 + 1", "order": 2},
    "P_k2p2": {"name": "k^2+2", "n": 1, "multiplier": "k**2 + 2", "order": 2},
    "P_t2_k2p1": {"name": "|k|^2+1", "n": 2, "multiplier": "k1**2 + k2**2 + 1", "order": 2},
    "D_half": {"name": "k+1/2", "n": 1, "multiplier": "k + 1/2", "order": 1},
    "D_dirac_t2": {"name": "Dirac T^2", "n": 2, "order": 1,
                   "params": {"e": 0.5, "a1": 0.25, "a2": 0.1},
                   "multiplier": [["e", "(k1 + a1) - I*(k2 + a2)"],
                                  ["(k1 + a1) + I*(k2 + a2)", "e"]]},
    "gauss1": {"name": "gaussian", "n": 1, "builtin": "gaussian", "scale": 1.0},
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, sym in fp_corpus().items():
        meta = {"name": name, "description": "finite-part corpus", "expected_case": classify_case(sym)}
        (OUT / f"{name}.json").write_text(emit_symbol(sym, meta))
    for name, (sym, desc) in examples().items():
        meta = {"name": name, "description": desc, "expected_case": classify_case(sym)}
        (OUT / f"{name}.json").write_text(emit_symbol(sym, meta))
    for name, doc in MULTIPLIERS.items():
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
