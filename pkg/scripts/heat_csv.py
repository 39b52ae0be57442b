"""Heat-trace samples and the fitted expansion as CSV, for plotting elsewhere.

usage: python3 scripts/heat_csv.py A.json P.json out.csv
"""
import csv
import sys

import numpy as np

from symtrace.asympt import ZetaConfig, heat_fit
from symtrace.io import read_operand


def main(a_path, p_path, out):
    A, _ = read_operand(a_path)
    P, _ = read_operand(p_path)
    fit, sample, (ts, vals, tails), t_min = heat_fit(A, P, ZetaConfig())
    model = fit.model.design(ts) @ np.array([fit.coef[b] for b in fit.model.basis])
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "heat_re", "heat_im", "tail_bound", "fit_re", "residual"])
        for t, v, tb, f in zip(ts, vals, tails, model):
            w.writerow([t, v.real, v.imag, tb, f.real, abs(v - f)])
    print(f"{len(ts)} samples, t in [{ts.min():.3g}, {ts.max():.3g}], condition {fit.condition:.2e}")


if __name__ == "__main__":
    if len(sys.argv) != 4:
        sys.exit(__doc__)
    main(*sys.argv[1:])
