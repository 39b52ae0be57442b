"""Multiplicative anomaly log det(AB) - log det A - log det B for commuting multipliers.

Computed experiment with no asserted ground truth, except the self-consistency
A = B, where zeta(P^2, s) = zeta(P, 2s) forces log det P^2 = 2 log det P.

usage: python3 scripts/anomaly_experiment.py [out.csv]
"""
import csv
import sys

from symtrace.asympt import mult_anomaly
from symtrace.quantize import Multiplier

PAIRS = [
    ("k**2 + 1", "k**2 + 1", 1),
    ("k**2 + 1", "k**2 + 4", 1),
    ("k**2 + 1", "k**2 + k + 2", 1),
    ("k**2 + 1", "2*k**2 + 3", 1),
    ("k1**2 + k2**2 + 1", "k1**2 + k2**2 + 1", 2),
    ("k1**2 + k2**2 + 1", "k1**2 + k2**2 + 3", 2),
]


def main(out=None):
    rows = []
    for a, b, n in PAIRS:
        v, err, parts = mult_anomaly(Multiplier(a, n), Multiplier(b, n))
        rows.append((n, a, b, v.real, err, parts["logdet_AB"].real, parts["logdet_A"].real,
                     parts["logdet_B"].real))
        print(f"n={n}  A={a:<20s} B={b:<20s} anomaly={v.real:+.3e} +- {err:.1e}", flush=True)
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "A", "B", "anomaly", "error", "logdet_AB", "logdet_A", "logdet_B"])
            w.writerows(rows)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
