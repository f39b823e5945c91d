"""Regenerates tests/golden/closed_forms.json by 30-digit quadrature (mpmath).

Every integrand is axially symmetric about xi, so each surface integral over the
unit sphere S_1(xi) reduces to 2 pi times an integral over c = cos(angle) in [-1, 1].
"""
import json
import sys

import mpmath as mp

mp.mp.dps = 30
OFFSETS = ["0", "0.3", "0.5", "0.9", "0.99", "1.5", "2"]


def moment(k, d):
    f = lambda c: (1 + d * d + 2 * d * c) ** (-mp.mpf(k) / 2)
    return 2 * mp.pi * mp.quad(f, [-1, 1])


def radial4(d):
    def f(c):
        r2 = 1 + d * d + 2 * d * c
        xi_nu = d * c
        x_xi = d * d + d * c
        x_nu = d * c + 1
        return xi_nu / r2**2 - 4 * x_xi * x_nu / r2**3

    return 2 * mp.pi * mp.quad(f, [-1, 1])


def main(path):
    entries = []
    for s in OFFSETS:
        d = mp.mpf(s)
        for k in range(1, 7):
            entries.append({"identity": f"sphere_moment_k{k}", "k": k, "xi": float(d), "lambda": 1.0,
                            "value": float(moment(k, d))})
        if 0 < d < 1:
            entries.append({"identity": "radial4_integral", "xi": float(d), "lambda": 1.0,
                            "value": float(radial4(d))})
    doc = {"generator": "tools/make_golden.py (mpmath, 30 digits)", "relative_tolerance": 1e-12,
           "entries": entries}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/golden/closed_forms.json")
