"""Regenerate ``tests/data/abramowitz_mpmath.json``.

Reference values of ``J_n(x) = int_0^inf t^n exp(-t^2 - x/t) dt`` by mpmath
tanh-sinh quadrature at 30 digits, with breakpoints clustered around the
peak ``t* = (x/2)^(1/3)`` of the integrand.  The integrand is scaled by
``exp(3 t*^2)``, its order of magnitude at the peak, and the factor is
removed afterwards.

    python3 tests/oracles/abramowitz_mpmath.py
"""

import json
from pathlib import Path

import mpmath as mp
import numpy as np

ORDERS = (-1, 0, 1)


def reference(n, x):
    x = mp.mpf(x)
    ts = mp.cbrt(x / 2)
    pts = [mp.mpf(0)] + [ts + d for d in np.arange(-3, 10.5, 0.5) if ts + d > 0] + [mp.inf]
    c = 3 * ts ** 2
    return mp.exp(-c) * mp.quad(lambda t: t ** n * mp.exp(c - t * t - x / t), sorted(set(pts)))


def main():
    mp.mp.dps = 30
    xs = np.logspace(-6, np.log10(20), 200)
    large = [25.0, 40.0, 75.0, 150.0, 400.0, 1000.0, 2000.0]
    data = {"x": xs.tolist(), "x_large": large}
    for n in ORDERS:
        data[str(n)] = [float(reference(n, x)) for x in xs]
        data[f"{n}_large"] = [float(reference(n, x)) for x in large]
    out = Path(__file__).resolve().parents[1] / "data" / "abramowitz_mpmath.json"
    out.write_text(json.dumps(data, indent=1))


if __name__ == "__main__":
    main()
