"""Shared fixtures data and cached runs for the test modules."""

import json
from functools import lru_cache
from pathlib import Path

from rcip.bgkw import BgkwProblem, solve_couette

DATA = Path(__file__).parent / "data"

# published u(0.5) and Q for the Couette problem (interval [-1/2, 1/2])
BGKW_TABLE = {
    0.003: (4.978915352789726e-01, 1.242445655299167e-01),
    0.01: (4.930697807742217e-01, 1.225330275292621e-01),
    0.03: (4.800058682766837e-01, 1.180147037188893e-01),
    0.1: (4.412246409722424e-01, 1.057028408172292e-01),
    0.3: (3.672125695500499e-01, 8.560111699820613e-02),
    1.0: (2.518613399894736e-01, 5.804708735555460e-02),
    2.0: (1.852462993740218e-01, 4.281659776113918e-02),
    3.0: (1.504282444992074e-01, 3.489298506190833e-02),
    5.0: (1.126351880294592e-01, 2.627042060967383e-02),
    7.0: (9.171689613521428e-02, 2.147460412330841e-02),
    10.0: (7.292211299328491e-02, 1.714449048590649e-02),
    30.0: (3.381357342231840e-02, 8.043009085700263e-03),
    100.0: (1.343072948081874e-02, 3.226757181742397e-03),
}

ONE_CORNER_REFERENCE = 63.53529437281905


@lru_cache(maxsize=None)
def couette(k, regularized=None):
    return solve_couette(BgkwProblem(k, regularized=regularized))


@lru_cache(maxsize=None)
def abramowitz_reference():
    return json.loads((DATA / "abramowitz_mpmath.json").read_text())
