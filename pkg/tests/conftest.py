import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "scripts"))
import json
import math
from pathlib import Path

import numpy as np
import pytest

from hydrospec.contour import make_contour, make_escape
from hydrospec.profiles import Circle, make_profile

PI = math.pi
GOLDEN = json.loads((Path(__file__).parent / "golden" / "derived.json").read_text())


def golden(key):
    v = GOLDEN[key]
    return complex(*v) if isinstance(v, list) and len(v) == 2 and not isinstance(v[0], list) else v


def cos_flow(omega_over_pi=0.7, tau=0.1):
    """U = cos(omega x) with the escape sin(omega x) cos(pi x/2); alpha puts the resonance at 0."""
    om = omega_over_pi * PI
    p = make_profile("trig", {"omega": om, "theta": PI / 2})
    c = make_contour(make_escape("sin_halfcos", {"omega": om}), tau)
    return p, c, math.sqrt(om**2 - PI**2 / 4)


def cos3pi(tau=0.1):
    p = make_profile("trig", {"omega": 3 * PI, "theta": PI / 2})
    c = make_contour(make_escape("sin", {"omega": 3 * PI}), tau)
    return p, c, math.sqrt(35) * PI / 2


def trig_case(omega, theta, k, tau=0.1):
    """sin(omega x + theta) with alpha chosen so omega^2 - alpha^2 = (pi k / 2)^2."""
    p = make_profile("trig", {"omega": omega, "theta": theta})
    c = make_contour(make_escape("trig_shift", {"omega": omega, "theta": theta}), tau)
    return p, c, math.sqrt(omega**2 - (PI * k / 2) ** 2)


def couette(tau=0.1):
    p = make_profile("couette")
    c = make_contour(make_escape("couette_poiseuille", {"theta": 0.0}), tau)
    return p, c


def kolmogorov(k=3, tau=0.15):
    p = make_profile("kolmogorov", {"k": k}, Circle())
    c = make_contour(make_escape("neg_cos", {"k": k}), tau, Circle())
    return p, c


# simple resonances at c = 0 on the segment: (label, builder)
SEGMENT_CORPUS = [
    ("cos0.7pi", lambda: cos_flow(0.7)),
    ("cos3pi", lambda: cos3pi()),
    ("trig_k2", lambda: trig_case(1.2 * PI, 0.4, 2)),
    ("trig_k3", lambda: trig_case(1.8 * PI, 0.2, 3)),
]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, filled by test_acceptance and printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
