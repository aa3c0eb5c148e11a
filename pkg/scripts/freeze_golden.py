"""Compute reference values with the independent oracles and freeze them into tests/golden.

Each value is computed twice at different working precisions (or resolutions)
and only frozen if the two agree.
"""

import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402

OMEGAS = {"0.55": 0.55, "0.6": 0.6, "0.7": 0.7, "0.8": 0.8, "0.9": 0.9}


def agree(a, b, tol, what):
    if abs(a - b) > tol * max(1.0, abs(a)):
        raise SystemExit(f"oracle disagreement for {what}: {a} vs {b}")
    return a


def pair(z):
    return [complex(z).real, complex(z).imag]


def compute():
    out = {}
    d = oracles.escape_derivative(oracles.sin_halfcos_expr(0.7 * math.pi), 0.0)
    out["dgamma_sin_halfcos_0.7pi_tau0.1_x0"] = pair(1 + 0.1j * d)
    out["couette_wronskian_alpha1"] = oracles.couette_wronskian(1.0)
    _, D1 = oracles.cheb_closed_form(1)
    out["cheb_D_N1"] = D1.tolist()
    slopes = {}
    for key, f in OMEGAS.items():
        om = f * math.pi
        a = oracles.cos_flow_slope_pv(om, dps=30)
        b = oracles.cos_flow_slope_pv(om, dps=40)
        slopes[key] = pair(agree(a, b, 1e-8, f"p.v. slope at omega={key} pi"))
    out["cos_flow_first_order"] = slopes
    k, alpha = 3, 3.0
    out["kolmogorov_second_order_k3_alpha3"] = pair(oracles.kolmogorov_second_order(k, alpha))
    lam, mu = oracles.boundary_constants_symmetric(math.sqrt(6) * math.pi / 5, math.cos(0.7 * math.pi))
    out["boundary_constants_cos0.7pi"] = {"lam": pair(lam), "mu": pair(mu)}
    return out


def main():
    path = ROOT / "tests" / "golden" / "derived.json"
    path.write_text(json.dumps(compute(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
