"""Resolution study: how the resonance at 0, the first-order slope and the fitted
slope of the tracked branch change with N, for the cosine flow family.

    python scripts/convergence.py [--omega 0.7] [--tau 0.1] [--N 32 48 64 96 128]
"""

import argparse
import math

from hydrospec.contour import make_contour, make_escape
from hydrospec.perturb import cos_flow_first_order, default_eps_grid, first_order_segment, fit_taylor, track_branch
from hydrospec.profiles import make_profile
from hydrospec.resonance import resonances_in_window


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omega", type=float, default=0.7, help="omega / pi, in (0.5, 1)")
    ap.add_argument("--tau", type=float, default=0.1)
    ap.add_argument("--eps-max", type=float, default=5e-3)
    ap.add_argument("--N", type=int, nargs="+", default=[32, 48, 64, 96, 128])
    args = ap.parse_args(argv)

    om = args.omega * math.pi
    alpha = math.sqrt(om**2 - math.pi**2 / 4)
    profile = make_profile("trig", {"omega": om, "theta": math.pi / 2})
    contour = make_contour(make_escape("sin_halfcos", {"omega": om}), args.tau)
    closed = cos_flow_first_order(om)
    print(f"closed-form slope {closed.real:.12f}{closed.imag:+.12f}i")
    print(f"{'N':>5} {'|c_res|':>10} {'slope gap':>10} {'fit gap':>10}")
    for N in args.N:
        recs = resonances_in_window(profile, contour, alpha, N, {"center": [0, 0], "radius": 0.05}, certify=False)
        c_res = min((abs(r.c) for r in recs), default=math.nan)
        slope = first_order_segment(profile, contour, alpha, 0.0, N)
        br = track_branch(profile, contour, alpha, 0.0, default_eps_grid(args.eps_max), N)
        fit = fit_taylor(br, 2).coeffs[1]
        print(f"{N:5d} {c_res:10.2e} {abs(slope - closed) / abs(closed):10.2e} {abs(fit - slope) / abs(slope):10.2e}")


if __name__ == "__main__":
    main()
