"""Config-driven experiment runner.

    hydrospec <command> --config <path> [--out <dir>] [--N <int>] [--tau <float>]

Each run writes ``<command>.csv``, ``plot.jsonl`` and ``meta.json`` into the
output directory. CSV schemas:

    spectrum     re_c, im_c, residual
    resonances   re_c, im_c, multiplicity, dist_to_curve, wronskian_abs
    track        epsilon, re_c, im_c, match_dist
    validate     condition, passed, margin, worst_x, worst_value
    sweep-alpha  alpha, <resonances columns>
    sweep-tau    tau, <resonances columns>

Floats are written with ``repr`` so they parse back to the same doubles, and
rows are sorted so that repeated runs give byte-identical files. Sweep points
run on ``HYDROSPEC_WORKERS`` worker processes (default 1).

Exit codes: 0 success, 2 invalid config (nothing written), 3 contour
validation failed, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import circle as circ
from . import perturb, resonance
from . import segment as seg
from .config import COMMANDS, load_config, with_tau
from .contour import ellipticity_samples, make_contour, validate_contour
from .eigen import eig, eig_pencil
from .errors import ConfigError, ContourError, HydrospecError
from .profiles import to_reference

EXIT_OK, EXIT_CONFIG, EXIT_CONTOUR, EXIT_NUMERIC = 0, 2, 3, 4

SCHEMAS = {
    "spectrum": ("re_c", "im_c", "residual"),
    "resonances": ("re_c", "im_c", "multiplicity", "dist_to_curve", "wronskian_abs"),
    "track": ("epsilon", "re_c", "im_c", "match_dist"),
    "validate": ("condition", "passed", "margin", "worst_x", "worst_value"),
    "sweep-alpha": ("alpha", "re_c", "im_c", "multiplicity", "dist_to_curve", "wronskian_abs"),
    "sweep-tau": ("tau", "re_c", "im_c", "multiplicity", "dist_to_curve", "wronskian_abs"),
}
N_CURVE = 512


class ContourRejected(HydrospecError):
    def __init__(self, report):
        super().__init__(report.render())
        self.report = report


def workers():
    raw = os.environ.get("HYDROSPEC_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"HYDROSPEC_WORKERS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("HYDROSPEC_WORKERS must be >= 1")
    return n


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def read_csv(path):
    """Parse a CSV written by :func:`run` back into a list of dicts of floats (or strings)."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            parsed = {}
            for k, v in row.items():
                try:
                    parsed[k] = float(v)
                except ValueError:
                    parsed[k] = v
            out.append(parsed)
    return out


# setup shared by every command


def _reference_problem(cfg, tau=None):
    """(reference profile, contour, alpha, length scale h) for the configured problem."""
    profile = cfg.build_profile()
    ref, alpha, _ = to_reference(profile, cfg.alpha if cfg.alpha is not None else 1.0)
    h = (ref.scale / profile.scale)
    contour = make_contour(cfg.build_escape(), cfg.tau if tau is None else tau, ref.domain)
    return ref, contour, (alpha if cfg.alpha is not None else None), h


def _check_contour(cfg, ref, contour):
    if cfg.validate is None:
        return None
    report = validate_contour(ref, contour, cfg.validate["c0"], cfg.validate["delta"])
    if not report.ok:
        raise ContourRejected(report)
    return report


def _curve_records(ref, contour, key=None, value=None):
    pts = ellipticity_samples(ref, contour, N_CURVE)
    recs = []
    for z in pts:
        r = {"series": "ellipticity_curve"}
        if key:
            r[key] = value
        r.update(re_c=float(z.real), im_c=float(z.imag))
        recs.append(r)
    return recs


def _resonance_rows(records):
    rows = [(r.c.real, r.c.imag, r.multiplicity, r.dist_to_curve, r.wronskian_abs) for r in records]
    return sorted(rows, key=lambda t: (t[0], t[1]))


# commands


def _spectrum(cfg):
    ref, contour, alpha, h = _reference_problem(cfg)
    _check_contour(cfg, ref, contour)
    eps = cfg.eps / math.sqrt(h)
    if ref.domain.is_circle:
        spec = eig(circ.assemble_q_circle(ref, contour, alpha, eps, cfg.N), vectors=True)
    else:
        pen = seg.assemble_os_pencil(ref, contour, alpha, eps, cfg.N)
        spec = eig_pencil(pen.A, pen.B, vectors=True)
    rows = sorted(zip(spec.values.real, spec.values.imag, spec.residuals), key=lambda t: (t[0], t[1]))
    plot = [{"series": "spectrum", "epsilon": cfg.eps, "re_c": float(a), "im_c": float(b)} for a, b, _ in rows]
    plot += _curve_records(ref, contour)
    return rows, plot, {}


def _resonances_at(cfg, ref, contour, alpha):
    return resonance.resonances_in_window(ref, contour, alpha, cfg.N, cfg.window, band=cfg.band,
                                          cluster_radius=cfg.cluster_radius, certify=cfg.certify)


def _resonances(cfg):
    ref, contour, alpha, _ = _reference_problem(cfg)
    _check_contour(cfg, ref, contour)
    rows = _resonance_rows(_resonances_at(cfg, ref, contour, alpha))
    plot = [{"series": "resonance", "tau": cfg.tau, "re_c": float(r[0]), "im_c": float(r[1]),
             "multiplicity": int(r[2])} for r in rows]
    plot += _curve_records(ref, contour, "tau", cfg.tau)
    return rows, plot, {}


def _track(cfg):
    ref, contour, alpha, h = _reference_problem(cfg)
    _check_contour(cfg, ref, contour)
    scale = 1 / math.sqrt(h)
    grid = np.asarray(cfg.eps_grid) * scale
    br = perturb.track_branch(ref, contour, alpha, cfg.seed, grid, cfg.N, match=cfg.match)
    eps_user = br.eps / scale
    rows = list(zip(eps_user, br.c.real, br.c.imag, br.match_dist))
    extra = {}
    if len(rows) >= cfg.fit_degree + 2:
        fit = perturb.fit_taylor(br, cfg.fit_degree)
        # coefficients in the reference eps, converted back to the configured eps
        coeffs = [complex(a) * scale**k for k, a in enumerate(fit.coeffs)]
        extra["taylor_fit"] = {"coeffs": [[z.real, z.imag] for z in coeffs], "residual": fit.residual, "cond": fit.cond}
    plot = [{"series": "branch", "epsilon": float(e), "re_c": float(a), "im_c": float(b)} for e, a, b, _ in rows]
    plot += _curve_records(ref, contour)
    return rows, plot, extra


def _validate(cfg):
    ref, contour, _, _ = _reference_problem(cfg)
    report = validate_contour(ref, contour, cfg.validate["c0"], cfg.validate["delta"])
    margins = {}
    for name, value in report.margins:
        margins[name] = min(value, margins.get(name, math.inf))
    rows = []
    for cond in ("C1", "C2", "C3", "C4"):
        fails = [f for f in report.failures if f.condition == cond]
        worst = fails[0] if fails else None
        rows.append((cond, not fails, margins.get(cond, math.nan),
                     worst.x if worst else math.nan, worst.value if worst else math.nan))
    plot = _curve_records(ref, contour, "tau", cfg.tau)
    if not report.ok:
        raise _ValidateFailed(rows, plot, report)
    return rows, plot, {"report": report.render()}


class _ValidateFailed(Exception):
    """The validate command still writes its table before exiting with status 3."""

    def __init__(self, rows, plot, report):
        super().__init__(report.render())
        self.rows, self.plot, self.report = rows, plot, report


def _sweep_point(args):
    cfg, var, value = args
    if var == "alpha":
        ref, contour, _, h = _reference_problem(cfg)
        alpha = value * h
    else:
        ref, contour, alpha, _ = _reference_problem(cfg, tau=value)
    _check_contour(cfg, ref, contour)
    rows = _resonance_rows(_resonances_at(cfg, ref, contour, alpha))
    curve = _curve_records(ref, contour, var, value)
    return [(value,) + r for r in rows], curve


def _sweep(cfg, var):
    jobs = [((with_tau(cfg, v) if var == "tau" else cfg), var, v) for v in cfg.sweep]
    n = workers()
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    rows, plot = [], []
    curves = []
    for (value_rows, curve) in results:
        rows.extend(value_rows)
        plot.extend({"series": "resonance", var: float(r[0]), "re_c": float(r[1]), "im_c": float(r[2]),
                     "multiplicity": int(r[3])} for r in value_rows)
        curves.extend(curve)
    rows.sort(key=lambda t: (t[0], t[1], t[2]))
    return rows, plot + curves, {}


RUNNERS = {
    "spectrum": _spectrum,
    "resonances": _resonances,
    "track": _track,
    "validate": _validate,
    "sweep-alpha": lambda cfg: _sweep(cfg, "alpha"),
    "sweep-tau": lambda cfg: _sweep(cfg, "tau"),
}


def _meta(cfg, extra):
    probe = circ.convention_self_test()
    return {
        "tool": "hydrospec",
        "version": __version__,
        "command": cfg.command,
        "config": cfg.as_dict(),
        "schema": list(SCHEMAS[cfg.command]),
        "fourier_convention": circ.CONVENTION,
        "convention_self_test": probe,
        **extra,
    }


def _write(out, cfg, rows, plot, extra):
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{cfg.command}.csv").write_text(csv_text(SCHEMAS[cfg.command], rows), encoding="utf-8")
    with open(out / "plot.jsonl", "w", encoding="utf-8") as fh:
        for rec in plot:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    (out / "meta.json").write_text(json.dumps(_meta(cfg, extra), indent=2, sort_keys=True, default=str) + "\n",
                                   encoding="utf-8")


def run(cfg, out, stderr=None):
    """Execute one experiment and write its files into ``out``; returns the exit status."""
    stderr = stderr or sys.stderr
    out = Path(out)
    try:
        rows, plot, extra = RUNNERS[cfg.command](cfg)
    except _ValidateFailed as exc:
        _write(out, cfg, exc.rows, exc.plot, {"report": exc.report.render()})
        print(exc.report.render(), file=stderr)
        return EXIT_CONTOUR
    except ContourRejected as exc:
        print(exc.report.render(), file=stderr)
        return EXIT_CONTOUR
    except ContourError as exc:
        print(f"contour error in {cfg.command}: {exc}", file=stderr)
        return EXIT_CONTOUR
    except (HydrospecError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure in {cfg.command} ({type(exc).__name__}): {exc}", file=stderr)
        return EXIT_NUMERIC
    _write(out, cfg, rows, plot, extra)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="hydrospec", description="Orr-Sommerfeld spectra and Rayleigh resonances")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="YAML experiment file")
    ap.add_argument("--out", help="output directory (default: the config's 'out' key, else results/<command>)")
    ap.add_argument("--N", type=int, help="override the discretization size")
    ap.add_argument("--tau", type=float, help="override the deformation scale")
    ap.add_argument("--version", action="version", version=f"hydrospec {__version__}")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command, {"N": args.N, "tau": args.tau})
        workers()
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.out or os.path.join("results", args.command)
    return run(cfg, out)


if __name__ == "__main__":
    sys.exit(main())
