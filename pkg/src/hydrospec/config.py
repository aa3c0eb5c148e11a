"""Experiment configuration: YAML files with arithmetic-valued numbers.

A config is a mapping such as::

    profile:
      kind: trig
      params: {omega: 0.7*pi, theta: pi/2}
      domain: {segment: [-1, 1]}
    escape: {kind: sin_halfcos, params: {omega: 0.7*pi}}
    tau: 0.1
    alpha: sqrt(6)*pi/5
    N: 64
    eps_grid: {max: 0.1, num: 21}
    seed: [0, 0]

Numbers may be written as arithmetic over ``pi``, ``e``, ``sqrt``, ``sin``,
``cos``, ``exp`` and ``log``. See the README for the per-command keys.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import yaml

from .contour import make_escape
from .errors import ConfigError, ContourError, ProfileError
from .profiles import make_profile
from .resonance import DEFAULT_BAND, DEFAULT_CLUSTER_RADIUS, make_window

COMMANDS = ("spectrum", "resonances", "track", "validate", "sweep-alpha", "sweep-tau")

_CONSTANTS = {"pi": math.pi, "e": math.e}
_FUNCTIONS = {"sqrt": math.sqrt, "sin": math.sin, "cos": math.cos, "exp": math.exp, "log": math.log}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)  # float powers overflow instead of building huge ints
    if isinstance(node, ast.Name) and node.id in _CONSTANTS:
        return _CONSTANTS[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval_node(node.operand))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCTIONS
            and len(node.args) == 1 and not node.keywords):
        return _FUNCTIONS[node.func.id](_eval_node(node.args[0]))
    raise ValueError(f"unsupported expression element {ast.dump(node)}")


def number(value, name="value"):
    """A real number from a YAML scalar or an arithmetic string like ``sqrt(35)*pi/2``."""
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(_eval_node(ast.parse(value.strip(), mode="eval")))
        except (SyntaxError, ValueError, ZeroDivisionError, OverflowError, TypeError) as exc:
            raise ConfigError(f"{name}: cannot evaluate {value!r} ({exc})") from None
    else:
        raise ConfigError(f"{name} must be a number or arithmetic string, got {value!r}")
    if not math.isfinite(out):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return out


def complex_number(value, name="value"):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"{name} must be [re, im], got {value!r}")
        return complex(number(value[0], name), number(value[1], name))
    return complex(number(value, name), 0.0)


def _values(spec, name):
    """A list of reals from ``[v, ...]``, ``{start, stop, num}`` or ``{max, levels}``."""
    if isinstance(spec, (list, tuple)):
        vals = [number(v, name) for v in spec]
    elif isinstance(spec, dict) and {"start", "stop", "num"} <= set(spec):
        num = spec["num"]
        if isinstance(num, bool) or not isinstance(num, int) or num < 1:
            raise ConfigError(f"{name}.num must be a positive integer")
        vals = np.linspace(number(spec["start"], name), number(spec["stop"], name), num).tolist()
    else:
        raise ConfigError(f"{name} must be a list or {{start, stop, num}}, got {spec!r}")
    if not vals:
        raise ConfigError(f"{name} is empty")
    return vals


def eps_grid_from(spec):
    """The tracking grid: explicit list, ``{max, num}`` (uniform) or ``{max, levels}`` (geometric)."""
    from .perturb import default_eps_grid

    if isinstance(spec, dict) and "max" in spec:
        eps_max = number(spec["max"], "eps_grid.max")
        if not eps_max > 0:
            raise ConfigError(f"eps_grid.max must be > 0, got {eps_max}")
        if "num" in spec:
            num = spec["num"]
            if isinstance(num, bool) or not isinstance(num, int) or num < 2:
                raise ConfigError("eps_grid.num must be an integer >= 2")
            grid = np.linspace(0.0, eps_max, num)
        else:
            levels = spec.get("levels", 3)
            if isinstance(levels, bool) or not isinstance(levels, int) or levels < 0:
                raise ConfigError("eps_grid.levels must be a non-negative integer")
            grid = default_eps_grid(eps_max, levels)
        return [float(v) for v in grid]
    grid = _values(spec, "eps_grid")
    if grid[0] != 0 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("eps_grid must start at 0 and increase strictly")
    return grid


@dataclass
class ExperimentConfig:
    """Validated, fully numeric experiment description."""

    command: str
    profile: dict
    escape: dict
    tau: float = 0.0
    alpha: float | None = None
    N: int | None = None
    eps: float = 0.0
    eps_grid: list = field(default_factory=list)
    seed: complex = 0j
    window: dict | None = None
    band: float = DEFAULT_BAND
    cluster_radius: float = DEFAULT_CLUSTER_RADIUS
    certify: bool = True
    validate: dict | None = None
    sweep: list = field(default_factory=list)
    match: str = "nearest"
    fit_degree: int = 2
    out: str | None = None

    @property
    def is_circle(self):
        return "circle" in self.profile["domain"]

    def build_profile(self):
        return make_profile(self.profile["kind"], self.profile["params"], self.profile["domain"])

    def build_escape(self):
        return make_escape(self.escape["kind"], self.escape["params"])

    def as_dict(self):
        d = asdict(self)
        d["seed"] = [self.seed.real, self.seed.imag]
        return d


def _section(raw, key, required=True):
    val = raw.get(key)
    if val is None:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return None
    if not isinstance(val, dict):
        raise ConfigError(f"{key} must be a mapping, got {val!r}")
    return val


def _profile_section(raw):
    sec = _section(raw, "profile")
    unknown = set(sec) - {"kind", "params", "domain"}
    if unknown:
        raise ConfigError(f"profile: unknown keys {sorted(unknown)}")
    kind = sec.get("kind")
    params = {}
    for k, v in (sec.get("params") or {}).items():
        params[k] = int(v) if k == "k" and isinstance(v, int) and not isinstance(v, bool) else number(v, f"profile.{k}")
    dom = sec.get("domain", {"segment": [-1, 1]})
    if isinstance(dom, dict) and "segment" in dom:
        dom = {"segment": [number(v, "domain.segment") for v in dom["segment"]]}
    elif isinstance(dom, dict) and "circle" in dom:
        dom = {"circle": number(dom["circle"], "domain.circle")}
    else:
        raise ConfigError(f"profile.domain must be {{segment: [a, b]}} or {{circle: L}}, got {dom!r}")
    return {"kind": kind, "params": params, "domain": dom}


def _escape_section(raw):
    sec = _section(raw, "escape", required=False) or {"kind": "zero"}
    params = {k: number(v, f"escape.{k}") for k, v in (sec.get("params") or {}).items()}
    return {"kind": sec.get("kind"), "params": params}


def _int(raw, key, lo):
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise ConfigError(f"{key} must be an integer >= {lo}, got {v!r}")
    return v


_KNOWN = {"command", "profile", "escape", "tau", "alpha", "N", "eps", "eps_grid", "seed", "window", "band",
          "cluster_radius", "certify", "validate", "sweep", "match", "fit_degree", "out"}


def config_from_dict(raw, command=None):
    """Validate a raw mapping (as parsed from YAML) into an :class:`ExperimentConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at the top level")
    unknown = set(raw) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    cmd = command or raw.get("command")
    if cmd not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {cmd!r}")
    if command and raw.get("command") not in (None, command):
        raise ConfigError(f"config is for {raw['command']!r} but {command!r} was requested")

    cfg = ExperimentConfig(command=cmd, profile=_profile_section(raw), escape=_escape_section(raw))
    try:
        cfg.build_profile()
        cfg.build_escape()
    except (ProfileError, ContourError) as exc:
        raise ConfigError(str(exc)) from None

    if "tau" in raw:
        cfg.tau = number(raw["tau"], "tau")
    if cfg.tau < 0:
        raise ConfigError(f"tau must be >= 0, got {cfg.tau}")
    if "alpha" in raw:
        cfg.alpha = number(raw["alpha"], "alpha")
        if not cfg.alpha > 0:
            raise ConfigError(f"alpha must be > 0, got {cfg.alpha}")
    elif cmd not in ("validate", "sweep-alpha"):
        raise ConfigError(f"{cmd} needs alpha")

    cfg.N = _int(raw, "N", 4) if "N" in raw else (128 if cfg.is_circle else 64)
    if "eps" in raw:
        cfg.eps = number(raw["eps"], "eps")
        if cfg.eps < 0:
            raise ConfigError(f"eps must be >= 0, got {cfg.eps}")
    if cmd == "track":
        if "eps_grid" not in raw:
            raise ConfigError("track needs eps_grid")
        cfg.eps_grid = eps_grid_from(raw["eps_grid"])
    if "seed" in raw:
        cfg.seed = complex_number(raw["seed"], "seed")
    if "window" in raw:
        try:
            make_window(raw["window"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"window: {exc}") from None
        w = raw["window"]
        if "radius" in w:
            center = w.get("center", 0)
            center = complex_number(center, "window.center")
            cfg.window = {"center": [center.real, center.imag], "radius": number(w["radius"], "window.radius")}
        else:
            cfg.window = {"re": [number(v, "window.re") for v in w["re"]], "im": [number(v, "window.im") for v in w["im"]]}
    elif cmd in ("resonances", "sweep-alpha", "sweep-tau"):
        raise ConfigError(f"{cmd} needs a window")
    for key in ("band", "cluster_radius"):
        if key in raw:
            setattr(cfg, key, number(raw[key], key))
            if not getattr(cfg, key) > 0:
                raise ConfigError(f"{key} must be > 0")
    if "certify" in raw:
        if not isinstance(raw["certify"], bool):
            raise ConfigError("certify must be true or false")
        cfg.certify = raw["certify"]
    if "validate" in raw:
        v = _section(raw, "validate")
        cfg.validate = {"c0": number(v.get("c0", 0.0), "validate.c0"), "delta": number(v.get("delta", 0.02), "validate.delta")}
        if not cfg.validate["delta"] > 0:
            raise ConfigError("validate.delta must be > 0")
    elif cmd == "validate":
        raise ConfigError("validate needs a validate section with c0 and delta")
    if cmd in ("sweep-alpha", "sweep-tau"):
        if "sweep" not in raw:
            raise ConfigError(f"{cmd} needs sweep values")
        cfg.sweep = _values(raw["sweep"], "sweep")
        if cmd == "sweep-alpha" and min(cfg.sweep) <= 0:
            raise ConfigError("swept alpha values must be > 0")
        if cmd == "sweep-tau" and min(cfg.sweep) < 0:
            raise ConfigError("swept tau values must be >= 0")
    if "match" in raw:
        if raw["match"] not in ("nearest", "overlap"):
            raise ConfigError("match must be 'nearest' or 'overlap'")
        cfg.match = raw["match"]
    if "fit_degree" in raw:
        cfg.fit_degree = _int(raw, "fit_degree", 1)
    if cfg.is_circle and cfg.N % 2:
        raise ConfigError("circle problems need an even N")
    if "out" in raw:
        cfg.out = str(raw["out"])
    return cfg


def load_config(path, command=None, overrides=None):
    """Read and validate a YAML config; ``overrides`` replace scalar keys (N, tau) before validation."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    if raw is None:
        raise ConfigError(f"config {path} is empty")
    if isinstance(raw, dict):
        raw = dict(raw)
        raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return config_from_dict(raw, command)


def with_tau(cfg, tau):
    return replace(cfg, tau=float(tau))
