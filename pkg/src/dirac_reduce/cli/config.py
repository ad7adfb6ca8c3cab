"""Run configuration: one YAML document per run, unknown keys rejected."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..algebra import Potential2x2, ReductionParams
from ..errors import ConfigError, ParameterError
from ..numerics.grid import Grid1D, Grid2D, GridTX
from .exprs import field_from_expression, number

REQUIRED = object()

MODEL_PARAMS = {
    "poschl_teller": {"delta": REQUIRED, "delta2": "1/sqrt(2)", "k_y": 0.0, "n": [1, 2]},
    "crossed_combs": {"m1": REQUIRED, "omega1": REQUIRED, "m2": REQUIRED, "omega2": REQUIRED,
                      "phi": 0.0},
    "soliton": {"m": REQUIRED, "omega": REQUIRED, "Delta": 1.0, "phi": "pi/2"},
    "scenario2": {"delta": REQUIRED, "V2": REQUIRED, "k_y": 0.0, "n": [1, 2], "phi": "pi/2"},
    "custom": {"first": REQUIRED, "second": REQUIRED},
}
GRID_AXES = {
    "poschl_teller": ("x",),
    "crossed_combs": ("x", "y"),
    "soliton": ("t", "x"),
    "scenario2": ("t", "x"),
    "custom": ("x", "y"),
}
SECTIONS = {
    "spectrum": {"n_points": 4000, "half_width": 60.0, "k_y": None, "n": None,
                 "window_low": 0.05, "scheme": "staggered", "method": "auto"},
    "verify": {"potential_file": None, "random_blocks": 10, "seed": 0},
    "perturb": {"v1": 0.0, "v2": 0.0, "v3": 0.0, "v4": 0.0, "tau": "pi/4", "phi": "pi/2",
                "epsilon": 1},
    "detect": {"input": None, "epsilon": 1},
    "tolerances": {"spectrum": 1e-3, "residual": 1e-8, "residual_lifted": 1e-6,
                   "expectation": 1e-10, "conjugation": 1e-12, "detect": 1e-8},
    "output": {"dir": "dirac_reduce_out"},
}
TOP_KEYS = {"model", "params", "reduction", "grid"} | set(SECTIONS)


@dataclass
class RunConfig:
    model: str
    params: dict
    reduction: ReductionParams | None
    grid: object
    sections: dict = field(default_factory=dict)
    source: str = ""
    raw: dict = field(default_factory=dict)

    def section(self, name):
        return self.sections[name]

    @property
    def tolerances(self):
        return self.sections["tolerances"]

    @property
    def output_dir(self):
        return Path(self.sections["output"]["dir"])


def _check_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(d).__name__}")
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(map(str, unknown))}")


def _merge(d, defaults, where):
    d = {} if d is None else d
    _check_keys(d, defaults, where)
    out = {}
    for k, v in defaults.items():
        if k in d:
            out[k] = d[k]
        elif v is REQUIRED:
            raise ConfigError(f"missing required key {where}.{k}")
        else:
            out[k] = v
    return out


def _int_list(value, where):
    vals = value if isinstance(value, list) else [value]
    out = []
    for v in vals:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{where} must be an integer or a list of integers, got {v!r}")
        out.append(v)
    return out


def _k_grid(value, where):
    if value is None:
        return None
    if isinstance(value, dict):
        entry = _merge(value, {"min": REQUIRED, "max": REQUIRED, "count": REQUIRED}, where)
        return np.linspace(number(entry["min"], where), number(entry["max"], where), int(entry["count"]))
    vals = value if isinstance(value, list) else [value]
    return np.array([number(v, where) for v in vals])


def _axis(entry, name):
    if not isinstance(entry, list) or len(entry) != 3:
        raise ConfigError(f"grid.{name} must be [min, max, n_points]")
    lo, hi = number(entry[0], f"grid.{name}"), number(entry[1], f"grid.{name}")
    n = entry[2]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError(f"grid.{name} n_points must be an integer")
    return Grid1D(lo, hi, n, name)


def _default_grid(model, params):
    if model == "poschl_teller":
        return {"x": [-40.0 * params["delta"], 40.0 * params["delta"], 4001]}
    if model == "scenario2":
        w = 40.0 * params["delta"]
        return {"t": [-2.0, 2.0, 21], "x": [-w, w, 4001]}
    if model == "crossed_combs":
        return {"x": [-6.0, 6.0, 121], "y": [-6.0, 6.0, 121]}
    if model == "soliton":
        return {"t": [-3.0, 3.0, 61], "x": [-10.0, 10.0, 401]}
    return {"x": [-5.0, 5.0, 33], "y": [-5.0, 5.0, 33]}


def _grid(model, entry, params):
    axes = GRID_AXES[model]
    entry = _default_grid(model, params) if entry is None else entry
    _check_keys(entry, axes, "grid")
    missing = [a for a in axes if a not in entry]
    if missing:
        raise ConfigError(f"grid for model {model!r} needs axes {axes}, missing {missing}")
    g = {a: _axis(entry[a], a) for a in axes}
    if axes == ("x",):
        return g["x"]
    if axes == ("x", "y"):
        return Grid2D(g["x"], g["y"])
    return GridTX(g["t"], g["x"])


def _pair_half(entry, where):
    entry = _merge(entry, {"a": 0.0, "b": 0.0, "d": 0.0}, where)
    return Potential2x2(field_from_expression(entry["a"], real=True), field_from_expression(entry["b"]),
                        field_from_expression(entry["d"], real=True))


def _params(model, raw):
    p = _merge(raw, MODEL_PARAMS[model], "params")
    out = {}
    for k, v in p.items():
        if k == "n":
            out[k] = _int_list(v, "params.n")
        elif k in ("first", "second"):
            out[k] = _pair_half(v, f"params.{k}")
        elif k == "k_y" and model == "poschl_teller":
            out[k] = _k_grid(v, "params.k_y")
        else:
            out[k] = number(v, f"params.{k}")
    return out


def _reduction(model, raw):
    if model in ("crossed_combs", "soliton", "scenario2"):
        if raw is not None:
            raise ConfigError(f"model {model!r} fixes the reduction parameters; remove 'reduction'")
        return None
    if model == "poschl_teller":
        defaults = {"tau": "pi/4", "phi": "pi/4", "epsilon": -1}
    else:
        defaults = {"tau": REQUIRED, "phi": REQUIRED, "epsilon": REQUIRED}
    r = _merge(raw, defaults, "reduction")
    eps = r["epsilon"]
    if isinstance(eps, bool) or eps not in (1, -1):
        raise ParameterError(f"reduction.epsilon must be +1 or -1, got {eps!r}")
    return ReductionParams(number(r["tau"], "reduction.tau"), number(r["phi"], "reduction.phi"), eps)


def parse_config(doc, source=""):
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping at top level")
    _check_keys(doc, TOP_KEYS, "configuration")
    model = doc.get("model")
    if model not in MODEL_PARAMS:
        raise ConfigError(f"model must be one of {sorted(MODEL_PARAMS)}, got {model!r}")
    params = _params(model, doc.get("params"))
    reduction = _reduction(model, doc.get("reduction"))
    grid = _grid(model, doc.get("grid"), params)
    sections = {name: _merge(doc.get(name), defaults, name) for name, defaults in SECTIONS.items()}
    sections["tolerances"] = {k: number(v, f"tolerances.{k}") for k, v in sections["tolerances"].items()}
    return RunConfig(model, params, reduction, grid, sections, source, doc)


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    return parse_config(doc, str(path))
