"""Experiment configuration: JSON parsing, validation and coefficient sampling.

A config is a JSON object. Every key is optional except where a mode needs
it; omitted keys take the defaults of the shipped two-solution fixture::

    {
      "mode": "solve-both",
      "grid": {"n": [65, 65], "lengths": [1.0, 1.0]},
      "A": 1.0,
      "c0": {"type": "gaussian-bump", "center": [0.5, 0.5], "width": 0.2, "amplitude": 1.0},
      "f": {"type": "sine-product", "amplitude": 0.1},
      "mu": 1.0,
      "p": 2.0
    }

Coefficients are a number (constant) or an object with ``type`` one of
``constant`` (``value``), ``gaussian-bump`` (``center``, ``width``,
``amplitude``, ``offset``), ``sine-product`` (``amplitude``) or ``file``
(``path`` to a field container on the same grid). ``A`` may also be a list
of ``N`` coefficient specs, read as a diagonal matrix.
"""

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import ConfigError
from .grid import Grid, MatrixField
from .problem import ProblemData

MODES = ("check", "solve-min", "solve-mp", "solve-both", "solve-general", "mms", "props")

COEFF_KEYS = {
    "constant": {"value"},
    "gaussian-bump": {"center", "width", "amplitude", "offset"},
    "sine-product": {"amplitude"},
    "file": {"path"},
}
GRID_KEYS = {"n", "lengths"}
GENERAL_KEYS = {"H", "clip", "scheme", "max_iter"}
MMS_KEYS = {"amplitude", "levels", "scheme"}


def _default_c0():
    return {"type": "gaussian-bump", "width": 0.2, "amplitude": 1.0}


def _default_f():
    return {"type": "sine-product", "amplitude": 0.1}


@dataclass
class ExperimentConfig:
    """Validated experiment description (see module docstring for the file format)."""

    mode: str = "solve-both"
    grid: dict = field(default_factory=lambda: {"n": [65, 65], "lengths": [1.0, 1.0]})
    A: object = 1.0
    c0: object = field(default_factory=_default_c0)
    f: object = field(default_factory=_default_f)
    mu: object = 1.0
    mu_bounds: list = None
    p: float = 2.0
    tol: float = 1e-9
    path_tol: float = 1e-3
    max_sweeps: int = 3000
    rho: float = None
    n_path: int = 21
    seed: int = 0
    output: str = "out"
    general: dict = field(default_factory=lambda: {"H": "model", "clip": None, "scheme": "flux", "max_iter": 100})
    mms: dict = field(default_factory=lambda: {"amplitude": 1.0, "levels": 3, "scheme": "flux"})
    base_dir: str = field(default=".", repr=False)

    def to_dict(self):
        out = dataclasses.asdict(self)
        out.pop("base_dir")
        return out

    def make_grid(self):
        n = tuple(int(k) for k in self.grid["n"])
        lengths = self.grid.get("lengths", [1.0] * len(n))
        return Grid.box(n, tuple(float(x) for x in lengths))

    def sample(self, spec, grid, name):
        """Nodal array for a coefficient spec."""
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            return np.full(grid.shape, float(spec))
        kind = spec["type"]
        if kind == "constant":
            return np.full(grid.shape, float(spec["value"]))
        if kind == "gaussian-bump":
            center = spec.get("center", [0.5 * L for L in grid.lengths])
            if len(center) != grid.ndim:
                raise ConfigError(f"{name}.center has {len(center)} entries, grid has N={grid.ndim}")
            w = float(spec["width"])
            amp = float(spec["amplitude"])
            off = float(spec.get("offset", 0.0))
            return off + amp * grid.sample(
                lambda *x: np.exp(-sum((xk - ck) ** 2 for xk, ck in zip(x, center)) / (2 * w * w))
            )
        if kind == "sine-product":
            amp = float(spec["amplitude"])
            return amp * grid.sample(
                lambda *x: np.prod([np.sin(np.pi * xk / L) for xk, L in zip(x, grid.lengths)], axis=0)
            )
        from .io import read_field

        fgrid, values = read_field(Path(self.base_dir) / spec["path"])
        if fgrid.n != grid.n or not np.allclose(fgrid.h, grid.h, rtol=1e-12, atol=0):
            raise ConfigError(f"{name}: file grid {fgrid.n} does not match the config grid {grid.n}")
        return values

    def make_problem(self):
        grid = self.make_grid()
        if isinstance(self.A, list):
            if len(self.A) != grid.ndim:
                raise ConfigError(f"A has {len(self.A)} diagonal entries, grid has N={grid.ndim}")
            diag = [self.sample(s, grid, f"A[{k}]") for k, s in enumerate(self.A)]
        else:
            a = self.sample(self.A, grid, "A")
            diag = [a] * grid.ndim
        if min(d.min() for d in diag) <= 0:
            raise ConfigError("A must be positive definite")
        A = MatrixField.diagonal(grid, diag)
        c0 = self.sample(self.c0, grid, "c0")
        f = self.sample(self.f, grid, "f")
        mu = self.sample(self.mu, grid, "mu")
        bounds = tuple(self.mu_bounds) if self.mu_bounds is not None else None
        if np.ptp(mu) == 0 and bounds is None:
            mu = float(mu.flat[0])
        try:
            return ProblemData(grid, A, c0, f, mu, self.p, bounds)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{where}: unknown key {key!r}")


def _finite(x, where):
    try:
        val = float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {x!r}") from None
    if not np.isfinite(val):
        raise ConfigError(f"{where}: must be finite")
    return val


def _check_coeff(spec, where):
    if isinstance(spec, bool):
        raise ConfigError(f"{where}: expected a number or coefficient object")
    if isinstance(spec, (int, float)):
        _finite(spec, where)
        return
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(f"{where}: coefficient needs a 'type'")
    kind = spec["type"]
    if kind not in COEFF_KEYS:
        raise ConfigError(f"{where}.type: unknown coefficient type {kind!r}")
    _check_keys(spec, COEFF_KEYS[kind] | {"type"}, where)
    required = {
        "constant": ["value"],
        "gaussian-bump": ["width", "amplitude"],
        "sine-product": ["amplitude"],
        "file": ["path"],
    }[kind]
    for key in required:
        if key not in spec:
            raise ConfigError(f"{where}: missing key {key!r}")
    for key in ("value", "width", "amplitude", "offset"):
        if key in spec:
            _finite(spec[key], f"{where}.{key}")
    if kind == "gaussian-bump" and float(spec["width"]) <= 0:
        raise ConfigError(f"{where}.width: must be positive")
    if "center" in spec:
        for k, c in enumerate(spec["center"]):
            _finite(c, f"{where}.center[{k}]")


def _mu_values(cfg):
    spec = cfg.mu
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if spec.get("type") == "constant":
        return [float(spec["value"])]
    return None


def validate(raw, base_dir="."):
    """Build an :class:`ExperimentConfig` from a parsed JSON object."""
    names = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"base_dir"}
    _check_keys(raw, names, "config")
    cfg = ExperimentConfig(base_dir=str(base_dir))
    for key, val in raw.items():
        if key in ("grid", "general", "mms"):
            allowed = {"grid": GRID_KEYS, "general": GENERAL_KEYS, "mms": MMS_KEYS}[key]
            _check_keys(val, allowed, f"config.{key}")
            merged = dict(getattr(cfg, key)) if key != "grid" else {}
            merged.update(val)
            setattr(cfg, key, merged)
        else:
            setattr(cfg, key, val)
    if cfg.mode not in MODES:
        raise ConfigError(f"config.mode: unknown mode {cfg.mode!r} (expected one of {', '.join(MODES)})")
    if "n" not in cfg.grid:
        raise ConfigError("config.grid: missing key 'n'")
    n = cfg.grid["n"]
    if isinstance(n, int):
        n = [n]
    if not (isinstance(n, list) and 1 <= len(n) <= 3 and all(isinstance(k, int) and not isinstance(k, bool) and k >= 2 for k in n)):
        raise ConfigError("config.grid.n: expected 1 to 3 integers, each at least 2")
    cfg.grid["n"] = n
    lengths = cfg.grid.get("lengths", [1.0] * len(n))
    if isinstance(lengths, (int, float)):
        lengths = [float(lengths)] * len(n)
    if len(lengths) != len(n) or any(_finite(L, "config.grid.lengths") <= 0 for L in lengths):
        raise ConfigError("config.grid.lengths: need one positive length per axis")
    cfg.grid["lengths"] = [float(L) for L in lengths]
    if isinstance(cfg.A, list):
        for k, s in enumerate(cfg.A):
            _check_coeff(s, f"config.A[{k}]")
    else:
        _check_coeff(cfg.A, "config.A")
    for key in ("c0", "f", "mu"):
        _check_coeff(getattr(cfg, key), f"config.{key}")
    specs = [("A", cfg.A)] if not isinstance(cfg.A, list) else [(f"A[{k}]", s) for k, s in enumerate(cfg.A)]
    for name, spec in specs + [(k, getattr(cfg, k)) for k in ("c0", "f", "mu")]:
        if isinstance(spec, dict) and spec["type"] == "file":
            if not (Path(base_dir) / spec["path"]).is_file():
                raise ConfigError(f"config.{name}.path: file {spec['path']!r} not found")
    for key in ("p", "tol", "path_tol"):
        if _finite(getattr(cfg, key), f"config.{key}") <= 0:
            raise ConfigError(f"config.{key}: must be positive")
    if cfg.rho is not None and _finite(cfg.rho, "config.rho") <= 0:
        raise ConfigError("config.rho: must be positive")
    for key in ("max_sweeps", "n_path", "seed"):
        if not isinstance(getattr(cfg, key), int) or isinstance(getattr(cfg, key), bool):
            raise ConfigError(f"config.{key}: expected an integer")
    if cfg.n_path < 3:
        raise ConfigError("config.n_path: a path needs at least 3 nodes")
    if cfg.mu_bounds is not None:
        if not (isinstance(cfg.mu_bounds, list) and len(cfg.mu_bounds) == 2):
            raise ConfigError("config.mu_bounds: expected [lower, upper]")
        lo, hi = (_finite(x, "config.mu_bounds") for x in cfg.mu_bounds)
        if not 0 < lo <= hi:
            raise ConfigError("config.mu_bounds: need 0 < lower <= upper")
    mus = _mu_values(cfg)
    if cfg.mode in ("solve-both", "solve-mp") and mus is not None and mus[0] == 0:
        raise ConfigError("config.mu: multiplicity requires μ ≠ 0")
    if cfg.mode in ("solve-min", "check", "mms") and mus is not None and mus[0] == 0:
        raise ConfigError("config.mu: the change of unknown needs mu != 0")
    if cfg.mode in ("solve-both", "solve-mp", "solve-min", "check") and mus is None:
        raise ConfigError(f"config.mu: mode {cfg.mode} needs a constant mu")
    if cfg.mode == "mms":
        if mus is None:
            raise ConfigError("config.mu: mode mms needs a constant mu")
        if not isinstance(cfg.A, (int, float)) and not (
            isinstance(cfg.A, dict) and cfg.A.get("type") == "constant"
        ) and not isinstance(cfg.A, list):
            raise ConfigError("config.A: mode mms needs a constant A")
        if not isinstance(cfg.mms.get("levels"), int) or cfg.mms["levels"] < 2:
            raise ConfigError("config.mms.levels: need an integer >= 2")
    if cfg.general.get("H") not in ("model", "clipped"):
        raise ConfigError("config.general.H: expected 'model' or 'clipped'")
    if cfg.general.get("scheme") not in ("flux", "centered"):
        raise ConfigError("config.general.scheme: expected 'flux' or 'centered'")
    return cfg


def loads(text, source="<string>", base_dir="."):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return validate(raw, base_dir)


def load_config(path):
    """Parse and validate a JSON config file; relative file paths resolve against its folder."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return loads(text, str(path), path.parent)


def default_config(**overrides):
    """The shipped two-solution fixture, optionally with top-level overrides."""
    return validate(overrides)
