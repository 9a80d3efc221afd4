"""Scenario configuration files: parsing, validation and lossless printing.

Configs are JSON with a fixed schema; class matrices are row-major [re, im]
pairs and the density is either a tiny closed-form expression (constants, +,
-, *, exp, sin, cos of the active coordinates) or a stored grid file.  Parse
errors carry the offending field path or JSON line number.
"""

from __future__ import annotations

import ast
import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .cohomology import CohomologyClass
from .flow import IntegratorSettings, Scenario
from .geometry import BACKENDS, PeriodicGrid, ScalarField
from .verify import CHECKS


class ConfigError(ValueError):
    """A scenario config failed to parse or validate (CLI exit code 3)."""


INTEGRATOR_KEYS = ("rtol", "atol", "dt_init", "dt_min", "pos_floor")

_RHO_FUNCTIONS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}


@dataclass(frozen=True)
class CheckSpec:
    name: str
    epsilon: float = None
    phi_file: str = None

    def to_json_dict(self):
        out = {"name": self.name}
        if self.epsilon is not None:
            out["epsilon"] = self.epsilon
        if self.phi_file is not None:
            out["phi_file"] = self.phi_file
        return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Plain-data mirror of one scenario file; round-trips losslessly."""

    name: str
    n: int
    active_axes: tuple
    resolution: int
    L: tuple  # row-major ((re, im), ...) rows
    omega0: tuple
    rho: dict
    gauge: str = "u"
    t_max: float = 10.0
    sample_dt: float = 0.05
    backend: str = "spectral"
    k_override: int = None
    integrator: dict = field(default_factory=dict)
    checks: tuple = None

    def to_json_dict(self):
        out = {
            "name": self.name,
            "n": self.n,
            "active_axes": list(self.active_axes),
            "resolution": self.resolution,
            "L": _matrix_to_json(self.L),
            "omega0": _matrix_to_json(self.omega0),
            "rho": dict(self.rho),
            "gauge": self.gauge,
            "t_max": self.t_max,
            "sample_dt": self.sample_dt,
            "backend": self.backend,
            "integrator": dict(self.integrator),
        }
        if self.k_override is not None:
            out["k_override"] = self.k_override
        if self.checks is not None:
            out["checks"] = [c.to_json_dict() for c in self.checks]
        return out


def _matrix_to_json(rows):
    return [[list(pair) for pair in row] for row in rows]


def _expect(cond, path, message):
    if not cond:
        raise ConfigError(f"field '{path}': {message}")


def _get(data, key, path, types, default=_expect):
    if key not in data:
        if default is not _expect:
            return default
        raise ConfigError(f"field '{path}.{key}': missing")
    value = data[key]
    if types is not None and not isinstance(value, types):
        raise ConfigError(
            f"field '{path}.{key}': expected {types}, got {type(value).__name__}")
    return value


def _parse_matrix(raw, n, path):
    _expect(isinstance(raw, list) and len(raw) == n, path, f"must be {n} rows")
    rows = []
    for i, row in enumerate(raw):
        _expect(isinstance(row, list) and len(row) == n, f"{path}[{i}]",
                f"must be {n} [re, im] pairs")
        out_row = []
        for j, pair in enumerate(row):
            _expect(isinstance(pair, list) and len(pair) == 2
                    and all(isinstance(x, (int, float)) for x in pair),
                    f"{path}[{i}][{j}]", "must be a [re, im] pair of numbers")
            out_row.append((float(pair[0]), float(pair[1])))
        rows.append(tuple(out_row))
    return tuple(rows)


def matrix_from_pairs(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def parse_config(text, source="<config>") -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")

    name = _get(data, "name", "", str)
    n = _get(data, "n", "", int)
    _expect(n >= 1, "n", "must be >= 1")
    axes = _get(data, "active_axes", "", list)
    _expect(all(isinstance(a, int) for a in axes), "active_axes", "must be integers")
    resolution = _get(data, "resolution", "", int)
    L = _parse_matrix(_get(data, "L", "", list), n, "L")
    omega0 = _parse_matrix(_get(data, "omega0", "", list), n, "omega0")

    rho = _get(data, "rho", "", dict)
    if "expr" in rho:
        _expect(isinstance(rho["expr"], str), "rho.expr", "must be a string")
        norm = rho.get("normalize", False)
        _expect(isinstance(norm, bool), "rho.normalize", "must be a boolean")
        rho = {"expr": rho["expr"], "normalize": norm}
    elif "file" in rho:
        _expect(isinstance(rho["file"], str), "rho.file", "must be a path string")
        rho = {"file": rho["file"]}
    else:
        raise ConfigError("field 'rho': needs either 'expr' or 'file'")

    gauge = _get(data, "gauge", "", str, "u")
    _expect(gauge in ("u", "v"), "gauge", "must be 'u' or 'v'")
    t_max = float(_get(data, "t_max", "", (int, float)))
    sample_dt = float(_get(data, "sample_dt", "", (int, float)))
    backend = _get(data, "backend", "", str, "spectral")
    _expect(backend in BACKENDS, "backend", f"must be one of {BACKENDS}")
    k_override = _get(data, "k_override", "", int, None)

    integ = _get(data, "integrator", "", dict, {})
    for key in integ:
        _expect(key in INTEGRATOR_KEYS, f"integrator.{key}",
                f"unknown key (allowed: {INTEGRATOR_KEYS})")
        _expect(isinstance(integ[key], (int, float)), f"integrator.{key}",
                "must be a number")
    integ = {k: float(v) for k, v in integ.items()}

    checks_raw = _get(data, "checks", "", list, None)
    checks = None
    if checks_raw is not None:
        checks = []
        for i, item in enumerate(checks_raw):
            _expect(isinstance(item, dict), f"checks[{i}]", "must be an object")
            cname = _get(item, "name", f"checks[{i}]", str)
            _expect(cname in CHECKS, f"checks[{i}].name",
                    f"unknown check (available: {sorted(CHECKS)})")
            eps = item.get("epsilon")
            if eps is not None:
                _expect(isinstance(eps, (int, float)) and eps > 0,
                        f"checks[{i}].epsilon", "must be a positive number")
                eps = float(eps)
            phi_file = item.get("phi_file")
            if phi_file is not None:
                _expect(isinstance(phi_file, str), f"checks[{i}].phi_file",
                        "must be a path string")
            checks.append(CheckSpec(cname, eps, phi_file))
        checks = tuple(checks)

    known = {"name", "n", "active_axes", "resolution", "L", "omega0", "rho",
             "gauge", "t_max", "sample_dt", "backend", "k_override",
             "integrator", "checks"}
    for key in data:
        _expect(key in known, key, "unknown field")

    return ScenarioConfig(
        name=name, n=n, active_axes=tuple(axes), resolution=resolution,
        L=L, omega0=omega0, rho=rho, gauge=gauge, t_max=t_max,
        sample_dt=sample_dt, backend=backend, k_override=k_override,
        integrator=integ, checks=checks)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, source=str(path))


def print_config(cfg: ScenarioConfig) -> str:
    return json.dumps(cfg.to_json_dict(), indent=2, sort_keys=True) + "\n"


# -- density expressions --------------------------------------------------------


def _eval_rho_node(node, env, path):
    if isinstance(node, ast.Expression):
        return _eval_rho_node(node.body, env, path)
    if isinstance(node, ast.Constant):
        _expect(isinstance(node.value, (int, float)), path,
                f"constant {node.value!r} is not a number")
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id not in env:
            raise ConfigError(
                f"field '{path}': coordinate '{node.id}' is not an active axis")
        return env[node.id]
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
        a = _eval_rho_node(node.left, env, path)
        b = _eval_rho_node(node.right, env, path)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        return a * b
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        a = _eval_rho_node(node.operand, env, path)
        return a if isinstance(node.op, ast.UAdd) else -a
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in _RHO_FUNCTIONS and len(node.args) == 1 \
            and not node.keywords:
        return _RHO_FUNCTIONS[node.func.id](_eval_rho_node(node.args[0], env, path))
    raise ConfigError(
        f"field '{path}': unsupported syntax {ast.dump(node)[:60]}; the grammar "
        "allows numbers, +, -, *, and exp/sin/cos of active coordinates")


def evaluate_density(expr, grid: PeriodicGrid, path="rho.expr"):
    env = {}
    for axis in grid.active_axes:
        env[grid.axis_name(axis)] = grid.coordinate(axis)
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"field '{path}': {exc.msg} at offset {exc.offset}") from None
    vals = _eval_rho_node(tree, env, path)
    vals = np.broadcast_to(np.asarray(vals, dtype=float), grid.shape).copy()
    return vals


def build_scenario(cfg: ScenarioConfig, base_dir=".") -> Scenario:
    """Materialize a Scenario from a parsed config (CLI exit 3 on any failure)."""
    try:
        grid = PeriodicGrid(n=cfg.n, active_axes=cfg.active_axes,
                            resolution=cfg.resolution, backend=cfg.backend)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if "expr" in cfg.rho:
        vals = evaluate_density(cfg.rho["expr"], grid)
        if np.any(vals <= 0):
            raise ConfigError("field 'rho.expr': density must be strictly positive")
        if cfg.rho.get("normalize"):
            vals = vals / np.mean(vals)
    else:
        path = os.path.join(base_dir, cfg.rho["file"])
        try:
            vals = np.asarray(np.load(path), dtype=float)
        except Exception as exc:
            raise ConfigError(f"field 'rho.file': cannot load {path}: {exc}") from None
        if vals.shape != grid.shape:
            raise ConfigError(
                f"field 'rho.file': shape {vals.shape} does not match grid {grid.shape}")
    try:
        rho = ScalarField(grid, vals)
        L = CohomologyClass(matrix_from_pairs(cfg.L))
        omega0 = CohomologyClass(matrix_from_pairs(cfg.omega0))
        integ = IntegratorSettings(**cfg.integrator)
        scenario = Scenario(
            n=cfg.n, grid=grid, L=L, omega0=omega0, rho=rho, gauge=cfg.gauge,
            k_override=cfg.k_override, t_max=cfg.t_max, sample_dt=cfg.sample_dt,
            integrator=integ, name=cfg.name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return scenario


def load_phi(spec, scenario, base_dir="."):
    """Resolve a check's phi source to a ScalarField (None means phi = 0)."""
    if spec.phi_file is None:
        return None
    path = os.path.join(base_dir, spec.phi_file)
    try:
        vals = np.asarray(np.load(path), dtype=float)
    except Exception as exc:
        raise ConfigError(f"cannot load phi from {path}: {exc}") from None
    if vals.shape != scenario.grid.shape:
        raise ConfigError(f"phi shape {vals.shape} does not match the grid")
    return ScalarField(scenario.grid, vals)


def config_digest(cfg: ScenarioConfig) -> str:
    import hashlib

    return hashlib.sha256(print_config(cfg).encode()).hexdigest()
