"""
Run Configuration

Loads config.yaml, applies .env and environment overrides, then CLI
overrides, and validates the result into frozen records before any
computation starts.
"""

import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml
from dotenv import load_dotenv

from ..common.errors import ConfigError
from ..gauge.connection import FAMILIES

logger = logging.getLogger(__name__)

ROOT = Path(__file__).resolve().parent.parent.parent
DEFAULT_CONFIG = ROOT / "config.yaml"

SECTIONS = ("run", "conventions", "tolerances", "connections", "measure", "kinematics",
            "action", "eom", "jacobians", "pcm", "output")
GEOMETRY_CHECKS = ("sylvester", "area", "coarea", "relation", "graph", "delta_limit")

_MISSING = object()


@dataclass(frozen=True)
class ConnectionSpec:
    family: str
    dim: int
    n: int
    params: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return f"{self.family}(D={self.dim},N={self.n})"


@dataclass(frozen=True)
class MeasureSpec:
    """Gaussian loop measure: mode covariance 1/(eps ((pi k)^2 + 1)^2), k <= cutoff."""

    epsilon: float
    cutoff: int


@dataclass(frozen=True)
class GeometrySpec:
    name: str
    check: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LatticeSpec:
    L: int
    n: int
    n_samples: int
    eps_schedule: tuple[float, ...]
    jacobian_L: int
    jacobian_configs: int
    coupling: float
    dof_sizes: tuple[int, ...]
    abelian_sizes: tuple[int, ...]
    abelian_epsilon: float
    abelian_samples: int
    branch_coupling: float


@dataclass(frozen=True)
class RunConfig:
    seed: int
    threads: int
    mg_sign: int
    tolerances: dict
    connections: tuple[ConnectionSpec, ...]
    measure: MeasureSpec
    kinematics: dict
    action: dict
    eom: dict
    jacobian_samples: int
    jacobians: tuple[GeometrySpec, ...]
    pcm: LatticeSpec
    out: Path | None = None
    csv: Path | None = None
    source: Path | None = None

    def tolerance(self, name: str) -> float:
        if name not in self.tolerances:
            raise ConfigError(f"tolerances.{name}", "not set")
        return self.tolerances[name]


def _value(raw: dict, section: str, key: str, kind: type = float, default=_MISSING, minimum=None):
    name = f"{section}.{key}"
    if raw.get(key) is None:
        if default is _MISSING:
            raise ConfigError(name, "missing")
        return default
    value = raw[key]
    try:
        if isinstance(value, bool) or (kind is int and float(value) != int(value)):
            raise ValueError
        value = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected {kind.__name__}, got {value!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(name, f"must be >= {minimum}, got {value}")
    return value


def _list(raw: dict, section: str, key: str, kind: type = float, default=_MISSING,
          minimum=None, positive: bool = False) -> tuple:
    name = f"{section}.{key}"
    if raw.get(key) is None:
        if default is _MISSING:
            raise ConfigError(name, "missing")
        return tuple(default)
    items = raw[key]
    if not isinstance(items, list) or not items:
        raise ConfigError(name, f"expected a non-empty list, got {items!r}")
    values = tuple(_value({key: v}, section, key, kind, minimum=minimum) for v in items)
    if positive and any(v <= 0 for v in values):
        raise ConfigError(name, "entries must be positive")
    return values


def _section(raw: dict, name: str) -> dict:
    value = raw.get(name) or {}
    if not isinstance(value, dict):
        raise ConfigError(name, f"expected a mapping, got {type(value).__name__}")
    return value


def _connections(items) -> tuple[ConnectionSpec, ...]:
    if not isinstance(items, list) or not items:
        raise ConfigError("connections", "expected a non-empty list of connection specs")
    specs = []
    for i, item in enumerate(items):
        key = f"connections[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(key, "expected a mapping")
        family = item.get("family")
        if family not in FAMILIES:
            raise ConfigError(f"{key}.family", f"unknown connection family {family!r} (known: {', '.join(FAMILIES)})")
        dim = _value(item, key, "dim", int, minimum=2)
        n = _value(item, key, "n", int, minimum=2)
        params = {k: v for k, v in item.items() if k not in ("family", "dim", "n")}
        specs.append(ConnectionSpec(family, dim, n, params))
    return tuple(specs)


def _tolerances(raw: dict) -> dict:
    if not raw:
        raise ConfigError("tolerances", "missing")
    return {name: _value(raw, "tolerances", name, float, minimum=0.0) for name in raw}


def _kinematics(raw: dict) -> dict:
    s = "kinematics"
    return {
        "loops": _value(raw, s, "loops", int, 5, minimum=1),
        "loop_epsilon": _value(raw, s, "loop_epsilon", float, 0.05, minimum=1e-12),
        "loop_cutoff": _value(raw, s, "loop_cutoff", int, 3, minimum=1),
        "s_points": _list(raw, s, "s_points", float, (0.3, 0.45, 0.6)),
        "steps": _value(raw, s, "steps", int, 512, minimum=1),
        "bump_width": _value(raw, s, "bump_width", float, 0.04, minimum=1e-6),
        "fd_step": _value(raw, s, "fd_step", float, 1e-6, minimum=1e-12),
        "t_map_points": _value(raw, s, "t_map_points", int, 20, minimum=1),
        "t_map_steps": _value(raw, s, "t_map_steps", int, 64, minimum=1),
        "radial_scale": _value(raw, s, "radial_scale", float, 0.6, minimum=0.0),
    }


def _action(raw: dict) -> dict:
    s = "action"
    return {
        "s_grid": _list(raw, s, "s_grid", float, (0.2, 0.35, 0.5, 0.65, 0.8)),
        "n_samples": _value(raw, s, "n_samples", int, 10_000, minimum=2),
        "steps": _value(raw, s, "steps", int, 32, minimum=1),
        "discriminating_samples": _value(raw, s, "discriminating_samples", int, 4000, minimum=2),
    }


def _eom(raw: dict) -> dict:
    s = "eom"
    solutions = raw.get("solution_families", ["zero", "abelian_constant_F"])
    unknown = [f for f in solutions if f not in FAMILIES]
    if unknown:
        raise ConfigError("eom.solution_families", f"unknown families {unknown}")
    return {
        "points": _value(raw, s, "points", int, 6, minimum=1),
        "h": _value(raw, s, "h", float, 1e-3, minimum=1e-12),
        "steps": _value(raw, s, "steps", int, 128, minimum=1),
        "solution_families": tuple(solutions),
    }


def _geometries(raw: dict) -> tuple[GeometrySpec, ...]:
    catalog = raw.get("catalog")
    if not isinstance(catalog, list) or not catalog:
        raise ConfigError("jacobians.catalog", "expected a non-empty list")
    specs = []
    for i, item in enumerate(catalog):
        key = f"jacobians.catalog[{i}]"
        if not isinstance(item, dict) or "name" not in item:
            raise ConfigError(key, "expected a mapping with a name")
        if item.get("check") not in GEOMETRY_CHECKS:
            raise ConfigError(f"{key}.check", f"expected one of {GEOMETRY_CHECKS}, got {item.get('check')!r}")
        params = {k: v for k, v in item.items() if k not in ("name", "check")}
        specs.append(GeometrySpec(str(item["name"]), item["check"], params))
    return tuple(specs)


def _lattice(raw: dict) -> LatticeSpec:
    s = "pcm"
    return LatticeSpec(
        L=_value(raw, s, "L", int, 2, minimum=2),
        n=_value(raw, s, "n", int, 2, minimum=2),
        n_samples=_value(raw, s, "n_samples", int, 1_000_000, minimum=2),
        eps_schedule=_list(raw, s, "eps_schedule", float, (1e-2, 5e-3), positive=True),
        jacobian_L=_value(raw, s, "jacobian_L", int, 3, minimum=2),
        jacobian_configs=_value(raw, s, "jacobian_configs", int, 50, minimum=1),
        coupling=_value(raw, s, "coupling", float, 0.3, minimum=0.0),
        dof_sizes=_list(raw, s, "dof_sizes", int, (2, 3, 4), minimum=2),
        abelian_sizes=_list(raw, s, "abelian_sizes", int, (2, 3, 4), minimum=2),
        abelian_epsilon=_value(raw, s, "abelian_epsilon", float, 1e-4, minimum=1e-300),
        abelian_samples=_value(raw, s, "abelian_samples", int, 0, minimum=0),
        branch_coupling=_value(raw, s, "branch_coupling", float, 0.0, minimum=0.0),
    )


def parse_tolerance(item: str) -> tuple[str, float]:
    """NAME=VALUE from the command line."""
    name, sep, value = item.partition("=")
    if not sep or not name:
        raise ConfigError("--tolerance", f"expected NAME=VALUE, got {item!r}")
    name = name.strip()
    return name, _value({name: value}, "tolerances", name, float, minimum=0.0)


def validate(raw: dict, source: Path | None = None) -> RunConfig:
    """Turn a parsed YAML mapping into a RunConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a mapping")
    unknown = sorted(set(raw) - set(SECTIONS))
    if unknown:
        raise ConfigError(unknown[0], f"unknown section (known: {', '.join(SECTIONS)})")
    run = _section(raw, "run")
    conventions = _section(raw, "conventions")
    mg_sign = _value(conventions, "conventions", "mg_sign", int, -1)
    if mg_sign not in (-1, 1):
        raise ConfigError("conventions.mg_sign", f"must be +1 or -1, got {mg_sign}")
    measure = _section(raw, "measure")
    output = _section(raw, "output")
    jacobians = _section(raw, "jacobians")
    return RunConfig(
        seed=_value(run, "run", "seed", int, minimum=0),
        threads=_value(run, "run", "threads", int, 1, minimum=1),
        mg_sign=mg_sign,
        tolerances=_tolerances(_section(raw, "tolerances")),
        connections=_connections(raw.get("connections")),
        measure=MeasureSpec(_value(measure, "measure", "epsilon", float, minimum=1e-300),
                            _value(measure, "measure", "cutoff", int, minimum=1)),
        kinematics=_kinematics(_section(raw, "kinematics")),
        action=_action(_section(raw, "action")),
        eom=_eom(_section(raw, "eom")),
        jacobian_samples=_value(jacobians, "jacobians", "n_samples", int, 40_000, minimum=2),
        jacobians=_geometries(jacobians),
        pcm=_lattice(_section(raw, "pcm")),
        out=Path(output["jsonl"]) if output.get("jsonl") else None,
        csv=Path(output["csv"]) if output.get("csv") else None,
        source=source,
    )


def read_config(path: Path) -> dict:
    if not path.exists():
        raise ConfigError("config", f"{path} not found")
    try:
        with open(path) as f:
            return yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError("config", f"cannot parse {path}: {e}") from None


def load_config(path: str | Path | None = None, seed: int | None = None, threads: int | None = None,
                out: str | Path | None = None, csv: str | Path | None = None,
                tolerances=(), env: dict | None = None) -> RunConfig:
    """
    File < environment < arguments.

    LOOPLAB_CONFIG selects the file when no path is given; LOOPLAB_SEED,
    LOOPLAB_THREADS and LOOPLAB_OUT override the file's values.
    """
    if env is None:
        load_dotenv(dotenv_path=ROOT / ".env")
        env = os.environ
    source = Path(path or env.get("LOOPLAB_CONFIG") or DEFAULT_CONFIG)
    config = validate(read_config(source), source)

    overrides = {}
    if env.get("LOOPLAB_SEED"):
        overrides["seed"] = _value(env, "env", "LOOPLAB_SEED", int, minimum=0)
    if env.get("LOOPLAB_THREADS"):
        overrides["threads"] = _value(env, "env", "LOOPLAB_THREADS", int, minimum=1)
    if env.get("LOOPLAB_OUT"):
        overrides["out"] = Path(env["LOOPLAB_OUT"])
    if seed is not None:
        overrides["seed"] = _value({"seed": seed}, "--seed", "seed", int, minimum=0)
    if threads is not None:
        overrides["threads"] = _value({"threads": threads}, "--threads", "threads", int, minimum=1)
    if out is not None:
        overrides["out"] = Path(out)
    if csv is not None:
        overrides["csv"] = Path(csv)
    if tolerances:
        merged = dict(config.tolerances)
        for item in tolerances:
            name, value = parse_tolerance(item)
            if name not in merged:
                raise ConfigError(f"tolerances.{name}", f"unknown tolerance (known: {', '.join(sorted(merged))})")
            merged[name] = value
        overrides["tolerances"] = merged
    config = replace(config, **overrides)
    logger.debug("config %s: seed %d, %d threads, %d connections", source, config.seed, config.threads,
                 len(config.connections))
    return config
