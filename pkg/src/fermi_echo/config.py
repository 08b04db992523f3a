"""JSON run/sweep descriptions and their validation.

The document is flat: a ``gas`` object, optional ``grid`` object, the
coupling ``alpha`` and ``method`` at top level, and for sweeps ``axis``,
``values`` and ``parallelism``.  Validation errors always carry the dotted
path of the offending key.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .echo import TimeGrid
from .runner import RunSpec, SweepSpec, SWEEP_AXES, default_grid
from .trap_gas import TrapGasConfig

__all__ = ["ConfigError", "parse_document", "read_document", "load_config"]

_MISSING = object()

_GAS_KEYS = ("omega", "n_fermions", "spin_degeneracy", "beta", "cutoff")
_GRID_KEYS = ("t_max", "n_steps")


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the dotted key that failed."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def _get_number(mapping, key, path, *, default=_MISSING, minimum=None, exclusive=False):
    if key not in mapping:
        if default is _MISSING:
            raise ConfigError(path, "required key is missing")
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, "must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    if minimum is not None:
        if exclusive and value <= minimum:
            raise ConfigError(path, f"must be greater than {minimum:g}")
        if not exclusive and value < minimum:
            raise ConfigError(path, f"must be at least {minimum:g}")
    return value


def _get_int(mapping, key, path, *, default=_MISSING, minimum=None):
    if key not in mapping:
        if default is _MISSING:
            raise ConfigError(path, "required key is missing")
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, "must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be at least {minimum}")
    return value


def parse_document(doc) -> RunSpec | SweepSpec:
    """Build a RunSpec, or a SweepSpec when ``axis``/``values`` are present."""
    if not isinstance(doc, dict):
        raise ConfigError("", "configuration must be a JSON object")
    is_sweep = "axis" in doc or "values" in doc
    if not is_sweep and "parallelism" in doc:
        raise ConfigError("parallelism", "only meaningful for sweeps")
    allowed = {"gas", "alpha", "method", "grid"}
    if is_sweep:
        allowed |= {"axis", "values", "parallelism"}
    for key in doc:
        if key not in allowed:
            raise ConfigError(str(key), "unknown key")

    axis = None
    values = None
    parallelism = 1
    if is_sweep:
        if "axis" not in doc:
            raise ConfigError("axis", "required key is missing")
        axis = doc["axis"]
        if axis not in SWEEP_AXES:
            raise ConfigError("axis", f"must be one of {', '.join(SWEEP_AXES)}")
        if "values" not in doc:
            raise ConfigError("values", "required key is missing")
        raw = doc["values"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("values", "must be a non-empty array")
        values = []
        for i, item in enumerate(raw):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"values[{i}]", "must be a number")
            values.append(float(item))
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("values", "must be strictly increasing")
        if axis == "alpha":
            if values[0] < 0:
                raise ConfigError("values", "alpha values must be non-negative")
        elif values[0] <= 0:
            raise ConfigError("values", f"{axis} values must be positive")
        parallelism = _get_int(doc, "parallelism", "parallelism", default=1, minimum=1)

    gas_doc = doc.get("gas", _MISSING)
    if gas_doc is _MISSING:
        raise ConfigError("gas", "required key is missing")
    if not isinstance(gas_doc, dict):
        raise ConfigError("gas", "must be an object")
    for key in gas_doc:
        if key not in _GAS_KEYS:
            raise ConfigError(f"gas.{key}", "unknown key")
    omega = _get_number(gas_doc, "omega", "gas.omega", default=1.0,
                        minimum=0.0, exclusive=True)
    n_fermions = _get_int(gas_doc, "n_fermions", "gas.n_fermions", minimum=1)
    spin = _get_int(gas_doc, "spin_degeneracy", "gas.spin_degeneracy",
                    default=2, minimum=1)
    beta_default = values[0] if axis == "beta" else _MISSING
    beta = _get_number(gas_doc, "beta", "gas.beta", default=beta_default,
                       minimum=0.0, exclusive=True)
    cutoff = _get_int(gas_doc, "cutoff", "gas.cutoff", default=None, minimum=1)
    if cutoff is not None and cutoff * spin <= n_fermions:
        raise ConfigError("gas.cutoff", "too small to hold n_fermions particles")

    alpha_default = values[0] if axis == "alpha" else _MISSING
    alpha = _get_number(doc, "alpha", "alpha", default=alpha_default, minimum=0.0)
    method = doc.get("method", "exact")
    if method not in ("exact", "cumulant"):
        raise ConfigError("method", "must be 'exact' or 'cumulant'")

    grid_doc = doc.get("grid", {})
    if not isinstance(grid_doc, dict):
        raise ConfigError("grid", "must be an object")
    for key in grid_doc:
        if key not in _GRID_KEYS:
            raise ConfigError(f"grid.{key}", "unknown key")
    base_grid = default_grid(omega)
    t_max = _get_number(grid_doc, "t_max", "grid.t_max", default=base_grid.t_max,
                        minimum=0.0, exclusive=True)
    n_steps = _get_int(grid_doc, "n_steps", "grid.n_steps",
                       default=base_grid.n_steps, minimum=2)

    gas = TrapGasConfig(omega=omega, n_fermions=n_fermions, beta=beta,
                        spin_degeneracy=spin, cutoff=cutoff)
    grid = TimeGrid(t_max=t_max, n_steps=n_steps)
    spec = RunSpec(gas=gas, alpha=alpha, method=method, grid=grid)
    if not is_sweep:
        return spec
    return SweepSpec(base=spec, axis=axis, values=tuple(values),
                     parallelism=parallelism)


def read_document(path) -> dict:
    """Raw JSON object from ``path``, before schema validation."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError("", f"config file not found: {p}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON in {p}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("", "configuration must be a JSON object")
    return doc


def load_config(path) -> RunSpec | SweepSpec:
    """Parse the JSON document at ``path``."""
    return parse_document(read_document(path))
