"""Parameter-point pipeline, sweeps over one axis, and CSV output."""

from __future__ import annotations

import contextlib
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .echo import EchoSeries, TimeGrid, echo_cumulant, echo_exact
from .nonmarkov import NonMarkovReport, accumulate_pm, volume_series
from .trap_gas import TrapGasConfig, build_model, coupling_from_alpha, solve_chemical_potential

__all__ = [
    "RunSpec",
    "SweepSpec",
    "RunRecord",
    "PipelineError",
    "run_point",
    "sweep",
    "emit_csv",
    "default_grid",
]

logger = logging.getLogger(__name__)

SWEEP_AXES = ("alpha", "beta", "omega")

ECHO_COLUMNS = ("t", "re_nu", "im_nu", "abs_nu", "volume", "n_plus", "n_minus", "ratio")
SUMMARY_COLUMNS = ("axis_value", "n_v", "wall_time_s")


class PipelineError(RuntimeError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


def default_grid(omega: float) -> TimeGrid:
    """Ten trap periods at 2000 samples."""
    return TimeGrid(t_max=10.0 * 2.0 * math.pi / omega, n_steps=2000)


@dataclass(frozen=True)
class RunSpec:
    """Everything needed to evaluate one parameter point."""

    gas: TrapGasConfig
    alpha: float
    method: str = "exact"
    grid: TimeGrid | None = None

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.method not in ("exact", "cumulant"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.grid is None:
            object.__setattr__(self, "grid", default_grid(self.gas.omega))


@dataclass(frozen=True)
class SweepSpec:
    """A base point plus the axis and values to scan."""

    base: RunSpec
    axis: str
    values: tuple[float, ...]
    parallelism: int = 1

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("values must not be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("values must be strictly increasing")
        if self.axis in ("beta", "omega") and values[0] <= 0:
            raise ValueError(f"{self.axis} values must be positive")
        if self.axis == "alpha" and values[0] < 0:
            raise ValueError("alpha values must be non-negative")
        if self.parallelism < 1:
            raise ValueError("parallelism must be at least 1")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class RunRecord:
    """One finished pipeline run."""

    spec: RunSpec
    echo: EchoSeries
    report: NonMarkovReport
    wall_time: float


@contextlib.contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


def run_point(spec: RunSpec) -> RunRecord:
    """Full pipeline at one parameter point.

    Chains coupling, model, thermal state, echo and the volume analysis;
    a failure anywhere surfaces as PipelineError naming the stage.
    """
    start = time.perf_counter()
    gas = spec.gas
    with _stage("coupling_from_alpha"):
        v0 = coupling_from_alpha(spec.alpha, gas.omega, gas.n_fermions)
    with _stage("build_model"):
        model = build_model(gas, v0)
    with _stage("solve_chemical_potential"):
        thermal = solve_chemical_potential(gas)
    routine = echo_exact if spec.method == "exact" else echo_cumulant
    with _stage(f"echo_{spec.method}"):
        echo = routine(model, thermal, spec.grid, spin_degeneracy=gas.spin_degeneracy)
    with _stage("volume_series"):
        volumes = volume_series(echo)
    with _stage("accumulate_pm"):
        report = accumulate_pm(volumes)
    return RunRecord(spec=spec, echo=echo, report=report,
                     wall_time=time.perf_counter() - start)


def spec_for_value(base: RunSpec, axis: str, value: float) -> RunSpec:
    """The base spec with one axis replaced."""
    if axis == "alpha":
        return replace(base, alpha=float(value))
    gas = base.gas
    if axis == "beta":
        new_gas = replace(gas, beta=float(value))
    elif axis == "omega":
        new_gas = replace(gas, omega=float(value))
    else:
        raise ValueError(f"axis must be one of {SWEEP_AXES}")
    return replace(base, gas=new_gas)


def axis_value(spec: RunSpec, axis: str) -> float:
    if axis == "alpha":
        return spec.alpha
    if axis == "beta":
        return spec.gas.beta
    if axis == "omega":
        return spec.gas.omega
    raise ValueError(f"axis must be one of {SWEEP_AXES}")


def sweep(spec: SweepSpec) -> list[RunRecord]:
    """Run every axis value, in order; failed points are logged and dropped.

    With parallelism > 1 the points go through a process pool, bounded by
    the requested worker count; results come back in axis order either way.
    The sweep keeps the base time grid, so runs at different omega are
    compared over one common horizon.
    """
    points = []
    for value in spec.values:
        try:
            points.append((value, spec_for_value(spec.base, spec.axis, value)))
        except Exception as exc:
            logger.warning("sweep point %s=%g rejected: %s", spec.axis, value, exc)
    records: list[RunRecord] = []
    if spec.parallelism == 1 or len(points) <= 1:
        for value, point in points:
            try:
                records.append(run_point(point))
            except Exception as exc:
                logger.warning("sweep point %s=%g failed: %s", spec.axis, value, exc)
    else:
        with ProcessPoolExecutor(max_workers=spec.parallelism) as pool:
            futures = [(value, pool.submit(run_point, point)) for value, point in points]
            for value, future in futures:
                try:
                    records.append(future.result())
                except Exception as exc:
                    logger.warning("sweep point %s=%g failed: %s", spec.axis, value, exc)
    return records


def _render(x: float) -> str:
    # repr round-trips doubles exactly and keeps 0.0 and 1.0 short
    return repr(float(x))


def _echo_rows(record: RunRecord):
    echo, report = record.echo, record.report
    volumes = np.abs(echo.values) ** 2
    for i, t in enumerate(echo.grid.samples):
        value = echo.values[i]
        yield (t, value.real, value.imag, abs(value), volumes[i],
               report.n_plus[i], report.n_minus[i], report.ratio[i])


def emit_csv(records, destination, axis: str | None = None) -> None:
    """Write one run as an echo table, or a list of runs as a sweep summary.

    A single RunRecord produces the time-resolved table (columns t, re_nu,
    im_nu, abs_nu, volume, n_plus, n_minus, ratio).  A sequence of records
    needs ``axis`` and produces one summary row per record, sorted by axis
    value (columns axis_value, n_v, wall_time_s).  Floats are rendered by
    repr, so re-reading the file reproduces the doubles bit for bit.
    """
    if isinstance(records, RunRecord):
        header = ECHO_COLUMNS
        rows = _echo_rows(records)
    else:
        records = list(records)
        if not records:
            raise ValueError("nothing to write")
        if axis is None:
            raise ValueError("sweep summaries need the axis name")
        records.sort(key=lambda r: axis_value(r.spec, axis))
        header = SUMMARY_COLUMNS
        rows = (
            (axis_value(r.spec, axis), r.report.n_v, r.wall_time)
            for r in records
        )

    lines = [",".join(header)]
    lines.extend(",".join(_render(x) for x in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="ascii", newline="")
