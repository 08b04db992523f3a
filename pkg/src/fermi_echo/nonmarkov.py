"""Volume-based non-Markovianity of the dephasing channel.

The channel acts on the Bloch ball as a rotation-scaling in the equatorial
plane, so its volume contraction factor is just |nu(t)|^2.  Memory effects
show up as intervals where that volume grows back; the measure adds up all
the regained volume, and splitting the variation into its positive and
negative parts gives a time-resolved picture.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .echo import EchoSeries, TimeGrid

__all__ = [
    "BlochMap",
    "VolumeSeries",
    "NonMarkovReport",
    "bloch_map_at",
    "volume_series",
    "measure_nv",
    "accumulate_pm",
]

_MOD_TOL = 1e-10


@dataclass(frozen=True)
class BlochMap:
    """Linear part of the Bloch-vector map at one instant."""

    matrix: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (3, 3):
            raise ValueError("Bloch map must be 3 x 3")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("Bloch map must be finite")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def volume_factor(self) -> float:
        """|det| of the map: the Bloch-ball volume contraction."""
        return float(abs(np.linalg.det(self.matrix)))


def bloch_map_at(nu: complex, time: float = 0.0) -> BlochMap:
    """Bloch map of the dephasing channel for decoherence factor nu.

    Coherences pick up nu, populations are untouched, so the equatorial
    plane is rotated by arg(nu) and shrunk by |nu| while the z axis is
    fixed; the determinant is |nu|^2.
    """
    nu = complex(nu)
    if not (np.isfinite(nu.real) and np.isfinite(nu.imag)):
        raise ValueError("decoherence factor must be finite")
    if abs(nu) > 1.0 + _MOD_TOL:
        raise ValueError("pure dephasing cannot exceed unit modulus")
    re, im = nu.real, nu.imag
    matrix = np.array([
        [re, im, 0.0],
        [-im, re, 0.0],
        [0.0, 0.0, 1.0],
    ])
    return BlochMap(matrix=matrix, time=float(time))


@dataclass(frozen=True)
class VolumeSeries:
    """Bloch-ball volume factor along a time grid."""

    grid: TimeGrid
    volumes: np.ndarray

    def __post_init__(self):
        volumes = np.asarray(self.volumes, dtype=float)
        if volumes.shape != (self.grid.n_steps,):
            raise ValueError("volumes length must match the time grid")
        if volumes[0] != 1.0:
            raise ValueError("volume factor must start at exactly 1")
        if np.any(volumes < 0.0) or float(volumes.max()) > 1.0 + _MOD_TOL:
            raise ValueError("volume factor must lie in [0, 1]")
        volumes.setflags(write=False)
        object.__setattr__(self, "volumes", volumes)


@dataclass(frozen=True)
class NonMarkovReport:
    """Accumulated expansion / contraction of the Bloch volume.

    n_plus and n_minus are the running totals of volume gained and lost;
    ratio is their quotient, zero by convention until the first loss.
    n_v equals n_plus at the final time.  expansion_intervals lists the
    (start, end) times of maximal runs of growing volume, at sample
    resolution.
    """

    n_v: float
    n_plus: np.ndarray
    n_minus: np.ndarray
    ratio: np.ndarray
    expansion_intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        for name in ("n_plus", "n_minus", "ratio"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.n_plus.shape != self.n_minus.shape or self.n_plus.shape != self.ratio.shape:
            raise ValueError("accumulated series must share one shape")
        if self.n_plus[0] != 0.0 or self.n_minus[0] != 0.0:
            raise ValueError("accumulated series must start at zero")
        if np.any(np.diff(self.n_plus) < 0.0) or np.any(np.diff(self.n_minus) < 0.0):
            raise ValueError("accumulated series must be non-decreasing")
        if self.n_v != self.n_plus[-1]:
            raise ValueError("n_v must equal the final accumulated expansion")


def volume_series(echo: EchoSeries) -> VolumeSeries:
    """Volume contraction factor |nu(t)|^2 along the echo's grid."""
    return VolumeSeries(grid=echo.grid, volumes=np.abs(echo.values) ** 2)


def measure_nv(series: VolumeSeries) -> float:
    """Total Bloch volume regained over the whole window.

    Sum of max(0, dV) over the sampled increments: the discretized
    positive variation of the volume factor.
    """
    gains = np.maximum(np.diff(series.volumes), 0.0)
    return float(np.cumsum(gains)[-1]) if gains.size else 0.0


def accumulate_pm(series: VolumeSeries) -> NonMarkovReport:
    """Time-resolved split of the volume variation into gains and losses."""
    dv = np.diff(series.volumes)
    gains = np.maximum(dv, 0.0)
    losses = np.maximum(-dv, 0.0)
    n_plus = np.concatenate(([0.0], np.cumsum(gains)))
    n_minus = np.concatenate(([0.0], np.cumsum(losses)))
    ratio = np.zeros_like(n_plus)
    seen = n_minus > 0.0
    ratio[seen] = n_plus[seen] / n_minus[seen]

    t = series.grid.samples
    growing = dv > 0.0
    edges = np.diff(growing.astype(int))
    starts = list(np.flatnonzero(edges == 1) + 1)
    ends = list(np.flatnonzero(edges == -1) + 1)
    if growing.size and growing[0]:
        starts.insert(0, 0)
    if growing.size and growing[-1]:
        ends.append(growing.size)
    intervals = tuple(
        (float(t[a]), float(t[b])) for a, b in zip(starts, ends)
    )
    return NonMarkovReport(
        n_v=float(n_plus[-1]),
        n_plus=n_plus,
        n_minus=n_minus,
        ratio=ratio,
        expansion_intervals=intervals,
    )
