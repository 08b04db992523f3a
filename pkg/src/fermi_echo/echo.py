"""Decoherence factor nu(t) of the dephasing impurity, by three routes.

The environment is quadratic and the impurity only shifts the gas
Hamiltonian between h0 and h1 = h0 + V, so the many-body trace collapses
to a single-particle determinant per spin channel.  A second-order
cumulant expansion and a brute-force Fock-space sum are kept alongside as
cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .trap_gas import SingleParticleModel, ThermalState, TrapGasConfig, solve_chemical_potential

__all__ = [
    "TimeGrid",
    "EchoSeries",
    "echo_exact",
    "echo_cumulant",
    "echo_fock_oracle",
    "nested_phase_integral",
]

_MOD_TOL = 1e-10
_METHODS = ("exact", "cumulant", "fock_oracle")

# keep the per-sample workspace of the exact route below ~100 MB
_CHUNK_BYTES = 64 * 2 ** 20


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time samples from 0 to t_max inclusive."""

    t_max: float
    n_steps: int
    samples: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.n_steps < 2:
            raise ValueError("n_steps must be at least 2")
        samples = np.linspace(0.0, self.t_max, self.n_steps)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def spacing(self) -> float:
        return self.t_max / (self.n_steps - 1)


@dataclass(frozen=True)
class EchoSeries:
    """Sampled decoherence factor with the method that produced it."""

    grid: TimeGrid
    values: np.ndarray
    method: str
    spin_degeneracy: int = 1

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_steps,):
            raise ValueError("values length must match the time grid")
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if values[0] != 1.0:
            raise ValueError("decoherence factor must start at exactly 1")
        if not np.all(np.isfinite(values)):
            raise ValueError("decoherence factor must be finite")
        if float(np.abs(values).max()) > 1.0 + _MOD_TOL:
            raise ValueError("pure dephasing cannot exceed unit modulus")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def loschmidt(self) -> np.ndarray:
        """Echo |nu|^2, the survival probability of the gas state."""
        return np.abs(self.values) ** 2


def _check_dims(model: SingleParticleModel, thermal: ThermalState):
    if thermal.occupations.shape[0] != model.dim:
        raise ValueError("thermal state and model have different basis sizes")


def echo_exact(
    model: SingleParticleModel,
    thermal: ThermalState,
    grid: TimeGrid,
    spin_degeneracy: int = 1,
) -> EchoSeries:
    """nu(t) from the determinant reduction of the many-body trace.

    Per spin channel nu_1(t) = det[(1 - n) + n e^{i h0 t} e^{-i h1 t}] with
    n the thermal occupations; identical channels multiply, so
    nu = nu_1 ** spin_degeneracy.  h1 is diagonalized once; every sample
    then costs two dense multiplications and one complex determinant,
    accumulated through slogdet so nearly vanishing echoes keep a phase.
    """
    _check_dims(model, thermal)
    if spin_degeneracy < 1:
        raise ValueError("spin_degeneracy must be at least 1")
    values = np.ones(grid.n_steps, dtype=complex)
    if not np.any(model.v_matrix):
        # free evolution: both propagators coincide
        return EchoSeries(grid=grid, values=values, method="exact",
                          spin_degeneracy=spin_degeneracy)

    m = model.dim
    evals1, evecs1 = np.linalg.eigh(np.diag(model.energies) + model.v_matrix)
    # rounding-level eigenvector tails only feed the subnormal range of the
    # products below; zero them outright
    evecs1[np.abs(evecs1) < 1e-150] = 0.0

    # a mode with occupation exactly zero contributes a unit row to the
    # determinant matrix, so the determinant restricts to the occupied
    # support; the evolution still runs over the full basis
    active = np.flatnonzero(thermal.occupations > 0.0)
    rows = np.ascontiguousarray(evecs1[active])
    rows_t = np.ascontiguousarray(rows.T)
    occ = thermal.occupations[active]
    energies = model.energies[active]
    hole = 1.0 - occ
    diag = np.arange(active.size)

    chunk = max(1, _CHUNK_BYTES // (active.size * m * 16))
    for start in range(0, grid.n_steps, chunk):
        t = grid.samples[start:start + chunk]
        # e^{-i h1 t} on the support: rows diag(e^{-i evals1 t}) rows^T
        u = (np.exp(-1j * np.outer(t, evals1))[:, None, :] * rows) @ rows_t
        u *= (occ * np.exp(1j * np.outer(t, energies)))[:, :, None]
        u[:, diag, diag] += hole
        sign, logabs = np.linalg.slogdet(u)
        if np.any(np.isnan(sign)) or np.any(np.isnan(logabs)):
            raise RuntimeError("determinant evaluation produced NaN")
        values[start:start + chunk] = sign ** spin_degeneracy * np.exp(
            spin_degeneracy * logabs
        )
    values[grid.samples == 0.0] = 1.0
    return EchoSeries(grid=grid, values=values, method="exact",
                      spin_degeneracy=spin_degeneracy)


def nested_phase_integral(omega, t):
    """Double time-ordered integral of e^{i omega (t1 - t2)} over 0 < t2 < t1 < t.

    Equals (1 + i*omega*t - e^{i*omega*t}) / omega**2, extended by its
    limit t**2 / 2 at the removable point omega = 0.  Broadcasts over both
    arguments; the real part is non-negative for every omega and t.
    """
    omega = np.asarray(omega, dtype=float)
    t = np.asarray(t, dtype=float)
    wt = omega * t
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (1.0 + 1j * wt - np.exp(1j * wt)) / (omega * omega)
    out = np.where(omega == 0.0, 0.5 * t * t + 0.0j, out)
    if out.ndim == 0:
        return complex(out)
    return out


def echo_cumulant(
    model: SingleParticleModel,
    thermal: ThermalState,
    grid: TimeGrid,
    spin_degeneracy: int = 1,
) -> EchoSeries:
    """Second-order (two-vertex) cumulant approximation to nu(t).

    ln nu_1(t) = -i t sum_m n_m V_mm
                 - sum_{mn} |V_mn|^2 n_m (1 - n_n) K(e_m - e_n, t)
    with K the nested phase integral, diagonal terms included.  The trap
    spectrum is uniformly spaced, so the double sum is grouped by index
    offset once and every time sample reuses the grouped weights.  Because
    Re K >= 0 the approximation never leaves the unit disk.
    """
    _check_dims(model, thermal)
    if spin_degeneracy < 1:
        raise ValueError("spin_degeneracy must be at least 1")
    energies = model.energies
    occ = thermal.occupations
    v = model.v_matrix
    m = model.dim

    mean_shift = float(occ @ np.diagonal(v))
    pair_weight = v * v * np.outer(occ, 1.0 - occ)
    offsets = np.arange(m)[:, None] - np.arange(m)[None, :]
    grouped = np.bincount((offsets + m - 1).ravel(), weights=pair_weight.ravel(),
                          minlength=2 * m - 1)
    keep = grouped != 0.0
    spacing = energies[1] - energies[0] if m > 1 else 0.0
    freqs = spacing * np.arange(-(m - 1), m)[keep]
    weights = grouped[keep]

    t = grid.samples
    log_nu1 = -1j * mean_shift * t
    if weights.size:
        log_nu1 = log_nu1 - weights @ nested_phase_integral(freqs[:, None], t[None, :])
    values = np.exp(spin_degeneracy * log_nu1)
    values[t == 0.0] = 1.0
    return EchoSeries(grid=grid, values=values, method="cumulant",
                      spin_degeneracy=spin_degeneracy)


def echo_fock_oracle(
    model: SingleParticleModel,
    config: TrapGasConfig,
    grid: TimeGrid,
) -> EchoSeries:
    """Brute-force nu(t) on the full 2**M Fock space, for validation.

    Builds the many-body Hamiltonians of both impurity sectors over all
    occupation bitstrings, with fermionic signs from the modes between the
    hopping pair, weights the initial states grand-canonically at the
    chemical potential solved from ``config``, and evaluates both
    exponentials spectrally.  Exponential cost; refuses more than 12 modes
    and handles a single spin channel only.
    """
    m = model.dim
    if m > 12:
        raise ValueError("Fock-space sum is limited to 12 modes")
    if config.spin_degeneracy != 1:
        raise ValueError("Fock-space sum handles spin_degeneracy == 1 only")
    if config.cutoff != m:
        raise ValueError("config cutoff must match the model dimension")
    thermal = solve_chemical_potential(config)

    n_states = 1 << m
    states = np.arange(n_states)
    occ_bits = (states[:, None] >> np.arange(m)[None, :]) & 1
    occ_f = occ_bits.astype(float)
    free_energy = occ_f @ model.energies
    n_particles = occ_bits.sum(axis=1)

    hamiltonian = np.diag(free_energy + occ_f @ np.diagonal(model.v_matrix))
    for a in range(m):
        for b in range(a):
            vab = model.v_matrix[a, b]
            if vab == 0.0:
                continue
            movable = (occ_bits[:, b] == 1) & (occ_bits[:, a] == 0)
            src = states[movable]
            dst = src - (1 << b) + (1 << a)
            # fermionic sign: parity of the occupied modes strictly between b and a
            between = occ_bits[movable][:, b + 1 : a].sum(axis=1)
            sign = 1.0 - 2.0 * (between % 2)
            hamiltonian[dst, src] = sign * vab
            hamiltonian[src, dst] = sign * vab

    evals, evecs = np.linalg.eigh(hamiltonian)
    overlap = evecs * evecs  # |<state|eigen>|^2, Fock states stay diagonal in h0

    log_weight = -config.beta * (free_energy - thermal.mu * n_particles)
    log_weight -= log_weight.max()
    weight = np.exp(log_weight)
    weight /= weight.sum()

    t = grid.samples
    forward = np.exp(1j * np.outer(t, free_energy)) * weight[None, :]
    backward = np.exp(-1j * np.outer(t, evals))
    values = np.einsum("ts,sk,tk->t", forward, overlap, backward, optimize=True)
    values[t == 0.0] = 1.0
    return EchoSeries(grid=grid, values=values, method="fock_oracle",
                      spin_degeneracy=1)
