"""Single-particle description of a harmonically trapped ideal Fermi gas.

Everything here works in trap units: hbar = m = 1, lengths in units of the
oscillator length, so the only free scales are the trap frequency, the
inverse temperature and the particle number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TrapGasConfig",
    "SingleParticleModel",
    "ThermalState",
    "default_cutoff",
    "psi0_table",
    "build_model",
    "fermi_energy",
    "coupling_from_alpha",
    "alpha_from_coupling",
    "solve_chemical_potential",
]


def default_cutoff(n_fermions: int, spin_degeneracy: int = 2) -> int:
    """Default basis size: several times the highest filled shell.

    The contact matrix elements decay only like n**-1/2, so the cutoff has
    to sit well above the Fermi level before observables stop moving.
    """
    filled = math.ceil(n_fermions / spin_degeneracy)
    return max(4 * filled, n_fermions + 50)


@dataclass(frozen=True)
class TrapGasConfig:
    """Trap frequency, particle number, temperature and basis size."""

    omega: float
    n_fermions: int
    beta: float
    spin_degeneracy: int = 2
    cutoff: int | None = None

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.n_fermions < 1:
            raise ValueError("n_fermions must be at least 1")
        if self.spin_degeneracy < 1:
            raise ValueError("spin_degeneracy must be at least 1")
        if self.cutoff is None:
            object.__setattr__(
                self, "cutoff", default_cutoff(self.n_fermions, self.spin_degeneracy)
            )
        if self.cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        # the truncated basis must be able to hold the gas at T -> 0
        if self.cutoff * self.spin_degeneracy <= self.n_fermions:
            raise ValueError("cutoff too small to hold n_fermions particles")


@dataclass(frozen=True)
class SingleParticleModel:
    """Trap spectrum plus the impurity potential in the trap basis.

    energies
        Oscillator levels, uniformly spaced and increasing.
    psi0
        Eigenfunction values at the trap center (dimensionless).
    v_matrix
        Matrix of the impurity contact potential, real symmetric.
    v0
        Bare coupling strength the matrix was built from.
    """

    energies: np.ndarray
    psi0: np.ndarray
    v_matrix: np.ndarray
    v0: float

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        psi0 = np.asarray(self.psi0, dtype=float)
        v = np.asarray(self.v_matrix, dtype=float)
        m = energies.shape[0]
        if energies.ndim != 1 or m < 1:
            raise ValueError("energies must be a non-empty 1-d array")
        if psi0.shape != (m,):
            raise ValueError("psi0 length must match energies")
        if v.shape != (m, m):
            raise ValueError("v_matrix must be square and match energies")
        if not (np.all(np.isfinite(energies)) and np.all(np.isfinite(v))):
            raise ValueError("model arrays must be finite")
        if m > 1:
            steps = np.diff(energies)
            if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
                raise ValueError("energies must be uniformly spaced and increasing")
        if not np.array_equal(v, v.T):
            raise ValueError("v_matrix must be symmetric")
        for arr in (energies, psi0, v):
            arr.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "psi0", psi0)
        object.__setattr__(self, "v_matrix", v)
        object.__setattr__(self, "v0", float(self.v0))

    @property
    def dim(self) -> int:
        return self.energies.shape[0]


@dataclass(frozen=True)
class ThermalState:
    """Chemical potential and mode occupations of the trapped gas."""

    mu: float
    occupations: np.ndarray
    beta: float

    def __post_init__(self):
        occ = np.asarray(self.occupations, dtype=float)
        if occ.ndim != 1 or occ.shape[0] < 1:
            raise ValueError("occupations must be a non-empty 1-d array")
        if np.any(occ < 0.0) or np.any(occ > 1.0):
            raise ValueError("occupations must lie in [0, 1]")
        if np.any(np.diff(occ) > 0.0):
            raise ValueError("occupations must not increase with energy")
        occ.setflags(write=False)
        object.__setattr__(self, "occupations", occ)

    def total_number(self, spin_degeneracy: int = 1) -> float:
        return spin_degeneracy * float(self.occupations.sum())


def psi0_table(cutoff: int) -> np.ndarray:
    """Oscillator eigenfunctions at the trap center, psi_n(0) for n < cutoff.

    Uses the two-step recursion psi_{n+1}(0) = -sqrt(n/(n+1)) psi_{n-1}(0)
    seeded by psi_0(0) = pi**-1/4; odd states vanish by parity.  Stable for
    any cutoff, unlike evaluating Hermite polynomials directly.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    table = np.zeros(cutoff)
    table[0] = math.pi ** -0.25
    for n in range(1, cutoff - 1):
        table[n + 1] = -math.sqrt(n / (n + 1)) * table[n - 1]
    return table


def build_model(config: TrapGasConfig, v0: float) -> SingleParticleModel:
    """Trap spectrum and contact-potential matrix for coupling v0.

    The impurity sits at the trap center, so the matrix elements are
    pi * v0 * psi_m(0) * psi_n(0): rank one with a checkerboard of exact
    zeros on the odd (parity-forbidden) indices.
    """
    m = config.cutoff
    energies = config.omega * (np.arange(m) + 0.5)
    psi0 = psi0_table(m)
    v_matrix = math.pi * v0 * np.outer(psi0, psi0)
    return SingleParticleModel(energies=energies, psi0=psi0, v_matrix=v_matrix, v0=v0)


def fermi_energy(omega: float, n_fermions: int) -> float:
    """Energy of the highest occupied level of the spin-1/2 gas at T = 0."""
    return omega * (n_fermions + 0.5)


def coupling_from_alpha(alpha: float, omega: float, n_fermions: int) -> float:
    """Bare coupling v0 for a dimensionless strength alpha = v0**2 / (omega * e_F)."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    return math.sqrt(alpha * omega * fermi_energy(omega, n_fermions))


def alpha_from_coupling(v0: float, omega: float, n_fermions: int) -> float:
    """Inverse of coupling_from_alpha."""
    return v0 ** 2 / (omega * fermi_energy(omega, n_fermions))


def _fermi_dirac(x: np.ndarray) -> np.ndarray:
    # split at x = 0 so neither branch ever overflows
    out = np.empty_like(x)
    pos = x >= 0
    ex = np.exp(-x[pos])
    out[pos] = ex / (1.0 + ex)
    ex = np.exp(x[~pos])
    out[~pos] = 1.0 / (1.0 + ex)
    # occupations below double-precision resolution become exact zeros:
    # they sit under the rounding floor of any downstream determinant or
    # sum, and exact zeros let the echo kernel restrict itself to the
    # occupied modes instead of dragging empty tails through the algebra
    out[out < 0.5 * np.finfo(out.dtype).eps] = 0.0
    return out


def solve_chemical_potential(config: TrapGasConfig) -> ThermalState:
    """Chemical potential fixing the mean particle number to n_fermions.

    The mean number is strictly increasing in mu, so plain bisection on a
    bracket generously padded by 50/beta on either side of the spectrum
    always converges; no derivative information is needed, which matters
    because at low temperature the number staircase is exponentially flat
    between levels.
    """
    energies = config.omega * (np.arange(config.cutoff) + 0.5)
    beta = config.beta
    gs = config.spin_degeneracy
    target = float(config.n_fermions)

    def mean_number(mu: float) -> float:
        return gs * float(_fermi_dirac(beta * (energies - mu)).sum())

    lo = energies[0] - 50.0 / beta
    hi = energies[-1] + 50.0 / beta
    if mean_number(lo) > target or mean_number(hi) < target:
        raise RuntimeError("chemical potential bracket does not contain the target number")
    tol = 1e-12 * target
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        n = mean_number(mu)
        if abs(n - target) <= tol:
            break
        if n < target:
            lo = mu
        else:
            hi = mu
    else:
        raise RuntimeError("chemical potential bisection did not converge")
    occupations = _fermi_dirac(beta * (energies - mu))
    return ThermalState(mu=mu, occupations=occupations, beta=beta)
