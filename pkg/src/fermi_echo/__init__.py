"""Dephasing of an impurity qubit in a harmonically trapped ideal Fermi gas.

The library computes the decoherence factor nu(t) of a two-level impurity
coupled to the gas through a central contact potential, the Bloch-volume
dynamics it induces, and the volume-based non-Markovianity measure, with
exact determinant, perturbative and brute-force routes that cross-check
each other.
"""

from .trap_gas import (
    TrapGasConfig,
    SingleParticleModel,
    ThermalState,
    build_model,
    coupling_from_alpha,
    alpha_from_coupling,
    default_cutoff,
    fermi_energy,
    psi0_table,
    solve_chemical_potential,
)
from .echo import (
    TimeGrid,
    EchoSeries,
    echo_exact,
    echo_cumulant,
    echo_fock_oracle,
    nested_phase_integral,
)
from .nonmarkov import (
    BlochMap,
    VolumeSeries,
    NonMarkovReport,
    bloch_map_at,
    volume_series,
    measure_nv,
    accumulate_pm,
)
from .runner import (
    RunSpec,
    SweepSpec,
    RunRecord,
    PipelineError,
    run_point,
    sweep,
    emit_csv,
    default_grid,
)
from .config import ConfigError, parse_document, read_document, load_config

__version__ = "0.1.0"

__all__ = [
    "TrapGasConfig",
    "SingleParticleModel",
    "ThermalState",
    "build_model",
    "coupling_from_alpha",
    "alpha_from_coupling",
    "default_cutoff",
    "fermi_energy",
    "psi0_table",
    "solve_chemical_potential",
    "TimeGrid",
    "EchoSeries",
    "echo_exact",
    "echo_cumulant",
    "echo_fock_oracle",
    "nested_phase_integral",
    "BlochMap",
    "VolumeSeries",
    "NonMarkovReport",
    "bloch_map_at",
    "volume_series",
    "measure_nv",
    "accumulate_pm",
    "RunSpec",
    "SweepSpec",
    "RunRecord",
    "PipelineError",
    "run_point",
    "sweep",
    "emit_csv",
    "default_grid",
    "ConfigError",
    "parse_document",
    "read_document",
    "load_config",
    "__version__",
]
