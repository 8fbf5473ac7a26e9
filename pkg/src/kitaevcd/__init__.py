"""Cluster-state generation in a two-row Kitaev ring via counterdiabatic
driving: exact Pauli algebra, free-fermion analytics, spectral sweeps, and
time-dependent propagation."""

from .cd import (
    CdConvention,
    CdReport,
    compare_cd,
    momentum_cd_block,
    pair_string,
    realspace_cd,
    spectral_cd,
    two_level_cd,
)
from .dynamics import EvolutionRecord, Schedule, fidelity, propagate
from .freefermion import (
    cd_kernel,
    field_vector,
    mode_energy,
    momentum_grid,
    string_coefficients,
)
from .lattice import (
    CouplingParams,
    Lattice,
    bond_stabilizer,
    build_lattice,
    hamiltonian,
    hamiltonian_drive,
    hamiltonian_static,
    logical_ops,
    plaquette_stabilizer,
)
from .pauli import (
    OperatorSum,
    PauliString,
    apply,
    commutes,
    hermitian_residual,
    mul,
    realize,
)
from .spectra import (
    SpectrumTable,
    cluster_state,
    eig_sweep,
    ground_state,
    sector_basis,
    vortex_free_gap,
)

__version__ = "0.1.0"

__all__ = [
    "CdConvention",
    "CdReport",
    "CouplingParams",
    "EvolutionRecord",
    "Lattice",
    "OperatorSum",
    "PauliString",
    "Schedule",
    "SpectrumTable",
    "apply",
    "bond_stabilizer",
    "build_lattice",
    "cd_kernel",
    "cluster_state",
    "commutes",
    "compare_cd",
    "eig_sweep",
    "fidelity",
    "field_vector",
    "ground_state",
    "hamiltonian",
    "hamiltonian_drive",
    "hamiltonian_static",
    "hermitian_residual",
    "logical_ops",
    "mode_energy",
    "momentum_cd_block",
    "momentum_grid",
    "mul",
    "pair_string",
    "plaquette_stabilizer",
    "propagate",
    "realize",
    "realspace_cd",
    "sector_basis",
    "spectral_cd",
    "string_coefficients",
    "two_level_cd",
    "vortex_free_gap",
]
