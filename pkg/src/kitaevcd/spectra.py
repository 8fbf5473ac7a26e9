"""Exact diagonalization: stabilizer sectors, ground states, gaps, sweep
tables, and the stabilizer-constructed cluster state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LatticeDomainError, StabilizerDimensionError
from .lattice import Lattice, bond_stabilizer, hamiltonian, plaquette_stabilizer
from .pauli import realize

DEGENERACY_TOL = 1e-8  # in units of J; "unique" means gap above this


def fix_phase(psi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Deterministic global phase: first nonzero amplitude real positive."""
    idx = np.flatnonzero(np.abs(psi) > tol * max(1.0, float(np.max(np.abs(psi)))))
    if len(idx) == 0:
        return psi
    return psi * np.exp(-1j * np.angle(psi[idx[0]]))


def sector_basis(lat: Lattice, signs) -> np.ndarray:
    """Orthonormal basis (columns) of the joint eigenspace W_j = signs_j.

    Built by sequential projector application (1 + w_j W_j)/2; an empty
    sector yields a matrix with zero columns rather than an error.
    """
    signs = list(signs)
    if len(signs) != lat.n_plaquettes or any(s not in (+1, -1) for s in signs):
        raise LatticeDomainError("signs must be +/-1, one per plaquette")
    dim = 1 << lat.n_sites
    proj = np.eye(dim, dtype=complex)
    for j, w in enumerate(signs, start=1):
        wmat = realize(plaquette_stabilizer(lat, j))
        proj = (proj + w * (wmat @ proj)) / 2.0
    vals, vecs = np.linalg.eigh(proj)
    cols = vecs[:, vals > 0.5]
    return np.column_stack([fix_phase(cols[:, k]) for k in range(cols.shape[1])]) if cols.size else cols


def ground_state(lat: Lattice, J: float, lam: float):
    """(E0, psi0, gap, unique) from the full-space spectrum of H(lam)."""
    h = realize(hamiltonian(lat, J, lam))
    energies, vecs = np.linalg.eigh(h)
    gap = float(energies[1] - energies[0])
    return (
        float(energies[0]),
        fix_phase(vecs[:, 0]),
        gap,
        gap > DEGENERACY_TOL * J,
    )


def vortex_free_gap(lat: Lattice, J: float, lam: float) -> float:
    """Energy gap protecting the vortex-free ground state.

    Measured in the full spectrum (E1 - E0 with E0 the vortex-free ground
    level): it closes as lambda -> 0 when the other sectors' ground levels
    collapse onto the cluster-state manifold, which is the quantity whose
    vanishing makes the endpoint non-unique.
    """
    h = realize(hamiltonian(lat, J, lam))
    energies = np.linalg.eigvalsh(h)
    return float(energies[1] - energies[0])


def sector_spectrum(lat: Lattice, J: float, lam: float, basis: np.ndarray) -> np.ndarray:
    """Eigenvalues of H(lam) restricted to the span of basis columns."""
    h = realize(hamiltonian(lat, J, lam))
    block = basis.conj().T @ h @ basis
    return np.linalg.eigvalsh(block)


def cluster_state(lat: Lattice, signs) -> np.ndarray:
    """The unique joint eigenstate with W_j = signs_j and all bond ZZ = +1.

    2 N_p commuting stabilizers on 2 N_p sites fix a one-dimensional space;
    any other resulting dimension raises StabilizerDimensionError.
    """
    signs = list(signs)
    if len(signs) != lat.n_plaquettes or any(s not in (+1, -1) for s in signs):
        raise LatticeDomainError("signs must be +/-1, one per plaquette")
    dim = 1 << lat.n_sites
    proj = np.eye(dim, dtype=complex)
    for j, w in enumerate(signs, start=1):
        wmat = realize(plaquette_stabilizer(lat, j))
        proj = (proj + w * (wmat @ proj)) / 2.0
    for j in range(1, lat.n_plaquettes + 1):
        kmat = realize(bond_stabilizer(lat, j))
        proj = (proj + kmat @ proj) / 2.0
    vals, vecs = np.linalg.eigh(proj)
    keep = vals > 0.5
    n_found = int(np.sum(keep))
    if n_found != 1:
        raise StabilizerDimensionError(n_found)
    return fix_phase(vecs[:, keep][:, 0])


def measure_stabilizer_signs(lat: Lattice, psi: np.ndarray, tol: float = 1e-6) -> list[int]:
    """Rounded <W_j> on a state; raises if any expectation is not near +/-1."""
    signs = []
    for j in range(1, lat.n_plaquettes + 1):
        w = realize(plaquette_stabilizer(lat, j))
        val = float(np.real(np.vdot(psi, w @ psi)))
        if abs(abs(val) - 1.0) > tol:
            raise LatticeDomainError(
                f"<W_{j}> = {val:.6f} is not a sharp stabilizer eigenvalue"
            )
        signs.append(+1 if val > 0 else -1)
    return signs


@dataclass(frozen=True)
class SpectrumTable:
    """Per-lambda full and vortex-free-sector spectra plus protection gap."""

    lambdas: np.ndarray
    full: np.ndarray       # (n_lambda, 2^N)
    sector: np.ndarray     # (n_lambda, sector_dim)
    gap_vf: np.ndarray     # (n_lambda,)

    @property
    def sector_dim(self) -> int:
        return self.sector.shape[1]


def eig_sweep(lat: Lattice, J: float, lambda_grid) -> SpectrumTable:
    """Diagonalize H(lam) on a grid, full space and vortex-free sector."""
    lambdas = np.asarray(list(lambda_grid), dtype=float)
    if lambdas.size == 0:
        raise LatticeDomainError("lambda grid is empty")
    basis = sector_basis(lat, [+1] * lat.n_plaquettes)
    full_rows, sector_rows, gaps = [], [], []
    for lam in lambdas:
        h = realize(hamiltonian(lat, J, lam))
        energies = np.linalg.eigvalsh(h)
        full_rows.append(energies)
        sector_rows.append(np.linalg.eigvalsh(basis.conj().T @ h @ basis))
        gaps.append(energies[1] - energies[0])
    return SpectrumTable(
        lambdas, np.array(full_rows), np.array(sector_rows), np.array(gaps)
    )
