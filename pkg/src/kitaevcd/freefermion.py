"""Momentum-space analytics for the ring: mode energies, the
counterdiabatic kernel M(q), its cosine coefficients a_n, and the
free-fermion prediction of the vortex-free sector spectrum.

Conventions: lattice constant a = 1; the Hermitian field reading
h(q) = (0, lambda*C(q), J + lambda*C(q)) with C(q) = cos 2q + cos q, whose
squared norm reproduces the kernel denominator identically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BdgCalibrationError, LatticeDomainError


def momentum_grid(n_plaquettes: int) -> np.ndarray:
    """Allowed momenta 2*pi*m/N_p for m = -N_p/2+1 .. N_p/2 (includes 0 and pi)."""
    if n_plaquettes % 2 != 0 or n_plaquettes < 4:
        raise LatticeDomainError(f"n_plaquettes must be even >= 4, got {n_plaquettes}")
    m = np.arange(-n_plaquettes // 2 + 1, n_plaquettes // 2 + 1)
    return 2.0 * np.pi * m / n_plaquettes


def bond_cosine(q) -> np.ndarray:
    """C(q) = cos 2q + cos q."""
    q = np.asarray(q, dtype=float)
    return np.cos(2 * q) + np.cos(q)


def field_vector(q: float, J: float, lam: float) -> np.ndarray:
    """(h_x, h_y, h_z) = (0, lam*C, J + lam*C)."""
    c = float(bond_cosine(q))
    return np.array([0.0, lam * c, J + lam * c])


def field_vector_dlam(q: float, J: float, lam: float) -> np.ndarray:
    """Derivative of the field vector with respect to lambda: (0, C, C)."""
    c = float(bond_cosine(q))
    return np.array([0.0, c, c])


def mode_energy(q, J: float, lam: float) -> np.ndarray:
    """epsilon(q) = |h(q)| = sqrt((J + lam*C)^2 + (lam*C)^2)."""
    c = bond_cosine(q)
    return np.sqrt((J + lam * c) ** 2 + (lam * c) ** 2)


def cd_kernel(q, J: float, lam: float) -> np.ndarray:
    """M(q) = C(q) / epsilon(q)^2; finite for J > 0, lam >= 0."""
    c = bond_cosine(q)
    return c / ((J + lam * c) ** 2 + (lam * c) ** 2)


def string_coefficients(J: float, lam: float, n_plaquettes: int, n_max: int) -> np.ndarray:
    """a_n = (1/N_p) * sum_q M(q) cos(n q) for n = 1..n_max, by direct summation."""
    if n_max > n_plaquettes:
        raise LatticeDomainError(f"n_max {n_max} exceeds n_plaquettes {n_plaquettes}")
    q = momentum_grid(n_plaquettes)
    m = cd_kernel(q, J, lam)
    return np.array(
        [np.sum(m * np.cos(n * q)) / n_plaquettes for n in range(1, n_max + 1)]
    )


def kernel_reconstruction(J: float, lam: float, n_plaquettes: int) -> np.ndarray:
    """Rebuild M on the grid from its cosine coefficients (round-trip check).

    On the discrete grid, M(q_m) = a_0 + 2*sum_{n=1}^{N_p/2-1} a_n cos(n q_m)
    + a_{N_p/2} cos((N_p/2) q_m), since M is even in q.
    """
    q = momentum_grid(n_plaquettes)
    m = cd_kernel(q, J, lam)
    a0 = np.sum(m) / n_plaquettes
    a = string_coefficients(J, lam, n_plaquettes, n_plaquettes // 2)
    out = np.full_like(q, a0)
    for n in range(1, n_plaquettes // 2):
        out += 2 * a[n - 1] * np.cos(n * q)
    out += a[n_plaquettes // 2 - 1] * np.cos((n_plaquettes // 2) * q)
    return out


# -- sector-spectrum prediction ---------------------------------------------


@dataclass(frozen=True)
class BdgCalibration:
    """Frozen outcome of matching the free-fermion prediction to one exact
    sector spectrum: an additive vacuum offset on top of -sum_q epsilon_q and
    the set of admissible occupied-mode subsets (as index tuples into the
    momentum grid)."""

    n_plaquettes: int
    vacuum_offset: float
    admissible_subsets: tuple[tuple[int, ...], ...]


def predicted_sector_levels(
    J: float, lam: float, n_plaquettes: int, calib: BdgCalibration | None = None
) -> np.ndarray:
    """Sorted many-body levels E_vac + sum_{q in S} 2 epsilon_q.

    Without a calibration, all 2^N_p occupied-mode subsets are used and the
    vacuum offset is zero.
    """
    eps = mode_energy(momentum_grid(n_plaquettes), J, lam)
    e_vac = -np.sum(eps)
    if calib is None:
        subsets = _all_subsets(n_plaquettes)
        offset = 0.0
    else:
        if calib.n_plaquettes != n_plaquettes:
            raise BdgCalibrationError("calibration built for a different ring size")
        subsets = calib.admissible_subsets
        offset = calib.vacuum_offset
    levels = [e_vac + offset + 2.0 * sum(eps[i] for i in s) for s in subsets]
    return np.sort(np.array(levels))


def _all_subsets(n: int) -> tuple[tuple[int, ...], ...]:
    idx = range(n)
    return tuple(
        s for k in range(n + 1) for s in itertools.combinations(idx, k)
    )


def calibrate_sector_spectrum(
    J: float,
    lam_ref: float,
    n_plaquettes: int,
    exact_sector_energies: np.ndarray,
    tol: float = 1e-8,
) -> BdgCalibration:
    """Match {-sum eps + offset + 2 sum_{q in S} eps_q} to the exact sector
    spectrum at one reference point.

    The offset is fixed by the exact ground level; a subset is admissible when
    its predicted level lands on an exact level (each exact level consumed
    once). Raises BdgCalibrationError if the exact spectrum cannot be covered.
    """
    exact = np.sort(np.asarray(exact_sector_energies, dtype=float))
    eps = mode_energy(momentum_grid(n_plaquettes), J, lam_ref)
    e_vac = -np.sum(eps)
    offset = float(exact[0] - e_vac)

    remaining = list(exact)
    admissible = []
    for s in _all_subsets(n_plaquettes):
        e_pred = e_vac + offset + 2.0 * sum(eps[i] for i in s)
        for k, e_ex in enumerate(remaining):
            if abs(e_pred - e_ex) < tol:
                admissible.append(s)
                remaining.pop(k)
                break
    if remaining:
        raise BdgCalibrationError(
            f"{len(remaining)} exact sector levels unmatched at lambda={lam_ref}"
            f" (worst leftover {remaining[0]:.6f}); the momentum-grid convention"
            " does not reproduce the sector spectrum"
        )
    return BdgCalibration(n_plaquettes, offset, tuple(admissible))


# -- table export -------------------------------------------------------------


def mode_table(J: float, lam: float, n_plaquettes: int) -> list[dict]:
    """Rows of (q, h_y, h_z, epsilon, M) for CSV export."""
    rows = []
    for q in momentum_grid(n_plaquettes):
        h = field_vector(q, J, lam)
        rows.append(
            {
                "q": float(q),
                "h_y": float(h[1]),
                "h_z": float(h[2]),
                "epsilon": float(mode_energy(q, J, lam)),
                "M": float(cd_kernel(q, J, lam)),
            }
        )
    return rows
