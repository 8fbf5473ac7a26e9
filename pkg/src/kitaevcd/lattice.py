"""Two-row brick-wall ring geometry, Hamiltonian terms, and stabilizers.

Columns are 1-based (1..n_plaquettes per row), rows are 1 (lower) and 2
(upper). Logical qubit j occupies columns (j, j+1 mod n_plaquettes) on row 1
when j is odd and row 2 when j is even; its left end sits at column j, its
right end at column j+1. The linear site index runs over row 1 left to
right, then row 2, fixing the tensor-product and Jordan-Wigner order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import LatticeDomainError
from .pauli import OperatorSum, PauliString, commutes


@dataclass(frozen=True)
class CouplingParams:
    """Ising bond strength J > 0 and drive strength lambda."""

    J: float
    lam: float

    def __post_init__(self):
        if self.J <= 0:
            raise LatticeDomainError(f"J must be positive, got {self.J}")


@dataclass(frozen=True)
class Lattice:
    n_plaquettes: int
    n_sites: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n_sites", 2 * self.n_plaquettes)

    # -- coordinate maps ---------------------------------------------------

    def site(self, column: int, row: int) -> int:
        """Linear index of physical coordinate (column, row), 0-based output."""
        np_ = self.n_plaquettes
        column = (column - 1) % np_ + 1
        if row not in (1, 2):
            raise LatticeDomainError(f"row must be 1 or 2, got {row}")
        return (row - 1) * np_ + (column - 1)

    def coords(self, site: int) -> tuple[int, int]:
        """(column, row) of a linear site index."""
        np_ = self.n_plaquettes
        if not 0 <= site < self.n_sites:
            raise LatticeDomainError(f"site {site} outside 0..{self.n_sites - 1}")
        return site % np_ + 1, site // np_ + 1

    def logical_row(self, j: int) -> int:
        """Row hosting logical qubit j (odd on row 1, even on row 2)."""
        return 1 if (j - 1) % 2 == 0 else 2

    def logical_site(self, j: int, end: str) -> int:
        """Linear site of end 'l' or 'r' of logical qubit j (j wraps mod ring)."""
        np_ = self.n_plaquettes
        j = (j - 1) % np_ + 1
        row = self.logical_row(j)
        if end == "l":
            return self.site(j, row)
        if end == "r":
            return self.site(j % np_ + 1, row)
        raise LatticeDomainError(f"end must be 'l' or 'r', got {end!r}")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n_plaquettes": self.n_plaquettes,
            "n_sites": self.n_sites,
            "site_order": "row 1 columns 1..N_p, then row 2 columns 1..N_p",
            "physical_to_site": {
                f"({i},{nu})": self.site(i, nu)
                for nu in (1, 2)
                for i in range(1, self.n_plaquettes + 1)
            },
            "logical_to_site": {
                f"({j},{end})": self.logical_site(j, end)
                for j in range(1, self.n_plaquettes + 1)
                for end in ("l", "r")
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def build_lattice(n_plaquettes: int) -> Lattice:
    """Construct and validate the ring lattice (even column count >= 4).

    Odd column counts correspond to the twisted (Mobius) closure, which is
    not supported here.
    """
    if n_plaquettes % 2 != 0 or n_plaquettes < 4:
        raise LatticeDomainError(
            f"n_plaquettes must be even and >= 4, got {n_plaquettes} "
            "(odd counts require the Mobius boundary, out of scope)"
        )
    lat = Lattice(n_plaquettes)
    _validate_layout(lat)
    return lat


def _validate_layout(lat: Lattice) -> None:
    """Assert the stabilizer/Hamiltonian commutation structure at build time."""
    stabs = [plaquette_stabilizer(lat, j) for j in range(1, lat.n_plaquettes + 1)]
    terms = list(hamiltonian_static(lat, 1.0)) + list(hamiltonian_drive(lat))
    for j, w in enumerate(stabs, start=1):
        for _, p in terms:
            if not commutes(w, p):
                raise LatticeDomainError(
                    f"layout validation failed: W_{j} anticommutes with term {p}"
                )
        for k, w2 in enumerate(stabs[j:], start=j + 1):
            if not commutes(w, w2):
                raise LatticeDomainError(
                    f"layout validation failed: W_{j} anticommutes with W_{k}"
                )


# -- Hamiltonian pieces ----------------------------------------------------


def hamiltonian_static(lat: Lattice, J: float) -> OperatorSum:
    """-J * sum_j Z(j,l) Z(j,r): one ZZ bond per logical qubit."""
    op = OperatorSum(lat.n_sites)
    for j in range(1, lat.n_plaquettes + 1):
        op.add_term(
            -J,
            PauliString.from_sites(
                lat.n_sites, {lat.logical_site(j, "l"): "Z", lat.logical_site(j, "r"): "Z"}
            ),
        )
    return op


def hamiltonian_drive(lat: Lattice) -> OperatorSum:
    """-sum_j [ X(j,l) X(j-2,r) + Y(j,l) Y(j-1,r) ], indices mod the ring."""
    op = OperatorSum(lat.n_sites)
    for j in range(1, lat.n_plaquettes + 1):
        op.add_term(
            -1.0,
            PauliString.from_sites(
                lat.n_sites,
                {lat.logical_site(j, "l"): "X", lat.logical_site(j - 2, "r"): "X"},
            ),
        )
        op.add_term(
            -1.0,
            PauliString.from_sites(
                lat.n_sites,
                {lat.logical_site(j, "l"): "Y", lat.logical_site(j - 1, "r"): "Y"},
            ),
        )
    return op


def hamiltonian(lat: Lattice, J: float, lam: float) -> OperatorSum:
    """H(lambda) = H_static + lambda * H_drive, merged."""
    CouplingParams(J, lam)
    return (hamiltonian_static(lat, J) + hamiltonian_drive(lat).scaled(lam)).normalized()


# -- Stabilizers and logical operators ---------------------------------------


def plaquette_stabilizer(lat: Lattice, j: int) -> PauliString:
    """Conserved plaquette operator: X on both ends of qubit j, Z on the
    right end of qubit j-1 and the left end of qubit j+1."""
    if not 1 <= j <= lat.n_plaquettes:
        raise LatticeDomainError(f"plaquette index {j} outside 1..{lat.n_plaquettes}")
    return PauliString.from_sites(
        lat.n_sites,
        {
            lat.logical_site(j, "l"): "X",
            lat.logical_site(j, "r"): "X",
            lat.logical_site(j - 1, "r"): "Z",
            lat.logical_site(j + 1, "l"): "Z",
        },
    )


def bond_stabilizer(lat: Lattice, j: int) -> PauliString:
    """Z Z on the two sites of logical qubit j."""
    if not 1 <= j <= lat.n_plaquettes:
        raise LatticeDomainError(f"bond index {j} outside 1..{lat.n_plaquettes}")
    return PauliString.from_sites(
        lat.n_sites, {lat.logical_site(j, "l"): "Z", lat.logical_site(j, "r"): "Z"}
    )


def logical_ops(lat: Lattice, j: int) -> tuple[PauliString, PauliString]:
    """(X_j, Z_j) of logical qubit j: XX on its pair, Z on its left end."""
    if not 1 <= j <= lat.n_plaquettes:
        raise LatticeDomainError(f"logical index {j} outside 1..{lat.n_plaquettes}")
    x = PauliString.from_sites(
        lat.n_sites, {lat.logical_site(j, "l"): "X", lat.logical_site(j, "r"): "X"}
    )
    z = PauliString.from_sites(lat.n_sites, {lat.logical_site(j, "l"): "Z"})
    return x, z
