"""Exact multi-site Pauli algebra and its realization on state vectors.

A ``PauliString`` is stored in symplectic form: two bit masks ``x`` and ``z``
(site ``s`` occupies bit ``n - 1 - s``, so site 0 is the most significant bit,
matching a left-to-right Kronecker product) plus an integer phase exponent
``e`` with the operator defined as

    P = i**e * prod_s X_s**x_s Z_s**z_s,     Y = i * X Z.

All phase bookkeeping is integer arithmetic mod 4, so products and
commutation checks are exact; only ``OperatorSum`` coefficients carry
floating-point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatchError, SiteCapError

_LETTER_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_PHASES = {1: 0, 1j: 1, -1: 2, -1j: 3}

# Dense single-site matrices, used by realize() tests and small oracles.
PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

DENSE_SITE_CAP = 16

_I_POWERS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """One phase times one Pauli letter per site."""

    n: int
    x: int
    z: int
    e: int

    @staticmethod
    def from_letters(letters: str, phase: complex = 1) -> "PauliString":
        n = len(letters)
        x = z = 0
        n_y = 0
        for s, letter in enumerate(letters):
            try:
                xs, zs = _LETTER_TO_XZ[letter]
            except KeyError:
                raise ValueError(f"unknown Pauli letter {letter!r}") from None
            bit = 1 << (n - 1 - s)
            x |= bit * xs
            z |= bit * zs
            n_y += xs & zs
        e = (_PHASES[phase] + n_y) % 4
        return PauliString(n, x, z, e)

    @staticmethod
    def from_sites(n: int, sites: dict[int, str], phase: complex = 1) -> "PauliString":
        letters = ["I"] * n
        for s, letter in sites.items():
            if not 0 <= s < n:
                raise ShapeMismatchError(f"site {s} outside 0..{n - 1}")
            letters[s] = letter
        return PauliString.from_letters("".join(letters), phase)

    @staticmethod
    def identity(n: int) -> "PauliString":
        return PauliString(n, 0, 0, 0)

    @property
    def letters(self) -> str:
        out = []
        for s in range(self.n):
            bit = 1 << (self.n - 1 - s)
            out.append(_XZ_TO_LETTER[(int(bool(self.x & bit)), int(bool(self.z & bit)))])
        return "".join(out)

    @property
    def n_y(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def phase(self) -> complex:
        """Phase in front of the plain letter string (one of 1, i, -1, -i)."""
        return _I_POWERS[(self.e - self.n_y) % 4]

    def __str__(self) -> str:
        pre = {1: "+", 1j: "+i", -1: "-", -1j: "-i"}[self.phase]
        return pre + self.letters

    def weight(self) -> int:
        """Number of non-identity letters."""
        return _popcount(self.x | self.z)

    def dagger(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, (-self.e + 2 * self.n_y) % 4)

    def bare(self) -> "PauliString":
        """Same letters with phase +1."""
        return PauliString(self.n, self.x, self.z, self.n_y % 4)


def mul(p: PauliString, q: PauliString) -> PauliString:
    """Exact product p*q with accumulated phase."""
    if p.n != q.n:
        raise ShapeMismatchError(f"site counts differ: {p.n} vs {q.n}")
    e = (p.e + q.e + 2 * _popcount(p.z & q.x)) % 4
    return PauliString(p.n, p.x ^ q.x, p.z ^ q.z, e)


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the number of anticommuting site pairs is even."""
    if p.n != q.n:
        raise ShapeMismatchError(f"site counts differ: {p.n} vs {q.n}")
    return (_popcount(p.x & q.z) + _popcount(p.z & q.x)) % 2 == 0


def _paritycount(idx: np.ndarray, mask: int) -> np.ndarray:
    """(-1)**popcount(idx & mask) for an index array."""
    return 1 - 2 * (np.bitwise_count(idx & mask).astype(np.int64) & 1)


class OperatorSum:
    """Complex-weighted sum of Pauli strings on a fixed site count."""

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms: list[tuple[complex, PauliString]] = []
        if terms:
            for c, p in terms:
                self.add_term(c, p)

    def add_term(self, coeff: complex, string: PauliString) -> "OperatorSum":
        if string.n != self.n:
            raise ShapeMismatchError(f"term on {string.n} sites added to {self.n}-site sum")
        self.terms.append((complex(coeff), string))
        return self

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if other.n != self.n:
            raise ShapeMismatchError("site counts differ")
        return OperatorSum(self.n, list(self.terms) + list(other.terms))

    def scaled(self, factor: complex) -> "OperatorSum":
        return OperatorSum(self.n, [(factor * c, p) for c, p in self.terms])

    def dagger(self) -> "OperatorSum":
        return OperatorSum(self.n, [(np.conj(c), p.dagger()) for c, p in self.terms])

    def normalized(self, drop_tol: float = 1e-14) -> "OperatorSum":
        """Merge duplicate letter sequences; phases folded into coefficients.

        Terms are keyed by (x, z); each canonical string carries phase +1.
        Coefficients below drop_tol are discarded.
        """
        merged: dict[tuple[int, int], complex] = {}
        for c, p in self.terms:
            key = (p.x, p.z)
            folded = c * _I_POWERS[(p.e - p.n_y) % 4]
            merged[key] = merged.get(key, 0.0 + 0j) + folded
        out = OperatorSum(self.n)
        for (x, z), c in merged.items():
            if abs(c) > drop_tol:
                out.add_term(c, PauliString(self.n, x, z, _popcount(x & z) % 4))
        return out

    def hermitian_part(self) -> "OperatorSum":
        return (self + self.dagger()).normalized().scaled(0.5).normalized()

    def max_weight(self) -> int:
        return max((p.weight() for _, p in self.normalized()), default=0)


def realize(op: OperatorSum | PauliString, max_sites: int = DENSE_SITE_CAP) -> np.ndarray:
    """Dense 2^n x 2^n matrix of op, site 0 as the leading Kronecker factor."""
    if isinstance(op, PauliString):
        op = OperatorSum(op.n, [(1.0, op)])
    if op.n > max_sites:
        raise SiteCapError(f"dense realization refused for {op.n} sites (cap {max_sites})")
    dim = 1 << op.n
    idx = np.arange(dim, dtype=np.int64)
    out = np.zeros((dim, dim), dtype=complex)
    for c, p in op.terms:
        amp = c * _I_POWERS[p.e] * _paritycount(idx, p.z)
        out[idx ^ p.x, idx] += amp
    return out


def apply(op: OperatorSum | PauliString, psi: np.ndarray) -> np.ndarray:
    """Matrix-free action op @ psi via per-term bit-flip/sign kernels."""
    if isinstance(op, PauliString):
        op = OperatorSum(op.n, [(1.0, op)])
    dim = 1 << op.n
    if psi.shape != (dim,):
        raise ShapeMismatchError(f"state has shape {psi.shape}, expected ({dim},)")
    idx = np.arange(dim, dtype=np.int64)
    out = np.zeros(dim, dtype=complex)
    for c, p in op.terms:
        amp = c * _I_POWERS[p.e] * _paritycount(idx, p.z)
        out[idx ^ p.x] += amp * psi
    return out


def hermitian_residual(op: OperatorSum) -> float:
    """l2 norm of the merged coefficient difference between op and its dagger.

    Zero iff op is exactly Hermitian (canonical letter strings are Hermitian,
    so the residual reduces to 2*sqrt(sum Im(c)^2) over merged terms).
    """
    merged = op.normalized(drop_tol=0.0)
    return float(np.sqrt(sum(abs(c - np.conj(c)) ** 2 for c, _ in merged)))


def expectation(op: OperatorSum | PauliString, psi: np.ndarray) -> complex:
    return complex(np.vdot(psi, apply(op, psi)))
