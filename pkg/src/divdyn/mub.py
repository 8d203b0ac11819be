"""Maximal families of mutually unbiased bases.

Prime dimensions use the computational basis followed by the ``d`` quadratic
phase bases

    psi_k^{(a)}[j] = omega^(a j^2 + k j) / sqrt(d),   a = 0..d-1,

(for ``d = 2`` the quadratic phase is ``i^(a j)``, giving the sigma_1 and
sigma_2 eigenbases).  ``d = 4`` is built as the joint eigenbases of five
maximal commuting classes of two-qubit Pauli operators.

Bases are indexed 1..d+1 (``alpha``); vectors inside a basis 0..d-1 (``k``).
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import SIGMA

SUPPORTED_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)
SUPPORTED_DIMENSIONS = tuple(sorted(SUPPORTED_PRIMES + (4,)))

# Commuting classes partitioning the 15 non-identity two-qubit Paulis; each pair
# generates its class (the third element is the product).
_TWO_QUBIT_CLASSES = (("ZI", "IZ"), ("XI", "IX"), ("YI", "IY"), ("XZ", "YX"), ("YZ", "ZX"))
_PAULI = {"I": SIGMA[0], "X": SIGMA[1], "Y": SIGMA[2], "Z": SIGMA[3]}


class UnsupportedDimensionError(ValueError):
    pass


class DegenerateEigenvectorWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class MubFamily:
    """``bases[alpha - 1, k]`` is the unit vector psi_k^{(alpha)}."""

    d: int
    bases: np.ndarray

    def vector(self, alpha: int, k: int) -> np.ndarray:
        _check_alpha(self.d, alpha)
        if not 0 <= k < self.d:
            raise IndexError(f"vector index k={k} out of range for d={self.d}")
        return self.bases[alpha - 1, k]

    def to_json(self) -> str:
        data = {
            "d": self.d,
            "bases": [
                [[[float(z.real), float(z.imag)] for z in v] for v in basis]
                for basis in self.bases
            ],
        }
        return json.dumps(data)

    @classmethod
    def from_json(cls, text: str) -> "MubFamily":
        data = json.loads(text)
        arr = np.array(data["bases"], dtype=float)
        bases = arr[..., 0] + 1j * arr[..., 1]
        bases.setflags(write=False)
        return cls(int(data["d"]), bases)


def check_dimension(d: int) -> None:
    if d not in SUPPORTED_DIMENSIONS:
        raise UnsupportedDimensionError(
            f"no maximal MUB construction available for d={d} "
            f"(supported: {', '.join(map(str, SUPPORTED_DIMENSIONS))})"
        )


def _check_alpha(d: int, alpha: int) -> None:
    if not 1 <= alpha <= d + 1:
        raise IndexError(f"basis index alpha={alpha} out of range 1..{d + 1}")


def _prime_bases(p: int) -> np.ndarray:
    j = np.arange(p)
    bases = [np.eye(p, dtype=complex)]
    for a in range(p):
        if p == 2:
            phase = 1j ** (a * j)
        else:
            phase = np.exp(2j * np.pi * ((a * j * j) % p) / p)
        rows = [phase * np.exp(2j * np.pi * ((k * j) % p) / p) / np.sqrt(p) for k in range(p)]
        bases.append(np.array(rows))
    return np.array(bases)


def _two_qubit_bases() -> np.ndarray:
    bases = []
    for first, second in _TWO_QUBIT_CLASSES:
        a = np.kron(_PAULI[first[0]], _PAULI[first[1]])
        b = np.kron(_PAULI[second[0]], _PAULI[second[1]])
        # generic combination separates the four joint eigenspaces
        _, v = np.linalg.eigh(a + 0.5 * b)
        vecs = v.T.copy()
        for row in vecs:
            pivot = row[np.argmax(np.abs(row) > 1e-9)]
            row *= abs(pivot) / pivot
        bases.append(vecs)
    # the (ZI, IZ) class is the computational basis; keep its natural order
    bases[0] = np.eye(4, dtype=complex)
    return np.array(bases)


@lru_cache(maxsize=None)
def build_mubs(d: int) -> MubFamily:
    check_dimension(d)
    bases = _two_qubit_bases() if d == 4 else _prime_bases(d)
    bases.setflags(write=False)
    return MubFamily(d, bases)


def projector(m: MubFamily, alpha: int, k: int) -> np.ndarray:
    v = m.vector(alpha, k)
    return np.outer(v, v.conj())


def unitary_eigenvector(m: MubFamily, alpha: int, k: int) -> np.ndarray:
    """``U_alpha^k = sum_l omega^(k l) P_l^{(alpha)}`` with ``omega = exp(2 pi i / d)``."""
    _check_alpha(m.d, alpha)
    if k % m.d == 0:
        warnings.warn("k = 0 gives the identity, not a traceless eigenvector",
                      DegenerateEigenvectorWarning, stacklevel=2)
    basis = m.bases[alpha - 1]
    phases = np.exp(2j * np.pi * k * np.arange(m.d) / m.d)
    return (basis.T * phases) @ basis.conj()


def operator_basis(m: MubFamily) -> list[tuple[int, int, np.ndarray]]:
    """All ``(alpha, k, U_alpha^k)`` with ``k = 1..d-1``: a traceless orthogonal set."""
    return [(a, k, unitary_eigenvector(m, a, k))
            for a in range(1, m.d + 2) for k in range(1, m.d)]


def max_deviation(m: MubFamily) -> tuple[float, float]:
    """Largest orthonormality and unbiasedness deviations over the whole family."""
    d = m.d
    ortho = 0.0
    unbiased = 0.0
    for a in range(d + 1):
        for b in range(d + 1):
            g = m.bases[a].conj() @ m.bases[b].T
            if a == b:
                ortho = max(ortho, float(np.max(np.abs(g - np.eye(d)))))
            else:
                unbiased = max(unbiased, float(np.max(np.abs(np.abs(g) ** 2 - 1.0 / d))))
    return ortho, unbiased
