"""Dense superoperator and Choi-matrix kernel.

Conventions used throughout the package:

* vectorization stacks columns, ``vec(X) = X.reshape(-1, order="F")``, so the
  map ``X -> A X B`` has the matrix ``kron(B.T, A)``;
* a superoperator is a plain ``(d*d, d*d)`` complex array acting on ``vec(X)``;
* the Choi matrix is ``C = sum_ij E_ij (x) phi(E_ij)`` (first factor carries the
  matrix unit), so ``C[i*d + a, j*d + b] = phi(E_ij)[a, b]``.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-9


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    return v.reshape(d, d, order="F")


def superop_dim(s: np.ndarray) -> int:
    n = s.shape[0]
    d = int(round(np.sqrt(n)))
    if s.shape != (n, n) or d * d != n:
        raise ValueError(f"not a superoperator matrix: shape {s.shape}")
    return d


def identity_superop(d: int) -> np.ndarray:
    return np.eye(d * d, dtype=complex)


def sandwich(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Superoperator of ``X -> a X b`` (``b`` defaults to ``a^dagger``)."""
    a = np.asarray(a, dtype=complex)
    if b is None:
        b = a.conj().T
    return np.kron(np.asarray(b).T, a)


def transpose_superop(d: int) -> np.ndarray:
    """Superoperator of the transposition ``X -> X.T`` (a permutation matrix)."""
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            # vec index of E_ij is j*d + i; its transpose E_ji sits at i*d + j
            s[i * d + j, j * d + i] = 1.0
    return s.astype(complex)


def superop_from_function(fn: Callable[[np.ndarray], np.ndarray], d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d), dtype=complex)
    for col in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[col] = 1.0
        s[:, col] = vec(fn(unvec(e, d)))
    return s


def superop_from_kraus(ops: Sequence[np.ndarray]) -> np.ndarray:
    return sum(sandwich(k) for k in ops)


def apply_superop(s: np.ndarray, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    return unvec(s @ vec(x), x.shape[0])


def choi_of(s: np.ndarray) -> np.ndarray:
    """Choi matrix ``sum_ij E_ij (x) phi(E_ij)`` of a superoperator matrix."""
    d = superop_dim(s)
    # phi(E_ij) is column j*d + i of s, unvectorized
    blocks = s.T.reshape(d, d, d, d)  # [j, i, b, a] -> phi(E_ij)[a, b]
    return blocks.transpose(1, 3, 0, 2).reshape(d * d, d * d)


def superop_from_choi(c: np.ndarray) -> np.ndarray:
    d = superop_dim(c)
    blocks = np.asarray(c).reshape(d, d, d, d)  # [i, a, j, b]
    return blocks.transpose(2, 0, 3, 1).reshape(d * d, d * d).T


def partial_transpose(c: np.ndarray) -> np.ndarray:
    """Transpose the second tensor factor of a ``d^2 x d^2`` matrix."""
    d = superop_dim(c)
    return np.asarray(c).reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)


def partial_trace_second(c: np.ndarray) -> np.ndarray:
    d = superop_dim(c)
    return np.einsum("iaja->ij", np.asarray(c).reshape(d, d, d, d))


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    scale = max(1.0, np.linalg.norm(h, 2))
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol * scale)


def min_eigenvalue(h: np.ndarray, herm_tol: float = HERMITIAN_TOL) -> float:
    h = np.asarray(h)
    if not is_hermitian(h, herm_tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    return float(np.linalg.eigvalsh((h + h.conj().T) / 2)[0])


def is_psd(h: np.ndarray, tol: float = PSD_TOL, herm_tol: float = HERMITIAN_TOL) -> bool:
    """True iff the smallest eigenvalue is >= ``-tol * max(1, ||h||_2)``."""
    h = np.asarray(h)
    if not is_hermitian(h, herm_tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    w = np.linalg.eigvalsh((h + h.conj().T) / 2)
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    return bool(w[0] >= -tol * scale)


def kraus_from_choi(c: np.ndarray, tol: float = PSD_TOL) -> list[np.ndarray]:
    """Kraus operators from the eigendecomposition of a PSD Choi matrix.

    Eigenvalues at or below ``tol * max_eigenvalue`` are dropped, so the number
    of operators equals the numerical rank of ``c``.
    """
    d = superop_dim(c)
    if not is_psd(c, tol):
        raise NotPSDError("Choi matrix is not positive semidefinite; map is not CP")
    c = np.asarray(c)
    w, v = np.linalg.eigh((c + c.conj().T) / 2)
    wmax = w[-1]
    ops = []
    for val, vecr in zip(w[::-1], v[:, ::-1].T):
        if val <= tol * wmax:
            break
        ops.append(np.sqrt(val) * vecr.reshape(d, d).T)
    return ops


def is_trace_preserving(s: np.ndarray, tol: float = 1e-10) -> bool:
    d = superop_dim(s)
    return bool(np.allclose(partial_trace_second(choi_of(s)), np.eye(d), atol=tol, rtol=0))


# Pauli matrices, indexed 0..3 with sigma_0 = identity.
SIGMA = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def bloch_affine(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a qubit superoperator into its Bloch-ball action ``r -> M r + c``.

    Only meaningful for trace-preserving, Hermiticity-preserving maps.
    """
    if superop_dim(s) != 2:
        raise ValueError("Bloch representation needs a qubit superoperator")
    m = np.empty((3, 3))
    for j in range(3):
        out = apply_superop(s, SIGMA[j + 1])
        for i in range(3):
            m[i, j] = 0.5 * np.trace(SIGMA[i + 1] @ out).real
    img = apply_superop(s, SIGMA[0] / 2)
    c = np.array([np.trace(SIGMA[i + 1] @ img).real for i in range(3)])
    return m, c
