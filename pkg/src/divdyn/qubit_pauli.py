"""Qubit Pauli channels driven by three decoherence rates.

The generator is ``L_t = sum_a gamma_a(t) L_a`` with
``L_a(rho) = (sigma_a rho sigma_a - rho) / 2``.  The map is diagonal in the
Pauli basis with multipliers ``lambda_k = exp(-int (gamma_0 - gamma_k))`` where
``gamma_0 = gamma_1 + gamma_2 + gamma_3``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import SIGMA, identity_superop, sandwich, transpose_superop
from .rates import DEFAULT_TOL, AccumulatedRate, RateFunction, integrate

COMPARE_TOL = 1e-12
INVERTIBILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class PauliRates:
    gamma1: RateFunction
    gamma2: RateFunction
    gamma3: RateFunction

    @property
    def rates(self) -> tuple[RateFunction, RateFunction, RateFunction]:
        return (self.gamma1, self.gamma2, self.gamma3)

    def values(self, t: float) -> np.ndarray:
        return np.array([r(t) for r in self.rates])

    def generator(self, t: float) -> np.ndarray:
        g = self.values(t)
        return sum(g[a] * dissipator(a + 1) for a in range(3))


@dataclass(frozen=True)
class PauliVerdict:
    cp: bool
    p: bool
    d: bool


def dissipator(alpha: int) -> np.ndarray:
    """Superoperator of ``rho -> (sigma_alpha rho sigma_alpha - rho) / 2``."""
    return 0.5 * (sandwich(SIGMA[alpha]) - identity_superop(2))


def eigenvalues_from_accumulated(gammas: Sequence[float]) -> np.ndarray:
    """Multipliers from accumulated rates ``Gamma_k``: ``exp(-(sum Gamma - Gamma_k))``."""
    g = np.asarray(gammas, dtype=float)
    return np.exp(-(g.sum(axis=-1, keepdims=True) - g))


def eigenvalues_at(r: PauliRates, t: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be non-negative")
    return eigenvalues_from_accumulated([integrate(g, 0.0, t, tol) for g in r.rates])


def eigenvalues_on_grid(r: PauliRates, grid: Sequence[float], tol: float = DEFAULT_TOL) -> np.ndarray:
    """Row ``i`` holds ``(lambda_1, lambda_2, lambda_3)`` at ``grid[i]``."""
    acc = np.column_stack([AccumulatedRate.build(g, grid, tol).values for g in r.rates])
    return eigenvalues_from_accumulated(acc)


def probabilities_from_eigenvalues(lam: Sequence[float]) -> np.ndarray:
    """``(p0, p1, p2, p3)``; negative entries mean the map is not CP."""
    lam = np.asarray(lam, dtype=float)
    s = lam.sum()
    return np.concatenate([[(1.0 + s) / 4.0], (1.0 + 2.0 * lam - s) / 4.0])


def eigenvalues_from_probabilities(p: Sequence[float]) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    # lambda_k = p0 + p_k - (the other two)
    return np.array([p[0] + p[k] - (p[1:].sum() - p[k]) for k in (1, 2, 3)])


def is_probability_vector(p: Sequence[float], tol: float = COMPARE_TOL) -> bool:
    return bool(np.all(np.asarray(p) >= -tol))


def channel_superop(p: Sequence[float]) -> np.ndarray:
    return sum(p[a] * sandwich(SIGMA[a]) for a in range(4))


def apply_channel(p: Sequence[float], rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ValueError("Pauli channel acts on 2x2 matrices")
    return sum(p[a] * SIGMA[a] @ rho @ SIGMA[a] for a in range(4))


def superop_from_eigenvalues(lam: Sequence[float]) -> np.ndarray:
    return channel_superop(probabilities_from_eigenvalues(lam))


def j_from_rates(gamma: Sequence[float]) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    return g.sum() - g


def rates_from_j(j: Sequence[float]) -> np.ndarray:
    j = np.asarray(j, dtype=float)
    return 0.5 * j.sum() - j


def classify_pointwise(gamma: Sequence[float], tol: float = COMPARE_TOL) -> PauliVerdict:
    g = np.asarray(gamma, dtype=float)
    cp = bool(np.all(g >= -tol))
    p = all(g[a] + g[b] >= -tol for a in range(3) for b in range(a + 1, 3))
    d = bool(np.all(j_from_rates(g) >= -tol))
    return PauliVerdict(cp, p, d)


def cocp_generator_parts() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The completely copositive maps ``(s3 r s3)^T``, ``r^T`` and ``(s1 r s1)^T``."""
    theta = transpose_superop(2)
    return (theta @ sandwich(SIGMA[3]), theta, theta @ sandwich(SIGMA[1]))


def d_generators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``G_a = sum_b L_b / 2 - L_a``; equals ``(phi_a - id) / 2`` for the coCP parts."""
    half_sum = 0.5 * sum(dissipator(b) for b in (1, 2, 3))
    return tuple(half_sum - dissipator(a) for a in (1, 2, 3))
