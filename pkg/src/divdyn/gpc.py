"""Generalized Pauli channels on a qudit, built from a maximal MUB family.

The map is ``Lambda = (d p0 - 1)/(d - 1) id + d/(d - 1) sum_a p_a Phi_a`` with
the dephasings ``Phi_a(X) = sum_k P_k^{(a)} X P_k^{(a)}``.  Under the generator
``sum_a gamma_a (Phi_a - id)`` every ``U_a^k`` (k >= 1) is an eigenvector with
eigenvalue ``lambda_a = exp(-int (gamma_0 - gamma_a))``.

Divisibility for d >= 3 is only bracketed by necessary and sufficient
conditions, hence the tri-state :class:`GpcCertificate`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .linalg import identity_superop, sandwich
from .mub import MubFamily, build_mubs, projector
from .rates import DEFAULT_TOL, AccumulatedRate, RateFunction, integrate
from .verdict import Verdict

COMPARE_TOL = 1e-12


@dataclass(frozen=True)
class GpcRates:
    d: int
    rates: tuple[RateFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(self.rates))
        if len(self.rates) != self.d + 1:
            raise ValueError(f"generalized Pauli channel in d={self.d} needs {self.d + 1} rates, "
                             f"got {len(self.rates)}")

    @property
    def mubs(self) -> MubFamily:
        return build_mubs(self.d)

    def values(self, t: float) -> np.ndarray:
        return np.array([r(t) for r in self.rates])

    def generator(self, t: float) -> np.ndarray:
        g = self.values(t)
        return np.tensordot(g, _dephasing_stack(self.d), axes=1) - g.sum() * identity_superop(self.d)


@dataclass(frozen=True)
class GpcCertificate:
    cp: bool
    p_necessary: bool
    p_sufficient_pair: bool
    p_sufficient_k: bool | None  # None: not applicable for this number of negative rates
    d_sufficient: bool
    fired: tuple[str, ...] = field(default=())
    failed: tuple[str, ...] = field(default=())

    @property
    def cp_verdict(self) -> Verdict:
        return Verdict.YES if self.cp else Verdict.NO

    @property
    def p_verdict(self) -> Verdict:
        if not self.p_necessary:
            return Verdict.NO
        if self.cp or self.p_sufficient_pair or self.p_sufficient_k:
            return Verdict.YES
        return Verdict.UNKNOWN

    @property
    def d_verdict(self) -> Verdict:
        if self.p_verdict is Verdict.NO:
            return Verdict.NO
        if self.cp or self.d_sufficient:
            return Verdict.YES
        return Verdict.UNKNOWN


def dephasing_channel(m: MubFamily, alpha: int) -> np.ndarray:
    return sum(sandwich(projector(m, alpha, k)) for k in range(m.d))


@lru_cache(maxsize=None)
def _dephasing_stack(d: int) -> np.ndarray:
    m = build_mubs(d)
    stack = np.array([dephasing_channel(m, a) for a in range(1, d + 2)])
    stack.setflags(write=False)
    return stack


def gpc_map(m: MubFamily, p: Sequence[float]) -> np.ndarray:
    d = m.d
    p = np.asarray(p, dtype=float)
    if p.shape != (d + 2,):
        raise ValueError(f"expected {d + 2} probabilities (p0, p1..p{d + 1}), got {p.size}")
    if m is build_mubs(d):
        phis = _dephasing_stack(d)
    else:
        phis = np.array([dephasing_channel(m, a) for a in range(1, d + 2)])
    out = (d * p[0] - 1.0) / (d - 1.0) * identity_superop(d)
    return out + d / (d - 1.0) * np.tensordot(p[1:], phis, axes=1)


def eigenvalues_from_accumulated(gammas) -> np.ndarray:
    g = np.asarray(gammas, dtype=float)
    return np.exp(-(g.sum(axis=-1, keepdims=True) - g))


def eigenvalues_at(r: GpcRates, t: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be non-negative")
    return eigenvalues_from_accumulated([integrate(g, 0.0, t, tol) for g in r.rates])


def eigenvalues_on_grid(r: GpcRates, grid: Sequence[float], tol: float = DEFAULT_TOL) -> np.ndarray:
    acc = np.column_stack([AccumulatedRate.build(g, grid, tol).values for g in r.rates])
    return eigenvalues_from_accumulated(acc)


def probabilities_from_eigenvalues(lam: Sequence[float], d: int) -> np.ndarray:
    """``(p0, p1, ..., p_{d+1})``; negative entries mean the map is not CP."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (d + 1,):
        raise ValueError(f"expected {d + 1} eigenvalues for d={d}")
    s = lam.sum()
    p0 = (1.0 + (d - 1) * s) / d**2
    return np.concatenate([[p0], (d - 1) / d**2 * (1.0 + d * lam - s)])


def eigenvalues_from_probabilities(p: Sequence[float], d: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    # p0 fixes sum(lambda); each p_a then fixes its lambda_a
    s = (d**2 * p[0] - 1.0) / (d - 1)
    return (d**2 * p[1:] / (d - 1) - 1.0 + s) / d


def superop_from_eigenvalues(m: MubFamily, lam: Sequence[float]) -> np.ndarray:
    return gpc_map(m, probabilities_from_eigenvalues(lam, m.d))


def _check_arity(gamma, d):
    g = np.asarray(gamma, dtype=float)
    if g.shape != (d + 1,):
        raise ValueError(f"expected {d + 1} rates for d={d}, got shape {g.shape}")
    return g


def j_alpha(gamma: Sequence[float], d: int) -> np.ndarray:
    g = _check_arity(gamma, d)
    return 0.5 * (g.sum() / (d - 1) - g)


def d_sufficient(gamma: Sequence[float], d: int, tol: float = COMPARE_TOL) -> bool:
    g = _check_arity(gamma, d)
    return bool(g.sum() - (d - 1) * g.max() >= -tol)


def p_necessary(gamma: Sequence[float], d: int, tol: float = COMPARE_TOL) -> bool:
    g = _check_arity(gamma, d)
    return bool(np.all(g.sum() - g >= -tol))


def p_sufficient_pair(gamma: Sequence[float], d: int, tol: float = COMPARE_TOL) -> bool:
    g = _check_arity(gamma, d)
    n = len(g)
    return all(g[a] + (d - 1) * g[b] >= -tol for a in range(n) for b in range(n) if a != b)


def negative_count(gamma: Sequence[float], tol: float = COMPARE_TOL) -> int:
    return int(np.sum(np.asarray(gamma, dtype=float) < -tol))


def p_sufficient_k(gamma: Sequence[float], d: int, tol: float = COMPARE_TOL) -> bool | None:
    """Sufficient P condition parametrized by the number ``k`` of negative rates.

    Returns ``None`` when the bound does not apply (``k > (d+1)/2``).
    """
    g = _check_arity(gamma, d)
    k = negative_count(g, tol)
    if k == 0:
        return True
    if 2 * k > d + 1 or d - 2 * (k - 1) <= 0:
        return None
    coeff = (d + 2 * (k - 1)) / (d - 2 * (k - 1))
    bound = -coeff * g.min()
    return bool(np.all(g[g >= -tol] >= bound - tol))


def classify_pointwise(gamma: Sequence[float], d: int, tol: float = COMPARE_TOL) -> GpcCertificate:
    g = _check_arity(gamma, d)
    checks = {
        "CP:rates>=0": bool(np.all(g >= -tol)),
        "P-necessary": p_necessary(g, d, tol),
        "P-sufficient:pairwise": p_sufficient_pair(g, d, tol),
        "P-sufficient:k-negative": p_sufficient_k(g, d, tol),
        "D-sufficient:j>=0": d_sufficient(g, d, tol),
    }
    if checks["CP:rates>=0"]:
        fired, failed = ("trivial/CP",), ()
    else:
        fired = tuple(name for name, ok in checks.items() if ok)
        failed = tuple(name for name, ok in checks.items() if ok is False)
    return GpcCertificate(
        cp=checks["CP:rates>=0"],
        p_necessary=checks["P-necessary"],
        p_sufficient_pair=checks["P-sufficient:pairwise"],
        p_sufficient_k=checks["P-sufficient:k-negative"],
        d_sufficient=checks["D-sufficient:j>=0"],
        fired=fired,
        failed=failed,
    )
