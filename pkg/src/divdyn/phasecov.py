"""Phase-covariant qubit dynamics (absorption, emission, pure dephasing).

Generator::

    L_t = g+(t) L_+ + g-(t) L_- + g3(t) L_3
    L_pm[rho] = s_pm rho s_mp - {s_mp s_pm, rho} / 2
    L_3[rho]  = (sigma_3 rho sigma_3 - rho) / 4

with ``s_pm = (sigma_1 +- i sigma_2) / 2``.  On the Bloch ball the resulting map
is ``(x, y, z) -> (l1 x, l1 y, l3 z + l*)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import SIGMA, identity_superop, sandwich
from .rates import (DEFAULT_TOL, LOG_SPACE_THRESHOLD, AccumulatedRate, RateFunction,
                    integrate, quad, weighted_integral)
from .verdict import Verdict

COMPARE_TOL = 1e-12
PRODUCT_FLOOR = 1e-14

SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)


def _dissipator(jump: np.ndarray) -> np.ndarray:
    jj = jump.conj().T @ jump
    return sandwich(jump) - 0.5 * (sandwich(jj, np.eye(2)) + sandwich(np.eye(2), jj))


L_PLUS = _dissipator(SIGMA_PLUS)
L_MINUS = _dissipator(SIGMA_MINUS)
L_DEPHASE = 0.25 * (sandwich(SIGMA[3]) - identity_superop(2))
for _m in (L_PLUS, L_MINUS, L_DEPHASE):
    _m.setflags(write=False)


@dataclass(frozen=True)
class PhaseCovRates:
    gamma_plus: RateFunction
    gamma_minus: RateFunction
    gamma3: RateFunction

    @property
    def rates(self) -> tuple[RateFunction, RateFunction, RateFunction]:
        return (self.gamma_plus, self.gamma_minus, self.gamma3)

    def values(self, t: float) -> np.ndarray:
        return np.array([r(t) for r in self.rates])

    def generator(self, t: float) -> np.ndarray:
        gp, gm, g3 = self.values(t)
        return gp * L_PLUS + gm * L_MINUS + g3 * L_DEPHASE


@dataclass(frozen=True)
class PhaseCovParams:
    lambda1: float
    lambda3: float
    lambda_star: float


@dataclass(frozen=True)
class BetaCoefficients:
    beta1: float
    beta2: float
    beta3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.beta1, self.beta2, self.beta3])


@dataclass(frozen=True)
class PhaseCovCertificate:
    cp: bool
    p: bool
    beta_ok: bool
    fired: tuple[str, ...] = ()
    failed: tuple[str, ...] = ()

    @property
    def cp_verdict(self) -> Verdict:
        return Verdict.of(self.cp)

    @property
    def p_verdict(self) -> Verdict:
        return Verdict.of(self.p)

    @property
    def d_verdict(self) -> Verdict:
        if self.cp or self.beta_ok:
            return Verdict.YES
        if not self.p:
            return Verdict.NO
        return Verdict.UNKNOWN


def params_from_accumulated(gp: float, gm: float, g3: float, star: float) -> PhaseCovParams:
    return PhaseCovParams(math.exp(-0.5 * (gp + gm + g3)), math.exp(-(gp + gm)), float(star))


def params_at(r: PhaseCovRates, t: float, tol: float = DEFAULT_TOL) -> PhaseCovParams:
    if t < 0:
        raise ValueError("t must be non-negative")
    gp, gm, g3 = (integrate(g, 0.0, t, tol) for g in r.rates)
    total = gp + gm
    shift = total if total > LOG_SPACE_THRESHOLD else 0.0
    raw = weighted_integral(r.gamma_plus, r.gamma_minus, t, tol, log_shift=shift)
    return params_from_accumulated(gp, gm, g3, raw * math.exp(shift - total))


def params_on_grid(r: PhaseCovRates, grid: Sequence[float], tol: float = DEFAULT_TOL) -> list[PhaseCovParams]:
    """Parameters on a sorted grid starting at 0.

    The affine part is propagated interval by interval,
    ``l*(t_i) = m3 l*(t_{i-1}) + int_{t_{i-1}}^{t_i} (g+ - g-) exp(-(G(t_i) - G(tau)))``,
    which keeps every exponent non-positive for non-negative total rates.
    """
    grid = np.asarray(grid, dtype=float)
    acc = [AccumulatedRate.build(g, grid, tol) for g in r.rates]
    diff = r.gamma_plus - r.gamma_minus
    total = r.gamma_plus + r.gamma_minus
    share = tol / max(1, len(grid) - 1)
    star = 0.0
    out = [params_from_accumulated(0.0, 0.0, 0.0, 0.0)]
    for i in range(1, len(grid)):
        lo, hi = grid[i - 1], grid[i]
        step_total = (acc[0].values[i] - acc[0].values[i - 1]) + (acc[1].values[i] - acc[1].values[i - 1])

        def integrand(tau, lo=lo, hi=hi):
            g = diff(tau)
            if g == 0.0:
                return 0.0
            return g * math.exp(-integrate(total, tau, hi, share * 1e-2))

        star = math.exp(-step_total) * star + quad(integrand, lo, hi, share, total.breakpoints)
        out.append(params_from_accumulated(acc[0].values[i], acc[1].values[i], acc[2].values[i], star))
    return out


def bloch_action(p: PhaseCovParams) -> tuple[np.ndarray, np.ndarray]:
    return np.diag([p.lambda1, p.lambda1, p.lambda3]), np.array([0.0, 0.0, p.lambda_star])


def map_superop(p: PhaseCovParams) -> np.ndarray:
    # each term is image * Tr(rho probe), i.e. vec(image) vec(probe^T)^T
    out = np.zeros((4, 4), dtype=complex)
    pairs = ((SIGMA[0] + p.lambda_star * SIGMA[3], SIGMA[0]),
             (p.lambda1 * SIGMA[1], SIGMA[1]),
             (p.lambda1 * SIGMA[2], SIGMA[2]),
             (p.lambda3 * SIGMA[3], SIGMA[3]))
    for image, probe in pairs:
        out += 0.5 * np.outer(image.reshape(-1, order="F"), probe.T.reshape(-1, order="F"))
    return out


def apply_map(p: PhaseCovParams, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    tr = np.trace(rho)
    return 0.5 * ((SIGMA[0] + p.lambda_star * SIGMA[3]) * tr
                  + p.lambda1 * SIGMA[1] * np.trace(rho @ SIGMA[1])
                  + p.lambda1 * SIGMA[2] * np.trace(rho @ SIGMA[2])
                  + p.lambda3 * SIGMA[3] * np.trace(rho @ SIGMA[3]))


def rotate(rho: np.ndarray, phi: float) -> np.ndarray:
    """``exp(-i sigma_3 phi) rho exp(i sigma_3 phi)``."""
    u = np.diag([np.exp(-1j * phi), np.exp(1j * phi)])
    return u @ rho @ u.conj().T


def stationary_state(lambda3: float, lambda_star: float) -> np.ndarray:
    if lambda3 == 1.0:
        raise ValueError("lambda3 = 1: the map has no unique stationary state")
    return 0.5 * (SIGMA[0] + lambda_star / (1.0 - lambda3) * SIGMA[3])


def cp_static(p: PhaseCovParams, tol: float = COMPARE_TOL) -> bool:
    first = abs(p.lambda3) + abs(p.lambda_star) <= 1.0 + tol
    second = 4.0 * p.lambda1**2 + p.lambda_star**2 <= (1.0 + p.lambda3) ** 2 + tol
    return bool(first and second)


def p_divisible_pointwise(gp: float, gm: float, g3: float, tol: float = COMPARE_TOL) -> bool:
    """Exact P-divisibility test on instantaneous rates.

    With ``L_3`` normalized as above the coherence decays at ``(g+ + g- + g3)/2``,
    and the Bloch-ball contraction condition reads
    ``g+- >= 0`` and ``g3 + 2 sqrt(g+ g-) >= 0``.
    """
    if gp < -tol or gm < -tol:
        return False
    prod = gp * gm
    if prod < 0.0 and abs(prod) < PRODUCT_FLOOR:
        prod = 0.0
    return bool(g3 + 2.0 * math.sqrt(max(prod, 0.0)) >= -tol)


def cp_divisible_pointwise(gp: float, gm: float, g3: float, tol: float = COMPARE_TOL) -> bool:
    return bool(gp >= -tol and gm >= -tol and g3 >= -tol)


def beta_from_rates(gp: float, gm: float, g3: float) -> BetaCoefficients:
    return BetaCoefficients(gp + gm - g3, 3.0 * gp - gm + g3, -gp + 3.0 * gm + g3)


def rates_from_beta(b: BetaCoefficients) -> tuple[float, float, float]:
    return ((b.beta1 + b.beta2) / 4.0,
            (b.beta1 + b.beta3) / 4.0,
            (b.beta2 + b.beta3 - 2.0 * b.beta1) / 4.0)


def beta_nonnegative(gp: float, gm: float, g3: float, tol: float = COMPARE_TOL) -> bool:
    return bool(np.all(beta_from_rates(gp, gm, g3).as_array() >= -tol))


def beta_region(gp: float, gm: float, g3: float, tol: float = COMPARE_TOL) -> bool:
    """The same set as :func:`beta_nonnegative`, written as bounds on ``g3``."""
    return bool(gp >= -tol and gm >= -tol
                and max(gp - 3.0 * gm, gm - 3.0 * gp) <= g3 + tol
                and g3 <= gp + gm + tol)


def d_sufficient_pointwise(gp: float, gm: float, g3: float, tol: float = COMPARE_TOL) -> bool:
    return beta_nonnegative(gp, gm, g3, tol) or cp_divisible_pointwise(gp, gm, g3, tol)


def classify_pointwise(gamma: Sequence[float], tol: float = COMPARE_TOL) -> PhaseCovCertificate:
    gp, gm, g3 = (float(x) for x in gamma)
    checks = {
        "CP:rates>=0": cp_divisible_pointwise(gp, gm, g3, tol),
        "P:bloch-contraction": p_divisible_pointwise(gp, gm, g3, tol),
        "D-sufficient:beta>=0": beta_nonnegative(gp, gm, g3, tol),
    }
    if checks["CP:rates>=0"]:
        fired, failed = ("trivial/CP",), ()
    else:
        fired = tuple(k for k, ok in checks.items() if ok)
        failed = tuple(k for k, ok in checks.items() if not ok)
    return PhaseCovCertificate(checks["CP:rates>=0"], checks["P:bloch-contraction"],
                               checks["D-sufficient:beta>=0"], fired, failed)
