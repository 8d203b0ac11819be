"""Propagators, numerical oracles and timeline classification.

Divisibility verdicts come from the closed-form rate certificates of each
family.  Two independent numerical routes check them:

* an RK4 integration of ``dLambda/dt = L_t Lambda`` against the analytic map;
* Choi-matrix (CP) and Bloch-ball (qubit positivity) tests of propagators,
  which are built analytically from eigenvalue ratios / affine parameters.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import gpc, phasecov, qubit_pauli
from .gpc import GpcRates
from .linalg import bloch_affine, choi_of, identity_superop, is_psd, partial_transpose, superop_dim
from .phasecov import PhaseCovParams, PhaseCovRates
from .qubit_pauli import PauliRates
from .rates import DEFAULT_TOL, Custom
from .verdict import Verdict, conjunction

log = logging.getLogger(__name__)

GeneratorSpec = Union[PauliRates, GpcRates, PhaseCovRates]

INVERTIBILITY_FLOOR = 1e-12
ORACLE_PSD_TOL = 1e-8
BLOCH_TOL = 1e-12
SAMPLED_BLOCH_TOL = 1e-9
LOCAL_STEP_FACTOR = 0.1  # keeps second-order compensation below the first-order violation


class HierarchyError(RuntimeError):
    """Certificates contradict CP => D => P."""


class NonInvertibleError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


def family_name(g: GeneratorSpec) -> str:
    if isinstance(g, PauliRates):
        return "pauli"
    if isinstance(g, GpcRates):
        return "gpc"
    if isinstance(g, PhaseCovRates):
        return "phasecov"
    raise TypeError(f"unknown generator family: {type(g).__name__}")


def dimension(g: GeneratorSpec) -> int:
    return g.d if isinstance(g, GpcRates) else 2


# -- analytic maps -----------------------------------------------------------

def _states_on_grid(g: GeneratorSpec, grid, tol):
    """Per grid point: eigenvalue vector (Pauli, GPC) or PhaseCovParams."""
    if isinstance(g, PauliRates):
        return list(qubit_pauli.eigenvalues_on_grid(g, grid, tol))
    if isinstance(g, GpcRates):
        return list(gpc.eigenvalues_on_grid(g, grid, tol))
    return phasecov.params_on_grid(g, grid, tol)


def _state_at(g: GeneratorSpec, t: float, tol):
    if isinstance(g, PauliRates):
        return qubit_pauli.eigenvalues_at(g, t, tol)
    if isinstance(g, GpcRates):
        return gpc.eigenvalues_at(g, t, tol)
    return phasecov.params_at(g, t, tol)


def _superop_of_state(g: GeneratorSpec, state) -> np.ndarray:
    if isinstance(g, PauliRates):
        return qubit_pauli.superop_from_eigenvalues(state)
    if isinstance(g, GpcRates):
        return gpc.superop_from_eigenvalues(g.mubs, state)
    return phasecov.map_superop(state)


def _invertible(state) -> bool:
    if isinstance(state, PhaseCovParams):
        return state.lambda1 >= INVERTIBILITY_FLOOR and state.lambda3 >= INVERTIBILITY_FLOOR
    return bool(np.min(state) >= INVERTIBILITY_FLOOR)


def _ratio_state(state_s, state_t):
    if isinstance(state_s, PhaseCovParams):
        m3 = state_t.lambda3 / state_s.lambda3
        return PhaseCovParams(state_t.lambda1 / state_s.lambda1, m3,
                              state_t.lambda_star - state_s.lambda_star * m3)
    return np.asarray(state_t) / np.asarray(state_s)


def analytic_map_at(g: GeneratorSpec, t: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    return _superop_of_state(g, _state_at(g, t, tol))


def analytic_maps_on_grid(g: GeneratorSpec, grid: Sequence[float], tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    return [_superop_of_state(g, s) for s in _states_on_grid(g, grid, tol)]


@dataclass(frozen=True)
class Propagator:
    """``V_{t,s}`` with ``Lambda_t = V_{t,s} Lambda_s``."""

    s: float
    t: float
    superop: np.ndarray
    state: object = None  # eigenvalue ratios or PhaseCovParams of the propagator

    @property
    def d(self) -> int:
        return superop_dim(self.superop)


def _propagator_from_states(g, s, t, state_s, state_t) -> Propagator:
    if not _invertible(state_s):
        raise NonInvertibleError(f"Lambda_s is not invertible at s={s}")
    ratio = _ratio_state(state_s, state_t)
    return Propagator(float(s), float(t), _superop_of_state(g, ratio), ratio)


def propagator(g: GeneratorSpec, s: float, t: float, tol: float = DEFAULT_TOL) -> Propagator:
    if not 0.0 <= s <= t:
        raise ValueError("propagator needs 0 <= s <= t")
    if s == t:
        d = dimension(g)
        return Propagator(float(s), float(t), identity_superop(d))
    return _propagator_from_states(g, s, t, _state_at(g, s, tol), _state_at(g, t, tol))


def compose(v2: Propagator, v1: Propagator) -> Propagator:
    """``V_{t,s} o V_{s,r}``."""
    if not np.isclose(v2.s, v1.t):
        raise ValueError("propagators are not adjacent")
    return Propagator(v1.s, v2.t, v2.superop @ v1.superop)


# -- master equation oracle --------------------------------------------------

def _rate_breakpoints(g: GeneratorSpec) -> np.ndarray:
    return np.array(sorted({b for r in g.rates for b in r.breakpoints}), dtype=float)


def rk4_solve(g: GeneratorSpec, grid: Sequence[float], steps: int) -> list[np.ndarray]:
    """Classic RK4 with ``steps`` equal sub-steps per smooth piece of each grid
    interval. Rate jumps split the interval, and the generator is read just
    inside each piece so a jump never sits under a single step."""
    grid = np.asarray(grid, dtype=float)
    jumps = _rate_breakpoints(g)
    lam = identity_superop(dimension(g))
    out = [lam.copy()]
    for lo, hi in zip(grid[:-1], grid[1:]):
        cuts = [lo, *jumps[(jumps > lo) & (jumps < hi)], hi]
        for a, b in zip(cuts[:-1], cuts[1:]):
            h = (b - a) / steps
            eps = 1e-13 * max(1.0, abs(b))
            for n in range(steps):
                t = a + n * h
                l0 = g.generator(min(max(t, a + eps), b - eps))
                lh = g.generator(t + 0.5 * h)
                l1 = g.generator(min(max(t + h, a + eps), b - eps))
                k1 = l0 @ lam
                k2 = lh @ (lam + 0.5 * h * k1)
                k3 = lh @ (lam + 0.5 * h * k2)
                k4 = l1 @ (lam + h * k3)
                lam = lam + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out.append(lam.copy())
    return out


def integrate_master_equation(g: GeneratorSpec, grid: Sequence[float], tol: float = 1e-9,
                              max_refinements: int = 14) -> list[np.ndarray]:
    """RK4 solution on ``grid``, halving the step until two successive
    refinements differ by at most ``tol`` (max norm over all grid points)."""
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0 or np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted and start at 0")
    steps = 1
    prev = rk4_solve(g, grid, steps)
    for _ in range(max_refinements):
        steps *= 2
        cur = rk4_solve(g, grid, steps)
        diff = max(float(np.max(np.abs(a - b))) for a, b in zip(prev, cur))
        if not np.isfinite(diff):
            raise ConvergenceError("RK4 solution is not finite")
        if diff <= tol:
            return cur
        prev = cur
    raise ConvergenceError(f"RK4 did not converge to {tol} within {max_refinements} refinements")


# -- propagator checks -------------------------------------------------------

def choi_min_eigenvalue(v: Propagator) -> float:
    c = choi_of(v.superop)
    return float(np.linalg.eigvalsh((c + c.conj().T) / 2)[0])


def check_cp(v: Propagator, tol: float = ORACLE_PSD_TOL) -> bool:
    return is_psd(choi_of(v.superop), tol)


def check_cocp(v: Propagator | np.ndarray, tol: float = ORACLE_PSD_TOL) -> bool:
    s = v.superop if isinstance(v, Propagator) else np.asarray(v)
    return is_psd(partial_transpose(choi_of(s)), tol)


def check_positive_qubit(v: Propagator | np.ndarray, n_samples: int = 10_000,
                         rng: np.random.Generator | None = None) -> bool:
    """Positivity of a qubit map, i.e. the Bloch ball maps into itself.

    Pauli-diagonal maps use the exact multiplier test ``|mu_i| <= 1``; anything
    with an affine shift or off-diagonal Bloch part is checked on sampled pure
    states.
    """
    s = v.superop if isinstance(v, Propagator) else np.asarray(v)
    m, c = bloch_affine(s)
    if np.max(np.abs(c)) <= BLOCH_TOL and np.max(np.abs(m - np.diag(np.diag(m)))) <= BLOCH_TOL:
        return bool(np.all(np.abs(np.diag(m)) <= 1.0 + BLOCH_TOL))
    rng = np.random.default_rng(0) if rng is None else rng
    dirs = rng.normal(size=(n_samples, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    images = dirs @ m.T + c
    return bool(np.max(np.linalg.norm(images, axis=1)) <= 1.0 + SAMPLED_BLOCH_TOL)


def bloch_multipliers(v: Propagator) -> np.ndarray:
    m, _ = bloch_affine(v.superop)
    return np.diag(m).copy()


# -- classification ----------------------------------------------------------

@dataclass(frozen=True)
class ClassifyOptions:
    oracles: bool = True
    seed: int = 0
    random_pairs: int = 10
    n_samples: int = 10_000
    psd_tol: float = ORACLE_PSD_TOL
    compare_tol: float = 1e-12
    quad_tol: float = DEFAULT_TOL
    ode_check: bool = True
    ode_tol: float = 1e-9
    ode_agreement: float = 1e-6


@dataclass
class TimePoint:
    t: float
    cp: Verdict
    p: Verdict
    d: Verdict
    fired: tuple[str, ...] = ()
    failed: tuple[str, ...] = ()
    rates: tuple[float, ...] = ()


@dataclass
class OracleRecord:
    kind: str  # "adjacent" or "random"
    s: float
    t: float
    choi_min_eigenvalue: float
    cp_oracle: bool
    positive_oracle: bool | None
    rate_cp: Verdict
    rate_p: Verdict
    cp_agrees: bool | None
    p_agrees: bool | None


@dataclass
class DivisibilityReport:
    family: str
    d: int
    points: list[TimePoint]
    oracles: list[OracleRecord] = field(default_factory=list)
    seed: int = 0
    ode_max_error: float | None = None
    ode_agrees: bool | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    def column(self, name: str) -> list[Verdict]:
        return [getattr(p, name) for p in self.points]

    def summary(self) -> dict[str, Verdict]:
        return {name: conjunction(self.column(name)) for name in ("cp", "p", "d")}

    def oracle_disagreements(self) -> list[OracleRecord]:
        return [o for o in self.oracles if o.cp_agrees is False or o.p_agrees is False]

    @property
    def oracles_agree(self) -> bool | None:
        if not self.oracles and self.ode_agrees is None:
            return None
        return not self.oracle_disagreements() and self.ode_agrees is not False


def classify_rates(g: GeneratorSpec, values: Sequence[float], tol: float = 1e-12):
    """Tri-state verdicts and certificate names for instantaneous rate values."""
    if isinstance(g, PauliRates):
        v = qubit_pauli.classify_pointwise(values, tol)
        names = {"CP:rates>=0": v.cp, "P:pairwise-sums>=0": v.p, "D:j>=0": v.d}
        if v.cp:
            fired, failed = ("trivial/CP",), ()
        else:
            fired = tuple(k for k, ok in names.items() if ok)
            failed = tuple(k for k, ok in names.items() if not ok)
        return Verdict.of(v.cp), Verdict.of(v.p), Verdict.of(v.d), fired, failed
    if isinstance(g, GpcRates):
        c = gpc.classify_pointwise(values, g.d, tol)
    else:
        c = phasecov.classify_pointwise(values, tol)
    return c.cp_verdict, c.p_verdict, c.d_verdict, c.fired, c.failed


def check_hierarchy(point: TimePoint) -> None:
    if point.cp is Verdict.YES and point.d is not Verdict.YES:
        raise HierarchyError(f"t={point.t}: CP=YES but D={point.d} ({point.fired}/{point.failed})")
    if point.d is Verdict.YES and point.p is Verdict.NO:
        raise HierarchyError(f"t={point.t}: D=YES but P=NO ({point.fired}/{point.failed})")


def _interval_verdict(a: Verdict, b: Verdict) -> Verdict | None:
    return a if a is b and a in (Verdict.YES, Verdict.NO) else None


def rate_margins(g: GeneratorSpec, values: Sequence[float]) -> tuple[float, float | None]:
    """Signed distance of the rates from the CP and P boundaries (negative: violated).

    ``None`` for P when there is no exact P criterion (qudits).
    """
    v = np.asarray(values, dtype=float)
    if isinstance(g, PauliRates):
        return float(v.min()), float(min(v[0] + v[1], v[0] + v[2], v[1] + v[2]))
    if isinstance(g, GpcRates):
        return float(v.min()), None
    gp, gm, g3 = v
    return float(v.min()), float(min(gp, gm, g3 + 2.0 * np.sqrt(max(gp * gm, 0.0))))


def _shifted(g: GeneratorSpec, origin: float) -> GeneratorSpec:
    """The same family with every rate read from ``origin`` on."""
    def shift(r):
        bps = tuple(b - origin for b in r.breakpoints if b > origin)
        return Custom(lambda tau, r=r: r(tau + origin), bps)

    if isinstance(g, GpcRates):
        return GpcRates(g.d, tuple(shift(r) for r in g.rates))
    return type(g)(*(shift(r) for r in g.rates))


def local_propagator(g: GeneratorSpec, start: float, h: float, tol: float = DEFAULT_TOL) -> Propagator:
    """``V_{start+h, start}`` computed from integrals over ``[start, start+h]`` only."""
    sg = _shifted(g, start)
    return Propagator(start, start + h, _superop_of_state(sg, _state_at(sg, h, tol)))


def _local_check(g, s, t, margin_index, opts, rng) -> bool | None:
    """Short-time propagator at the endpoint where the rate criterion fails most.

    Over a long step the violation of a negative rate can be outweighed by the
    others, so a failing rate criterion is compared with a propagator short
    enough for the first-order term to dominate.  Returns whether that
    propagator shows the violation, or ``None`` when the violation is below the
    oracle's resolution.
    """
    ends = [(s, rate_margins(g, g.values(s))), (t, rate_margins(g, g.values(t)))]
    end, margins = min(ends, key=lambda e: e[1][margin_index])
    margin = margins[margin_index]
    scale = max(1.0, float(np.max(np.abs(g.values(end)))))
    h = min(t - s, LOCAL_STEP_FACTOR * abs(margin) / scale**2)
    resolution = 2.0 * opts.psd_tol if margin_index == 0 else SAMPLED_BLOCH_TOL
    if h * abs(margin) / 4.0 <= 10.0 * resolution:
        return None
    start = end if end + h <= t else end - h
    v = local_propagator(g, start, h, opts.quad_tol)
    if margin_index == 0:
        return not check_cp(v, opts.psd_tol)
    return not check_positive_qubit(v, opts.n_samples, rng)


def _oracle_record(g, kind, v: Propagator, rate_cp, rate_p, opts, rng, exact_interval):
    cp_oracle = check_cp(v, opts.psd_tol)
    positive = None
    if dimension(g) == 2:
        positive = check_positive_qubit(v, opts.n_samples, rng)
    # rate YES on every grid point inside [s, t] implies the propagator property
    cp_agrees = None if rate_cp is not Verdict.YES else cp_oracle
    p_agrees = None if rate_p is not Verdict.YES or positive is None else positive
    if exact_interval:
        if rate_cp is Verdict.NO:
            cp_agrees = True if not cp_oracle else _local_check(g, v.s, v.t, 0, opts, rng)
        if rate_p is Verdict.NO and positive is not None:
            p_agrees = True if not positive else _local_check(g, v.s, v.t, 1, opts, rng)
    return OracleRecord(kind, v.s, v.t, choi_min_eigenvalue(v), cp_oracle, positive,
                        rate_cp if rate_cp is not None else Verdict.UNKNOWN,
                        rate_p if rate_p is not None else Verdict.UNKNOWN,
                        cp_agrees, p_agrees)


def classify_timeline(g: GeneratorSpec, grid: Sequence[float],
                      options: ClassifyOptions | None = None) -> DivisibilityReport:
    opts = options or ClassifyOptions()
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing, start at 0 and have >= 2 points")
    states = _states_on_grid(g, grid, opts.quad_tol)

    points: list[TimePoint] = []
    invertible_upto = len(grid)
    for i, t in enumerate(grid):
        if i < invertible_upto and not _invertible(states[i]):
            invertible_upto = i
            log.warning("map is not invertible from t=%g on; verdicts INDETERMINATE", t)
        values = tuple(float(x) for x in g.values(t))
        if i >= invertible_upto:
            ind = Verdict.INDETERMINATE
            points.append(TimePoint(float(t), ind, ind, ind, ("non-invertible",), (), values))
            continue
        cp, p, d, fired, failed = classify_rates(g, values, opts.compare_tol)
        point = TimePoint(float(t), cp, p, d, tuple(fired), tuple(failed), values)
        check_hierarchy(point)
        points.append(point)

    report = DivisibilityReport(family_name(g), dimension(g), points, seed=opts.seed)
    if not opts.oracles:
        return report

    rng = np.random.default_rng(opts.seed)
    usable = max(invertible_upto - 1, 0)  # last index whose state is invertible
    for i in range(usable):
        v = _propagator_from_states(g, grid[i], grid[i + 1], states[i], states[i + 1])
        a, b = points[i], points[i + 1]
        report.oracles.append(_oracle_record(
            g, "adjacent", v, _interval_verdict(a.cp, b.cp), _interval_verdict(a.p, b.p),
            opts, rng, exact_interval=True))
    if usable >= 1:
        for _ in range(opts.random_pairs):
            i, j = sorted(rng.choice(usable + 1, size=2, replace=False))
            v = _propagator_from_states(g, grid[i], grid[j], states[i], states[j])
            inside = points[i:j + 1]
            report.oracles.append(_oracle_record(
                g, "random", v, conjunction(p.cp for p in inside),
                conjunction(p.p for p in inside), opts, rng, exact_interval=False))

    if opts.ode_check:
        numeric = integrate_master_equation(g, grid[:invertible_upto], opts.ode_tol)
        analytic = [_superop_of_state(g, s) for s in states[:invertible_upto]]
        err = max(float(np.max(np.abs(a - b))) for a, b in zip(numeric, analytic))
        report.ode_max_error = err
        report.ode_agrees = err <= opts.ode_agreement
    return report
