"""Time-dependent decoherence rates and their integrals.

Rates are small immutable objects evaluated pointwise.  All integrals go
through :func:`integrate`, an adaptive Simpson rule that pre-splits the
interval at the rate's breakpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DEFAULT_TOL = 1e-10
MAX_DEPTH = 40
MIN_DEPTH = 3  # guards against accidental cancellation in the first error estimates
LOG_SPACE_THRESHOLD = 30.0


class QuadratureError(ArithmeticError):
    pass


class RateFunction:
    """Base class: a real scalar function of time, ``r(t)``."""

    breakpoints = ()

    def __call__(self, t: float) -> float:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError

    def __add__(self, other: "RateFunction") -> "RateFunction":
        return LinearCombination(((1.0, self), (1.0, other)))

    def __sub__(self, other: "RateFunction") -> "RateFunction":
        return LinearCombination(((1.0, self), (-1.0, other)))

    def __neg__(self) -> "RateFunction":
        return LinearCombination(((-1.0, self),))


@dataclass(frozen=True)
class Constant(RateFunction):
    value: float

    def __call__(self, t):
        return float(self.value)

    def to_spec(self):
        return {"type": "constant", "value": self.value}


@dataclass(frozen=True)
class PiecewiseConstant(RateFunction):
    """``values[i]`` on ``[breakpoints[i-1], breakpoints[i])``; ``len(values) == len(breakpoints) + 1``."""

    breakpoints: tuple[float, ...] = field()
    values: tuple[float, ...] = field()

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != len(self.breakpoints) + 1:
            raise ValueError("piecewise rate needs exactly one more value than breakpoints")
        if list(self.breakpoints) != sorted(self.breakpoints):
            raise ValueError("breakpoints must be sorted")

    def __call__(self, t):
        return self.values[int(np.searchsorted(self.breakpoints, t, side="right"))]

    def to_spec(self):
        return {"type": "piecewise", "breakpoints": list(self.breakpoints),
                "values": list(self.values)}


@dataclass(frozen=True)
class Polynomial(RateFunction):
    """Coefficients in ascending powers: ``c0 + c1 t + c2 t^2 + ...``."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    def __call__(self, t):
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def to_spec(self):
        return {"type": "polynomial", "coefficients": list(self.coefficients)}


@dataclass(frozen=True)
class Tanh(RateFunction):
    """``a * tanh(b t) + c``."""

    a: float
    b: float
    c: float = 0.0

    def __call__(self, t):
        return self.a * math.tanh(self.b * t) + self.c

    def to_spec(self):
        return {"type": "tanh", "a": self.a, "b": self.b, "c": self.c}


@dataclass(frozen=True)
class Sampled(RateFunction):
    """Linear interpolation of a table; constant extrapolation outside it."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(x) for x in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.times) != len(self.values) or len(self.times) < 2:
            raise ValueError("sampled rate needs matching times/values with at least two entries")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")

    @property
    def breakpoints(self):
        return self.times

    def __call__(self, t):
        return float(np.interp(t, self.times, self.values))

    def to_spec(self):
        return {"type": "table", "times": list(self.times), "values": list(self.values)}


@dataclass(frozen=True)
class Custom(RateFunction):
    """Wraps an arbitrary callable; not serializable."""

    fn: Callable[[float], float]
    breakpoints: tuple[float, ...] = ()

    def __call__(self, t):
        return float(self.fn(t))

    def to_spec(self):
        raise TypeError("custom rate functions cannot be serialized")


@dataclass(frozen=True)
class LinearCombination(RateFunction):
    terms: tuple[tuple[float, RateFunction], ...]

    @property
    def breakpoints(self):
        return tuple(sorted({b for _, r in self.terms for b in r.breakpoints}))

    def __call__(self, t):
        return sum(w * r(t) for w, r in self.terms)

    def to_spec(self):
        raise TypeError("derived rate combinations are not part of the config grammar")


def combine(weights: Sequence[float], rates: Sequence[RateFunction]) -> RateFunction:
    return LinearCombination(tuple((float(w), r) for w, r in zip(weights, rates)))


def rate_from_spec(spec) -> RateFunction:
    """Build a rate from its config form: a bare number or a ``{"type": ...}`` mapping."""
    if isinstance(spec, bool):
        raise ValueError(f"invalid rate specification: {spec!r}")
    if isinstance(spec, (int, float)):
        return Constant(float(spec))
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValueError(f"invalid rate specification: {spec!r}")
    kind = spec["type"]
    try:
        if kind == "constant":
            return Constant(float(spec["value"]))
        if kind == "piecewise":
            return PiecewiseConstant(tuple(spec["breakpoints"]), tuple(spec["values"]))
        if kind == "polynomial":
            return Polynomial(tuple(spec["coefficients"]))
        if kind == "tanh":
            return Tanh(float(spec["a"]), float(spec["b"]), float(spec.get("c", 0.0)))
        if kind == "table":
            return Sampled(tuple(spec["times"]), tuple(spec["values"]))
    except KeyError as exc:
        raise ValueError(f"rate specification of type {kind!r} misses field {exc}") from None
    raise ValueError(f"unknown rate type {kind!r}")


def _simpson_segment(f, a, b, fa, fb, tol, depth):
    """Iterative adaptive Simpson on one smooth segment."""
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, tol, level = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        if not (math.isfinite(flm) and math.isfinite(frm)):
            raise QuadratureError(f"non-finite integrand near t={m}")
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if level < MIN_DEPTH:
            accept = False
        else:
            accept = abs(delta) <= tol or abs(delta) <= 1e-15 * abs(whole)
        if accept:
            total += left + right + delta / 15.0
        elif level >= depth:
            raise QuadratureError(f"adaptive Simpson did not converge within depth {depth} near t={m}")
        else:
            stack.append((m, b, fm, frm, fb, right, 0.5 * tol, level + 1))
            stack.append((a, m, fa, flm, fm, left, 0.5 * tol, level + 1))
    return total


def quad(f: Callable[[float], float], a: float, b: float, tol: float = DEFAULT_TOL,
         breakpoints: Sequence[float] = (), depth: int = MAX_DEPTH) -> float:
    """Adaptive Simpson integral of ``f`` over ``[a, b]`` to absolute error ``tol``."""
    if b < a:
        raise ValueError("integration requires a <= b")
    if b == a:
        return 0.0
    jumps = set(breakpoints)
    cuts = [a] + [x for x in sorted(jumps) if a < x < b] + [b]
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        # one-sided limits at breakpoints, so jumps are not smeared into the piece
        eps = 1e-13 * max(1.0, abs(lo), abs(hi))
        flo = f(lo + eps if lo in jumps else lo)
        fhi = f(hi - eps if hi in jumps else hi)
        if not (math.isfinite(flo) and math.isfinite(fhi)):
            raise QuadratureError("non-finite integrand at interval end")
        share = tol * (hi - lo) / (b - a)
        total += _simpson_segment(f, lo, hi, flo, fhi, share, depth)
    return total


def integrate(r: RateFunction, a: float, b: float, tol: float = DEFAULT_TOL) -> float:
    return quad(r, a, b, tol, r.breakpoints)


@dataclass(frozen=True)
class AccumulatedRate:
    """``Gamma(t) = int_0^t r`` cached on a grid; off-grid values integrate from the node below."""

    rate: RateFunction
    grid: np.ndarray
    values: np.ndarray
    tol: float = DEFAULT_TOL

    @classmethod
    def build(cls, rate: RateFunction, grid: Sequence[float], tol: float = DEFAULT_TOL) -> "AccumulatedRate":
        grid = np.asarray(grid, dtype=float)
        if grid[0] != 0.0 or np.any(np.diff(grid) < 0):
            raise ValueError("accumulation grid must be sorted and start at 0")
        share = tol / max(1, len(grid) - 1)
        steps = [integrate(rate, lo, hi, share) for lo, hi in zip(grid[:-1], grid[1:])]
        values = np.concatenate([[0.0], np.cumsum(steps)])
        grid.setflags(write=False)
        values.setflags(write=False)
        return cls(rate, grid, values, tol)

    def __call__(self, t: float) -> float:
        i = int(np.searchsorted(self.grid, t, side="right")) - 1
        i = min(max(i, 0), len(self.grid) - 1)
        node = self.grid[i]
        if t == node:
            return float(self.values[i])
        if t > node:
            return float(self.values[i]) + integrate(self.rate, node, t, self.tol)
        return float(self.values[i]) - integrate(self.rate, t, node, self.tol)


def _weight_grid(t: float, breakpoints: Sequence[float], n: int = 32) -> np.ndarray:
    pts = set(np.linspace(0.0, t, n + 1).tolist())
    pts.update(b for b in breakpoints if 0.0 < b < t)
    return np.array(sorted(pts))


def weighted_integral(gamma_plus: RateFunction, gamma_minus: RateFunction, t: float,
                      tol: float = DEFAULT_TOL, log_shift: float = 0.0) -> float:
    """``int_0^t (g+ - g-) exp(G(tau) - log_shift) dtau`` with ``G = Gamma_+ + Gamma_-``.

    ``log_shift`` rescales the weight; pass ``G(t)`` to get the damped value
    directly.  Raises :class:`OverflowError` when the unshifted weight would
    overflow.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return 0.0
    diff = gamma_plus - gamma_minus
    total = gamma_plus + gamma_minus
    grid = _weight_grid(t, total.breakpoints)
    acc = AccumulatedRate.build(total, grid, tol * 1e-2)
    peak = float(np.max(acc.values))
    if peak - log_shift > 700.0:
        raise OverflowError(
            f"exponential weight exp({peak:.1f}) overflows; rescale the time horizon "
            "or pass log_shift"
        )

    def integrand(tau):
        g = diff(tau)
        return 0.0 if g == 0.0 else g * math.exp(acc(tau) - log_shift)

    return quad(integrand, 0.0, t, tol, total.breakpoints)
