"""Shared independent oracles for the test suite."""
import numpy as np
import pytest
from scipy.optimize import minimize


def unit(d, i, j):
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def choi_by_loop(fn, d):
    """Choi matrix assembled block by block from a plain callable."""
    c = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            c[i * d:(i + 1) * d, j * d:(j + 1) * d] = fn(unit(d, i, j))
    return c


def random_kraus(rng, d, n):
    """n Kraus operators of a random CPTP map (isometry from a QR)."""
    g = rng.normal(size=(n * d, d)) + 1j * rng.normal(size=(n * d, d))
    q, _ = np.linalg.qr(g)
    return [q[k * d:(k + 1) * d] for k in range(n)]


def random_state(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def kossakowski_min(bases, gamma, rng, starts=30):
    """Minimum of <u| L(|v><v|) |u> over orthonormal pairs (u, v).

    A generator sum_a gamma_a (Phi_a - id) generates positive propagators
    (on its own interval) iff this minimum is non-negative; the optimizer gives
    an upper estimate of the true minimum.
    """
    d = bases.shape[1]

    def f(x):
        v = x[:d] + 1j * x[d:2 * d]
        u = x[2 * d:3 * d] + 1j * x[3 * d:]
        v = v / np.linalg.norm(v)
        u = u - np.vdot(v, u) * v
        u = u / np.linalg.norm(u)
        return sum(g * np.sum(np.abs(b.conj() @ u) ** 2 * np.abs(b.conj() @ v) ** 2)
                   for g, b in zip(gamma, bases))

    return min(minimize(f, rng.normal(size=4 * d), method="BFGS").fun for _ in range(starts))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
