import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from divdyn import qubit_pauli as qp
from divdyn.linalg import (SIGMA, apply_superop, choi_of, identity_superop, is_psd,
                           partial_transpose, transpose_superop)
from divdyn.rates import Constant, Tanh

ETERNAL = qp.PauliRates(Constant(1.0), Constant(1.0), Tanh(-1.0, 1.0))
rates3 = st.tuples(*[st.floats(-3, 3, allow_nan=False)] * 3)


def test_eigenvalues_constant_rates():
    r = qp.PauliRates(Constant(1.0), Constant(1.0), Constant(1.0))
    for t in (0.0, 0.4, 2.0):
        assert np.allclose(qp.eigenvalues_at(r, t), math.exp(-2 * t), atol=1e-12)
    assert np.array_equal(qp.eigenvalues_at(r, 0.0), [1, 1, 1])


def test_eigenvalues_eternal_non_markovian():
    for t in (0.5, 1.0, 3.0, 5.0):
        lam = qp.eigenvalues_at(ETERNAL, t)
        expected = [math.exp(-t) * math.cosh(t)] * 2 + [math.exp(-2 * t)]
        assert np.allclose(lam, expected, atol=1e-10)


def test_eigenvalues_on_grid_matches_pointwise():
    grid = np.linspace(0, 5, 11)
    table = qp.eigenvalues_on_grid(ETERNAL, grid)
    for t, row in zip(grid, table):
        assert np.allclose(row, qp.eigenvalues_at(ETERNAL, t), atol=1e-10)


def test_constant_rates_match_matrix_exponential():
    g = (0.3, 1.1, -0.2)
    r = qp.PauliRates(*map(Constant, g))
    gen = r.generator(0.0)
    for t in (0.5, 1.5):
        assert np.allclose(qp.superop_from_eigenvalues(qp.eigenvalues_at(r, t)), expm(gen * t), atol=1e-10)


def test_probability_examples():
    assert np.allclose(qp.probabilities_from_eigenvalues([1, 1, 1]), [1, 0, 0, 0])
    assert np.allclose(qp.probabilities_from_eigenvalues([0, 0, 0]), [0.25] * 4)
    p = qp.probabilities_from_eigenvalues([1, -1, -1])
    assert np.allclose(p, [0, 1, 0, 0])
    assert np.allclose(qp.channel_superop(p), qp.channel_superop([0, 1, 0, 0]))
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    assert np.allclose(qp.apply_channel(p, rho), SIGMA[1] @ rho @ SIGMA[1])


def test_negative_probabilities_are_returned():
    p = qp.probabilities_from_eigenvalues([1.0, 1.0, -1.0])
    assert p.min() < 0 and not qp.is_probability_vector(p)


@settings(max_examples=60, deadline=None)
@given(lam=st.tuples(*[st.floats(-1, 1)] * 3))
def test_probability_eigenvalue_round_trip(lam):
    p = qp.probabilities_from_eigenvalues(lam)
    assert abs(p.sum() - 1.0) <= 1e-14
    assert np.allclose(qp.eigenvalues_from_probabilities(p), lam, atol=1e-14)
    s = qp.superop_from_eigenvalues(lam)
    for k in range(3):
        assert np.allclose(apply_superop(s, SIGMA[k + 1]), lam[k] * SIGMA[k + 1], atol=1e-12)
    assert np.allclose(apply_superop(s, SIGMA[0]), SIGMA[0], atol=1e-12)


def test_apply_channel_examples(rng):
    rho = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.allclose(qp.apply_channel([1, 0, 0, 0], rho), rho)
    assert np.allclose(qp.apply_channel([0.25] * 4, rho), np.trace(rho) * np.eye(2) / 2)
    e12 = np.array([[0, 1], [0, 0]])
    assert np.allclose(qp.apply_channel([0.5, 0.5, 0, 0], e12), (e12 + e12.T) / 2)
    herm = rho + rho.conj().T
    out = qp.apply_channel([0.1, 0.2, 0.3, 0.4], herm)
    assert abs(np.trace(out) - np.trace(herm)) <= 1e-14
    assert np.allclose(out, out.conj().T)


def test_j_examples():
    assert np.allclose(qp.j_from_rates([1, 1, 1]), [2, 2, 2])
    assert np.allclose(qp.j_from_rates([1, 1, -1]), [0, 0, 2])
    assert np.allclose(qp.j_from_rates([0, 0, 0]), 0)
    assert np.allclose(qp.rates_from_j([2, 2, 2]), [1, 1, 1])
    assert np.allclose(qp.rates_from_j([0, 0, 2]), [1, 1, -1])
    assert np.allclose(qp.rates_from_j([0, 0, 0]), 0)


@settings(max_examples=100, deadline=None)
@given(j=rates3)
def test_j_round_trip(j):
    assert np.allclose(qp.j_from_rates(qp.rates_from_j(j)), j, atol=1e-14, rtol=0)
    assert np.allclose(qp.rates_from_j(qp.j_from_rates(j)), j, atol=1e-14, rtol=0)


def test_classify_examples():
    assert qp.classify_pointwise([1, 1, -0.5]) == qp.PauliVerdict(False, True, True)
    assert qp.classify_pointwise([1, 1, 1]) == qp.PauliVerdict(True, True, True)
    v = qp.classify_pointwise([1, -2, 1])
    assert not v.p and not v.d


def test_d_equals_p_on_grid():
    axis = np.linspace(-2, 2, 21)
    for g in itertools.product(axis, repeat=3):
        v = qp.classify_pointwise(g)
        assert v.d == v.p


def test_generator_structure():
    gen = qp.dissipator(1)
    rho = np.array([[0.6, 0.1j], [-0.1j, 0.4]])
    assert np.allclose(apply_superop(gen, rho), 0.5 * (SIGMA[1] @ rho @ SIGMA[1] - rho))
    # trace annihilation: vec(I)^dagger L = 0
    vec_i = np.eye(2).reshape(-1, order="F")
    assert np.max(np.abs(vec_i @ qp.PauliRates(Constant(0.3), Constant(-1.0), Constant(2.0)).generator(0.0))) <= 1e-15


def test_cocp_parts():
    phis = qp.cocp_generator_parts()
    gens = qp.d_generators()
    ls = [qp.dissipator(b) for b in (1, 2, 3)]
    for phi, g, la in zip(phis, gens, ls):
        assert np.max(np.abs(g - (0.5 * sum(ls) - la))) <= 1e-12
        # the generator is half of phi - id in this normalization
        assert np.max(np.abs(g - 0.5 * (phi - identity_superop(2)))) <= 1e-12
        assert is_psd(partial_transpose(choi_of(phi)))
    phi2 = phis[1]
    assert np.allclose(phi2, transpose_superop(2))
    assert np.allclose(partial_transpose(choi_of(phi2)), choi_of(identity_superop(2)))
    assert not is_psd(choi_of(phi2))


def test_eternal_non_markovian_timeline_rates():
    for t in np.linspace(0, 5, 51):
        v = qp.classify_pointwise(ETERNAL.values(t))
        assert v.d
        assert v.cp == (t == 0)
