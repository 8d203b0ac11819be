import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from conftest import kossakowski_min, random_state
from divdyn import gpc, qubit_pauli as qp
from divdyn.linalg import apply_superop, identity_superop, is_trace_preserving
from divdyn.mub import build_mubs, projector, unitary_eigenvector
from divdyn.rates import Constant
from divdyn.verdict import Verdict

# gpc basis order for d=2 is (sigma_3, sigma_1, sigma_2)
QUBIT_TO_GPC = [2, 0, 1]


def test_dephasing_qubit_is_diagonal_part(rng):
    phi = gpc.dephasing_channel(build_mubs(2), 1)
    rho = random_state(rng, 2)
    assert np.allclose(apply_superop(phi, rho), np.diag(np.diag(rho)))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_dephasing_properties(d):
    m = build_mubs(d)
    for a in range(1, d + 2):
        phi = gpc.dephasing_channel(m, a)
        assert np.max(np.abs(phi @ phi - phi)) <= 1e-12
        assert np.allclose(apply_superop(phi, np.eye(d)), np.eye(d), atol=1e-12)
        assert is_trace_preserving(phi)
        for k in range(d):
            assert np.allclose(apply_superop(phi, projector(m, a, k)), projector(m, a, k), atol=1e-12)
        for b in range(1, d + 2):
            if b != a:
                for k in range(1, d):
                    assert np.max(np.abs(apply_superop(phi, unitary_eigenvector(m, b, k)))) <= 1e-12


def test_gpc_map_identity_and_depolarizing():
    for d in (2, 3, 4):
        m = build_mubs(d)
        p = np.zeros(d + 2)
        p[0] = 1
        assert np.allclose(gpc.gpc_map(m, p), identity_superop(d), atol=1e-12)
        lam = 0.0
        p = np.array([(1 + (d * d - 1) * lam) / d**2] + [(d - 1) * (1 - lam) / d**2] * (d + 1))
        s = gpc.gpc_map(m, p)
        for _, _, u in [(a, k, unitary_eigenvector(m, a, k)) for a in range(1, d + 2) for k in range(1, d)]:
            assert np.max(np.abs(apply_superop(s, u))) <= 1e-12
        assert np.allclose(apply_superop(s, np.eye(d)), np.eye(d))


def test_gpc_map_arity():
    with pytest.raises(ValueError):
        gpc.gpc_map(build_mubs(3), [1, 0, 0])


@settings(max_examples=40, deadline=None)
@given(lam=st.tuples(*[st.floats(-1, 1)] * 3))
def test_qubit_cross_module(lam):
    p_q = qp.probabilities_from_eigenvalues(lam)
    lam_g = np.asarray(lam)[QUBIT_TO_GPC]
    p_g = gpc.probabilities_from_eigenvalues(lam_g, 2)
    assert np.allclose(p_g, np.concatenate([[p_q[0]], p_q[1:][QUBIT_TO_GPC]]), atol=1e-14)
    assert np.max(np.abs(gpc.gpc_map(build_mubs(2), p_g) - qp.channel_superop(p_q))) <= 1e-12


def test_eigenvalue_examples():
    r = gpc.GpcRates(3, [Constant(0.4)] * 4)
    for t in (0.0, 0.5, 2.0):
        assert np.allclose(gpc.eigenvalues_at(r, t), math.exp(-3 * 0.4 * t), atol=1e-12)
    q = qp.PauliRates(Constant(0.3), Constant(-0.2), Constant(0.9))
    g = gpc.GpcRates(2, [q.rates[i] for i in QUBIT_TO_GPC])
    assert np.allclose(gpc.eigenvalues_at(g, 1.3), qp.eigenvalues_at(q, 1.3)[QUBIT_TO_GPC])
    with pytest.raises(ValueError):
        gpc.GpcRates(3, [Constant(1.0)] * 3)


def test_constant_rates_match_matrix_exponential():
    for d in (3, 4):
        rates = np.linspace(-0.2, 1.0, d + 1)
        r = gpc.GpcRates(d, [Constant(x) for x in rates])
        lam = gpc.eigenvalues_at(r, 1.1)
        assert np.allclose(gpc.superop_from_eigenvalues(r.mubs, lam), expm(1.1 * r.generator(0.0)), atol=1e-10)


def test_probability_examples():
    assert np.allclose(gpc.probabilities_from_eigenvalues(np.ones(4), 3), [1, 0, 0, 0, 0])
    assert np.allclose(gpc.probabilities_from_eigenvalues(np.zeros(4), 3), [1 / 9] + [2 / 9] * 4)


@settings(max_examples=40, deadline=None)
@given(d=st.sampled_from([2, 3, 4, 5]), seed=st.integers(0, 2**32 - 1))
def test_probability_round_trip(d, seed):
    lam = np.random.default_rng(seed).uniform(-1, 1, d + 1)
    p = gpc.probabilities_from_eigenvalues(lam, d)
    assert abs(p.sum() - 1) <= 1e-14
    assert np.allclose(gpc.eigenvalues_from_probabilities(p, d), lam, atol=1e-13)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_eigen_relation_and_degeneracy(d, rng):
    m = build_mubs(d)
    p = rng.dirichlet(np.ones(d + 2))
    lam = gpc.eigenvalues_from_probabilities(p, d)
    s = gpc.gpc_map(m, p)
    for a in range(1, d + 2):
        scalars = []
        for k in range(1, d):
            u = unitary_eigenvector(m, a, k)
            out = apply_superop(s, u)
            assert np.max(np.abs(out - lam[a - 1] * u)) <= 1e-10
            scalars.append(np.trace(u.conj().T @ out) / d)
        assert np.ptp(np.real(scalars)) <= 1e-12 and np.max(np.abs(np.imag(scalars))) <= 1e-12


def test_certificate_examples():
    g = [-1, 1, 1, 1]
    assert gpc.d_sufficient(g, 3)
    assert np.allclose(gpc.j_alpha(g, 3), [1, 0, 0, 0])
    assert gpc.p_necessary(g, 3)
    assert not gpc.p_sufficient_pair(g, 3)
    assert gpc.p_sufficient_k(g, 3) is True
    assert not gpc.d_sufficient([-1, 2, 2, 1.4, 1.4], 4)
    assert not gpc.p_necessary([-3, 1, 1, 1], 3)
    assert gpc.p_necessary(np.zeros(4), 3)
    assert gpc.p_sufficient_pair([0, 1, 2, 3], 3)
    assert gpc.p_sufficient_k([0, 1, 2, 3], 3) is True
    for d in (3, 4, 5):
        c = 0.7
        assert np.allclose(gpc.j_alpha([c] * (d + 1), d), c / (d - 1))
    assert np.allclose(gpc.j_alpha(np.zeros(4), 3), 0)


def test_p_sufficient_k_applicability():
    # k = 3 negatives in d = 3 exceeds (d+1)/2
    assert gpc.p_sufficient_k([-1, -1, -1, 5], 3) is None
    # zero rates are not negative
    assert gpc.negative_count([0.0, -0.0, 1.0, -1e-13]) == 0
    assert gpc.p_sufficient_k([-1, -1, 5, 5], 3) is True
    assert gpc.p_sufficient_k([-1, -1, 4.9, 5], 3) is False


def test_classify_examples():
    c = gpc.classify_pointwise([-1, 1, 1, 1], 3)
    assert (c.cp_verdict, c.p_verdict, c.d_verdict) == (Verdict.NO, Verdict.YES, Verdict.YES)
    c = gpc.classify_pointwise([-1, 2, 2, 1.4, 1.4], 4)
    assert c.d_verdict is Verdict.UNKNOWN and c.p_verdict is Verdict.YES
    assert "P-sufficient:k-negative" in c.fired and "D-sufficient:j>=0" in c.failed
    c = gpc.classify_pointwise([0.1, 0.2, 0.3, 0.4], 3)
    assert (c.cp_verdict, c.p_verdict, c.d_verdict) == (Verdict.YES,) * 3
    assert c.fired == ("trivial/CP",)
    c = gpc.classify_pointwise([-3, 1, 1, 1], 3)
    assert c.p_verdict is Verdict.NO and c.d_verdict is Verdict.NO


@settings(max_examples=200, deadline=None)
@given(g=st.tuples(*[st.floats(-2, 2)] * 3))
def test_d2_equivalence(g):
    c = gpc.classify_pointwise(np.asarray(g)[QUBIT_TO_GPC], 2)
    j_ok = bool(np.all(qp.j_from_rates(g) >= -1e-12))
    assert (c.d_verdict is Verdict.YES) == j_ok
    assert gpc.d_sufficient(np.asarray(g)[QUBIT_TO_GPC], 2) == j_ok


@settings(max_examples=200, deadline=None)
@given(d=st.sampled_from([3, 4, 5, 7]), g=st.lists(st.floats(-3, 3), min_size=8, max_size=8))
def test_j_alpha_consistent_with_d_sufficient(d, g):
    g = np.asarray(g[:d + 1])
    j = gpc.j_alpha(g, d)
    # j >= 0 <=> sum - (d-1) max >= 0, up to the 2(d-1) scale factor
    assert bool(np.all(j >= -1e-12)) == gpc.d_sufficient(g, d, tol=2 * (d - 1) * 1e-12)


@pytest.mark.parametrize("d", [3, 4, 5, 7])
def test_one_vs_equal_rates_regions(d):
    axis = np.linspace(-2, 2, 41)
    for gam, gt in itertools.product(axis, axis):
        rates = [gam] + [gt] * d
        dsuf = gpc.d_sufficient(rates, d)
        assert dsuf == (d * gt - (d - 2) * gam >= -1e-12 and gam + gt >= -1e-12)
        if gam < 0 <= gt:
            assert dsuf == (gt >= 0 and gam + gt >= -1e-12)
        # pairs among the equal rates add gt + (d-1) gt >= 0
        pair = gam + (d - 1) * gt >= -1e-12 and gt + (d - 1) * gam >= -1e-12 and gt >= -1e-12
        assert gpc.p_sufficient_pair(rates, d) == pair


@pytest.mark.parametrize("d", [3, 4, 5, 7])
def test_d_sufficient_only_single_negative(d):
    gts = np.linspace(0.01, 10, 1000)
    for k in range(1, (d + 1) // 2 + 1):
        found = any(gpc.d_sufficient([-1.0] * k + [gt] * (d + 1 - k), d) for gt in gts)
        assert found == (k == 1)


@pytest.mark.parametrize("d,rates", [
    (3, [-1, 1, 1, 1]), (3, [-1, -1, 5, 5]), (3, [-0.5, 0.6, 0.8, 2.0]),
    (4, [-1, 1, 1, 1, 1]), (4, [-1, 2, 2, 1, 1]), (5, [-1, -1, 7 / 3, 7 / 3, 3, 3]),
])
def test_p_certificates_are_sound(d, rates):
    """Whenever a sufficient P certificate fires, the generator passes the Kossakowski test."""
    c = gpc.classify_pointwise(rates, d)
    assert c.p_verdict is Verdict.YES
    r = np.random.default_rng(7)
    assert kossakowski_min(build_mubs(d).bases, rates, r, starts=20) >= -1e-8


@pytest.mark.parametrize("d,rates", [(3, [-3, 1, 1, 1]), (4, [-2, 0.5, 0.5, 0.5, 0.5])])
def test_p_necessary_violation_is_real(d, rates):
    assert not gpc.p_necessary(rates, d)
    assert kossakowski_min(build_mubs(d).bases, rates, np.random.default_rng(3), starts=10) < -1e-3


def test_ratio_two_is_not_enough_for_two_negative_rates():
    """d=3, k=2: the ratio (d+k-1)/(d-k+1) = 2 does not guarantee positivity,
    while the (d+2(k-1))/(d-2(k-1)) = 5 bound does."""
    bases = build_mubs(3).bases
    r = np.random.default_rng(11)
    assert kossakowski_min(bases, [-1, -1, 2.5, 2.5], r) < -1e-3
    assert gpc.p_sufficient_k([-1, -1, 2.5, 2.5], 3) is False


def test_largest_rate_alone_does_not_guarantee_positivity_d4():
    """d=4, one negative rate: gamma_2 >= |gamma_1| is not enough when gamma_4 < |gamma_1|."""
    rates = [-1, 2, 2, 0.5, 0.5]
    assert kossakowski_min(build_mubs(4).bases, rates, np.random.default_rng(5)) < -1e-3
    assert gpc.p_sufficient_k(rates, 4) is False


def test_generator_trace_annihilation():
    r = gpc.GpcRates(5, [Constant(x) for x in (-1, 0.5, 2, 0, 1, 3)])
    vec_i = np.eye(5).reshape(-1, order="F")
    assert np.max(np.abs(vec_i @ r.generator(0.3))) <= 1e-12
