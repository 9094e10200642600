import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st
from scipy.sparse.linalg import expm_multiply

from rwsqaoa.graphs import Graph, cut_value, generate_random_regular
from rwsqaoa.qaoa import (LightconeTooLargeError, QaoaSchedule, apply_cost_layer, apply_mixer_layer,
                          expected_cut, lightcone_edge_terms, lightcone_expected_cut,
                          prepare_warm_state, rws_qaoa_state, sample_bitstrings, zz_expectation)
from _helpers import random_graph


def sum_x(n):
    """Sparse sum of Pauli X over n qubits (little-endian)."""
    idx = np.arange(2 ** n)
    rows = np.concatenate([idx] * n)
    cols = np.concatenate([idx ^ (1 << i) for i in range(n)])
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(2 ** n, 2 ** n))


def naive_cut_diag(g):
    return np.array([cut_value(g, [(k >> i) & 1 for i in range(g.n)]) for k in range(2 ** g.n)], dtype=float)


def standard_qaoa_oracle(g, gammas, betas):
    """Textbook QAOA from |+>^n with matrix exponentials."""
    n = g.n
    psi = np.full(2 ** n, 2 ** (-n / 2), dtype=complex)
    c = naive_cut_diag(g)
    b = sum_x(n)
    for gam, bet in zip(gammas, betas):
        psi = np.exp(-1j * gam * c) * psi
        psi = expm_multiply(-1j * bet * b, psi)
    return float(np.real(np.vdot(psi, c * psi)))


def warm_mixer_oracle(thetas, beta):
    """Dense kron of single-qubit exp(-i beta (sin t X + cos t Z)), qubit 0 rightmost."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    u = np.eye(1)
    for t in thetas:
        h = np.sin(t) * x + np.cos(t) * z
        w, v = np.linalg.eigh(h)
        u = np.kron(v @ np.diag(np.exp(-1j * beta * w)) @ v.conj().T, u)
    return u


class TestSchedule:
    def test_mismatched_lengths(self):
        with pytest.raises(ValueError):
            QaoaSchedule((0.1,), ())

    def test_json_round_trip(self):
        s = QaoaSchedule((0.5, 0.25), (0.1, 0.2), source="fitted", gamma_scale=0.5)
        back = QaoaSchedule.from_json(s.to_json())
        assert back == s and back.phase_gammas == (0.25, 0.125)

    def test_empty(self):
        assert QaoaSchedule.empty().p == 0


class TestStatePrep:
    def test_uniform(self):
        assert np.allclose(prepare_warm_state([np.pi / 2] * 2), [0.5] * 4)

    def test_zero(self):
        assert np.allclose(prepare_warm_state([0.0, 0.0, 0.0]), np.eye(8)[0])

    def test_single_qubit(self):
        assert np.allclose(prepare_warm_state([np.pi / 3]), [np.sqrt(3) / 2, 0.5])

    def test_little_endian(self):
        # qubit 0 in |1>, qubit 1 in |0> is index 1
        assert np.allclose(prepare_warm_state([np.pi, 0.0]), np.eye(4)[1])

    def test_cap(self):
        with pytest.raises(ValueError):
            prepare_warm_state(np.zeros(5), cap=4)


class TestLayers:
    def test_cost_layer_identity_cases(self, k4):
        rng = np.random.default_rng(0)
        psi = rng.normal(size=16) + 1j * rng.normal(size=16)
        psi /= np.linalg.norm(psi)
        assert np.allclose(apply_cost_layer(psi, k4, 0.0), psi)
        assert np.allclose(apply_cost_layer(psi, k4, 2 * np.pi), psi)

    def test_cost_layer_phase(self, edge):
        psi = np.eye(4)[1].astype(complex)
        assert np.allclose(apply_cost_layer(psi, edge, np.pi), -psi)

    def test_mixer_zero_beta(self):
        rng = np.random.default_rng(1)
        psi = rng.normal(size=8) + 0j
        assert np.allclose(apply_mixer_layer(psi, rng.uniform(0, np.pi, 3), 0.0), psi)

    def test_warm_state_is_mixer_eigenvector(self):
        t = np.array([0.3, 1.2, 2.5, np.pi / 2])
        psi = prepare_warm_state(t)
        beta = 0.77
        assert np.allclose(apply_mixer_layer(psi, t, beta), np.exp(-1j * beta * 4) * psi)

    @pytest.mark.parametrize("seed", range(3))
    def test_mixer_matches_dense_oracle(self, seed):
        rng = np.random.default_rng(seed)
        t = rng.uniform(0, np.pi, 4)
        beta = rng.uniform(0, np.pi)
        psi = rng.normal(size=16) + 1j * rng.normal(size=16)
        assert np.allclose(apply_mixer_layer(psi, t, beta), warm_mixer_oracle(t, beta) @ psi)

    def test_uniform_thetas_give_standard_mixer(self):
        beta = 0.4
        psi = np.random.default_rng(2).normal(size=8) + 0j
        ref = expm_multiply(-1j * beta * sum_x(3), psi)
        assert np.allclose(apply_mixer_layer(psi, [np.pi / 2] * 3, beta), ref)

    @given(st.integers(0, 2**32), st.integers(2, 8), st.integers(0, 3))
    @settings(max_examples=25)
    def test_norm_preserved(self, seed, n, p):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, n)
        sched = QaoaSchedule(tuple(rng.uniform(-3, 3, p)), tuple(rng.uniform(-3, 3, p)))
        psi = rws_qaoa_state(g, rng.uniform(0, np.pi, n), sched)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)

    def test_zero_gamma_is_stationary(self):
        g = generate_random_regular(8, 3, seed=0)
        t = np.random.default_rng(3).uniform(0, np.pi, 8)
        psi = rws_qaoa_state(g, t, QaoaSchedule((0.0, 0.0), (0.3, 1.1)))
        assert abs(np.vdot(prepare_warm_state(t), psi)) == pytest.approx(1.0)


class TestExpectation:
    def test_uniform_state_cuts_half(self, k4):
        assert expected_cut(prepare_warm_state([np.pi / 2] * 4), k4) == pytest.approx(3.0)

    def test_basis_state(self, k4):
        x = [0, 1, 1, 0]
        psi = prepare_warm_state(np.pi * np.array(x, float))
        assert expected_cut(psi, k4) == pytest.approx(cut_value(k4, x))

    def test_zz_sign(self, edge):
        assert zz_expectation(np.eye(4)[1], 0, 1) == -1.0
        assert zz_expectation(np.eye(4)[3], 0, 1) == 1.0

    def test_depth_zero_is_independent_bernoulli(self):
        g = generate_random_regular(10, 3, seed=4)
        t = np.random.default_rng(4).uniform(0, np.pi, 10)
        p = np.sin(t / 2) ** 2
        i, j = g.edges[:, 0], g.edges[:, 1]
        bern = np.sum(p[i] + p[j] - 2 * p[i] * p[j])
        assert expected_cut(rws_qaoa_state(g, t, QaoaSchedule.empty()), g) == pytest.approx(bern)

    @pytest.mark.parametrize("seed", range(6))
    def test_standard_qaoa_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(3, 10))
        g = random_graph(rng, n, 0.5)
        p = int(rng.integers(1, 4))
        gam, bet = rng.uniform(0, np.pi, p), rng.uniform(0, np.pi / 2, p)
        got = expected_cut(rws_qaoa_state(g, [np.pi / 2] * n, QaoaSchedule(tuple(gam), tuple(bet))), g)
        assert got == pytest.approx(standard_qaoa_oracle(g, gam, bet), abs=1e-10)

    def test_gamma_scale(self):
        g = generate_random_regular(8, 3, seed=1)
        t = [np.pi / 2] * 8
        a = expected_cut(rws_qaoa_state(g, t, QaoaSchedule((0.8,), (0.3,), gamma_scale=0.5)), g)
        b = expected_cut(rws_qaoa_state(g, t, QaoaSchedule((0.4,), (0.3,))), g)
        assert a == pytest.approx(b, abs=1e-12)

    def test_triangle_free_p1_closed_form(self):
        # closed form for p=1 standard QAOA on a d-regular triangle-free graph:
        # per edge 1/2 + 1/2 sin(4b) sin(g') cos^(d-1)(g') with g' the phase per cut edge
        g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])
        gp, b = 0.6, 0.35
        per_edge = 0.5 + 0.5 * np.sin(4 * b) * np.sin(gp) * np.cos(gp)
        got = expected_cut(rws_qaoa_state(g, [np.pi / 2] * 6, QaoaSchedule((gp,), (b,))), g)
        assert got == pytest.approx(6 * per_edge, abs=1e-12)


class TestSampling:
    def test_basis_state(self):
        bits = sample_bitstrings(prepare_warm_state([np.pi, 0.0, np.pi]), 50, seed=0)
        assert bits.shape == (50, 3) and np.all(bits == [1, 0, 1])

    def test_uniform_frequencies(self):
        bits = sample_bitstrings(prepare_warm_state([np.pi / 2] * 2), 100_000, seed=1)
        codes = bits[:, 0] + 2 * bits[:, 1]
        freq = np.bincount(codes, minlength=4) / len(codes)
        assert np.all(np.abs(freq - 0.25) < 0.01)

    def test_deterministic_with_seed(self):
        psi = prepare_warm_state([1.0, 2.0, 0.5])
        assert np.array_equal(sample_bitstrings(psi, 100, 7), sample_bitstrings(psi, 100, 7))


class TestLightcone:
    def test_depth_zero(self):
        g = generate_random_regular(40, 3, seed=0)
        t = np.random.default_rng(0).uniform(0, np.pi, 40)
        p = np.sin(t / 2) ** 2
        i, j = g.edges[:, 0], g.edges[:, 1]
        assert np.allclose(lightcone_edge_terms(g, t, QaoaSchedule.empty()), p[i] + p[j] - 2 * p[i] * p[j])

    @pytest.mark.parametrize("p", [1, 2])
    def test_matches_statevector(self, p):
        rng = np.random.default_rng(p)
        g = generate_random_regular(14, 3, seed=p)
        t = rng.uniform(0, np.pi, 14)
        sched = QaoaSchedule(tuple(rng.uniform(0, 2, p)), tuple(rng.uniform(0, 1, p)))
        psi = rws_qaoa_state(g, t, sched)
        terms = lightcone_edge_terms(g, t, sched)
        ref = [0.5 * (1 - zz_expectation(psi, a, b)) for a, b in g.edges.tolist()]
        assert np.allclose(terms, ref, atol=1e-12)

    def test_locality(self):
        # changing an angle at distance > p from an edge leaves its term unchanged
        g = generate_random_regular(60, 3, seed=5)
        t = np.random.default_rng(5).uniform(0, np.pi, 60)
        sched = QaoaSchedule((0.7,), (0.3,))
        base = lightcone_edge_terms(g, t, sched)
        v = 17
        t2 = t.copy()
        t2[v] += 0.5
        new = lightcone_edge_terms(g, t2, sched)
        near = {v, *g.adjacency[v].tolist()}
        for k, (a, b) in enumerate(g.edges.tolist()):
            if a not in near and b not in near:
                assert new[k] == base[k]

    def test_too_large(self):
        g = generate_random_regular(200, 3, seed=0)
        with pytest.raises(LightconeTooLargeError):
            lightcone_expected_cut(g, np.full(200, np.pi / 2), QaoaSchedule((0.1,) * 3, (0.1,) * 3), cap=20)

    def test_sum_of_terms(self):
        g = generate_random_regular(30, 3, seed=6)
        t = np.full(30, 1.0)
        sched = QaoaSchedule((0.5,), (0.2,))
        assert lightcone_expected_cut(g, t, sched) == pytest.approx(lightcone_edge_terms(g, t, sched).sum())
