"""Real embedding, lifted cost, and randomized sampling tests."""

import numpy as np
import pytest

from ftnsdr.lifting import (
    LiftedCost,
    blkdiag2,
    complex_from_embedding,
    hermitian_embed,
    psd_factor,
    real_stack,
    real_unstack,
    sample_complex,
    sample_real,
)


def _random_hermitian(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (A + A.conj().T) / 2


class TestEmbedding:
    def test_real_stack_roundtrip(self, rng):
        z = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert np.allclose(real_unstack(real_stack(z)), z)

    def test_blkdiag2(self):
        A = np.arange(4.0).reshape(2, 2)
        out = blkdiag2(A)
        assert out.shape == (4, 4)
        assert np.allclose(out[:2, :2], A)
        assert np.allclose(out[2:, 2:], A)
        assert np.allclose(out[:2, 2:], 0)

    def test_quadratic_form_identity(self, rng):
        # x' E(H) x equals the (real) Hermitian form z^H H z
        H = _random_hermitian(rng, 5)
        E = hermitian_embed(H)
        assert np.allclose(E, E.T)
        for _ in range(5):
            z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            x = real_stack(z)
            assert x @ E @ x == pytest.approx((z.conj() @ H @ z).real, rel=1e-12)

    def test_complex_from_embedding_inverts(self, rng):
        H = _random_hermitian(rng, 4)
        B = complex_from_embedding(hermitian_embed(H))
        assert np.allclose(B, H, atol=1e-13)

    def test_trace_pairing(self, rng):
        # <E(H), Y> = 2 Re <H, B(Y)> for symmetric Y: the identity that lets
        # the real solver optimize a Hermitian objective
        H = _random_hermitian(rng, 4)
        Y = rng.standard_normal((8, 8))
        Y = (Y + Y.T) / 2
        B = complex_from_embedding(Y)
        lhs = np.tensordot(hermitian_embed(H), Y)
        rhs = 2 * np.real(np.tensordot(H.conj(), B))
        assert lhs == pytest.approx(rhs, rel=1e-11)


class TestLiftedCost:
    def test_complex_objective_matches_direct(self, rng):
        n = 5
        theta = _random_hermitian(rng, n + 1)
        cost = LiftedCost(theta=theta, n=n, origin="test", offset=0.7)
        for _ in range(5):
            a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            psi = np.concatenate([a, [1.0]])
            direct = (psi.conj() @ theta @ psi).real
            assert cost.objective(a) == pytest.approx(direct, rel=1e-12)

    def test_objective_many_consistent(self, rng):
        n = 4
        theta = _random_hermitian(rng, n + 1)
        cost = LiftedCost(theta=theta, n=n, origin="test", offset=0.0)
        batch = rng.standard_normal((7, n)) + 1j * rng.standard_normal((7, n))
        many = cost.objective_many(batch)
        singles = [cost.objective(row) for row in batch]
        assert np.allclose(many, singles, rtol=1e-12)


class TestPsdFactor:
    def test_exact_factorization(self, rng):
        F0 = rng.standard_normal((5, 3))
        S = F0 @ F0.T
        F, clip = psd_factor(S)
        assert np.allclose(F @ F.T, S, atol=1e-10)
        assert clip < 1e-12

    def test_negative_eigenvalue_clipped(self, rng):
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        S = Q @ np.diag([2.0, 1.0, 0.5, -1e-9]) @ Q.T
        F, clip = psd_factor(S)
        assert clip == pytest.approx(1e-9, rel=1e-3)
        evals = np.linalg.eigvalsh(F @ F.T)
        assert evals.min() >= -1e-15

    def test_hermitian_mode(self, rng):
        F0 = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        S = F0 @ F0.conj().T
        F, _ = psd_factor(S, hermitian=True)
        assert np.allclose(F @ F.conj().T, S, atol=1e-9)


class TestSampling:
    def test_real_sample_covariance(self):
        rng = np.random.default_rng(42)
        F0 = np.random.default_rng(1).standard_normal((4, 4))
        S = F0 @ F0.T
        F, _ = psd_factor(S)
        draws = sample_real(rng, F, 60000)
        emp = draws.T @ draws / len(draws)
        assert np.linalg.norm(emp - S) / np.linalg.norm(S) < 0.05

    def test_complex_sample_covariance_and_mean(self):
        rng = np.random.default_rng(43)
        F0 = np.random.default_rng(2).standard_normal((3, 3)) + 1j * np.random.default_rng(3).standard_normal((3, 3))
        S = F0 @ F0.conj().T
        F, _ = psd_factor(S, hermitian=True)
        mean = np.array([1.0 - 2j, 0.5j, -1.0])
        draws = sample_complex(rng, mean, F, 80000)
        centered = draws - mean
        emp = centered.T.conj() @ centered / len(draws)
        assert np.abs(draws.mean(axis=0) - mean).max() < 0.03
        assert np.linalg.norm(emp.T - S) / np.linalg.norm(S) < 0.05

    def test_prefix_stability(self):
        # growing the draw count must not disturb earlier rows
        F = np.linalg.cholesky(np.array([[2.0, 0.3], [0.3, 1.0]]))
        a = sample_real(np.random.default_rng(9), F, 50)
        b = sample_real(np.random.default_rng(9), F, 200)
        assert np.array_equal(a, b[:50])

        mean = np.array([1.0 + 1j, -0.5])
        Fc = F.astype(complex)
        c = sample_complex(np.random.default_rng(9), mean, Fc, 50)
        d = sample_complex(np.random.default_rng(9), mean, Fc, 200)
        assert np.array_equal(c, d[:50])
