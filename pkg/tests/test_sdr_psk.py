"""PSK semidefinite-relaxation detector tests."""

import numpy as np
import pytest

from ftnsdr import (
    FtnConfig,
    ParameterError,
    SolveStatus,
    build_isi_model,
    build_psk_sdr,
    detect_psk,
    map_symbols,
    mlse_exhaustive,
    quantize_psk,
    randomize_psk,
    rng_stream,
    rrc_pulse,
    simulate_block,
)
from ftnsdr.lifting import complex_from_embedding
from ftnsdr.sdp import solve


@pytest.fixture(scope="module")
def small_model():
    cfg = FtnConfig(M=8, tau=0.8, beta=0.3, N=5, L=200, sigma2=0.1)
    return cfg, build_isi_model(rrc_pulse(cfg.beta, cfg.T), cfg)


def _block(cfg, model, trial, snr_db=10.0):
    cfg = cfg.with_snr_db(snr_db)
    data = rng_stream(cfg.seed, trial, 0)
    sv = map_symbols(data.integers(0, cfg.M, size=cfg.N), cfg)
    block = simulate_block(sv, model, cfg, data)
    return cfg, sv, block


class TestProblemBuild:
    def test_cost_matches_residual_norm(self, small_model, rng):
        cfg, model = small_model
        _, sv, block = _block(cfg, model, 0)
        _, cost = build_psk_sdr(model, block.y_w, cfg)
        s = np.sqrt(cfg.tau * cfg.Es)
        for _ in range(5):
            a = np.exp(1j * rng.uniform(0, 2 * np.pi, size=cfg.N))
            direct = float(np.linalg.norm(block.y_w - s * model.V @ a) ** 2)
            assert cost.objective(a) == pytest.approx(direct, rel=1e-10)

    def test_problem_shape(self, small_model):
        cfg, model = small_model
        _, _, block = _block(cfg, model, 1)
        problem, cost = build_psk_sdr(model, block.y_w, cfg)
        d = 2 * (cfg.N + 1)
        assert problem.C.shape == (d, d)
        assert len(problem.equalities) == d
        assert not problem.inequalities
        assert cost.n == cfg.N

    def test_unit_diagonal_constraints(self, small_model):
        cfg, model = small_model
        _, _, block = _block(cfg, model, 2)
        problem, _ = build_psk_sdr(model, block.y_w, cfg)
        for A, b in problem.equalities:
            assert b == 1.0
            # each constraint pins one diagonal entry
            assert np.count_nonzero(A) == 1

    def test_length_mismatch(self, small_model):
        cfg, model = small_model
        with pytest.raises(ParameterError):
            build_psk_sdr(model, np.zeros(cfg.N + 1, complex), cfg)


class TestQuantizer:
    def test_sector_to_offset_points(self):
        # arguments in [0, 2pi/M) map to the point at pi/M, and so on
        M = 8
        for k in range(M):
            ang = (2 * k + 0.7) * np.pi / M
            idx = quantize_psk(np.exp(1j * ang)[None], M)[0]
            point = np.exp(1j * (2 * idx + 1) * np.pi / M)
            assert np.abs(point - np.exp(1j * (2 * k + 1) * np.pi / M)) < 1e-12

    def test_boundary_belongs_to_upper_sector(self):
        idx0 = quantize_psk(np.array([1.0 + 0j]), 4)[0]
        just_below = quantize_psk(np.array([np.exp(-1e-9j)]), 4)[0]
        assert idx0 != just_below

    def test_magnitude_invariance(self, rng):
        z = np.exp(1j * rng.uniform(0, 2 * np.pi, 50))
        assert np.array_equal(quantize_psk(z, 8), quantize_psk(3.7 * z, 8))


class TestRandomization:
    def test_rank_one_input_is_exact(self, small_model, rng):
        cfg, model = small_model
        _, _, block = _block(cfg, model, 3)
        _, cost = build_psk_sdr(model, block.y_w, cfg)
        a = np.exp(1j * (2 * rng.integers(0, cfg.M, cfg.N) + 1) * np.pi / cfg.M)
        A_star = np.outer(a, a.conj())
        idx, obj, l_op, clip, draws = randomize_psk(
            a, A_star, cost, cfg.M, 30, np.random.default_rng(0), keep_draws=True
        )
        point = np.exp(1j * (2 * idx + 1) * np.pi / cfg.M)
        assert np.allclose(point, a, atol=1e-9)
        assert obj == pytest.approx(cost.objective(a), rel=1e-9)
        assert draws is not None and draws.candidates.shape == (30, cfg.N)

    def test_deterministic_given_stream(self, small_model):
        cfg, model = small_model
        _, _, block = _block(cfg, model, 4)
        r1 = detect_psk(block.y_w, model, cfg, rng_stream(1, 1))
        r2 = detect_psk(block.y_w, model, cfg, rng_stream(1, 1))
        assert np.array_equal(r1.indices, r2.indices)
        assert r1.rounded_objective == r2.rounded_objective

    def test_more_draws_never_hurt(self, small_model):
        cfg, model = small_model
        for trial in range(5):
            _, _, block = _block(cfg, model, 10 + trial, snr_db=6.0)
            small = detect_psk(block.y_w, model, cfg, rng_stream(2, trial), L=20)
            large = detect_psk(block.y_w, model, cfg, rng_stream(2, trial), L=200)
            assert large.rounded_objective <= small.rounded_objective + 1e-12


class TestDetection:
    def test_result_fields(self, small_model):
        cfg, model = small_model
        cfg2, sv, block = _block(cfg, model, 5)
        res = detect_psk(block.y_w, model, cfg2, rng_stream(0, 5, 1))
        assert res.indices.shape == (cfg.N,)
        assert res.indices.min() >= 0 and res.indices.max() < cfg.M
        assert np.allclose(
            res.symbols, np.exp(1j * (2 * res.indices + 1) * np.pi / cfg.M)
        )
        assert res.solver_status is SolveStatus.OPTIMAL
        assert res.rounded_objective >= res.relaxed_objective - 1e-6
        assert res.l_op >= 0
        assert set(res.timing) >= {"build_s", "solve_s", "randomize_s", "total_s"}

    def test_sandwich_against_exhaustive(self, small_model):
        cfg, model = small_model
        s = np.sqrt(cfg.tau * cfg.Es)
        for trial in range(8):
            cfg2, sv, block = _block(cfg, model, 20 + trial, snr_db=8.0)
            res = detect_psk(block.y_w, model, cfg2, rng_stream(3, trial))
            alphabet = np.exp(1j * (2 * np.arange(cfg.M) + 1) * np.pi / cfg.M)
            exact = mlse_exhaustive(block.y_w, s * model.V, alphabet)
            assert res.relaxed_objective <= exact.objective + 1e-6
            assert res.rounded_objective >= exact.objective - 1e-9

    def test_orthogonal_signaling_matches_symbolwise(self):
        # tau = 1: no interference, the relaxation is tight and rounding
        # coincides with the per-symbol nearest-point rule
        cfg = FtnConfig(M=4, tau=1.0, beta=0.3, N=8, L=100, sigma2=0.2)
        model = build_isi_model(rrc_pulse(cfg.beta, cfg.T), cfg)
        s = np.sqrt(cfg.tau * cfg.Es)
        for trial in range(10):
            cfg2, sv, block = _block(cfg, model, trial, snr_db=7.0)
            res = detect_psk(block.y_w, model, cfg2, rng_stream(4, trial))
            nearest = quantize_psk(block.y_w / s, cfg.M)
            assert np.array_equal(res.indices, nearest)

    def test_noiseless_recovery(self, small_model):
        cfg, model = small_model
        cfg0 = cfg.with_snr_db(np.inf)
        for trial in range(5):
            data = rng_stream(7, trial)
            sv = map_symbols(data.integers(0, cfg0.M, size=cfg0.N), cfg0)
            block = simulate_block(sv, model, cfg0, data)
            res = detect_psk(block.y_w, model, cfg0, rng_stream(8, trial))
            assert np.array_equal(res.indices, sv.indices)

    def test_relaxation_certificate(self, small_model):
        # the solver's matrix respects the lift: unit diagonal, psd, and the
        # recovered complex block reproduces the relaxed objective
        cfg, model = small_model
        _, _, block = _block(cfg, model, 6)
        problem, cost = build_psk_sdr(model, block.y_w, cfg)
        sol = solve(problem)
        assert sol.status is SolveStatus.OPTIMAL
        B = complex_from_embedding(sol.X)
        assert np.allclose(np.diag(B).real, 1.0, atol=1e-5)
        relaxed = float(np.real(np.tensordot(cost.theta.conj(), B)))
        assert relaxed == pytest.approx(sol.objective, abs=1e-6)
