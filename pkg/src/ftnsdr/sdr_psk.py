"""Semidefinite-relaxation detection for M-ary PSK blocks.

The least-squares sequence metric ``||y_w - s V a||^2`` is lifted to a
bordered rank-one matrix B = [A, a; a^H, 1] with unit diagonal; dropping the
rank constraint leaves a semidefinite program whose optimum lower-bounds the
exhaustive search.  Discrete blocks are recovered by sampling Gaussian
vectors around the relaxed solution and quantizing each to the nearest
constellation point, keeping the draw with the smallest metric.
"""

from __future__ import annotations

import time

import numpy as np

from .config import FtnConfig
from .constellation import PskConstellation
from .errors import ParameterError
from .isi import IsiModel
from .lifting import (
    DetectionResult,
    LiftedCost,
    RandomizationDraws,
    complex_from_embedding,
    hermitian_embed,
    psd_factor,
    sample_complex,
)
from .sdp import SdpProblem, solve


def build_psk_sdr(model: IsiModel, y_w, cfg: FtnConfig):
    """Lift the whitened-path metric into a unit-diagonal semidefinite program.

    Returns ``(problem, cost)`` where ``problem`` is the real embedded
    program (order ``2 (N + 1)``, one unit-diagonal equality per row) and
    ``cost`` the bordered Hermitian metric; the embedding halves the cost so
    the program objective equals the complex metric ``||y_w - s V a||^2``.
    """
    y_w = np.asarray(y_w, dtype=complex)
    N = cfg.N
    if y_w.shape != (N,):
        raise ParameterError(f"whitened observation must have shape ({N},)")
    if model.N != N:
        raise ParameterError(f"model block length {model.N} does not match cfg.N {N}")

    s = np.sqrt(cfg.tau * cfg.Es)
    Vs = s * model.V
    theta = np.empty((N + 1, N + 1), dtype=complex)
    theta[:N, :N] = Vs.conj().T @ Vs
    theta[:N, N] = -(Vs.conj().T @ y_w)
    theta[N, :N] = theta[:N, N].conj()
    theta[N, N] = np.real(np.vdot(y_w, y_w))
    cost = LiftedCost(theta=theta, n=N, origin="psk-whitened", offset=float(theta[N, N].real))

    C = 0.5 * hermitian_embed(theta)
    dim = 2 * (N + 1)
    eqs = []
    for k in range(dim):
        E = np.zeros((dim, dim))
        E[k, k] = 1.0
        eqs.append((E, 1.0))
    return SdpProblem(C=C, equalities=eqs), cost


def quantize_psk(z, M: int) -> np.ndarray:
    """Nearest constellation index for each sample by angular sector.

    Sector k covers arguments in ``[2 pi k / M, 2 pi (k + 1) / M)`` and maps
    to the point ``exp(j (2 k + 1) pi / M)`` at its center.
    """
    ang = np.mod(np.angle(np.asarray(z, dtype=complex)), 2.0 * np.pi)
    return np.floor(ang * M / (2.0 * np.pi)).astype(np.int64) % M


def randomize_psk(
    a_star,
    A_star,
    cost: LiftedCost,
    M: int,
    L: int,
    rng: np.random.Generator,
    keep_draws: bool = False,
):
    """Gaussian randomization around the relaxed PSK solution.

    Draws L vectors from CN(a*, A* - a* a*^H), quantizes each entrywise onto
    the constellation, and scores all candidates with the lifted cost.

    Returns ``(indices, objective, l_op, clip, draws)`` where ``l_op`` is the
    smallest draw index achieving the best cost and ``clip`` the magnitude of
    the covariance eigenvalue flooring.  Increasing L with the same generator
    state extends the draw set, so the best objective is nonincreasing in L.
    """
    if L < 1:
        raise ParameterError(f"draw count must be >= 1, got {L}")
    a_star = np.asarray(a_star, dtype=complex)
    const = PskConstellation(M)
    cov = np.asarray(A_star, dtype=complex) - np.outer(a_star, a_star.conj())
    F, clip = psd_factor(cov, hermitian=True)
    raw = sample_complex(rng, a_star, F, L)
    idx = quantize_psk(raw, M)
    cands = const.points[idx]
    objs = cost.objective_many(cands)
    l_op = int(np.argmin(objs))
    draws = RandomizationDraws(raw=raw, candidates=cands, objectives=objs) if keep_draws else None
    return idx[l_op], float(objs[l_op]), l_op, clip, draws


def detect_psk(
    y_w,
    model: IsiModel,
    cfg: FtnConfig,
    rng: np.random.Generator,
    L: int | None = None,
    tol: float = 1e-7,
    max_iter: int = 200,
    keep_draws: bool = False,
) -> DetectionResult:
    """Full PSK relaxation detector: lift, solve, extract, randomize.

    The detection rule never needs the transmitted block; ``rng`` drives only
    the randomization draws.
    """
    if cfg.modulation != "psk":
        raise ParameterError("detect_psk requires a psk configuration")
    L = cfg.L if L is None else L
    t0 = time.perf_counter()
    problem, cost = build_psk_sdr(model, y_w, cfg)
    t1 = time.perf_counter()
    sol = solve(problem, tol=tol, max_iter=max_iter)
    t2 = time.perf_counter()
    B = complex_from_embedding(sol.X)
    a_star = B[: cfg.N, cfg.N]
    A_star = B[: cfg.N, : cfg.N]
    idx, rounded, l_op, clip, draws = randomize_psk(
        a_star, A_star, cost, cfg.M, L, rng, keep_draws=keep_draws
    )
    t3 = time.perf_counter()

    const = PskConstellation(cfg.M)
    return DetectionResult(
        symbols=const.points[idx],
        indices=idx,
        relaxed_objective=float(sol.objective),
        rounded_objective=rounded,
        l_op=l_op,
        num_candidates=L,
        solver_status=sol.status,
        iterations=sol.iterations,
        psd_clip=clip,
        timing={
            "build_s": t1 - t0,
            "solve_s": t2 - t1,
            "randomize_s": t3 - t2,
            "total_s": t3 - t0,
        },
        draws=draws,
    )
