"""Set-constrained semidefinite-relaxation detection for 16-QAM blocks.

16-QAM entries are handled on the real-stacked axis, where every coordinate
lies in {-3, -1, 1, 3}.  That set is carved out of the reals by three
quadratic conditions per coordinate,

    1 <= x^2 <= 9,   (x + 1)(x + 3) >= 0,   (x - 1)(x - 3) >= 0,

which exclude the gaps (-3, -1) and (1, 3) while keeping the outer bounds.
Lifting psi = [x; 1] to Psi = psi psi' turns all of them into linear
constraints on a semidefinite variable of order 2N + 1.  Rounding samples
N(0, Psi*), rescales each draw so its homogenizing coordinate equals one,
and quantizes coordinatewise to the nearest admissible level.
"""

from __future__ import annotations

import time

import numpy as np

from .channel import ReceivedBlock
from .config import FtnConfig
from .constellation import Qam16Constellation
from .errors import ParameterError
from .isi import IsiModel
from .lifting import (
    DetectionResult,
    LiftedCost,
    RandomizationDraws,
    blkdiag2,
    psd_factor,
    real_stack,
    real_unstack,
    sample_real,
)
from .sdp import SdpProblem, solve

_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])


def build_theta_w(model: IsiModel, y_w, cfg: FtnConfig) -> LiftedCost:
    """Bordered cost of the whitened metric ``||y_w - s V a||^2`` (stacked).

    The decision vector is the real stack [Re a; Im a] of length 2N; the
    bottom-right constant carries ``||y_w||^2`` so the cost of a candidate
    equals its least-squares metric.
    """
    y_w = np.asarray(y_w, dtype=complex)
    _check_obs(model, y_w, cfg)
    s = np.sqrt(cfg.tau * cfg.Es)
    Vr = s * blkdiag2(model.V)
    yr = real_stack(y_w)
    n2 = 2 * cfg.N
    theta = np.empty((n2 + 1, n2 + 1))
    theta[:n2, :n2] = Vr.T @ Vr
    theta[:n2, n2] = -(Vr.T @ yr)
    theta[n2, :n2] = theta[:n2, n2]
    theta[n2, n2] = float(yr @ yr)
    return LiftedCost(theta=theta, n=n2, origin="qam-whitened", offset=float(yr @ yr))


def build_theta_c(model: IsiModel, y_c, cfg: FtnConfig) -> LiftedCost:
    """Bordered cost of the colored-path metric (stacked real form).

    Up to a constant independent of the candidate, the colored metric is
    ``s^2 a' G_r a - 2 s y_c' a`` on the real stack; the constant is set to
    zero and recorded in ``offset``.
    """
    y_c = np.asarray(y_c, dtype=complex)
    _check_obs(model, y_c, cfg)
    s = np.sqrt(cfg.tau * cfg.Es)
    Gr = blkdiag2(model.G)
    yr = real_stack(y_c)
    n2 = 2 * cfg.N
    theta = np.empty((n2 + 1, n2 + 1))
    theta[:n2, :n2] = (s * s) * Gr
    theta[:n2, n2] = -s * yr
    theta[n2, :n2] = theta[:n2, n2]
    theta[n2, n2] = 0.0
    return LiftedCost(theta=theta, n=n2, origin="qam-colored", offset=0.0)


def _check_obs(model, y, cfg):
    if y.shape != (cfg.N,):
        raise ParameterError(f"observation must have shape ({cfg.N},)")
    if model.N != cfg.N:
        raise ParameterError(f"model block length {model.N} does not match cfg.N {cfg.N}")


def build_qam_sdp(cost: LiftedCost) -> SdpProblem:
    """Semidefinite program over the lifted matrix Psi for a 16-QAM cost.

    Constraints per stacked coordinate k (with d_k = Psi_kk, s_k = Psi_k,n):

        d_k >= 1,  d_k <= 9,  d_k + 4 s_k >= -3,  d_k - 4 s_k >= -3,

    plus the corner pin Psi_nn = 1.  These are the lifted images of the
    quadratic level-set conditions.
    """
    n = cost.n
    dim = n + 1
    if not np.isrealobj(cost.theta):
        raise ParameterError("16-QAM lifting expects a real stacked cost")

    corner = np.zeros((dim, dim))
    corner[n, n] = 1.0
    eqs = [(corner, 1.0)]

    ineqs = []
    for k in range(n):
        D = np.zeros((dim, dim))
        D[k, k] = 1.0
        S = np.zeros((dim, dim))
        S[k, n] = 2.0
        S[n, k] = 2.0
        ineqs.append((D, 1.0))  # x^2 >= 1
        ineqs.append((-D, -9.0))  # x^2 <= 9
        ineqs.append((D + S, -3.0))  # (x + 1)(x + 3) >= 0
        ineqs.append((D - S, -3.0))  # (x - 1)(x - 3) >= 0
    return SdpProblem(C=np.asarray(cost.theta, dtype=float), equalities=eqs, inequalities=ineqs)


def quantize_16qam(x) -> np.ndarray:
    """Nearest admissible level in {-3, -1, 1, 3} per entry (ties upward)."""
    x = np.asarray(x, dtype=float)
    return _LEVELS[np.digitize(x, [-2.0, 0.0, 2.0])]


def randomize_qam(
    Psi_star,
    cost: LiftedCost,
    L: int,
    rng: np.random.Generator,
    keep_draws: bool = False,
):
    """Gaussian randomization around the lifted 16-QAM solution.

    Draws L vectors from N(0, Psi*).  Each draw is divided by its last
    (homogenizing) coordinate, which also resolves the global sign ambiguity
    of the lifting; near-zero last coordinates fall back to sign alignment
    only.  The rescaled head is quantized per coordinate and all candidates
    are scored with the lifted cost.
    """
    if L < 1:
        raise ParameterError(f"draw count must be >= 1, got {L}")
    Psi_star = np.asarray(Psi_star, dtype=float)
    dim = Psi_star.shape[0]
    n = cost.n
    if Psi_star.shape != (dim, dim) or dim != n + 1:
        raise ParameterError(f"lifted solution must have order {n + 1}")

    F, clip = psd_factor(Psi_star)
    raw = sample_real(rng, F, L)
    t = raw[:, n]
    scale = np.where(np.abs(t) > 1e-12, t, np.where(t < 0.0, -1.0, 1.0))
    heads = raw[:, :n] / scale[:, None]
    cands = quantize_16qam(heads)
    objs = cost.objective_many(cands)
    l_op = int(np.argmin(objs))
    draws = RandomizationDraws(raw=raw, candidates=cands, objectives=objs) if keep_draws else None
    return cands[l_op], float(objs[l_op]), l_op, clip, draws


def detect_16qam(
    block,
    model: IsiModel,
    cfg: FtnConfig,
    rng: np.random.Generator,
    path: str = "whitened",
    L: int | None = None,
    tol: float = 1e-7,
    max_iter: int = 200,
    keep_draws: bool = False,
) -> DetectionResult:
    """Full 16-QAM relaxation detector on either observation path.

    ``block`` may be a ``ReceivedBlock`` or a bare observation vector
    matching ``path`` ("whitened" or "colored").
    """
    if cfg.modulation != "16qam":
        raise ParameterError("detect_16qam requires a 16qam configuration")
    if path not in ("whitened", "colored"):
        raise ParameterError(f"path must be 'whitened' or 'colored', got {path!r}")
    L = cfg.L if L is None else L

    if isinstance(block, ReceivedBlock):
        y = block.y_w if path == "whitened" else block.y_c
    else:
        y = np.asarray(block, dtype=complex)

    t0 = time.perf_counter()
    cost = build_theta_w(model, y, cfg) if path == "whitened" else build_theta_c(model, y, cfg)
    problem = build_qam_sdp(cost)
    t1 = time.perf_counter()
    sol = solve(problem, tol=tol, max_iter=max_iter)
    t2 = time.perf_counter()
    x_hat, rounded, l_op, clip, draws = randomize_qam(sol.X, cost, L, rng, keep_draws=keep_draws)
    t3 = time.perf_counter()

    const = Qam16Constellation()
    symbols = real_unstack(x_hat)
    return DetectionResult(
        symbols=symbols,
        indices=const.demap(symbols),
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
