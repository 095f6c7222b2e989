"""Shared machinery for the lifted detectors.

Holds the complex-to-real embeddings, the bordered quadratic cost wrapper,
positive-semidefinite flooring for covariance sampling, and the result types
common to the relaxation detectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ParameterError
from .sdp import SolveStatus


def real_stack(z) -> np.ndarray:
    """Stack a complex vector as [Re; Im]."""
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag])


def real_unstack(x) -> np.ndarray:
    """Inverse of ``real_stack``."""
    x = np.asarray(x, dtype=float)
    if x.size % 2:
        raise ParameterError("stacked vector must have even length")
    h = x.size // 2
    return x[:h] + 1j * x[h:]


def blkdiag2(A) -> np.ndarray:
    """blockdiag(A, A) for a real matrix."""
    return sla.block_diag(A, A)


def hermitian_embed(H) -> np.ndarray:
    """Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of Hermitian H.

    For vectors x = [Re z; Im z], ``x' E(H) x == Re(z^H H z) == z^H H z``; the
    factor-of-two double counting is left to the caller (the cost builders
    scale by one half).
    """
    H = np.asarray(H, dtype=complex)
    return np.block([[H.real, -H.imag], [H.imag, H.real]])


def complex_from_embedding(Y) -> np.ndarray:
    """Recover the Hermitian matrix represented by a real embedded solution.

    Averages the two diagonal and two off-diagonal blocks, which projects any
    symmetric Y onto the embedded subspace without changing embedded-cost
    inner products, then symmetrizes.
    """
    Y = np.asarray(Y, dtype=float)
    p = Y.shape[0] // 2
    if Y.shape != (2 * p, 2 * p):
        raise ParameterError("embedded matrix must have even order")
    re = 0.5 * (Y[:p, :p] + Y[p:, p:])
    im = 0.5 * (Y[p:, :p] - Y[:p, p:])
    B = re + 1j * im
    return 0.5 * (B + B.conj().T)


@dataclass(frozen=True)
class LiftedCost:
    """Bordered quadratic cost [psi' Theta psi] with psi = [a; 1].

    ``theta`` is Hermitian (PSK path, complex symbols) or real symmetric
    (16-QAM path, real-stacked symbols).  ``offset`` records the constant in
    the bottom-right corner so objectives are comparable across builds.
    """

    theta: np.ndarray
    n: int
    origin: str
    offset: float

    def __post_init__(self):
        t = np.asarray(self.theta)
        if t.shape != (self.n + 1, self.n + 1):
            raise ParameterError(
                f"cost matrix must have order {self.n + 1}, got {t.shape}"
            )

    def objective(self, a) -> float:
        """Cost of a single decision vector."""
        return float(self.objective_many(np.asarray(a)[None, :])[0])

    def objective_many(self, A) -> np.ndarray:
        """Vectorized cost of the rows of ``A`` (each row one candidate)."""
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[1] != self.n:
            raise ParameterError(f"candidates must have {self.n} columns")
        T = self.theta
        P = T[: self.n, : self.n]
        r = T[: self.n, self.n]
        quad = np.einsum("ij,jk,ik->i", A.conj(), P, A, optimize=True)
        lin = 2.0 * (A.conj() @ r).real
        return np.real(quad) + lin + float(np.real(T[self.n, self.n]))


@dataclass(frozen=True)
class RandomizationDraws:
    """Raw Gaussian draws, quantized candidates, and their costs."""

    raw: np.ndarray
    candidates: np.ndarray
    objectives: np.ndarray


@dataclass
class DetectionResult:
    """Output of one relaxation detection.

    ``relaxed_objective`` is the semidefinite lower bound from the solver and
    ``rounded_objective`` the cost of the returned discrete block, so
    ``rounded_objective >= relaxed_objective`` up to solver tolerance.
    ``l_op`` is the index of the winning randomization draw and ``psd_clip``
    the magnitude of the most negative covariance eigenvalue floored before
    sampling.
    """

    symbols: np.ndarray
    indices: np.ndarray
    relaxed_objective: float
    rounded_objective: float
    l_op: int
    num_candidates: int
    solver_status: SolveStatus
    iterations: int
    psd_clip: float
    timing: dict = field(default_factory=dict)
    draws: RandomizationDraws | None = None


def psd_factor(S, hermitian=False):
    """Factor F with F F' ~= S after flooring negative eigenvalues at zero.

    Returns (F, clip) where clip is the magnitude of the most negative
    eigenvalue encountered.  Used to sample from optimizer covariances that
    are PSD only up to solver tolerance.
    """
    S = np.asarray(S)
    w, U = np.linalg.eigh(0.5 * (S + (S.conj().T if hermitian else S.T)))
    clip = float(max(0.0, -w[0]))
    F = U * np.sqrt(np.clip(w, 0.0, None))
    return F, clip


def sample_real(rng, F, L):
    """L zero-mean Gaussian rows with covariance F F'.

    Draws are filled row by row, so the first L1 rows coincide for any two
    calls with the same generator state and L >= L1.
    """
    return rng.standard_normal((L, F.shape[0])) @ F.T


def sample_complex(rng, mean, F, L):
    """L circularly-symmetric Gaussian rows with mean ``mean``, cov F F^H."""
    k = F.shape[1]
    z = rng.standard_normal((L, 2 * k))
    w = (z[:, :k] + 1j * z[:, k:]) / np.sqrt(2.0)
    # row r maps to F @ w[r], so the row covariance is F F^H
    return mean[None, :] + w @ F.T
