"""Complex baseband simulation of the matched-filter receive paths.

Two observation models of the same transmission:

* colored path: ``y_c = s G a + q_c`` with ``cov(q_c) = sigma2 G`` (direct
  matched-filter samples), and
* whitened path: ``y_w = s V a + q_w`` with white ``q_w`` of total variance
  ``sigma2`` per sample,

where ``s = sqrt(tau * Es)`` and ``G = V' V`` is the Gram factorization.  The
two can be drawn independently or linked, in which case ``y_w`` is computed
deterministically from ``y_c`` through the whitening transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .config import FtnConfig
from .errors import ModelError, ParameterError
from .isi import IsiModel


@dataclass(frozen=True)
class ReceivedBlock:
    """One simulated block: colored and whitened observations plus metadata."""

    y_c: np.ndarray
    y_w: np.ndarray
    snr_db: float
    linked: bool


def simulate_block(
    a,
    model: IsiModel,
    cfg: FtnConfig,
    rng: np.random.Generator,
    linked_noise: bool = False,
) -> ReceivedBlock:
    """Simulate matched-filter observations of the symbol block ``a``.

    Parameters
    ----------
    a : array_like
        Complex symbol vector of length ``cfg.N`` (a ``SymbolVector``'s
        entries or any array).
    linked_noise : bool
        When True the whitened output is derived from the colored one by
        triangular back-substitution instead of drawing fresh noise, so both
        paths describe the identical noisy waveform.

    Notes
    -----
    ``sigma2`` is the total complex noise variance: each quadrature of the
    whitened noise has variance ``sigma2 / 2`` per sample.  ``sigma2 == 0``
    produces exact noiseless observations.
    """
    a = np.asarray(getattr(a, "entries", a), dtype=complex)
    if a.shape != (cfg.N,):
        raise ParameterError(f"symbol block must have shape ({cfg.N},), got {a.shape}")
    if model.N != cfg.N:
        raise ModelError(f"model block length {model.N} does not match cfg.N {cfg.N}")

    s = np.sqrt(cfg.tau * cfg.Es)
    amp = np.sqrt(cfg.sigma2 / 2.0)

    if cfg.sigma2 > 0.0:
        w = rng.standard_normal((cfg.N, 2))
        q_c = amp * (model.G_sqrt @ (w[:, 0] + 1j * w[:, 1]))
    else:
        q_c = np.zeros(cfg.N, dtype=complex)
    y_c = s * (model.G @ a) + q_c

    if linked_noise:
        # G = V' V, so V'^{-1} y_c reproduces the whitened observation that
        # corresponds to the same noise realization.
        y_w = solve_triangular(model.V.T, y_c, lower=False)
    else:
        if cfg.sigma2 > 0.0:
            w = rng.standard_normal((cfg.N, 2))
            q_w = amp * (w[:, 0] + 1j * w[:, 1])
        else:
            q_w = np.zeros(cfg.N, dtype=complex)
        y_w = s * (model.V @ a) + q_w

    return ReceivedBlock(y_c=y_c, y_w=y_w, snr_db=cfg.snr_db, linked=bool(linked_noise))
