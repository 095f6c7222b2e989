"""Discrete-time intersymbol-interference model for time-packed signaling.

Sampling the matched-filter output every ``tau * T`` seconds turns the
continuous channel into a symmetric tap sequence ``g[k]`` (the pulse
autocorrelation on the packed grid), a Gram matrix ``G`` (symmetric Toeplitz),
and a causal minimum-phase factor ``v`` with ``G(z) = V(z) V(1/z)`` that
whitens the matched-filter noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .config import FtnConfig
from .errors import FactorizationError, ModelError, ParameterError, SpectrumError
from .pulses import Pulse

# Oversampling of the autocorrelation quadrature grid relative to T.  The
# integrand is band-limited well below this rate, so the trapezoid sum is
# exact up to tail truncation.
_GRID_PER_T = 128

# Unit-circle handling in the factorization: zeros closer than _CIRCLE_TOL to
# the circle are pulled inward to modulus 1 - _CIRCLE_TOL.
_CIRCLE_TOL = 1e-6

# Tap truncation rules.
_TAIL_ENERGY_REL = 1e-8
_TAP_FLOOR = 1e-4


@dataclass(frozen=True)
class IsiModel:
    """Discrete equivalent of one pulse/packing combination.

    Attributes
    ----------
    g : ndarray
        One-sided taps ``g[0..K]`` with ``g[0] ~= 1`` (unit-energy pulse).
    K : int
        One-sided memory; taps beyond lag K are truncated.
    G : ndarray
        ``N x N`` symmetric Toeplitz Gram matrix built from ``g``.
    G_sqrt : ndarray
        Symmetric PSD square root of ``G`` (used to draw colored noise).
    v : ndarray
        Causal minimum-phase factor taps ``v[0..K]``, ``v[0] > 0``.
    V : ndarray
        ``N x N`` lower-triangular Toeplitz convolution matrix of ``v``.
    factorization_residual : float
        Max absolute mismatch between ``v * reversed(v)`` and the taps.
    """

    g: np.ndarray
    K: int
    G: np.ndarray
    G_sqrt: np.ndarray
    v: np.ndarray
    V: np.ndarray
    factorization_residual: float
    tau: float
    beta: float
    T: float
    N: int

    @property
    def g_full(self) -> np.ndarray:
        """Two-sided symmetric taps ``g[-K..K]`` as a length 2K+1 array."""
        return np.concatenate([self.g[:0:-1], self.g])


def build_isi_model(pulse: Pulse, cfg: FtnConfig, factor_tol: float = 1e-6) -> IsiModel:
    """Build the discrete model for ``pulse`` sampled every ``cfg.tau * T``.

    The one-sided memory K is ``cfg.K`` when given (auto-extended until the
    boundary tap falls below 1e-4) or chosen so the discarded tail holds less
    than 1e-8 of the tap energy.  Raises ``ModelError`` if the resulting Gram
    matrix is not positive semidefinite within tolerance.
    """
    if pulse.T != cfg.T:
        raise ParameterError(
            f"pulse period {pulse.T} does not match configuration period {cfg.T}"
        )
    k_cap = 40 * int(np.ceil(1.0 / cfg.tau))
    g_all = _autocorrelation_taps(pulse, cfg.tau, k_cap)
    K = _select_memory(g_all, cfg.K, k_cap)
    g = g_all[: K + 1].copy()

    first = np.zeros(cfg.N)
    m = min(K, cfg.N - 1)
    first[: m + 1] = g[: m + 1]
    G = toeplitz(first)

    w, U = np.linalg.eigh(G)
    scale = 1.0 + float(np.max(np.abs(np.diag(G))))
    if w[0] < -1e-8 * scale:
        raise ModelError(
            f"Gram matrix has eigenvalue {w[0]:.3e}; truncated taps are not PSD"
        )
    G_sqrt = (U * np.sqrt(np.clip(w, 0.0, None))) @ U.T

    v = spectral_factorize(g, tol=factor_tol)
    residual = float(np.max(np.abs(np.convolve(v, v[::-1]) - _two_sided(g))))

    col = np.zeros(cfg.N)
    col[: m + 1] = v[: m + 1]
    row = np.zeros(cfg.N)
    row[0] = v[0]
    V = toeplitz(col, row)

    return IsiModel(
        g=g,
        K=K,
        G=G,
        G_sqrt=G_sqrt,
        v=v,
        V=V,
        factorization_residual=residual,
        tau=cfg.tau,
        beta=cfg.beta,
        T=cfg.T,
        N=cfg.N,
    )


def spectral_factorize(g, tol: float = 1e-6) -> np.ndarray:
    """Minimum-phase causal factor of a symmetric autocorrelation.

    Parameters
    ----------
    g : array_like
        Either one-sided taps ``g[0..K]`` or the full symmetric sequence of
        odd length ``2K + 1``; ``g[0]`` (the center) must be positive.
    tol : float
        Maximum accepted residual ``max |(v * reversed v) - g|``.

    Returns
    -------
    ndarray
        Taps ``v[0..K]`` with ``v[0] > 0`` and all zeros of
        ``sum v[n] z^-n`` strictly inside the unit circle.

    Raises
    ------
    SpectrumError
        If the folded spectrum ``sum g[k] exp(-jkw)`` is not strictly
        positive, in which case no such factor exists.
    FactorizationError
        If zeros sit on the unit circle beyond the perturbation tolerance and
        the residual target cannot be met.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ParameterError("taps must be a nonempty 1-D array")
    symmetric = (
        g.size % 2 == 1
        and g.size > 1
        and np.allclose(g, g[::-1], rtol=0.0, atol=1e-12 * np.max(np.abs(g)))
        and int(np.argmax(np.abs(g))) == (g.size - 1) // 2
    )
    if symmetric:
        full = g
        K = (g.size - 1) // 2
        one_sided = g[K:]
    else:
        one_sided = g
        K = g.size - 1
        full = _two_sided(one_sided)
    g0 = one_sided[0]
    if g0 <= 0.0:
        raise ParameterError(f"center tap must be positive, got {g0!r}")
    if K == 0:
        return np.array([np.sqrt(g0)])

    _check_spectrum(one_sided)

    # Zeros of the two-sided symbol come in reciprocal pairs; keep the K with
    # smallest modulus and pull any circle-touching ones strictly inside.
    roots = np.roots(full)
    roots = roots[np.argsort(np.abs(roots), kind="stable")][:K]
    mods = np.abs(roots)
    worst = float(np.max(mods))
    close = mods > 1.0 - _CIRCLE_TOL
    roots[close] *= (1.0 - _CIRCLE_TOL) / mods[close]

    v = np.real(np.poly(roots))
    center = np.convolve(v, v[::-1])[K]
    if center <= 0.0:
        raise FactorizationError(
            "factor normalization failed", root_modulus=worst, residual=np.inf
        )
    v = v * np.sqrt(g0 / center)
    if v[0] < 0.0:
        v = -v

    v = _polish(v, full)
    residual = float(np.max(np.abs(np.convolve(v, v[::-1]) - full)))
    if residual > tol:
        raise FactorizationError(
            f"factorization residual {residual:.3e} exceeds tolerance {tol:.1e}",
            root_modulus=worst,
            residual=residual,
        )
    return v


def _two_sided(one_sided):
    return np.concatenate([one_sided[:0:-1], one_sided])


def _check_spectrum(one_sided, n_freq: int = 4096):
    """Raise SpectrumError unless the folded spectrum is strictly positive."""
    K = one_sided.size - 1
    w = np.linspace(0.0, np.pi, n_freq)
    spec = one_sided[0] + 2.0 * np.cos(np.outer(w, np.arange(1, K + 1))) @ one_sided[1:]
    smin = float(spec.min())
    if smin <= 0.0:
        raise SpectrumError(
            f"folded tap spectrum reaches {smin:.3e}; no positive factorization exists"
        )


def _polish(v, full, iters: int = 25):
    """Gauss-Newton refinement of the autocorrelation residual.

    Keeps the candidate with the smallest residual among iterates whose zeros
    stay strictly inside the unit circle, so polishing never trades the
    minimum-phase property for fit.
    """
    K = v.size - 1
    idx = np.arange(-K, K + 1)

    def residual(vv):
        return np.convolve(vv, vv[::-1]) - full

    def max_mod(vv):
        if vv[0] == 0.0:
            return np.inf
        return float(np.max(np.abs(np.roots(vv))))

    best = v
    best_res = float(np.max(np.abs(residual(v))))
    cur = v
    for _ in range(iters):
        r = residual(cur)
        if np.max(np.abs(r)) < 1e-15:
            break
        vpad = np.zeros(3 * K + 1)
        vpad[K : 2 * K + 1] = cur
        # d c[l] / d v[j] = v[j - l] + v[j + l]
        J = np.empty((2 * K + 1, K + 1))
        for j in range(K + 1):
            J[:, j] = vpad[j - idx + K] + vpad[j + idx + K]
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        cur = cur + step
        res = float(np.max(np.abs(residual(cur))))
        if res < best_res and max_mod(cur) <= 1.0 - 0.5 * _CIRCLE_TOL:
            best, best_res = cur, res
        if res >= best_res and best_res < 1e-14:
            break
    if best[0] < 0.0:
        best = -best
    return best


def _select_memory(g_all, requested, k_cap):
    """One-sided memory K from the truncation rules."""
    mags = np.abs(g_all)
    if requested is not None:
        K = int(requested)
        while K < k_cap and mags[K] >= _TAP_FLOOR:
            K += 1
        return min(K, k_cap)
    energy = mags**2
    total = energy[0] + 2.0 * energy[1:].sum()
    tail = 2.0 * np.concatenate([np.cumsum(energy[:0:-1])[::-1], [0.0]])
    ok = np.nonzero(tail < _TAIL_ENERGY_REL * total)[0]
    return int(ok[0]) if ok.size else k_cap


def _autocorrelation_taps(pulse: Pulse, tau: float, K: int) -> np.ndarray:
    """Numerically exact pulse autocorrelation at lags ``k * tau * T``.

    Trapezoid quadrature on a grid aligned with the lag spacing; the support
    half-width grows until the pulse tail is negligible, and the grid step is
    at most T/128 so the band-limited integrand is sampled alias-free.
    """
    T = pulse.T
    lag = tau * T
    ns = max(1, int(np.ceil(lag / (T / _GRID_PER_T))))
    dt = lag / ns

    half = 40.0 * T
    while half < 400.0 * T:
        edge = np.abs(pulse(np.linspace(half - T, half, 16))).max()
        if edge * np.sqrt(T) < 1e-9:
            break
        half *= 1.5
    nh = int(np.ceil(half / dt)) + K * ns
    x = dt * np.arange(-nh, nh + 1)
    p = pulse(x)

    g = np.empty(K + 1)
    for k in range(K + 1):
        s = k * ns
        g[k] = dt * np.dot(p[s:], p[: p.size - s])
    return g
