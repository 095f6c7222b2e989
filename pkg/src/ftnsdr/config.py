"""Simulation configuration and reproducible random-number streams.

All experiment entry points derive their generators through ``rng_stream`` so
that any single trial can be replayed in isolation: the stream for a trial is
keyed by (seed, *path) and never depends on how many other trials ran before
it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError

#: Modulation families understood by the mapping and detection layers.
MODULATIONS = ("psk", "16qam")


@dataclass(frozen=True)
class FtnConfig:
    """Parameters of one faster-than-Nyquist transmission setup.

    Attributes
    ----------
    M : int
        Constellation order. Power of two for the PSK path; the 16-QAM path
        requires ``M == 16``.
    tau : float
        Time-packing factor in (0, 1]. ``tau == 1`` is orthogonal signaling.
    beta : float
        Root-raised-cosine roll-off in [0, 1].
    T : float
        Nominal symbol period; the actual signaling interval is ``tau * T``.
    Es : float
        Average symbol energy scale applied at the transmitter.
    sigma2 : float
        Total complex noise variance (both quadratures combined).
    N : int
        Block length in symbols.
    K : int or None
        One-sided intersymbol-interference memory. ``None`` selects it
        automatically from the tap tail energy.
    L : int
        Number of randomization draws used by the relaxation detectors.
    seed : int
        Root seed for every derived random stream.
    modulation : str
        Either ``"psk"`` or ``"16qam"``.
    """

    M: int = 4
    tau: float = 1.0
    beta: float = 0.3
    T: float = 1.0
    Es: float = 1.0
    sigma2: float = 0.1
    N: int = 20
    K: int | None = None
    L: int = 1000
    seed: int = 0
    modulation: str = "psk"

    def __post_init__(self):
        if not isinstance(self.M, (int, np.integer)) or self.M < 2:
            raise ParameterError(f"M must be an integer >= 2, got {self.M!r}")
        if not 0.0 < self.tau <= 1.0:
            raise ParameterError(f"tau must lie in (0, 1], got {self.tau!r}")
        if not 0.0 <= self.beta <= 1.0:
            raise ParameterError(f"beta must lie in [0, 1], got {self.beta!r}")
        if self.T <= 0.0:
            raise ParameterError(f"T must be positive, got {self.T!r}")
        if self.Es <= 0.0:
            raise ParameterError(f"Es must be positive, got {self.Es!r}")
        if self.sigma2 < 0.0:
            raise ParameterError(f"sigma2 must be >= 0, got {self.sigma2!r}")
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ParameterError(f"N must be a positive integer, got {self.N!r}")
        if self.K is not None and (not isinstance(self.K, (int, np.integer)) or self.K < 1):
            raise ParameterError(f"K must be a positive integer or None, got {self.K!r}")
        if not isinstance(self.L, (int, np.integer)) or self.L < 1:
            raise ParameterError(f"L must be a positive integer, got {self.L!r}")
        if self.modulation not in MODULATIONS:
            raise ParameterError(
                f"modulation must be one of {MODULATIONS}, got {self.modulation!r}"
            )
        if self.modulation == "psk":
            if self.M & (self.M - 1) != 0:
                raise ParameterError(f"PSK order must be a power of two, got {self.M}")
        elif self.M != 16:
            raise ParameterError(f"the 16-QAM path requires M == 16, got {self.M}")

    @property
    def snr_db(self) -> float:
        """Symbol SNR in dB, ``10 log10(Es / sigma2)``; inf when noiseless."""
        if self.sigma2 == 0.0:
            return math.inf
        return 10.0 * math.log10(self.Es / self.sigma2)

    def with_snr_db(self, snr_db: float) -> "FtnConfig":
        """Copy of this config with ``sigma2`` set to hit the requested SNR."""
        if math.isinf(snr_db):
            return replace(self, sigma2=0.0)
        return replace(self, sigma2=self.Es * 10.0 ** (-snr_db / 10.0))


def rng_stream(seed: int, *path: int) -> np.random.Generator:
    """Counter-style generator keyed by a seed and an integer path.

    Streams with different paths are statistically independent, and the same
    (seed, path) always reproduces the same draws regardless of execution
    order.  Built on Philox so trials can be replayed individually.
    """
    if any(p < 0 for p in path):
        raise ParameterError(f"stream path entries must be >= 0, got {path}")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
