"""Constellation alphabets, Gray labeling, and symbol (de)mapping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import FtnConfig
from .errors import ParameterError

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def _gray(i):
    return i ^ (i >> 1)


class PskConstellation:
    """M-ary PSK on the half-rotated grid ``exp(j (2m - 1) pi / M)``, m = 1..M.

    Placing points at odd multiples of pi/M keeps decision boundaries on the
    axes for QPSK and gives every order the same angular-sector quantizer.
    Labels are Gray-coded so adjacent points differ in one bit.
    """

    def __init__(self, M: int):
        if M < 2 or M & (M - 1) != 0:
            raise ParameterError(f"PSK order must be a power of two >= 2, got {M}")
        self.M = int(M)
        self.bits_per_symbol = int(np.log2(M))
        m = np.arange(1, M + 1)
        self.points = np.exp(1j * (2 * m - 1) * np.pi / M)
        self.labels = _gray(np.arange(M))

    def map(self, indices) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= self.M):
            raise ParameterError(f"symbol indices must lie in [0, {self.M})")
        return self.points[indices]

    def demap(self, symbols) -> np.ndarray:
        """Nearest-point indices via the angular sector of each sample."""
        ang = np.mod(np.angle(symbols), 2.0 * np.pi)
        return (np.floor(ang * self.M / (2.0 * np.pi)).astype(np.int64)) % self.M

    def bit_errors(self, sent, detected) -> int:
        a = self.labels[np.asarray(sent, dtype=np.int64)]
        b = self.labels[np.asarray(detected, dtype=np.int64)]
        return int(_POPCOUNT[a ^ b].sum())


class Qam16Constellation:
    """16-QAM on the integer grid {+-1, +-3}^2 with per-axis Gray labels.

    Points are unnormalized (mean energy 10); the transmitter's energy scale
    is applied separately.  Index = 4 * i_I + i_Q over the level order
    (-3, -1, 1, 3) on each axis.
    """

    levels = np.array([-3.0, -1.0, 1.0, 3.0])

    def __init__(self):
        self.M = 16
        self.bits_per_symbol = 4
        lab = _gray(np.arange(4))
        ii, qq = np.divmod(np.arange(16), 4)
        self.points = self.levels[ii] + 1j * self.levels[qq]
        self.labels = (lab[ii] << 2) | lab[qq]

    def map(self, indices) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= 16):
            raise ParameterError("symbol indices must lie in [0, 16)")
        return self.points[indices]

    def demap(self, symbols) -> np.ndarray:
        symbols = np.asarray(symbols, dtype=complex)
        ii = np.digitize(symbols.real, [-2.0, 0.0, 2.0])
        qq = np.digitize(symbols.imag, [-2.0, 0.0, 2.0])
        return (4 * ii + qq).astype(np.int64)

    def bit_errors(self, sent, detected) -> int:
        a = self.labels[np.asarray(sent, dtype=np.int64)]
        b = self.labels[np.asarray(detected, dtype=np.int64)]
        return int(_POPCOUNT[a ^ b].sum())


def constellation_for(cfg: FtnConfig):
    """Constellation object selected by ``cfg.modulation`` and ``cfg.M``."""
    if cfg.modulation == "psk":
        return PskConstellation(cfg.M)
    return Qam16Constellation()


@dataclass(frozen=True)
class SymbolVector:
    """A block of modulated symbols together with its source indices."""

    entries: np.ndarray
    indices: np.ndarray
    constellation: object = field(repr=False)

    def __post_init__(self):
        if self.entries.shape != self.indices.shape:
            raise ParameterError("entries and indices must have matching shapes")


def map_symbols(indices, cfg: FtnConfig) -> SymbolVector:
    """Map integer indices onto the constellation selected by ``cfg``.

    Round-trips exactly: ``demap(map(i)) == i`` for every valid index.
    """
    const = constellation_for(cfg)
    indices = np.asarray(indices, dtype=np.int64)
    return SymbolVector(entries=const.map(indices), indices=indices, constellation=const)
