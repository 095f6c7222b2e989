"""Root-raised-cosine pulse shaping.

The pulse is normalized to unit energy, so its autocorrelation at lag zero is
one and matched filtering preserves the symbol energy scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# Relative half-width (in units of T) around each removable singularity where
# the closed form is replaced by its limit value.
_SINGULARITY_GUARD = 1e-8


@dataclass(frozen=True)
class Pulse:
    """Unit-energy root-raised-cosine pulse with roll-off ``beta``.

    Calling the object evaluates the pulse at arbitrary times (seconds,
    array-valued).  Amplitudes carry units of 1/sqrt(T) so that
    ``integral p(t)^2 dt == 1``.
    """

    beta: float
    T: float

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        vals = _rrc_unit(t / self.T, self.beta) / np.sqrt(self.T)
        return vals.reshape(t.shape)

    @property
    def bandwidth(self) -> float:
        """One-sided baseband occupancy ``(1 + beta) / (2 T)`` in hertz."""
        return (1.0 + self.beta) / (2.0 * self.T)


def rrc_pulse(beta: float, T: float = 1.0) -> Pulse:
    """Construct a unit-energy root-raised-cosine pulse.

    Parameters
    ----------
    beta : float
        Roll-off factor in [0, 1].
    T : float
        Nominal symbol period, strictly positive.
    """
    if not 0.0 <= beta <= 1.0:
        raise ParameterError(f"roll-off must lie in [0, 1], got {beta!r}")
    if T <= 0.0:
        raise ParameterError(f"symbol period must be positive, got {T!r}")
    return Pulse(float(beta), float(T))


def _rrc_unit(x, beta):
    """RRC pulse for T = 1 evaluated at normalized time x.

    Uses the standard time-domain closed form with explicit limit values at
    x = 0 and |x| = 1/(4 beta), where numerator and denominator both vanish.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)

    ax = np.abs(x)
    at_zero = ax < _SINGULARITY_GUARD
    if beta > 0.0:
        at_edge = np.abs(ax - 1.0 / (4.0 * beta)) < _SINGULARITY_GUARD
    else:
        at_edge = np.zeros_like(at_zero)
    regular = ~(at_zero | at_edge)

    xr = x[regular]
    num = np.sin(np.pi * xr * (1.0 - beta)) + 4.0 * beta * xr * np.cos(np.pi * xr * (1.0 + beta))
    den = np.pi * xr * (1.0 - (4.0 * beta * xr) ** 2)
    out[regular] = num / den

    out[at_zero] = 1.0 - beta + 4.0 * beta / np.pi
    if beta > 0.0:
        s = np.pi / (4.0 * beta)
        out[at_edge] = (beta / np.sqrt(2.0)) * (
            (1.0 + 2.0 / np.pi) * np.sin(s) + (1.0 - 2.0 / np.pi) * np.cos(s)
        )
    return out
