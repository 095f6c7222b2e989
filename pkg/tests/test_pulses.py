"""Root-raised-cosine pulse tests against quadrature and closed-form oracles."""

import math

import numpy as np
import pytest
from scipy import integrate

from ftnsdr import ParameterError, rrc_pulse


def _energy(pulse, half_span=60.0):
    # singular points of the closed form, handed to quad as subdivision hints
    pts = [0.0]
    if pulse.beta > 0:
        pts += [pulse.T / (4 * pulse.beta), -pulse.T / (4 * pulse.beta)]
    val, _ = integrate.quad(
        lambda t: pulse(t) ** 2,
        -half_span * pulse.T,
        half_span * pulse.T,
        points=sorted(pts),
        limit=400,
    )
    return val


class TestClosedForm:
    def test_peak_value(self):
        for beta in (0.1, 0.22, 0.3, 0.5, 0.9):
            p = rrc_pulse(beta)
            expected = 1.0 - beta + 4.0 * beta / math.pi
            assert p(0.0) == pytest.approx(expected, abs=1e-12)

    def test_peak_scales_with_symbol_time(self):
        p1 = rrc_pulse(0.3, T=1.0)
        p2 = rrc_pulse(0.3, T=2.0)
        assert p2(0.0) == pytest.approx(p1(0.0) / math.sqrt(2.0), abs=1e-12)

    def test_singularity_limit_is_continuous(self):
        for beta in (0.25, 0.3, 0.5):
            p = rrc_pulse(beta)
            ts = 1.0 / (4.0 * beta)
            at = p(ts)
            near = p(np.array([ts - 1e-7, ts + 1e-7]))
            assert np.all(np.abs(near - at) < 1e-5)
            # limit formula itself
            s = math.sin(math.pi / (4 * beta))
            c = math.cos(math.pi / (4 * beta))
            expected = (beta / math.sqrt(2.0)) * (
                (1 + 2 / math.pi) * s + (1 - 2 / math.pi) * c
            )
            assert at == pytest.approx(expected, abs=1e-12)

    def test_zero_rolloff_is_sinc(self):
        p = rrc_pulse(0.0, T=1.0)
        t = np.linspace(-5, 5, 41)
        assert np.allclose(p(t), np.sinc(t), atol=1e-12)


class TestProperties:
    def test_even_symmetry(self, rng):
        p = rrc_pulse(0.3)
        t = rng.uniform(-10, 10, size=200)
        assert np.allclose(p(t), p(-t), atol=1e-13)

    @pytest.mark.parametrize("beta", [0.0, 0.22, 0.3, 0.5, 1.0])
    def test_unit_energy(self, beta):
        # beta=0 is sinc with a 1/t envelope: the truncated integral misses
        # a tail bounded by 2/(pi^2 X); rolloff > 0 decays like 1/t^3
        tol = 2 / (np.pi**2 * 60) + 2e-6 if beta == 0 else 2e-6
        assert _energy(rrc_pulse(beta)) == pytest.approx(1.0, abs=tol)

    def test_unit_energy_other_symbol_time(self):
        assert _energy(rrc_pulse(0.3, T=2.5)) == pytest.approx(1.0, abs=2e-6)

    def test_orthogonal_at_symbol_shifts(self):
        # matched-filter outputs at integer T offsets vanish for the RRC pair
        p = rrc_pulse(0.3)
        for k in (1, 2, 3):
            val, _ = integrate.quad(
                lambda t: p(t) * p(t - k), -60, 60, limit=400
            )
            assert abs(val) < 2e-6

    def test_time_scaling(self):
        p1 = rrc_pulse(0.4, T=1.0)
        p3 = rrc_pulse(0.4, T=3.0)
        t = np.linspace(-6, 6, 101)
        assert np.allclose(p3(t), p1(t / 3.0) / math.sqrt(3.0), atol=1e-12)

    def test_bandwidth(self):
        assert rrc_pulse(0.3, T=2.0).bandwidth == pytest.approx(1.3 / 4.0)

    def test_shape_preserved(self):
        p = rrc_pulse(0.3)
        out = p(np.ones((3, 2)))
        assert out.shape == (3, 2)
        assert np.isscalar(p(1.5)) or p(1.5).shape == ()


class TestValidation:
    def test_beta_range(self):
        with pytest.raises(ParameterError):
            rrc_pulse(-0.1)
        with pytest.raises(ParameterError):
            rrc_pulse(1.1)

    def test_symbol_time_positive(self):
        with pytest.raises(ParameterError):
            rrc_pulse(0.3, T=0.0)
