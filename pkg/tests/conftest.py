"""Shared fixtures: standard configurations and prebuilt channel models."""

import numpy as np
import pytest

from ftnsdr import FtnConfig, build_isi_model, rrc_pulse


@pytest.fixture(scope="session")
def model_psk8():
    """8-PSK, tau=0.8, beta=0.3, N=8."""
    cfg = FtnConfig(M=8, tau=0.8, beta=0.3, N=8, sigma2=0.1)
    return cfg, build_isi_model(rrc_pulse(cfg.beta, cfg.T), cfg)


@pytest.fixture(scope="session")
def model_qpsk_nyquist():
    """QPSK at tau=1 (orthogonal), N=8."""
    cfg = FtnConfig(M=4, tau=1.0, beta=0.3, N=8, sigma2=0.1)
    return cfg, build_isi_model(rrc_pulse(cfg.beta, cfg.T), cfg)


@pytest.fixture(scope="session")
def model_qam4():
    """16-QAM, tau=0.8, beta=0.3, N=4."""
    cfg = FtnConfig(M=16, modulation="16qam", tau=0.8, beta=0.3, N=4, L=200, sigma2=0.1)
    return cfg, build_isi_model(rrc_pulse(cfg.beta, cfg.T), cfg)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
