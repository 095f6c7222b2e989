"""Faster-than-Nyquist signaling simulation and semidefinite-relaxation detection.

The package covers the full experiment chain: root-raised-cosine pulses and
their time-packed intersymbol-interference models, channel simulation on the
colored and whitened receive paths, an in-package interior-point solver for
the lifted semidefinite programs, relaxation detectors for PSK and 16-QAM
with Gaussian randomization, an exhaustive maximum-likelihood reference, and
Monte-Carlo harnesses for error-rate, covariance, and timing experiments.
"""

from .channel import ReceivedBlock, simulate_block
from .config import FtnConfig, rng_stream
from .constellation import (
    PskConstellation,
    Qam16Constellation,
    SymbolVector,
    constellation_for,
    map_symbols,
)
from .errors import (
    ConditioningError,
    FactorizationError,
    FtnError,
    ModelError,
    ParameterError,
    SearchSpaceError,
    SpectrumError,
)
from .isi import IsiModel, build_isi_model, spectral_factorize
from .lifting import DetectionResult, LiftedCost, RandomizationDraws
from .mlse import MlseResult, mlse_exhaustive
from .pulses import Pulse, rrc_pulse
from .qam16 import (
    build_qam_sdp,
    build_theta_c,
    build_theta_w,
    detect_16qam,
    quantize_16qam,
    randomize_qam,
)
from .sdp import (
    SdpProblem,
    SdpSolution,
    SolutionCheck,
    SolveStatus,
    check_solution,
    dump_problem,
    load_problem,
    solve,
)
from .sdr_psk import build_psk_sdr, detect_psk, quantize_psk, randomize_psk
from .experiments import (
    BerReport,
    ComplexityReport,
    CovarianceReport,
    SweepSpec,
    complexity_probe,
    run_ber_sweep,
    spectral_efficiency,
    verify_noise_covariance,
)

__version__ = "0.1.0"

__all__ = [
    "BerReport",
    "ComplexityReport",
    "ConditioningError",
    "CovarianceReport",
    "DetectionResult",
    "FactorizationError",
    "FtnConfig",
    "FtnError",
    "IsiModel",
    "LiftedCost",
    "MlseResult",
    "ModelError",
    "ParameterError",
    "Pulse",
    "PskConstellation",
    "Qam16Constellation",
    "RandomizationDraws",
    "ReceivedBlock",
    "SdpProblem",
    "SdpSolution",
    "SearchSpaceError",
    "SolutionCheck",
    "SolveStatus",
    "SpectrumError",
    "SweepSpec",
    "SymbolVector",
    "build_isi_model",
    "build_psk_sdr",
    "build_qam_sdp",
    "build_theta_c",
    "build_theta_w",
    "check_solution",
    "complexity_probe",
    "constellation_for",
    "detect_16qam",
    "detect_psk",
    "dump_problem",
    "load_problem",
    "map_symbols",
    "mlse_exhaustive",
    "quantize_16qam",
    "quantize_psk",
    "randomize_psk",
    "randomize_qam",
    "rng_stream",
    "rrc_pulse",
    "run_ber_sweep",
    "simulate_block",
    "solve",
    "spectral_efficiency",
    "spectral_factorize",
    "verify_noise_covariance",
]
