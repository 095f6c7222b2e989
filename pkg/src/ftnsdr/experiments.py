"""Monte-Carlo experiment harnesses.

Covers the repeatable studies built on the simulation and detection layers:
error-rate sweeps over an SNR grid, the matched-filter noise-covariance
identity, spectral-efficiency accounting, and detector timing scalings.

Reproducibility: every trial draws from a counter-keyed stream derived from
(seed, point index, trial index, role), so results are independent of
execution order and any single trial can be replayed.  All report fields
except wall-clock timings are exactly reproducible for a fixed seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import simulate_block
from .config import FtnConfig, rng_stream
from .constellation import constellation_for
from .errors import ConditioningError, FtnError, ParameterError
from .isi import IsiModel, build_isi_model
from .mlse import MAX_CANDIDATES, mlse_exhaustive
from .pulses import rrc_pulse
from .qam16 import detect_16qam
from .sdr_psk import detect_psk

#: Detector tokens understood by sweeps and the command line.
DETECTOR_SDR_PSK = "sdr-psk"
DETECTOR_STSDRSE = "stsdrse"
DETECTOR_MLSE = "mlse"
DETECTORS = (DETECTOR_SDR_PSK, DETECTOR_STSDRSE, DETECTOR_MLSE)

_CSV_HEADER = (
    "detector,M,tau,beta,N,snr_db,trials,bit_errors,symbol_errors,"
    "ber,ser,se_bits_per_s_per_hz,seed,wall_time_ms"
)


def spectral_efficiency(M: int, tau: float, beta: float) -> float:
    """Bits per second per hertz: ``log2(M) / (tau (1 + beta))``.

    Time packing by ``tau`` raises the symbol rate; the occupied bandwidth
    ``(1 + beta) / T`` is unchanged, so efficiency scales like ``1 / tau``.
    """
    if M < 2:
        raise ParameterError(f"M must be >= 2, got {M}")
    if not 0.0 < tau <= 1.0:
        raise ParameterError(f"tau must lie in (0, 1], got {tau}")
    if not 0.0 <= beta <= 1.0:
        raise ParameterError(f"beta must lie in [0, 1], got {beta}")
    return math.log2(M) / (tau * (1.0 + beta))


@dataclass(frozen=True)
class SweepSpec:
    """One error-rate sweep: a base configuration, an SNR grid, detectors.

    ``max_trials`` bounds the per-point trial count; a detector also stops
    early once it has accumulated ``target_bit_errors``.  Trials where a
    detector raises are counted as erasures and excluded from its rates.
    """

    cfg: FtnConfig
    snr_grid_db: tuple
    detectors: tuple = (DETECTOR_SDR_PSK,)
    max_trials: int = 4000
    target_bit_errors: int = 200
    linked_noise: bool = False
    mlse_max_candidates: int = MAX_CANDIDATES
    qam_path: str = "whitened"

    def __post_init__(self):
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        object.__setattr__(self, "detectors", tuple(self.detectors))
        if not self.snr_grid_db:
            raise ParameterError("SNR grid must not be empty")
        for d in self.detectors:
            if d not in DETECTORS:
                raise ParameterError(f"unknown detector {d!r}; choose from {DETECTORS}")
        if not self.detectors:
            raise ParameterError("at least one detector is required")
        if self.max_trials < 1:
            raise ParameterError("max_trials must be >= 1")
        if self.target_bit_errors < 1:
            raise ParameterError("target_bit_errors must be >= 1")
        # fail fast on detector/modulation mismatches instead of erasing
        # every trial at run time
        if DETECTOR_SDR_PSK in self.detectors and self.cfg.modulation != "psk":
            raise ParameterError("sdr-psk requires a PSK configuration")
        if DETECTOR_STSDRSE in self.detectors and self.cfg.modulation != "16qam":
            raise ParameterError("stsdrse requires the 16-QAM configuration")
        if self.qam_path not in ("whitened", "colored"):
            raise ParameterError(f"qam_path must be 'whitened' or 'colored', got {self.qam_path!r}")


@dataclass
class PointResult:
    """Error counts for one (detector, SNR) grid point."""

    detector: str
    snr_db: float
    trials: int
    bit_errors: int
    symbol_errors: int
    erasures: int
    wall_time_ms: float
    bits_per_symbol: int
    block_length: int

    @property
    def ber(self) -> float:
        n = self.trials * self.block_length * self.bits_per_symbol
        return self.bit_errors / n if n else math.nan

    @property
    def ser(self) -> float:
        n = self.trials * self.block_length
        return self.symbol_errors / n if n else math.nan


@dataclass
class BerReport:
    """All grid points of one sweep plus the context needed to interpret them."""

    spec: SweepSpec
    seed: int
    se_bits_per_s_per_hz: float
    points: list = field(default_factory=list)

    def point(self, detector: str, snr_db: float) -> PointResult:
        for p in self.points:
            if p.detector == detector and math.isclose(p.snr_db, snr_db):
                return p
        raise KeyError(f"no point for {detector!r} at {snr_db} dB")

    def to_csv(self, fh=None) -> str:
        """Render the sweep as CSV (stable schema, one row per point).

        Writes to ``fh`` when given; always returns the text.
        """
        cfg = self.spec.cfg
        lines = [_CSV_HEADER]
        for p in self.points:
            row = [
                p.detector,
                f"{cfg.M:d}",
                _num(cfg.tau),
                _num(cfg.beta),
                f"{cfg.N:d}",
                _num(p.snr_db),
                f"{p.trials:d}",
                f"{p.bit_errors:d}",
                f"{p.symbol_errors:d}",
                _num(p.ber),
                _num(p.ser),
                _num(self.se_bits_per_s_per_hz),
                f"{self.seed:d}",
                _num(p.wall_time_ms, 3),
            ]
            lines.append(",".join(row))
        text = "\n".join(lines) + "\n"
        if fh is not None:
            fh.write(text)
        return text


def _num(x, places=None) -> str:
    if places is not None:
        return f"{x:.{places}f}"
    return f"{x:.10g}"


def run_ber_sweep(spec: SweepSpec, model: IsiModel | None = None) -> BerReport:
    """Run the Monte-Carlo sweep described by ``spec``.

    Every detector at a given grid point sees the same transmitted blocks
    and noise (shared data streams), so detector comparisons are paired.
    When the exhaustive reference runs alongside a relaxation detector on
    the whitened path, the relaxation's rounded metric seeds its pruning
    bound; this is a valid upper bound and does not change its output.
    """
    cfg = spec.cfg
    if model is None:
        model = build_isi_model(rrc_pulse(cfg.beta, cfg.T), cfg)
    const = constellation_for(cfg)
    bits = const.bits_per_symbol
    se = spectral_efficiency(cfg.M, cfg.tau, cfg.beta)
    report = BerReport(spec=spec, seed=cfg.seed, se_bits_per_s_per_hz=se)

    for pi, snr_db in enumerate(spec.snr_grid_db):
        cfg_pt = cfg.with_snr_db(snr_db)
        counters = {
            d: PointResult(
                detector=d,
                snr_db=snr_db,
                trials=0,
                bit_errors=0,
                symbol_errors=0,
                erasures=0,
                wall_time_ms=0.0,
                bits_per_symbol=bits,
                block_length=cfg.N,
            )
            for d in spec.detectors
        }

        for trial in range(spec.max_trials):
            live = [d for d in spec.detectors if counters[d].bit_errors < spec.target_bit_errors]
            if not live:
                break
            data_rng = rng_stream(cfg.seed, pi, trial, 0)
            idx = data_rng.integers(0, const.M, cfg.N)
            a = const.map(idx)
            block = simulate_block(a, model, cfg_pt, data_rng, linked_noise=spec.linked_noise)

            bound = None
            ordered = [d for d in live if d != DETECTOR_MLSE] + (
                [DETECTOR_MLSE] if DETECTOR_MLSE in live else []
            )
            for d in ordered:
                di = spec.detectors.index(d)
                det_rng = rng_stream(cfg.seed, pi, trial, 1 + di)
                c = counters[d]
                t0 = time.perf_counter()
                try:
                    got, rounded = _run_detector(d, block, model, cfg_pt, det_rng, spec, bound)
                except FtnError:
                    c.erasures += 1
                    c.wall_time_ms += 1e3 * (time.perf_counter() - t0)
                    continue
                c.wall_time_ms += 1e3 * (time.perf_counter() - t0)
                if d != DETECTOR_MLSE and spec.qam_path != "colored" and rounded is not None:
                    bound = rounded if bound is None else min(bound, rounded)
                c.trials += 1
                c.symbol_errors += int(np.count_nonzero(got != idx))
                c.bit_errors += const.bit_errors(idx, got)

        report.points.extend(counters[d] for d in spec.detectors)
    return report


def _run_detector(name, block, model, cfg, rng, spec, bound):
    """Dispatch one detection; returns (index vector, whitened rounded metric)."""
    if name == DETECTOR_SDR_PSK:
        if cfg.modulation != "psk":
            raise ParameterError("sdr-psk requires a PSK configuration")
        res = detect_psk(block.y_w, model, cfg, rng)
        return res.indices, res.rounded_objective
    if name == DETECTOR_STSDRSE:
        if cfg.modulation != "16qam":
            raise ParameterError("stsdrse requires the 16-QAM configuration")
        res = detect_16qam(block, model, cfg, rng, path=spec.qam_path)
        rounded = res.rounded_objective if spec.qam_path == "whitened" else None
        return res.indices, rounded
    if name == DETECTOR_MLSE:
        const = constellation_for(cfg)
        s = np.sqrt(cfg.tau * cfg.Es)
        res = mlse_exhaustive(
            block.y_w,
            s * model.V,
            const.points,
            max_candidates=spec.mlse_max_candidates,
            initial_bound=bound,
        )
        return res.indices, res.objective
    raise ParameterError(f"unknown detector {name!r}")


@dataclass(frozen=True)
class CovarianceReport:
    """Empirical versus predicted covariance of the zero-forced noise."""

    N: int
    sigma2: float
    trials: int
    empirical: np.ndarray
    target: np.ndarray
    frobenius_rel_error: float
    cross_block_ratio: float
    condition: float

    def summary(self) -> str:
        return (
            f"covariance: N={self.N} sigma2={self.sigma2:g} trials={self.trials} "
            f"frobenius_rel_error={self.frobenius_rel_error:.6f} "
            f"cross_block_ratio={self.cross_block_ratio:.6f} "
            f"condition={self.condition:.4g}"
        )

    def to_text(self, fh=None) -> str:
        lines = [self.summary()]
        for name, mat in (("empirical", self.empirical), ("target", self.target)):
            lines.append(f"{name} {mat.shape[0]}")
            lines.extend(" ".join(f"{v:.8e}" for v in row) for row in mat)
        text = "\n".join(lines) + "\n"
        if fh is not None:
            fh.write(text)
        return text


def verify_noise_covariance(
    model: IsiModel,
    sigma2: float,
    trials: int,
    seed: int = 0,
    batch: int = 20000,
) -> CovarianceReport:
    """Estimate the covariance of ``G^-1 q_c`` on the real-stacked axis.

    With matched-filter noise of covariance ``sigma2 G``, applying ``G^-1``
    should leave real-stacked covariance ``(sigma2 / 2) blkdiag(G^-1, G^-1)``
    with vanishing cross-quadrature blocks; this routine measures both.
    """
    if sigma2 <= 0.0:
        raise ParameterError(f"sigma2 must be positive, got {sigma2}")
    if trials < 2:
        raise ParameterError(f"trials must be >= 2, got {trials}")
    N = model.N
    cond = float(np.linalg.cond(model.G))
    if cond >= 1e8:
        raise ConditioningError(
            f"Gram matrix condition number {cond:.3e} is too large to invert reliably"
        )

    amp = math.sqrt(sigma2 / 2.0)
    # eta = G^-1 q with q = amp G_sqrt w  =>  eta = (amp G^-1 G_sqrt) w
    A = amp * np.linalg.solve(model.G, model.G_sqrt)
    G_inv = np.linalg.inv(model.G)
    target = np.zeros((2 * N, 2 * N))
    target[:N, :N] = 0.5 * sigma2 * G_inv
    target[N:, N:] = 0.5 * sigma2 * G_inv

    rng = rng_stream(seed, 0)
    acc = np.zeros((2 * N, 2 * N))
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        w = rng.standard_normal((2 * N, k))
        eta = np.vstack([A @ w[:N], A @ w[N:]])
        acc += eta @ eta.T
        done += k
    empirical = acc / trials

    denom = float(np.linalg.norm(target))
    rel = float(np.linalg.norm(empirical - target)) / denom
    cross = float(np.linalg.norm(empirical[:N, N:])) / float(np.linalg.norm(target[:N, :N]))
    return CovarianceReport(
        N=N,
        sigma2=float(sigma2),
        trials=int(trials),
        empirical=empirical,
        target=target,
        frobenius_rel_error=rel,
        cross_block_ratio=cross,
        condition=cond,
    )


@dataclass(frozen=True)
class ComplexityReport:
    """Median detection times over block lengths and the fitted growth rate."""

    detector: str
    block_lengths: tuple
    median_seconds: tuple
    samples_seconds: tuple
    slope: float | None

    def rows(self):
        return list(zip(self.block_lengths, self.median_seconds))


def complexity_probe(
    block_lengths,
    cfg: FtnConfig,
    repeats: int = 5,
    seed: int = 0,
    detector: str = DETECTOR_SDR_PSK,
) -> ComplexityReport:
    """Median CPU time of one detection as a function of block length.

    Each repeat detects a freshly simulated block; only the detection call is
    timed (model construction is excluded).  Process CPU time is used rather
    than wall time so that ambient host load does not contaminate the
    measurement.  The slope is the least-squares fit of log time against
    log N, or None with fewer than two lengths.
    """
    block_lengths = tuple(int(n) for n in block_lengths)
    if not block_lengths or min(block_lengths) < 1:
        raise ParameterError("block lengths must be positive")
    if repeats < 1:
        raise ParameterError("repeats must be >= 1")
    if detector not in (DETECTOR_SDR_PSK, DETECTOR_STSDRSE):
        raise ParameterError(f"complexity probe supports relaxation detectors, got {detector!r}")

    spec = SweepSpec(cfg=cfg, snr_grid_db=(cfg.snr_db,), detectors=(detector,))
    medians = []
    samples = []
    for ni, n in enumerate(block_lengths):
        cfg_n = replace(cfg, N=n)
        model = build_isi_model(rrc_pulse(cfg_n.beta, cfg_n.T), cfg_n)
        const = constellation_for(cfg_n)
        times = []
        # one untimed pass absorbs first-call costs (allocator, caches)
        warm_rng = rng_stream(seed, ni, repeats, 0)
        warm_idx = warm_rng.integers(0, const.M, n)
        warm_block = simulate_block(const.map(warm_idx), model, cfg_n, warm_rng)
        _run_detector(detector, warm_block, model, cfg_n, rng_stream(seed, ni, repeats, 1), spec, None)
        for rep in range(repeats):
            data_rng = rng_stream(seed, ni, rep, 0)
            idx = data_rng.integers(0, const.M, n)
            block = simulate_block(const.map(idx), model, cfg_n, data_rng)
            det_rng = rng_stream(seed, ni, rep, 1)
            t0 = time.process_time()
            _run_detector(detector, block, model, cfg_n, det_rng, spec, None)
            times.append(time.process_time() - t0)
        samples.append(tuple(times))
        medians.append(float(np.median(times)))

    slope = None
    if len(block_lengths) >= 2:
        slope = float(np.polyfit(np.log(block_lengths), np.log(medians), 1)[0])
    return ComplexityReport(
        detector=detector,
        block_lengths=block_lengths,
        median_seconds=tuple(medians),
        samples_seconds=tuple(samples),
        slope=slope,
    )
