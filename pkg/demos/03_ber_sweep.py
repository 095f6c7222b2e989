"""
A small bit-error-rate sweep, checked against the closed form
=============================================================

At tau = 1 the channel is interference-free and the relaxation detector
reduces to per-symbol nearest-point decisions, so its measured BER must
track the analytic AWGN curve.  The same harness then reruns the sweep
at tau = 0.8 to show the packed system operating at higher spectral
efficiency for a modest error-rate cost.
"""

import math

from ftnsdr import FtnConfig, SweepSpec, run_ber_sweep, spectral_efficiency


def qpsk_ber(snr_db):
    # closed-form Gray-coded QPSK bit error rate
    return 0.5 * math.erfc(math.sqrt(10 ** (snr_db / 10.0)) / math.sqrt(2))


grid = (4.0, 6.0, 8.0)

for tau in (1.0, 0.8):
    cfg = FtnConfig(M=4, tau=tau, beta=0.3, N=8, L=300)
    spec = SweepSpec(
        cfg=cfg,
        snr_grid_db=grid,
        detectors=("sdr-psk",),
        max_trials=400,
        target_bit_errors=150,
    )
    report = run_ber_sweep(spec)
    se = spectral_efficiency(cfg.M, cfg.tau, cfg.beta)
    print(f"tau = {tau}  (spectral efficiency {se:.3f} bits/s/Hz)")
    for snr in grid:
        point = report.point("sdr-psk", snr)
        line = f"  {snr:4.1f} dB  ber = {point.ber:.5f}  ({point.trials} trials)"
        if tau == 1.0:
            line += f"   closed form {qpsk_ber(snr):.5f}"
        print(line)
    print()

print("the tau = 1 column should match the closed form to Monte-Carlo accuracy;")
print("the packed system carries 25% more throughput in the same bandwidth and")
print("pays for it with a higher error rate at the same configured symbol SNR")
