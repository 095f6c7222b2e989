"""Command-line front end.

Subcommands mirror the library entry points:

* ``simulate``          error-rate sweep over an SNR grid, CSV output
* ``detect``            detect one block read from a file of "re im" lines
* ``verify-covariance`` empirical check of the zero-forced noise covariance
* ``sweep-se``          spectral-efficiency table over packing factors
* ``complexity``        detector timing versus block length

Configuration values come from defaults, then an optional flat key=value
config file (``--config``), then ``--override key=value`` pairs, then
explicit flags; later sources win.  Exit codes: 0 success, 2 usage error,
3 malformed configuration, 4 unwritable output, 1 any other failure.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import sys

import numpy as np

from .config import FtnConfig
from .errors import FtnError, ParameterError
from .experiments import (
    DETECTORS,
    SweepSpec,
    complexity_probe,
    run_ber_sweep,
    spectral_efficiency,
    verify_noise_covariance,
)
from .isi import build_isi_model
from .pulses import rrc_pulse
from .qam16 import detect_16qam
from .sdr_psk import detect_psk
from .config import rng_stream

_CFG_FIELDS = {f.name: f for f in dataclasses.fields(FtnConfig)}


class _ConfigError(Exception):
    pass


class _OutputError(Exception):
    pass


def _parse_value(name, text):
    if name not in _CFG_FIELDS:
        raise _ConfigError(f"unknown configuration key {name!r}")
    text = text.strip()
    if name == "modulation":
        return text
    if name in ("tau", "beta", "T", "Es", "sigma2"):
        try:
            return float(text)
        except ValueError:
            raise _ConfigError(f"value for {name!r} must be a number, got {text!r}") from None
    if text.lower() == "none":
        return None
    try:
        return int(text)
    except ValueError:
        raise _ConfigError(f"value for {name!r} must be an integer, got {text!r}") from None


def _read_config_file(path):
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise _ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
                key, _, val = line.partition("=")
                values[key.strip()] = _parse_value(key.strip(), val)
    except OSError as exc:
        raise _ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    return values


def _build_config(args) -> FtnConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(_read_config_file(args.config))
    for item in getattr(args, "override", None) or []:
        if "=" not in item:
            raise _ConfigError(f"override must look like key=value, got {item!r}")
        key, _, val = item.partition("=")
        values[key.strip()] = _parse_value(key.strip(), val)
    for name in _CFG_FIELDS:
        flag = getattr(args, f"cfg_{name}", None)
        if flag is not None:
            values[name] = flag
    try:
        return FtnConfig(**values)
    except ParameterError as exc:
        raise _ConfigError(str(exc)) from None


def _add_config_flags(p, *names):
    for name in names:
        f = _CFG_FIELDS[name]
        if name == "modulation":
            p.add_argument("--modulation", dest="cfg_modulation", choices=("psk", "16qam"))
        elif f.type in ("int", int) or name in ("M", "N", "K", "L", "seed"):
            p.add_argument(f"--{name}", dest=f"cfg_{name}", type=int)
        else:
            p.add_argument(f"--{name}", dest=f"cfg_{name}", type=float)


def _parse_snr_grid(text):
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise _ConfigError(f"SNR grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise _ConfigError("SNR grid step must be positive")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise _ConfigError(f"SNR grid {text!r} is empty")
        return tuple(start + k * step for k in range(count))
    return tuple(float(p) for p in text.split(",") if p.strip())


@contextlib.contextmanager
def _open_output(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w")
    except OSError as exc:
        raise _OutputError(f"cannot write {path}: {exc.strerror or exc}") from None
    with fh:
        yield fh


def _cmd_simulate(args):
    cfg = _build_config(args)
    detectors = list(args.detector or ["sdr-psk"])
    try:
        spec = SweepSpec(
            cfg=cfg,
            snr_grid_db=_parse_snr_grid(args.snr_grid),
            detectors=tuple(detectors),
            max_trials=args.max_trials,
            target_bit_errors=args.target_bit_errors,
            linked_noise=args.linked_noise,
            mlse_max_candidates=args.mlse_max_candidates,
            qam_path=args.path,
        )
    except ParameterError as exc:
        raise _ConfigError(str(exc)) from None
    report = run_ber_sweep(spec)
    with _open_output(args.output) as fh:
        report.to_csv(fh)
    return 0


def _read_block(path):
    try:
        data = np.loadtxt(path, ndmin=2)
    except OSError as exc:
        raise _ConfigError(f"cannot read input {path}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise _ConfigError(f"input {path} is not two columns of numbers: {exc}") from None
    if data.shape[1] != 2:
        raise _ConfigError(f"input {path} must have two columns (re im), got {data.shape[1]}")
    return data[:, 0] + 1j * data[:, 1]


def _cmd_detect(args):
    cfg = _build_config(args)
    y = _read_block(args.input)
    if y.size != cfg.N:
        if getattr(args, "cfg_N", None) is not None:
            raise _ConfigError(f"input has {y.size} samples but N={cfg.N} was requested")
        cfg = dataclasses.replace(cfg, N=int(y.size))
    model = build_isi_model(rrc_pulse(cfg.beta, cfg.T), cfg)
    rng = rng_stream(cfg.seed, 0)
    if args.detector == "stsdrse":
        if cfg.modulation != "16qam":
            cfg = dataclasses.replace(cfg, modulation="16qam", M=16)
        res = detect_16qam(y, model, cfg, rng, path=args.path)
    elif args.detector == "sdr-psk":
        res = detect_psk(y, model, cfg, rng)
    else:
        raise _ConfigError("detect supports the sdr-psk and stsdrse detectors")
    with _open_output(args.output) as fh:
        fh.write(" ".join(str(int(i)) for i in res.indices) + "\n")
    return 0


def _cmd_verify_covariance(args):
    cfg = _build_config(args)
    model = build_isi_model(rrc_pulse(cfg.beta, cfg.T), cfg)
    rep = verify_noise_covariance(model, cfg.sigma2, args.trials, seed=cfg.seed)
    print(rep.summary())
    if args.output:
        with _open_output(args.output) as fh:
            rep.to_text(fh)
    return 0


def _cmd_sweep_se(args):
    cfg = _build_config(args)
    taus = tuple(float(t) for t in args.tau_list.split(",") if t.strip())
    if not taus:
        raise _ConfigError("tau list must not be empty")
    with _open_output(args.output) as fh:
        fh.write("M,tau,beta,se_bits_per_s_per_hz\n")
        for tau in taus:
            se = spectral_efficiency(cfg.M, tau, cfg.beta)
            fh.write(f"{cfg.M},{tau:.10g},{cfg.beta:.10g},{se:.10g}\n")
    return 0


def _cmd_complexity(args):
    cfg = _build_config(args)
    lengths = tuple(int(n) for n in args.N_list.split(",") if n.strip())
    rep = complexity_probe(lengths, cfg, repeats=args.repeats, seed=cfg.seed, detector=args.detector)
    with _open_output(args.output) as fh:
        fh.write("N,median_seconds\n")
        for n, t in rep.rows():
            fh.write(f"{n},{t:.6e}\n")
    if rep.slope is not None:
        print(f"fitted_exponent={rep.slope:.4f}")
    return 0


def _make_parser():
    parser = argparse.ArgumentParser(
        prog="ftnsdr",
        description="Faster-than-Nyquist simulation and relaxation detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fields=("M", "tau", "beta", "T", "Es", "sigma2", "N", "K", "L", "seed", "modulation")):
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--override", action="append", metavar="KEY=VALUE")
        p.add_argument("--output", "-o", help="output path (default stdout)")
        _add_config_flags(p, *fields)

    p = sub.add_parser("simulate", help="run an error-rate sweep, write CSV")
    common(p)
    p.add_argument("--snr-grid", default="6:12:2", help="start:stop:step or comma list, in dB")
    p.add_argument("--detector", action="append", choices=DETECTORS,
                   help="repeatable; default sdr-psk")
    p.add_argument("--max-trials", type=int, default=4000)
    p.add_argument("--target-bit-errors", type=int, default=200)
    p.add_argument("--linked-noise", action="store_true")
    p.add_argument("--mlse-max-candidates", type=int, default=10_000_000)
    p.add_argument("--path", choices=("whitened", "colored"), default="whitened",
                   help="observation path for the 16-QAM detector")
    p.set_defaults(run=_cmd_simulate)

    p = sub.add_parser("detect", help="detect one block from a file of 're im' lines")
    common(p)
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--detector", choices=("sdr-psk", "stsdrse"), default="sdr-psk")
    p.add_argument("--path", choices=("whitened", "colored"), default="whitened")
    p.set_defaults(run=_cmd_detect)

    p = sub.add_parser("verify-covariance", help="empirical zero-forced noise covariance")
    common(p)
    p.add_argument("--trials", type=int, default=200000)
    p.set_defaults(run=_cmd_verify_covariance)

    p = sub.add_parser("sweep-se", help="spectral-efficiency table")
    common(p, fields=("M", "beta"))
    p.add_argument("--tau-list", default="0.75,0.8,0.85,1.0",
                   help="comma-separated packing factors")
    p.set_defaults(run=_cmd_sweep_se)

    p = sub.add_parser("complexity", help="detector timing versus block length")
    common(p)
    p.add_argument("--N-list", default="8,16,32,64", help="comma-separated block lengths")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--detector", choices=("sdr-psk", "stsdrse"), default="sdr-psk")
    p.set_defaults(run=_cmd_complexity)

    return parser


def main(argv=None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except _ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 3
    except _OutputError as exc:
        print(f"error: output: {exc}", file=sys.stderr)
        return 4
    except FtnError as exc:
        print(f"error: runtime: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
