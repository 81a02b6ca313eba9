"""
Command-line entry point.

::

    bnst drift   [--fd 6.48 --nt 3]           -> drift.csv
    bnst track   [--fd 1.3 --slots 10000]     -> track.csv
    bnst compare [--dopplers 1,2,4]           -> compare.csv
    bnst ber     [--nt 3 --snr 0,1,2,3,4,5]   -> ber.csv (+ ber_frames.csv)

Settings are layered: built-in defaults, then per-command defaults, then
the ``--config`` JSON file, then command-line flags. Every CSV starts with
a ``# config_sha256=... seed=...`` comment line followed by the header.
"""

import argparse
import json
import logging
import os
import sys

from .harness import (BER_COLUMNS, COMPARE_COLUMNS, DRIFT_COLUMNS,
                      FRAME_COLUMNS, SNR_DEFINITION, ScenarioConfig, run_ber,
                      run_compare, run_drift, run_track, write_csv)

# desk-scale defaults per command; a config file or flags override them
COMMAND_DEFAULTS = {
    "drift": {"nt": 3, "nr": 1, "fd_hz": 6.48, "num_channels": 200},
    "track": {"fd_hz": 1.3, "num_slots": 2000},
    "compare": {"num_channels": 20, "num_slots": 2000},
    "ber": {"num_channels": 200, "frames_per_channel": 63},
}

# 100 channels x 1e4 slots for tracking, 1e3 channels x 1e4 symbols for BER
PAPER_SCALE = {
    "drift": {"num_channels": 1000},
    "track": {"num_slots": 10_000},
    "compare": {"num_channels": 100, "num_slots": 10_000},
    "ber": {"num_channels": 1000, "frames_per_channel": 625},
}


class ConfigError(Exception):
    pass


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with ScenarioConfig fields")
    common.add_argument("--seed", type=_seed, help="base seed (u64)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--channels", type=int, help="channel realisations")
    common.add_argument("--slots", type=int, help="feedback cycles per run")
    common.add_argument("--paper-scale", action="store_true",
                        help="use the full experiment sizes")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--nt", type=int, help="secondary transmit antennas")
    common.add_argument("--nr", type=int, help="primary receive antennas")
    common.add_argument("--fd", type=float, dest="fd_hz", help="Doppler (Hz)")
    common.add_argument("--noise", type=float, dest="noise_variance",
                        help="feedback noise variance")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="bnst", description="Blind null-space learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("drift", parents=[common],
                       help="null-space drift versus lag")
    p.add_argument("--fractions", type=_float_list,
                   help="lags as fractions of 1/fd")
    sub.add_parser("track", parents=[common], help="one tracking trace")
    p = sub.add_parser("compare", parents=[common],
                       help="acquisition-only baseline versus tracking")
    p.add_argument("--dopplers", type=_float_list, help="Doppler list (Hz)")
    p = sub.add_parser("ber", parents=[common],
                       help="symbol error rate of superimposed data")
    p.add_argument("--snr", type=_float_list, help="SNR grid (dB)")
    p.add_argument("--frame-log", type=int, default=0,
                   help="log decode records of this many frames")
    return parser


def load_config(args):
    data = dict(COMMAND_DEFAULTS[args.command])
    if args.paper_scale:
        data.update(PAPER_SCALE[args.command])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
    flags = {
        "seed": args.seed,
        "num_channels": args.channels,
        "num_slots": args.slots,
        "workers": args.workers,
        "nt": args.nt,
        "nr": args.nr,
        "fd_hz": args.fd_hz,
        "noise_variance": args.noise_variance,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    try:
        return ScenarioConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _open(out, name):
    os.makedirs(out, exist_ok=True)
    return open(os.path.join(out, name), "w", encoding="utf-8", newline="")


def run(args):
    cfg = load_config(args)
    cmd = args.command
    if cmd == "drift":
        rows = run_drift(cfg, args.fractions)
        with _open(args.out, "drift.csv") as fh:
            write_csv(fh, DRIFT_COLUMNS, rows, cfg.comment())
        return ["drift.csv"]
    if cmd == "track":
        trace = run_track(cfg)
        with _open(args.out, "track.csv") as fh:
            trace.to_csv(fh, header_comment=cfg.comment(
                f"adaptations={trace.adaptations}"))
        return ["track.csv"]
    if cmd == "compare":
        rows = run_compare(cfg, args.dopplers)
        with _open(args.out, "compare.csv") as fh:
            write_csv(fh, COMPARE_COLUMNS, rows, cfg.comment())
        return ["compare.csv"]
    rows, frames = run_ber(cfg, args.snr, frame_log=args.frame_log)
    comment = cfg.comment(SNR_DEFINITION)
    with _open(args.out, "ber.csv") as fh:
        write_csv(fh, BER_COLUMNS, rows, comment)
    written = ["ber.csv"]
    if args.frame_log:
        with _open(args.out, "ber_frames.csv") as fh:
            write_csv(fh, FRAME_COLUMNS, frames, comment)
        written.append("ber_frames.csv")
    return written


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        written = run(args)
    except ConfigError as exc:
        print(f"bnst: config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"bnst: {exc}", file=sys.stderr)
        return 2
    for name in written:
        print(os.path.join(args.out, name))
    return 0


if __name__ == "__main__":
    sys.exit(main())
