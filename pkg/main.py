import sys
import logging
import argparse
import dataclasses

from cli.calculator import get_calculation, format_result
from cli.commands import cmd_generate, cmd_tx, cmd_channel, cmd_rx, cmd_detect, cmd_fser, load_manifest
from cli.config import load_run_config
from cli.sweep import cmd_sweep
from utils.errors import SimulationError

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

def add_common_args(parser):
    parser.add_argument('--config', default=None, help="JSON or key=value run configuration")
    parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help="override one setting, e.g. channel.noise_voltage=0.7")
    parser.add_argument('-v', '--verbose', action='store_true')
    parser.add_argument('-q', '--quiet', action='store_true')

def add_analyze_args(sub):
    analyze = sub.add_parser('analyze', help="false-alarm/detection calculator and resource model")
    calc = analyze.add_subparsers(dest='calculation', required=True)

    p = calc.add_parser('tail')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--p', type=float, required=True)
    p.add_argument('--threshold', '-T', type=int, required=True)

    p = calc.add_parser('false-alarm')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--threshold', '-T', type=int, required=True)

    p = calc.add_parser('detection')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--threshold', '-T', type=int, required=True)
    p.add_argument('--ber', type=float, required=True)

    p = calc.add_parser('threshold')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--ber-max', type=float, required=True)
    p.add_argument('--fa-max', type=float, required=True)
    p.add_argument('--miss-max', type=float, default=1e-3)
    p.add_argument('--strict', action='store_true', help="require detection >= 1 - fa_max")

    p = calc.add_parser('resources')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--clock', type=float, default=None, help="clock frequency in Hz")

    p = calc.add_parser('ebn0', help="Eb/N0 and theoretical QPSK BER for a noise voltage or a target BER")
    p.add_argument('--sps', type=int, default=4)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument('--noise-voltage', type=float)
    group.add_argument('--ber', type=float)

def parse_args(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    add_common_args(common)

    parser = argparse.ArgumentParser(description="Long-syncword frame synchronisation simulator")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('generate', parents=[common], help="write a frame bitstream, payloads and manifest")
    p.add_argument('--out', required=True)
    p.add_argument('--format', default='packed')

    p = sub.add_parser('tx', parents=[common], help="QPSK-modulate a bit file into an IQ file")
    p.add_argument('bits_file')
    p.add_argument('--out', required=True)
    p.add_argument('--format', default='auto')

    p = sub.add_parser('channel', parents=[common], help="apply fading, offsets and AWGN to an IQ file")
    p.add_argument('iq_file')
    p.add_argument('--out', required=True)
    p.add_argument('--noise-voltage', type=float, default=None)
    p.add_argument('--seed', type=lambda s: int(s, 0), default=None)

    p = sub.add_parser('rx', parents=[common], help="demodulate an IQ file into a bit file")
    p.add_argument('iq_file')
    p.add_argument('--out', required=True)
    p.add_argument('--format', default='packed')

    p = sub.add_parser('detect', parents=[common], help="scan a bit file for syncwords and capture payloads")
    p.add_argument('bits_file')
    p.add_argument('--events', required=True)
    p.add_argument('--payloads', required=True)
    p.add_argument('--manifest', default=None, help="take the frame and syncword parameters from a manifest")
    p.add_argument('--continuous', action='store_true', help="keep scanning during payload capture")
    p.add_argument('--format', default='auto')

    p = sub.add_parser('fser', parents=[common], help="match captured payloads against the originals")
    p.add_argument('payloads_file')
    p.add_argument('--manifest', required=True)
    p.add_argument('--delta', type=float, default=None)
    p.add_argument('--report', default=None)
    p.add_argument('--label', default="")
    p.add_argument('--iq', default=None, help="channel output file whose sidecar holds the noise settings")

    p = sub.add_parser('sweep', parents=[common], help="run the FSER-vs-noise sweep")
    p.add_argument('--workers', type=int, default=None)
    p.add_argument('--no-progress', action='store_true')

    add_analyze_args(sub)
    return parser.parse_args(argv)

def setup_logging(args):
    level = logging.INFO
    if getattr(args, 'verbose', False):
        level = logging.DEBUG
    elif getattr(args, 'quiet', False):
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT)

def run_analyze(args):
    if args.calculation == "tail":
        result = get_calculation("tail")(args.k, args.p, args.threshold)
    elif args.calculation == "false-alarm":
        result = get_calculation("false-alarm")(args.k, args.threshold)
    elif args.calculation == "detection":
        result = get_calculation("detection")(args.k, args.threshold, args.ber)
    elif args.calculation == "threshold":
        miss_max = None if args.strict else args.miss_max
        result = get_calculation("threshold")(args.k, args.ber_max, args.fa_max, miss_max)
    elif args.calculation == "resources":
        result = get_calculation("resources")(args.k, args.m, args.clock)
    else:
        result = get_calculation("ebn0")(args.sps, args.noise_voltage, args.ber)
    print(format_result(result))

def run(args):
    if args.command == 'analyze':
        run_analyze(args)
        return

    run_cfg = load_run_config(args.config, args.overrides)

    if args.command == 'generate':
        manifest = cmd_generate(run_cfg.frame, args.out, args.format)
        print(f"{manifest['payload_count']} frames, {manifest['bits']} bits -> {args.out}")
    elif args.command == 'tx':
        count = cmd_tx(args.bits_file, args.out, run_cfg.modem, args.format)
        print(f"{count} samples -> {args.out}")
    elif args.command == 'channel':
        params = run_cfg.channel
        if args.noise_voltage is not None:
            params = dataclasses.replace(params, noise_voltage=args.noise_voltage)
        if args.seed is not None:
            params = dataclasses.replace(params, seed=args.seed)
        snr_db = cmd_channel(args.iq_file, args.out, params)
        print(f"SNR {snr_db:.2f} dB, seed {params.seed} -> {args.out}")
    elif args.command == 'rx':
        count = cmd_rx(args.iq_file, args.out, run_cfg.modem, args.format)
        print(f"{count} bits -> {args.out}")
    elif args.command == 'detect':
        frame_cfg = load_manifest(args.manifest)[1] if args.manifest else run_cfg.frame
        if args.continuous:
            frame_cfg = dataclasses.replace(frame_cfg, continuous=True)
        events, captures = cmd_detect(args.bits_file, args.events, args.payloads, frame_cfg, args.format)
        print(f"{len(events)} detections, {len(captures)} payloads -> {args.payloads}")
    elif args.command == 'fser':
        delta = run_cfg.sweep.delta if args.delta is None else args.delta
        report = cmd_fser(args.payloads_file, args.manifest, delta, args.report, args.label, args.iq)
        print(f"total {report.total}, detected {report.detected}, missed {report.missed}, "
              f"false alarms {report.false_alarms}, FSER {report.fser:.6f}")
    elif args.command == 'sweep':
        if args.workers is not None:
            run_cfg.sweep.workers = args.workers
        reports = cmd_sweep(run_cfg, show_progress=not args.no_progress)
        print(f"{len(reports)} rows -> {run_cfg.csv_path}, plot -> {run_cfg.plot_path}")
    else:
        raise ValueError("Invalid command chosen.")

def main(argv=None):
    args = parse_args(argv)
    setup_logging(args)
    try:
        run(args)
    except (SimulationError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0

if __name__ == "__main__":
    sys.exit(main())
