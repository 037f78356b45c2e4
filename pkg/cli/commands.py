import os
import logging

import numpy as np

from analysis.fser import match_payloads, split_payloads, write_reports_csv
from channel.impairments import snr_from_power
from channel.model import Channel, channel_meta
from correlator.detector import scan, extract_payloads, payload_bits, write_events_csv
from framing.bitstream import BitWriter, read_bits, write_bits, PACKED
from framing.frames import FrameConfig, gen_frame_bits
from modem.demodulator import Modulator, Demodulator
from modem.iq import IqWriter, iter_iq_chunks, read_iq_meta, stream_params, write_iq_meta
from utils.errors import ConfigurationError, FormatError
from utils.io import load_json, write_json, make_dir_if_not_exists

logger = logging.getLogger(__name__)

CHUNK_FRAMES = 256
CHUNK_BITS = 1 << 20

def payloads_path(out_path):
    return out_path + ".payloads"

def manifest_path(out_path):
    return out_path + ".manifest.json"

def ensure_parent(path):
    make_dir_if_not_exists(os.path.dirname(path))

def cmd_generate(cfg, out_path, fmt=PACKED):
    cfg.validate()
    ensure_parent(out_path)
    schedule = cfg.schedule()
    with BitWriter(out_path, fmt) as stream, BitWriter(payloads_path(out_path), PACKED) as payloads:
        for first in range(0, cfg.frames, CHUNK_FRAMES):
            bits, frame_payloads = gen_frame_bits(cfg, first, min(CHUNK_FRAMES, cfg.frames - first), schedule)
            stream.write(bits)
            payloads.write(frame_payloads.ravel())

    manifest = {
        "frame": cfg.to_dict(),
        "stream": os.path.basename(out_path),
        "payloads": os.path.basename(payloads_path(out_path)),
        "payload_count": cfg.frames,
        "bits": cfg.total_bits,
    }
    write_json(manifest_path(out_path), manifest)
    logger.info("Wrote %d frames (%d bits) to %s", cfg.frames, cfg.total_bits, out_path)
    return manifest

def load_manifest(path):
    manifest = load_json(path)
    if "frame" not in manifest:
        raise ConfigurationError(f"{path} holds no frame parameters")
    return manifest, FrameConfig.from_dict(manifest["frame"])

def manifest_payloads(path):
    manifest, cfg = load_manifest(path)
    stream = read_bits(os.path.join(os.path.dirname(path), manifest["payloads"]))
    payloads = split_payloads(stream, cfg.n)
    if len(payloads) != manifest.get("payload_count", len(payloads)):
        raise FormatError(f"{path} lists {manifest['payload_count']} payloads, payload file holds {len(payloads)}")
    return payloads, cfg

def cmd_tx(bits_path, out_path, modem, fmt="auto"):
    bits = read_bits(bits_path, fmt).bits
    if bits.shape[0] % 2:
        raise ConfigurationError(f"{bits_path} holds {bits.shape[0]} bits; QPSK needs an even count")
    ensure_parent(out_path)
    mod = Modulator(modem)
    with IqWriter(out_path) as writer:
        for lo in range(0, bits.shape[0], CHUNK_BITS):
            writer.write(mod.process(bits[lo:lo + CHUNK_BITS]))
        writer.write(mod.flush())
    write_iq_meta(out_path, modem.sample_rate, modem.sps)
    logger.info("Modulated %d bits into %d samples", bits.shape[0], writer.count)
    return writer.count

def cmd_channel(in_path, out_path, params):
    params.validate()
    sample_rate, sps = stream_params(read_iq_meta(in_path))
    ensure_parent(out_path)
    ch = Channel(params)
    energy = 0.0
    n_in = 0
    with IqWriter(out_path) as writer:
        for chunk in iter_iq_chunks(in_path):
            energy += float(np.sum(np.abs(chunk) ** 2))
            n_in += chunk.shape[0]
            writer.write(ch.process(chunk))
        writer.write(ch.flush())

    snr_db = snr_from_power(energy / n_in if n_in else 0.0, params.noise_voltage)
    extra = channel_meta(params)
    extra["snr_db"] = snr_db
    write_iq_meta(out_path, sample_rate, sps, extra)
    logger.info("Channel output: %d samples, SNR %.2f dB (seed %d)", writer.count, snr_db, params.seed)
    return snr_db

def check_sps(meta, modem, path):
    if "sps" in meta and int(meta["sps"]) != modem.sps:
        raise ConfigurationError(f"{path} was written with sps={meta['sps']}, modem parameters say sps={modem.sps}")

def cmd_rx(in_path, out_path, modem, fmt=PACKED):
    check_sps(read_iq_meta(in_path), modem, in_path)
    ensure_parent(out_path)
    demod = Demodulator(modem)
    with BitWriter(out_path, fmt) as writer:
        for chunk in iter_iq_chunks(in_path):
            writer.write(demod.process(chunk))
        writer.write(demod.flush())
    logger.info("Demodulated %d bits", writer.count)
    return writer.count

def cmd_detect(bits_path, events_path, out_payloads_path, cfg, fmt="auto"):
    stream = read_bits(bits_path, fmt)
    events = scan(stream, cfg)
    captures = extract_payloads(stream, events, cfg)
    ensure_parent(events_path)
    write_events_csv(events_path, events)
    ensure_parent(out_payloads_path)
    write_bits(out_payloads_path, payload_bits(captures), PACKED, {"n": cfg.n})
    logger.info("%d detections, %d payloads captured", len(events), len(captures))
    return events, captures

def cmd_fser(extracted_path, manifest, delta, report_path=None, label="", iq_path=None):
    originals, cfg = manifest_payloads(manifest)
    extracted = split_payloads(read_bits(extracted_path), cfg.n)
    report = match_payloads(originals, extracted, delta)
    report = report.with_condition(label=label, k=cfg.k, threshold=cfg.threshold)

    if iq_path is not None:
        meta = read_iq_meta(iq_path)
        report = report.with_condition(noise_voltage=float(meta.get("channel_noise_voltage", 0.0)),
                                       snr_db=float(meta.get("snr_db", "inf")),
                                       seed=int(meta.get("channel_seed", 0)))
    if report_path is not None:
        ensure_parent(report_path)
        write_reports_csv(report_path, [report], append=os.path.exists(report_path))
    return report
