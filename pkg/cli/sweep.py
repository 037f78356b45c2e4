import os
import logging
import dataclasses
from concurrent.futures import ProcessPoolExecutor, as_completed

import numpy as np
from tqdm import tqdm

from analysis.fser import match_payloads, write_reports_csv, sort_reports
from channel.impairments import snr_from_power
from channel.model import Channel
from cli.config import RunConfig
from cli.visualisation import plot_fser
from correlator.detector import scan, extract_payloads
from framing.bitstream import BitStream
from framing.frames import gen_frame_bits, gen_payload_bits
from modem.demodulator import Modulator, Demodulator
from utils.io import make_dir_if_not_exists, write_json
from utils.rng import mix64, derive_seeds, MASK_64

logger = logging.getLogger(__name__)

def condition_seed(master_seed, condition, repeat):
    return mix64((int(master_seed) ^ (condition << 32) ^ repeat) & MASK_64)

def run_pipeline(frame_cfg, modem, channel_params, delta=0.3, chunk_frames=256):
    """generate -> tx -> channel -> rx -> detect -> fser without touching the disk."""
    frame_cfg.validate()
    schedule = frame_cfg.schedule()
    mod = Modulator(modem)
    ch = Channel(channel_params)
    demod = Demodulator(modem)

    energy = 0.0
    n_tx = 0
    rx = []

    def through(tx):
        nonlocal energy, n_tx
        energy += float(np.sum(np.abs(tx) ** 2))
        n_tx += tx.shape[0]
        rx.append(demod.process(ch.process(tx)))

    for first in range(0, frame_cfg.frames, chunk_frames):
        bits, _ = gen_frame_bits(frame_cfg, first, min(chunk_frames, frame_cfg.frames - first), schedule)
        through(mod.process(bits))
    through(mod.flush())
    rx.append(demod.process(ch.flush()))
    rx.append(demod.flush())

    rx_bits = np.concatenate(rx)
    events = scan(rx_bits, frame_cfg)
    captures = extract_payloads(rx_bits, events, frame_cfg)
    originals = [BitStream.from_bits(p) for p in gen_payload_bits(frame_cfg, 0, frame_cfg.frames)]
    report = match_payloads(originals, [p for _, p in captures], delta)

    snr_db = snr_from_power(energy / n_tx if n_tx else 0.0, channel_params.noise_voltage)
    return report.with_condition(noise_voltage=channel_params.noise_voltage, snr_db=snr_db,
                                 k=frame_cfg.k, threshold=frame_cfg.threshold)

def run_condition(config, condition, noise_voltage, repeat):
    """Every syncword variant of one (noise voltage, repeat) point on shared channel seeds."""
    run = RunConfig.from_dict(config)
    seed = condition_seed(run.master_seed, condition, repeat)
    sync_seed, payload_seed, channel_seed = derive_seeds(seed, 3)
    channel_params = dataclasses.replace(run.channel, noise_voltage=noise_voltage, seed=channel_seed)

    reports = []
    for k, threshold in run.sweep.syncwords:
        frame_cfg = run.frame_for(k, threshold, sync_seed=sync_seed, payload_seed=payload_seed)
        report = run_pipeline(frame_cfg, run.modem, channel_params, run.sweep.delta, run.sweep.chunk_frames)
        reports.append(report.with_condition(label=f"k{k}-T{threshold}", repeat=repeat, seed=seed))
    return reports

def partial_path(csv_path):
    return csv_path + ".partial"

def cmd_sweep(run, show_progress=True):
    run.validate()
    make_dir_if_not_exists(run.output_dir)
    write_json(os.path.join(run.output_dir, "config.json"), run.to_dict())

    config = run.to_dict()
    tasks = [(c, nv, r) for c, nv in enumerate(run.sweep.noise_voltages()) for r in range(run.sweep.repeats)]
    logger.info("Sweeping %d conditions x %d repeats, %d syncword variants, %d frames each",
                len(tasks) // run.sweep.repeats, run.sweep.repeats, len(run.sweep.syncwords), run.frame.frames)

    partial = partial_path(run.csv_path)
    write_reports_csv(partial, [])
    reports = []

    def collect(batch):
        reports.extend(batch)
        write_reports_csv(partial, batch, append=True)
        for r in batch:
            logger.info("%s noise %.2f (%.2f dB) repeat %d: FSER %.4f, %d false alarms",
                        r.label, r.noise_voltage, r.snr_db, r.repeat, r.fser, r.false_alarms)

    progress = tqdm(total=len(tasks), disable=not show_progress)
    if run.sweep.workers == 1:
        for c, nv, r in tasks:
            collect(run_condition(config, c, nv, r))
            progress.update(1)
    else:
        with ProcessPoolExecutor(max_workers=run.sweep.workers) as pool:
            futures = [pool.submit(run_condition, config, c, nv, r) for c, nv, r in tasks]
            for future in as_completed(futures):
                collect(future.result())
                progress.update(1)
    progress.close()

    reports = sort_reports(reports)
    write_reports_csv(run.csv_path, reports)
    os.remove(partial)
    plot_fser(reports, run.plot_path)
    logger.info("Results written to %s and %s", run.csv_path, run.plot_path)
    return reports
