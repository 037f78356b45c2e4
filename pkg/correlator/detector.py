import csv
import logging
from typing import NamedTuple

from correlator.correlation import as_bits, variant_words, fast_scan
from framing.bitstream import BitStream
from modem.constellation import derotate_bits
from utils.errors import FormatError, LengthMismatchError

logger = logging.getLogger(__name__)

EVENT_FIELDS = ("pos", "corr", "rot")

class DetectionEvent(NamedTuple):
    pos: int
    corr: int
    rot: int

def refresh_segments(cfg, length):
    """(block, first, stop) window-start ranges, one per syncword block.

    Block b owns starts [b*R*F - F/2, (b+1)*R*F - F/2) with F = n + k, so the
    switch happens half a frame before the first frame of the new block.
    """
    last = length - cfg.k + 1
    if cfg.refresh_interval <= 0:
        return [(0, 0, last)]
    span = cfg.refresh_interval * cfg.frame_bits
    half = cfg.frame_bits // 2
    segments = []
    block = 0
    while True:
        first = max(0, block * span - half)
        if first >= last:
            break
        segments.append((block, first, min((block + 1) * span - half, last)))
        block += 1
    return segments

def scan(stream, cfg, sync=None):
    """Threshold detections over every window start of the stream, in order.

    Without an explicit syncword the configured refresh schedule is followed.
    """
    cfg.validate()
    bits = as_bits(stream)
    if bits.shape[0] < cfg.k:
        return []

    if sync is not None:
        if len(sync) != cfg.k:
            raise LengthMismatchError(f"Syncword has {len(sync)} bits, configuration says k={cfg.k}")
        segments = [(sync, 0, bits.shape[0] - cfg.k + 1)]
    else:
        schedule = cfg.schedule()
        segments = [(schedule.syncword(b), first, stop) for b, first, stop in refresh_segments(cfg, bits.shape[0])]

    events = []
    resume = 0
    for word, first, stop in segments:
        words, masks = variant_words(word, cfg.rotations)
        pos, corr, rot, resume = fast_scan(bits, words, masks, cfg.k, cfg.m, cfg.threshold, cfg.n,
                                           cfg.continuous, first, stop, resume, 0)
        events.extend(DetectionEvent(int(p), int(c), int(r)) for p, c, r in zip(pos, corr, rot))

    logger.debug("Scanned %d bits, %d detections", bits.shape[0], len(events))
    return events

def extract_payloads(stream, events, cfg):
    bits = as_bits(stream)
    out = []
    truncated = 0
    for ev in events:
        start = ev.pos + cfg.k
        if start + cfg.n > bits.shape[0]:
            truncated += 1
            logger.warning("Detection at bit %d leaves only %d of %d payload bits, capture dropped",
                           ev.pos, max(0, bits.shape[0] - start), cfg.n)
            continue
        out.append((ev, BitStream.from_bits(derotate_bits(bits[start:start + cfg.n], ev.rot))))
    if truncated:
        logger.info("%d of %d captures truncated by the end of the stream", truncated, len(events))
    return out

def payload_bits(captures):
    return BitStream.concat(p for _, p in captures)

def write_events_csv(path, events):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(EVENT_FIELDS)
        for ev in events:
            writer.writerow(ev)

def read_events(path):
    with open(path, newline='') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or tuple(reader.fieldnames) != EVENT_FIELDS:
            raise FormatError(f"{path}: expected header {','.join(EVENT_FIELDS)}")
        try:
            return [DetectionEvent(int(row["pos"]), int(row["corr"]), int(row["rot"])) for row in reader]
        except (TypeError, ValueError) as e:
            raise FormatError(f"{path}: malformed event row ({e})")