import csv
import logging
from dataclasses import dataclass, astuple, fields

import numpy as np
from dataclasses_json import dataclass_json
from numba import njit

from framing.bitstream import BitStream
from utils.errors import FormatError, LengthMismatchError

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 0.3
POPCOUNT8 = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(axis=1).astype(np.int64)

@dataclass_json
@dataclass
class FserReport:
    label: str = ""
    noise_voltage: float = 0.0
    snr_db: float = float('inf')
    total: int = 0
    detected: int = 0
    missed: int = 0
    false_alarms: int = 0
    fser: float = 0.0
    k: int = 0
    threshold: int = 0
    repeat: int = 0
    seed: int = 0

    def with_condition(self, **kwargs):
        values = self.to_dict()
        values.update(kwargs)
        return FserReport.from_dict(values)

REPORT_FIELDS = tuple(f.name for f in fields(FserReport))

def packed_rows(payloads, n):
    rows = np.zeros((len(payloads), (n + 7) // 8), dtype=np.uint8)
    for i, p in enumerate(payloads):
        if len(p) != n:
            raise LengthMismatchError(f"Payload {i} has {len(p)} bits, expected {n}")
        rows[i] = p.packed
    return rows

def match_payloads(originals, extracted, delta=DEFAULT_DELTA):
    """Greedy in-order matching of extracted payloads against the originals.

    Each extracted payload claims the first unclaimed original at or after the
    cursor within delta*n bit errors; originals passed over count as missed,
    extracted payloads that match nothing count as false alarms.
    """
    if not 0.0 <= delta < 0.5:
        raise ValueError(f"Invalid mismatch fraction chosen: {delta}")
    total = len(originals)
    if total == 0 and not extracted:
        return FserReport()
    n = len(originals[0]) if total else len(extracted[0])
    orig_rows = packed_rows(originals, n)
    ext_rows = packed_rows(extracted, n)
    limit = delta * n

    matched, false_alarms = fast_match(orig_rows, ext_rows, limit, POPCOUNT8)
    missed = total - matched
    logger.debug("Matched %d of %d payloads, %d false alarms", matched, total, false_alarms)
    return FserReport(total=total, detected=matched, missed=missed, false_alarms=false_alarms,
                      fser=missed / total if total else 0.0)

def ber_measure(a, b):
    if len(a) != len(b):
        raise LengthMismatchError(f"Bit streams differ in length ({len(a)} vs {len(b)})")
    if len(a) == 0:
        return 0.0
    errors = int(POPCOUNT8[np.bitwise_xor(a.packed, b.packed)].sum())
    return errors / len(a)

def split_payloads(stream, n):
    if len(stream) % n:
        raise LengthMismatchError(f"{len(stream)} bits is not a whole number of {n}-bit payloads")
    bits = stream.bits.reshape(-1, n)
    return [BitStream.from_bits(row) for row in bits]

def write_reports_csv(path, reports, append=False):
    new_file = not append
    with open(path, 'a' if append else 'w', newline='') as f:
        writer = csv.writer(f)
        if new_file:
            writer.writerow(REPORT_FIELDS)
        for r in reports:
            writer.writerow(astuple(r))

def read_reports_csv(path):
    with open(path, newline='') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or tuple(reader.fieldnames[:8]) != REPORT_FIELDS[:8]:
            raise FormatError(f"{path}: not an FSER report file")
        reports = []
        for row in reader:
            try:
                reports.append(FserReport(
                    label=row["label"], noise_voltage=float(row["noise_voltage"]), snr_db=float(row["snr_db"]),
                    total=int(row["total"]), detected=int(row["detected"]), missed=int(row["missed"]),
                    false_alarms=int(row["false_alarms"]), fser=float(row["fser"]),
                    k=int(row.get("k") or 0), threshold=int(row.get("threshold") or 0),
                    repeat=int(row.get("repeat") or 0), seed=int(row.get("seed") or 0)))
            except (TypeError, ValueError) as e:
                raise FormatError(f"{path}: malformed report row ({e})")
        return reports

def sort_reports(reports):
    return sorted(reports, key=lambda r: (r.k, r.threshold, r.noise_voltage, r.repeat, r.label))

@njit(cache=True)
def fast_match(orig_rows, ext_rows, limit, popcount):
    total = orig_rows.shape[0]
    width = orig_rows.shape[1]
    cursor = 0
    matched = 0
    false_alarms = 0
    for e in range(ext_rows.shape[0]):
        hit = -1
        for i in range(cursor, total):
            dist = 0
            for b in range(width):
                dist += popcount[orig_rows[i, b] ^ ext_rows[e, b]]
                if dist > limit:
                    break
            if dist <= limit:
                hit = i
                break
        if hit < 0:
            false_alarms += 1
        else:
            cursor = hit + 1
            matched += 1
    return matched, false_alarms
