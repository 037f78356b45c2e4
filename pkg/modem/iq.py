import os
from dataclasses import dataclass, field

import numpy as np

from utils.errors import FormatError
from utils.io import write_sidecar, parse_key_values, sidecar_path

IQ_DTYPE = np.dtype('<f4')
DEFAULT_CHUNK_SAMPLES = 1 << 18

@dataclass
class IqStream:
    samples: np.ndarray
    sample_rate: float = 1.0
    sps: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128).ravel()
        if not np.all(np.isfinite(self.samples)):
            raise FormatError("IQ stream contains non-finite samples")
        if self.sps < 1:
            raise FormatError(f"samples per symbol must be >= 1, got {self.sps}")

    def __len__(self):
        return self.samples.shape[0]

    def with_samples(self, samples, sps=None):
        return IqStream(samples, sample_rate=self.sample_rate, sps=self.sps if sps is None else sps, meta=dict(self.meta))

    def power(self):
        if len(self) == 0:
            return 0.0
        return float(np.mean(np.abs(self.samples) ** 2))

def to_interleaved(samples):
    samples = np.asarray(samples)
    out = np.empty(2 * samples.shape[0], dtype=IQ_DTYPE)
    out[0::2] = samples.real
    out[1::2] = samples.imag
    return out

def from_interleaved(floats):
    if floats.shape[0] % 2:
        raise FormatError(f"IQ data holds an odd number of floats ({floats.shape[0]})")
    return floats[0::2].astype(np.float64) + 1j * floats[1::2].astype(np.float64)

def quantise(samples):
    # the precision an IQ file stores
    return np.asarray(samples).astype(np.complex64).astype(np.complex128)

def read_iq_meta(path):
    if not os.path.exists(sidecar_path(path)):
        return {}
    return parse_key_values(sidecar_path(path))

def stream_params(meta):
    return float(meta.get("sample_rate", 1.0)), int(meta.get("sps", 1))

def read_iq(path):
    floats = np.fromfile(path, dtype=IQ_DTYPE)
    meta = read_iq_meta(path)
    sample_rate, sps = stream_params(meta)
    return IqStream(from_interleaved(floats), sample_rate=sample_rate, sps=sps, meta=meta)

def write_iq(path, stream, extra=None):
    to_interleaved(stream.samples).tofile(path)
    write_iq_meta(path, stream.sample_rate, stream.sps, extra)

def write_iq_meta(path, sample_rate, sps, extra=None):
    fields = {"sample_rate": sample_rate, "sps": sps, "format": "cf32-le"}
    if extra:
        fields.update(extra)
    write_sidecar(path, fields)

def iter_iq_chunks(path, chunk_samples=DEFAULT_CHUNK_SAMPLES):
    size = os.path.getsize(path)
    if size % (2 * IQ_DTYPE.itemsize):
        raise FormatError(f"{path}: {size} bytes is not a whole number of complex float32 samples")
    with open(path, 'rb') as f:
        while True:
            floats = np.fromfile(f, dtype=IQ_DTYPE, count=2 * chunk_samples)
            if floats.shape[0] == 0:
                break
            yield from_interleaved(floats)

class IqWriter:
    def __init__(self, path):
        self.path = path
        self.count = 0
        self.f = None

    def __enter__(self):
        self.f = open(self.path, 'wb')
        return self

    def write(self, samples):
        to_interleaved(samples).tofile(self.f)
        self.count += np.asarray(samples).shape[0]

    def __exit__(self, *exc):
        self.f.close()
        return False
