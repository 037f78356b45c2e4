import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from dataclasses_json import dataclass_json

from framing.bitstream import BitStream
from framing.syncword import SyncSchedule, validate_syncword_length
from utils.errors import ConfigurationError
from utils.rng import splitmix64_bits

logger = logging.getLogger(__name__)

@dataclass_json
@dataclass
class FrameConfig:
    n: int = 4700
    k: int = 300
    threshold: int = 210
    m: int = 8
    frames: int = 20000
    sync_seed: int = 0x5EED5
    payload_seed: int = 0xDA7A
    refresh_interval: int = 0
    threshold_ratio: Optional[float] = None
    continuous: bool = False
    rotations: bool = True

    def __post_init__(self):
        if self.threshold_ratio is not None:
            self.threshold = math.ceil(self.threshold_ratio * self.k)

    @property
    def frame_bits(self):
        return self.n + self.k

    @property
    def total_bits(self):
        return self.frames * self.frame_bits

    def validate(self):
        validate_syncword_length(self.k)
        if not 0 < self.threshold <= self.k:
            raise ConfigurationError(f"Threshold must satisfy 0 < T <= k, got T={self.threshold}, k={self.k}")
        if self.n <= 0 or self.n % 2:
            raise ConfigurationError(f"Payload length n must be positive and even, got n={self.n}")
        if self.m < 1:
            raise ConfigurationError(f"Parallelism m must be at least 1, got m={self.m}")
        if self.frames < 0:
            raise ConfigurationError(f"Frame count must be non-negative, got {self.frames}")
        if self.refresh_interval < 0:
            raise ConfigurationError(f"refresh_interval must be >= 0, got {self.refresh_interval}")
        if self.n < self.k:
            logger.warning("Payload (n=%d) is shorter than the syncword (k=%d); sync overhead exceeds 50%%", self.n, self.k)
        return self

    def schedule(self):
        return SyncSchedule(self.k, self.sync_seed, self.refresh_interval)

def gen_payload(cfg, frame_idx):
    return splitmix64_bits(cfg.payload_seed, cfg.n, start=frame_idx * cfg.n)

def gen_payload_bits(cfg, first_frame, count):
    # payloads of consecutive frames are consecutive slices of one bit sequence
    return splitmix64_bits(cfg.payload_seed, count * cfg.n, start=first_frame * cfg.n).reshape(count, cfg.n)

def gen_frame_bits(cfg, first_frame, count, schedule=None):
    schedule = schedule or cfg.schedule()
    payloads = gen_payload_bits(cfg, first_frame, count)
    frames = np.empty((count, cfg.frame_bits), dtype=np.uint8)
    frames[:, cfg.k:] = payloads
    for i in range(count):
        frames[i, :cfg.k] = schedule.syncword_for_frame(first_frame + i).bits.bits
    return frames.ravel(), payloads

def gen_frames(cfg):
    cfg.validate()
    stream_bits, payload_bits = gen_frame_bits(cfg, 0, cfg.frames)
    payloads = [BitStream.from_bits(p) for p in payload_bits]
    return payloads, BitStream.from_bits(stream_bits)
