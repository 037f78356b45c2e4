from dataclasses import dataclass

from framing.bitstream import BitStream
from utils.errors import ConfigurationError
from utils.rng import splitmix64_top_bits, splitmix64_output, MASK_64

@dataclass(frozen=True)
class Syncword:
    bits: BitStream
    k: int
    seed: int

    def __len__(self):
        return self.k

def validate_syncword_length(k):
    if k < 2 or k % 2:
        raise ConfigurationError(f"Syncword length must be even and at least 2 (QPSK carries 2 bits/symbol), got k={k}")

def gen_syncword(k, seed):
    validate_syncword_length(k)
    seed = int(seed) & MASK_64
    return Syncword(BitStream.from_bits(splitmix64_top_bits(seed, k)), k, seed)

def refresh_seed(sync_seed, block):
    # block 0 keeps the configured seed, later blocks take successive outputs of it
    if block == 0:
        return int(sync_seed) & MASK_64
    return splitmix64_output(sync_seed, block - 1)

class SyncSchedule:
    """Syncword in force for each block of `refresh_interval` frames."""

    def __init__(self, k, sync_seed, refresh_interval=0):
        validate_syncword_length(k)
        self.k = k
        self.sync_seed = int(sync_seed) & MASK_64
        self.refresh_interval = refresh_interval
        self._cache = {}

    def block_of_frame(self, frame_idx):
        if self.refresh_interval <= 0:
            return 0
        return frame_idx // self.refresh_interval

    def syncword(self, block=0):
        if block not in self._cache:
            self._cache[block] = gen_syncword(self.k, refresh_seed(self.sync_seed, block))
        return self._cache[block]

    def syncword_for_frame(self, frame_idx):
        return self.syncword(self.block_of_frame(frame_idx))

    def num_blocks(self, frames):
        if self.refresh_interval <= 0 or frames == 0:
            return 1
        return (frames + self.refresh_interval - 1) // self.refresh_interval
