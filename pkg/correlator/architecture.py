from dataclasses import dataclass

import numpy as np

from correlator.correlation import as_bits, variant_words, fast_scan
from correlator.detector import DetectionEvent
from utils.errors import ConfigurationError

@dataclass
class ArchState:
    """Behavioural model of the register + adder-tree correlator.

    `register` always holds the last m+k-1 consumed bits (zeros before the
    stream starts); windows starting before `resume_pos` are masked while a
    payload is being captured.
    """
    register: np.ndarray
    consumed: int
    resume_pos: int
    k: int
    m: int
    n: int
    threshold: int
    continuous: bool
    sync_words: np.ndarray
    masks: np.ndarray

    @property
    def capture_remaining(self):
        return max(0, self.resume_pos - self.consumed)

    @property
    def register_bits(self):
        return self.register.shape[0]

def arch_init(cfg, sync):
    cfg.validate()
    words, masks = variant_words(sync, cfg.rotations)
    return ArchState(register=np.zeros(cfg.m + cfg.k - 1, dtype=np.uint8), consumed=0, resume_pos=0,
                     k=cfg.k, m=cfg.m, n=cfg.n, threshold=cfg.threshold, continuous=cfg.continuous,
                     sync_words=words, masks=masks)

def arch_step(state, new_bits):
    new_bits = as_bits(new_bits)
    s = new_bits.shape[0]
    if s == 0:
        return state, []
    if s > state.m:
        raise ConfigurationError(f"arch_step takes at most m={state.m} bits per cycle, got {s}")

    width = state.register_bits
    state.register = np.concatenate((state.register, new_bits))[-width:]
    previous = state.consumed
    state.consumed += s

    # windows completed by this cycle start in [previous-k+1, consumed-k]
    base = state.consumed - width
    first = max(previous - state.k + 1, 0)
    pos, corr, rot, resume = fast_scan(state.register, state.sync_words, state.masks, state.k, state.m,
                                       state.threshold, state.n, state.continuous,
                                       first - base, state.m, state.resume_pos - base, base)
    state.resume_pos = int(resume) + base
    events = [DetectionEvent(int(p) + base, int(c), int(r)) for p, c, r in zip(pos, corr, rot)]
    return state, events

def arch_run(stream, cfg, sync):
    bits = as_bits(stream)
    state = arch_init(cfg, sync)
    events = []
    for lo in range(0, bits.shape[0], cfg.m):
        state, step_events = arch_step(state, bits[lo:lo + cfg.m])
        events.extend(step_events)
    return events

@dataclass
class ResourceReport:
    xnor: int
    adders: int
    comparators: int
    register_bits: int
    adder_depth: int
    comparator_depth: int
    bits_per_cycle: int

    def line_rate(self, clock_hz):
        return self.bits_per_cycle * clock_hz

def ceil_log2(x):
    return (x - 1).bit_length()

def arch_resources(k, m):
    if k < 2:
        raise ConfigurationError(f"Syncword length must be at least 2, got k={k}")
    if m < 1:
        raise ConfigurationError(f"Parallelism m must be at least 1, got m={m}")
    # m-1 comparators select the best window, one more applies the threshold
    return ResourceReport(xnor=m * k, adders=m * (k - 1), comparators=m, register_bits=m + k - 1,
                          adder_depth=ceil_log2(k), comparator_depth=ceil_log2(m), bits_per_cycle=m)
