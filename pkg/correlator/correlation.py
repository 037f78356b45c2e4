from numba import njit
import numpy as np

from framing.bitstream import BitStream
from framing.syncword import Syncword
from modem.constellation import rotate_bits
from utils.errors import LengthMismatchError, ConfigurationError

ZERO = np.uint64(0)
ONE = np.uint64(1)
TWO = np.uint64(2)
FOUR = np.uint64(4)
FIFTY_SIX = np.uint64(56)
ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
M1 = np.uint64(0x5555555555555555)
M2 = np.uint64(0x3333333333333333)
M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
H01 = np.uint64(0x0101010101010101)

NUM_ROTATIONS = 4

def as_bits(x):
    if isinstance(x, Syncword):
        return x.bits.bits
    if isinstance(x, BitStream):
        return x.bits
    return np.asarray(x, dtype=np.uint8)

def pack_words(bits):
    # MSB-first 64-bit words; the mask keeps only the valid bits of the last word
    bits = np.asarray(bits, dtype=np.uint8)
    n_words = (bits.shape[0] + 63) // 64
    padded = np.zeros(n_words * 64, dtype=np.uint8)
    padded[:bits.shape[0]] = bits
    words = np.packbits(padded).view('>u8').astype(np.uint64)

    valid = np.zeros(n_words * 64, dtype=np.uint8)
    valid[:bits.shape[0]] = 1
    masks = np.packbits(valid).view('>u8').astype(np.uint64)
    return words, masks

def rotated_variants(sync):
    bits = as_bits(sync)
    if bits.shape[0] % 2:
        raise ConfigurationError(f"Rotation variants need an even syncword length, got {bits.shape[0]}")
    return [BitStream.from_bits(rotate_bits(bits, rot)) for rot in range(NUM_ROTATIONS)]

def variant_words(sync, rotations=True):
    variants = rotated_variants(sync) if rotations else [BitStream.from_bits(as_bits(sync))]
    packed = [pack_words(v.bits) for v in variants]
    words = np.stack([w for w, _ in packed])  # R x n_words
    masks = packed[0][1]
    return words, masks

def correlate(window, sync):
    a = as_bits(window)
    b = as_bits(sync)
    if a.shape[0] != b.shape[0]:
        raise LengthMismatchError(f"Window has {a.shape[0]} bits, syncword has {b.shape[0]}")
    a_words, masks = pack_words(a)
    b_words, _ = pack_words(b)
    return int(fast_correlate_words(a_words, b_words, masks, a.shape[0]))

def correlation_profile(stream, sync):
    bits = as_bits(stream)
    sync_bits = as_bits(sync)
    words, masks = pack_words(sync_bits)
    return fast_correlation_profile(bits, words, masks, sync_bits.shape[0])

@njit(cache=True)
def fast_popcount64(x):
    x = x - ((x >> ONE) & M1)
    x = (x & M2) + ((x >> TWO) & M2)
    x = (x + (x >> FOUR)) & M4
    return np.int64((x * H01) >> FIFTY_SIX)

@njit(cache=True)
def fast_correlate_words(a_words, b_words, masks, k):
    mismatches = 0
    for j in range(a_words.shape[0]):
        mismatches += fast_popcount64((a_words[j] ^ b_words[j]) & masks[j])
    return k - mismatches

@njit(cache=True)
def fast_load_word(bits, start):
    n = bits.shape[0]
    w = ZERO
    for i in range(64):
        w = w << ONE
        idx = start + i
        if idx < n and bits[idx] != 0:
            w = w | ONE
    return w

@njit(cache=True)
def fast_load_registers(bits, p, regs):
    for j in range(regs.shape[0]):
        regs[j] = fast_load_word(bits, p + 64 * j)

@njit(cache=True)
def fast_shift_registers(bits, p, regs):
    # regs hold the words starting at p-1; advance them to p
    n = bits.shape[0]
    for j in range(regs.shape[0]):
        idx = p + 64 * j + 63
        w = regs[j] << ONE
        if idx < n and bits[idx] != 0:
            w = w | ONE
        regs[j] = w

@njit(cache=True)
def fast_correlation_profile(bits, sync_words, masks, k):
    n_pos = bits.shape[0] - k + 1
    if n_pos <= 0:
        return np.zeros(0, dtype=np.int64)
    corrs = np.empty(n_pos, dtype=np.int64)
    regs = np.zeros(sync_words.shape[0], dtype=np.uint64)
    fast_load_registers(bits, 0, regs)
    for p in range(n_pos):
        if p > 0:
            fast_shift_registers(bits, p, regs)
        corrs[p] = fast_correlate_words(regs, sync_words, masks, k)
    return corrs

@njit(cache=True)
def fast_scan(bits, sync_words, masks, k, m, threshold, n, continuous, p_start, p_stop, resume, base):
    """Block-parallel threshold detection over window starts [p_start, p_stop).

    Positions are local to `bits`; `base` is the absolute index of bits[0] and
    fixes the block alignment: a block is every window completing in the same
    m-bit cycle. Returns event arrays and the updated resume position.
    """
    n_rot = sync_words.shape[0]
    n_words = sync_words.shape[1]
    p_end = min(p_stop, bits.shape[0] - k + 1)
    p = max(p_start, resume)

    if p_end <= p:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty, resume

    capacity = (p_end - 1 + base + k - 1) // m - (p + base + k - 1) // m + 1
    ev_pos = np.empty(capacity, dtype=np.int64)
    ev_corr = np.empty(capacity, dtype=np.int64)
    ev_rot = np.empty(capacity, dtype=np.int64)
    n_events = 0

    regs = np.zeros(n_words, dtype=np.uint64)
    reg_pos = -2
    best_corr = np.empty(n_rot, dtype=np.int64)
    best_pos = np.empty(n_rot, dtype=np.int64)

    while p < p_end:
        block = (p + base + k - 1) // m
        block_last = min((block + 1) * m - k - base, p_end - 1)

        for r in range(n_rot):
            best_corr[r] = -1
            best_pos[r] = -1

        for q in range(p, block_last + 1):
            if reg_pos == q - 1:
                fast_shift_registers(bits, q, regs)
            else:
                fast_load_registers(bits, q, regs)
            reg_pos = q

            for r in range(n_rot):
                c = fast_correlate_words(regs, sync_words[r], masks, k)
                if c > best_corr[r]:  # earliest position wins ties
                    best_corr[r] = c
                    best_pos[r] = q

        sel = 0
        for r in range(1, n_rot):
            if best_corr[r] > best_corr[sel]:  # lowest rotation wins ties
                sel = r

        next_p = block_last + 1
        if best_corr[sel] >= threshold:
            ev_pos[n_events] = best_pos[sel]
            ev_corr[n_events] = best_corr[sel]
            ev_rot[n_events] = sel
            n_events += 1
            if not continuous:
                resume = best_pos[sel] + k + n
                next_p = max(next_p, resume)
        p = next_p

    return ev_pos[:n_events], ev_corr[:n_events], ev_rot[:n_events], resume
