import numpy as np

from framing.bitstream import BitStream
from modem.iq import IqStream
from utils.errors import ConfigurationError

# Gray map, pair (b1, b0): b1 selects the sign of Q, b0 the sign of I.
#   00 -> (+1+1j)/sqrt2   01 -> (-1+1j)/sqrt2   11 -> (-1-1j)/sqrt2   10 -> (+1-1j)/sqrt2
AMPLITUDE = 1.0 / np.sqrt(2.0)
ROTATIONS = np.array((1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j))

def map_bits(bits):
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[0] % 2:
        raise ConfigurationError(f"QPSK needs an even number of bits, got {bits.shape[0]}")
    b1 = bits[0::2].astype(np.float64)
    b0 = bits[1::2].astype(np.float64)
    return AMPLITUDE * ((1.0 - 2.0 * b0) + 1j * (1.0 - 2.0 * b1))

def decide_bits(symbols):
    symbols = np.asarray(symbols)
    bits = np.empty(2 * symbols.shape[0], dtype=np.uint8)
    # exact zeros decide toward the positive half-plane
    bits[0::2] = symbols.imag < 0
    bits[1::2] = symbols.real < 0
    return bits

def qpsk_map(bits, sample_rate=1.0):
    if isinstance(bits, BitStream):
        bits = bits.bits
    return IqStream(map_bits(bits), sample_rate=sample_rate, sps=1)

def hard_decide(symbols):
    if isinstance(symbols, IqStream):
        if symbols.sps != 1:
            raise ConfigurationError(f"hard_decide needs symbol-rate input (sps=1), got sps={symbols.sps}")
        symbols = symbols.samples
    return BitStream.from_bits(decide_bits(symbols))

def rotate_bits(bits, rot):
    # bits the receiver decodes when the constellation is turned by rot * 90 degrees
    return decide_bits(map_bits(bits) * ROTATIONS[rot % 4])

def derotate_bits(bits, rot):
    return rotate_bits(bits, -rot % 4)
