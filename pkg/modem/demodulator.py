import numpy as np

from framing.bitstream import BitStream
from modem.agc import agc, Agc
from modem.carrier import costas, CostasLoop
from modem.constellation import map_bits, decide_bits, hard_decide
from modem.filters import PulseShaper, MatchedFilter, matched_filter
from modem.iq import IqStream, quantise
from modem.timing import symbol_sync, SymbolSynchronizer

class Modulator:
    """Streaming transmitter: Gray-mapped QPSK followed by RRC pulse shaping."""

    def __init__(self, params):
        params.validate()
        self.params = params
        self.shaper = PulseShaper(params)
        self.bits_in = 0

    def process(self, bits):
        symbols = map_bits(bits)
        self.bits_in += 2 * symbols.shape[0]
        return quantise(self.shaper.process(symbols))

    def flush(self):
        # no filter tail for a stream that never started
        if self.bits_in == 0:
            return np.zeros(0, dtype=np.complex128)
        return quantise(self.shaper.flush())

class Demodulator:
    """Streaming receiver: matched filter, AGC, symbol sync, Costas loop, hard decisions."""

    def __init__(self, params):
        params.validate()
        self.params = params
        self.matched = MatchedFilter(params)
        self.agc = Agc(params)
        self.sync = SymbolSynchronizer(params)
        self.carrier = CostasLoop(params)
        self.samples_in = 0

    def _decide(self, symbols):
        return decide_bits(self.carrier.process(symbols))

    def process(self, samples):
        samples = np.asarray(samples)
        self.samples_in += samples.shape[0]
        return self._decide(self.sync.process(self.agc.process(self.matched.process(samples))))

    def flush(self):
        if self.samples_in == 0:
            return np.zeros(0, dtype=np.uint8)
        tail = self.sync.process(self.agc.process(self.matched.flush()))
        return self._decide(np.concatenate((tail, self.sync.flush())))

def modulate(bits, params):
    if isinstance(bits, BitStream):
        bits = bits.bits
    mod = Modulator(params)
    samples = np.concatenate((mod.process(bits), mod.flush()))
    return IqStream(samples, sample_rate=params.sample_rate, sps=params.sps)

def demodulate(rx, params):
    if len(rx) == 0:
        return BitStream.empty()
    filtered = agc(matched_filter(rx, params), params)
    return hard_decide(costas(symbol_sync(filtered, params), params))
