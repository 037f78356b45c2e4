from numba import njit
import numpy as np

from utils.errors import ConfigurationError

COSTAS_DAMPING = np.sqrt(2.0) / 2.0

def costas_gains(loop_bw, damping=COSTAS_DAMPING):
    denom = 1.0 + 2.0 * damping * loop_bw + loop_bw ** 2
    alpha = 4.0 * damping * loop_bw / denom
    beta = 4.0 * loop_bw ** 2 / denom
    return alpha, beta

class CostasLoop:
    """Fourth-order Costas loop; locks to one of the four QPSK rotations."""

    def __init__(self, params):
        params.validate()
        self.alpha, self.beta = costas_gains(params.costas_loop_bw)
        self.max_freq = params.costas_max_freq
        self.phase = 0.0
        self.freq = 0.0

    def process(self, symbols):
        out, self.phase, self.freq = fast_costas(
            np.asarray(symbols, dtype=np.complex128), self.phase, self.freq, self.alpha, self.beta, self.max_freq)
        return out

def costas(symbols, params):
    if symbols.sps != 1:
        raise ConfigurationError(f"Costas loop runs at symbol rate, got sps={symbols.sps}")
    return symbols.with_samples(CostasLoop(params).process(symbols.samples))

@njit(cache=True)
def fast_phase_error(y):
    s_re = 1.0 if y.real >= 0.0 else -1.0
    s_im = 1.0 if y.imag >= 0.0 else -1.0
    # phase error independent of the symbol amplitude
    amp = abs(y)
    if amp == 0.0:
        return 0.0
    e = (s_re * y.imag - s_im * y.real) / amp
    if e > 1.0:
        return 1.0
    if e < -1.0:
        return -1.0
    return e

@njit(cache=True)
def fast_costas(x, phase, freq, alpha, beta, max_freq):
    two_pi = 2.0 * np.pi
    out = np.empty_like(x)
    for j in range(x.shape[0]):
        y = x[j] * np.exp(-1j * phase)
        out[j] = y
        e = fast_phase_error(y)

        freq += beta * e
        if freq > max_freq:
            freq = max_freq
        elif freq < -max_freq:
            freq = -max_freq

        phase += freq + alpha * e
        while phase > np.pi:
            phase -= two_pi
        while phase < -np.pi:
            phase += two_pi
    return out, phase, freq
