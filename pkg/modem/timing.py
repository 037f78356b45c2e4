import logging

from numba import njit
import numpy as np

from modem.filters import cascade_pulse
from modem.iq import IqStream
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

PRE_HISTORY = 3

def loop_gains(loop_bw, damping, detector_gain):
    # second-order PI loop, normalised bandwidth per update
    theta = loop_bw / (damping + 1.0 / (4.0 * damping))
    denom = 1.0 + 2.0 * damping * theta + theta ** 2
    kp = 4.0 * damping * theta / denom / detector_gain
    ki = 4.0 * theta ** 2 / denom / detector_gain
    return kp, ki

def sign_slope_detector_gain(params):
    # slope of the sign-times-slope S-curve per sample of timing error, unit-energy symbols
    g = cascade_pulse(params)
    c = params.rrc_taps - 1
    curvature = g[c - 1] - 2.0 * g[c] + g[c + 1]
    return -np.sqrt(2.0) * curvature

class SymbolSynchronizer:
    """Closed-loop timing recovery with the sign-of-maximum-likelihood detector.

    e = sgn(Re x)·Re x' + sgn(Im x)·Im x', x' from a central difference of
    cubic-interpolated samples; a PI loop steers the strobe instant.
    """

    def __init__(self, params):
        params.validate()
        self.sps = params.sps
        self.max_dev = params.sync_max_deviation
        self.detector_gain = sign_slope_detector_gain(params)
        self.kp, self.ki = loop_gains(params.sync_loop_bw, params.sync_damping, self.detector_gain)
        self.buf = np.zeros(PRE_HISTORY, dtype=np.complex128)
        self.base = -PRE_HISTORY
        self.t = 0.0
        self.integrator = 0.0
        self.symbols_out = 0

    def _run(self, x, final):
        buf = np.concatenate((self.buf, np.asarray(x, dtype=np.complex128)))
        out, self.t, self.integrator = fast_symbol_sync(
            buf, self.base, self.t, self.integrator, float(self.sps), self.kp, self.ki, self.max_dev, final)

        keep_from = max(0, int(np.floor(self.t)) - self.base - PRE_HISTORY)
        keep_from = min(keep_from, buf.shape[0])
        self.buf = buf[keep_from:]
        self.base += keep_from
        self.symbols_out += out.shape[0]
        return out

    def process(self, x):
        return self._run(x, False)

    def flush(self):
        return self._run(np.zeros(0, dtype=np.complex128), True)

def symbol_sync(rx, params):
    if rx.sps < 2:
        raise ConfigurationError(f"symbol_sync needs an oversampled stream, got sps={rx.sps}")
    if rx.sps != params.sps:
        raise ConfigurationError(f"Stream has sps={rx.sps}, modem parameters say sps={params.sps}")

    settling = 2.0 / params.sync_loop_bw
    if len(rx) / rx.sps < settling:
        logger.warning("Symbol sync input holds %.0f symbols, less than one loop settling period (%.0f)", len(rx) / rx.sps, settling)

    sync = SymbolSynchronizer(params)
    out = np.concatenate((sync.process(rx.samples), sync.flush()))
    return IqStream(out, sample_rate=rx.sample_rate / rx.sps, sps=1)

@njit(cache=True)
def fast_sample(buf, j):
    if j < 0 or j >= buf.shape[0]:
        return 0j
    return buf[j]

@njit(cache=True)
def fast_cubic(buf, t):
    i = int(np.floor(t))
    mu = t - i
    c_m1 = -mu * (mu - 1.0) * (mu - 2.0) / 6.0
    c_0 = (mu + 1.0) * (mu - 1.0) * (mu - 2.0) / 2.0
    c_1 = -(mu + 1.0) * mu * (mu - 2.0) / 2.0
    c_2 = (mu + 1.0) * mu * (mu - 1.0) / 6.0
    return (c_m1 * fast_sample(buf, i - 1) + c_0 * fast_sample(buf, i)
            + c_1 * fast_sample(buf, i + 1) + c_2 * fast_sample(buf, i + 2))

@njit(cache=True)
def fast_sign(x):
    return 1.0 if x >= 0.0 else -1.0

@njit(cache=True)
def fast_symbol_sync(buf, base, t, integrator, sps, kp, ki, max_dev, final):
    n = buf.shape[0]
    min_step = max(sps - max_dev, 0.5)
    out = np.empty(int(n / min_step) + 8, dtype=np.complex128)
    count = 0

    while True:
        tl = t - base
        i = int(np.floor(tl))
        if final:
            if i >= n:
                break
        elif i + 3 >= n:
            break

        x = fast_cubic(buf, tl)
        dx = 0.5 * (fast_cubic(buf, tl + 1.0) - fast_cubic(buf, tl - 1.0))
        out[count] = x
        count += 1

        e = fast_sign(x.real) * dx.real + fast_sign(x.imag) * dx.imag
        v = kp * e + integrator
        integrator += ki * e
        if v > max_dev:
            v = max_dev
        elif v < -max_dev:
            v = -max_dev
        t += sps + v

    return out[:count], t, integrator
