import numpy as np
from scipy.signal import lfilter

from modem.iq import IqStream
from utils.errors import ConfigurationError

def rrc_singularity_value(alpha):
    return (alpha / np.sqrt(2.0)) * ((1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * alpha))
                                      + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * alpha)))

def rrc_impulse(t, alpha):
    """Unnormalised root-raised-cosine pulse, t in symbol periods."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    h = np.empty_like(t)
    at_zero = np.abs(t) < 1e-12
    at_singularity = np.abs(np.abs(t) - 1.0 / (4.0 * alpha)) < 1e-12
    regular = ~(at_zero | at_singularity)

    tr = t[regular]
    h[regular] = (np.sin(np.pi * tr * (1.0 - alpha)) + 4.0 * alpha * tr * np.cos(np.pi * tr * (1.0 + alpha))) \
        / (np.pi * tr * (1.0 - (4.0 * alpha * tr) ** 2))
    h[at_zero] = 1.0 - alpha + 4.0 * alpha / np.pi
    h[at_singularity] = rrc_singularity_value(alpha)
    return h

def rrc_taps(sps, alpha, ntaps):
    if not 0.0 < alpha <= 1.0:
        raise ConfigurationError(f"RRC roll-off must lie in (0, 1], got {alpha}")
    if ntaps < 1 or ntaps % 2 == 0:
        raise ConfigurationError(f"RRC filter length must be odd, got {ntaps}")
    t = (np.arange(ntaps) - (ntaps - 1) // 2) / float(sps)
    h = rrc_impulse(t, alpha)
    return h / np.sqrt(np.sum(h ** 2))

def cascade_pulse(params):
    # transmit + matched filter response, unit peak at index rrc_taps - 1
    h = rrc_taps(params.sps, params.excess_bw, params.rrc_taps)
    return np.convolve(h, h)

class FirFilter:
    """Streaming FIR filter; process() + flush() equals the full convolution."""

    def __init__(self, taps, upsample=1):
        self.taps = np.asarray(taps, dtype=np.float64)
        self.upsample = upsample
        self.zi = np.zeros(self.taps.shape[0] - 1, dtype=np.complex128)

    def _filter(self, x):
        if x.shape[0] == 0:
            return np.zeros(0, dtype=np.complex128)
        y, self.zi = lfilter(self.taps, 1.0, x.astype(np.complex128), zi=self.zi)
        return y

    def process(self, x):
        x = np.asarray(x)
        if self.upsample > 1:
            stuffed = np.zeros(x.shape[0] * self.upsample, dtype=np.complex128)
            stuffed[::self.upsample] = x
            x = stuffed
        return self._filter(x)

    def flush(self):
        return self._filter(np.zeros(self.taps.shape[0] - 1, dtype=np.complex128))

class PulseShaper(FirFilter):
    def __init__(self, params):
        # sqrt(sps) gain gives the shaped waveform unit mean power per sample
        taps = rrc_taps(params.sps, params.excess_bw, params.rrc_taps) * np.sqrt(params.sps)
        super().__init__(taps, upsample=params.sps)

class MatchedFilter(FirFilter):
    def __init__(self, params):
        # 1/sqrt(sps) restores unit symbol amplitude after the cascade
        taps = rrc_taps(params.sps, params.excess_bw, params.rrc_taps) / np.sqrt(params.sps)
        super().__init__(taps)

def run_filter(fir, x):
    if len(x) == 0:
        return np.zeros(0, dtype=np.complex128)
    return np.concatenate((fir.process(x), fir.flush()))

def pulse_shape(symbols, params):
    params.validate()
    out = run_filter(PulseShaper(params), symbols.samples)
    return IqStream(out, sample_rate=symbols.sample_rate * params.sps, sps=params.sps)

def matched_filter(rx, params):
    params.validate()
    out = run_filter(MatchedFilter(params), rx.samples)
    return rx.with_samples(out)

def ideal_decimate(filtered, params, count=None):
    # symbol instants of a pulse_shape -> matched_filter cascade
    start = params.rrc_taps - 1
    samples = filtered.samples[start::params.sps]
    if count is not None:
        samples = samples[:count]
    return IqStream(samples, sample_rate=filtered.sample_rate / params.sps, sps=1)
