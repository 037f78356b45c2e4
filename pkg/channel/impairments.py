import logging

from numba import njit
import numpy as np

from modem.iq import IqStream
from modem.timing import fast_cubic
from utils.errors import ConfigurationError
from utils.rng import box_muller

logger = logging.getLogger(__name__)

def samples_of(x):
    if isinstance(x, IqStream):
        return x.samples
    return np.asarray(x, dtype=np.complex128)

def noise_samples(noise_voltage, seed, count, start=0):
    # sample j of a seed is always built from the same generator outputs
    g1, g2 = box_muller(seed, count, start=start)
    return (noise_voltage / np.sqrt(2.0)) * (g1 + 1j * g2)

def awgn(x, noise_voltage, seed):
    if noise_voltage < 0:
        raise ConfigurationError(f"noise_voltage must be >= 0, got {noise_voltage}")
    if noise_voltage == 0:
        return x
    return x.with_samples(x.samples + noise_samples(noise_voltage, seed, len(x)))

def rotator(freq_offset_norm, start, count):
    # phase kept in cycles modulo 1 so long streams do not lose precision
    cycles = np.mod(freq_offset_norm * np.arange(start, start + count, dtype=np.float64), 1.0)
    return np.exp(2j * np.pi * cycles)

def freq_offset(x, freq_offset_norm):
    if freq_offset_norm == 0:
        return x
    return x.with_samples(x.samples * rotator(freq_offset_norm, 0, len(x)))

class NoiseSource:
    def __init__(self, noise_voltage, seed):
        self.noise_voltage = noise_voltage
        self.seed = seed
        self.offset = 0

    def process(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if self.noise_voltage > 0:
            x = x + noise_samples(self.noise_voltage, self.seed, x.shape[0], start=self.offset)
        self.offset += x.shape[0]
        return x

class FrequencyShifter:
    def __init__(self, freq_offset_norm):
        self.freq_offset_norm = freq_offset_norm
        self.offset = 0

    def process(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if self.freq_offset_norm != 0:
            x = x * rotator(self.freq_offset_norm, self.offset, x.shape[0])
        self.offset += x.shape[0]
        return x

class Resampler:
    """Cubic-interpolating resampler; output j sits at input time j * ratio."""

    def __init__(self, ratio):
        if ratio <= 0:
            raise ConfigurationError(f"Resampling ratio must be positive, got {ratio}")
        self.ratio = ratio
        self.buf = np.zeros(0, dtype=np.complex128)
        self.base = 0
        self.index = 0

    def _run(self, x, final):
        if self.ratio == 1.0:
            return np.asarray(x, dtype=np.complex128)
        buf = np.concatenate((self.buf, np.asarray(x, dtype=np.complex128)))
        out, self.index = fast_resample(buf, self.base, self.index, self.ratio, final)

        t = self.index * self.ratio
        keep_from = min(max(0, int(np.floor(t)) - 1 - self.base), buf.shape[0])
        self.buf = buf[keep_from:]
        self.base += keep_from
        return out

    def process(self, x):
        return self._run(x, False)

    def flush(self):
        return self._run(np.zeros(0, dtype=np.complex128), True)

def timing_offset(x, timing_ratio):
    if timing_ratio == 1.0:
        return x
    if not 0.99 <= timing_ratio <= 1.01:
        logger.warning("Timing ratio %.6f lies outside the modelled clock range [0.99, 1.01]", timing_ratio)
    r = Resampler(timing_ratio)
    return x.with_samples(np.concatenate((r.process(x.samples), r.flush())))

def snr_from_power(power, noise_voltage):
    if noise_voltage <= 0:
        return float('inf')
    if power == 0:
        return float('-inf')
    return float(10.0 * np.log10(power / noise_voltage ** 2))

def snr_from_noise_voltage(x, noise_voltage):
    samples = samples_of(x)
    power = float(np.mean(np.abs(samples) ** 2)) if samples.shape[0] else 0.0
    return snr_from_power(power, noise_voltage)

@njit(cache=True)
def fast_resample(buf, base, index, ratio, final):
    n = buf.shape[0]
    out = np.empty(int(n / ratio) + 4, dtype=np.complex128)
    count = 0
    while True:
        tl = index * ratio - base
        i = int(np.floor(tl))
        if final:
            if i >= n or (i == n - 1 and tl > i):
                break
        elif i + 2 >= n:
            break
        out[count] = fast_cubic(buf, tl)
        count += 1
        index += 1
    return out[:count], index
