import numpy as np

from utils.rng import splitmix64_uniform

FADING_CHUNK = 1 << 15

def arrival_angles(n_sinusoids):
    """Arrival angles pi*(n - 1/2) / (2N), n = 1..N, spread over one quadrant.

    Every path gets a distinct Doppler shift cos(alpha_n).
    """
    n = np.arange(1, n_sinusoids + 1)
    return np.pi * (n - 0.5) / (2.0 * n_sinusoids)

def initial_phases(n_sinusoids, seed):
    return 2.0 * np.pi * splitmix64_uniform(seed, n_sinusoids)

class RayleighFader:
    """Flat NLOS Rayleigh gain h[t] as a sum of N Doppler-shifted sinusoids.

    t counts samples from the first call, so the gain does not depend on how
    the stream is chunked.
    """

    def __init__(self, n_sinusoids, doppler_norm, seed):
        self.doppler = doppler_norm * np.cos(arrival_angles(n_sinusoids))
        self.phi = initial_phases(n_sinusoids, seed)
        self.scale = 1.0 / np.sqrt(n_sinusoids)
        self.offset = 0

    def gain(self, start, count):
        h = np.empty(count, dtype=np.complex128)
        for lo in range(0, count, FADING_CHUNK):
            hi = min(lo + FADING_CHUNK, count)
            t = np.arange(start + lo, start + hi, dtype=np.float64)
            cycles = np.mod(np.outer(t, self.doppler), 1.0)
            h[lo:hi] = self.scale * np.exp(1j * (2.0 * np.pi * cycles + self.phi)).sum(axis=1)
        return h

    def process(self, x):
        x = np.asarray(x, dtype=np.complex128)
        y = x * self.gain(self.offset, x.shape[0])
        self.offset += x.shape[0]
        return y

def fader_for(params):
    return RayleighFader(params.n_sinusoids, params.doppler_norm, params.fading_seed)

def fading_gain(params, count, start=0):
    return fader_for(params).gain(start, count)

def rayleigh_fade(x, params):
    params.validate()
    return x.with_samples(fader_for(params).process(x.samples))
