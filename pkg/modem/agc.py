from numba import njit
import numpy as np

AGC_MAX_GAIN = 65536.0

class Agc:
    """Power-tracking automatic gain control ahead of the synchronisation loops.

    A one-pole average of |x|^2 follows the fading envelope; each sample is
    scaled so that this average sits at reference^2.
    """

    def __init__(self, params):
        params.validate()
        self.rate = params.agc_rate
        self.reference = params.agc_reference
        self.power = params.agc_reference ** 2

    def process(self, x):
        out, self.power = fast_agc(np.asarray(x, dtype=np.complex128), self.power, self.rate, self.reference)
        return out

def agc(rx, params):
    return rx.with_samples(Agc(params).process(rx.samples))

@njit(cache=True)
def fast_agc(x, power, rate, reference):
    out = np.empty_like(x)
    for j in range(x.shape[0]):
        power += rate * (x[j].real * x[j].real + x[j].imag * x[j].imag - power)
        if power * AGC_MAX_GAIN * AGC_MAX_GAIN > reference * reference:
            out[j] = x[j] * (reference / np.sqrt(power))
        else:
            out[j] = x[j] * AGC_MAX_GAIN
    return out, power
