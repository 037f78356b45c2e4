import logging

import numpy as np

from channel.fading import fader_for
from channel.impairments import NoiseSource, FrequencyShifter, Resampler
from modem.iq import IqStream, quantise

logger = logging.getLogger(__name__)

class Channel:
    """Streaming channel: fading, frequency offset, timing offset, then AWGN.

    Output samples are quantised to complex64, the precision of an IQ file.
    """

    def __init__(self, params):
        params.validate()
        self.params = params
        self.fader = fader_for(params) if params.fading else None
        self.shifter = FrequencyShifter(params.freq_offset_norm)
        self.resampler = Resampler(params.timing_ratio)
        self.noise = NoiseSource(params.noise_voltage, params.noise_seed)

    def _after_resampler(self, x):
        return quantise(self.noise.process(x))

    def process(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if self.fader is not None:
            x = self.fader.process(x)
        x = self.shifter.process(x)
        return self._after_resampler(self.resampler.process(x))

    def flush(self):
        return self._after_resampler(self.resampler.flush())

def apply_channel(x, params):
    if params.is_transparent():
        logger.debug("All channel impairments disabled, passing the stream through")
    ch = Channel(params)
    out = np.concatenate((ch.process(x.samples), ch.flush()))
    return IqStream(out, sample_rate=x.sample_rate, sps=x.sps, meta=dict(x.meta))

def channel_meta(params):
    return {"channel_" + key: value for key, value in params.to_dict().items()}
