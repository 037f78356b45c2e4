from dataclasses import dataclass

from dataclasses_json import dataclass_json

from utils.errors import ConfigurationError
from utils.rng import splitmix64_output

@dataclass_json
@dataclass
class ChannelParams:
    noise_voltage: float = 0.0
    n_sinusoids: int = 16
    doppler_norm: float = 1e-3
    freq_offset_norm: float = 0.0
    timing_ratio: float = 1.0
    seed: int = 0xC4A77E1
    fading: bool = True

    @property
    def fading_seed(self):
        return splitmix64_output(self.seed, 0)

    @property
    def noise_seed(self):
        return splitmix64_output(self.seed, 1)

    def is_transparent(self):
        return (not self.fading and self.noise_voltage == 0.0
                and self.freq_offset_norm == 0.0 and self.timing_ratio == 1.0)

    def validate(self):
        if self.noise_voltage < 0:
            raise ConfigurationError(f"noise_voltage must be >= 0, got {self.noise_voltage}")
        if self.n_sinusoids < 1:
            raise ConfigurationError(f"n_sinusoids must be >= 1, got {self.n_sinusoids}")
        if not 0.0 <= self.doppler_norm < 0.5:
            raise ConfigurationError(f"doppler_norm must lie in [0, 0.5), got {self.doppler_norm}")
        if not -0.5 < self.freq_offset_norm < 0.5:
            raise ConfigurationError(f"freq_offset_norm must lie in (-0.5, 0.5), got {self.freq_offset_norm}")
        if not 0.99 <= self.timing_ratio <= 1.01:
            raise ConfigurationError(f"timing_ratio must lie in [0.99, 1.01], got {self.timing_ratio}")
        return self
