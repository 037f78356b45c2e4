from dataclasses import dataclass

from dataclasses_json import dataclass_json

from utils.errors import ConfigurationError

@dataclass_json
@dataclass
class ModemParams:
    sps: int = 4
    excess_bw: float = 0.35
    rrc_taps: int = 45
    sync_loop_bw: float = 0.045
    sync_damping: float = 1.0
    sync_max_deviation: float = 1.5
    costas_loop_bw: float = 0.0628
    costas_max_freq: float = 1.0
    agc_rate: float = 0.02
    agc_reference: float = 1.0
    symbol_rate: float = 250e3

    @property
    def sample_rate(self):
        return self.symbol_rate * self.sps

    def validate(self):
        if self.sps < 2:
            raise ConfigurationError(f"Oversampled modem needs sps >= 2, got {self.sps}")
        if not 0.0 < self.excess_bw <= 1.0:
            raise ConfigurationError(f"RRC roll-off must lie in (0, 1], got {self.excess_bw}")
        if self.rrc_taps < 1 or self.rrc_taps % 2 == 0:
            raise ConfigurationError(f"RRC filter length must be odd, got {self.rrc_taps}")
        for name in ("sync_loop_bw", "sync_damping", "costas_loop_bw", "sync_max_deviation", "costas_max_freq", "symbol_rate",
                     "agc_rate", "agc_reference"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.agc_rate > 1.0:
            raise ConfigurationError(f"agc_rate must be at most 1, got {self.agc_rate}")
        return self
