class SimulationError(ValueError):
    pass

class ConfigurationError(SimulationError):
    pass

class FormatError(SimulationError):
    pass

class LengthMismatchError(SimulationError):
    pass
