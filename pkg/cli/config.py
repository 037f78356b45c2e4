import os
import dataclasses
from dataclasses import dataclass, field
from typing import List

import numpy as np
from dataclasses_json import dataclass_json

from channel.params import ChannelParams
from framing.frames import FrameConfig
from modem.params import ModemParams
from utils.errors import ConfigurationError
from utils.io import load_json, parse_key_values

DEFAULT_SETTINGS = 'settings_sweep.json'
TRUE_WORDS = ("true", "1", "yes", "on")
FALSE_WORDS = ("false", "0", "no", "off")

@dataclass_json
@dataclass
class SweepSpec:
    noise_start: float = 0.4
    noise_stop: float = 1.1
    noise_step: float = 0.1
    repeats: int = 1
    syncwords: List[List[int]] = field(default_factory=lambda: [[300, 210], [500, 350]])
    delta: float = 0.3
    workers: int = 1
    chunk_frames: int = 256

    def noise_voltages(self):
        count = int(np.floor((self.noise_stop - self.noise_start) / self.noise_step + 1e-9)) + 1
        return [round(self.noise_start + i * self.noise_step, 10) for i in range(count)]

    def validate(self):
        if self.noise_step <= 0:
            raise ConfigurationError(f"Sweep step must be positive, got {self.noise_step}")
        if self.noise_stop < self.noise_start:
            raise ConfigurationError(f"Sweep stop {self.noise_stop} lies below start {self.noise_start}")
        if self.noise_start < 0:
            raise ConfigurationError(f"Noise voltages must be >= 0, got {self.noise_start}")
        if self.repeats < 1:
            raise ConfigurationError(f"repeats must be >= 1, got {self.repeats}")
        if not self.syncwords:
            raise ConfigurationError("Sweep needs at least one syncword (k, T) pair")
        for pair in self.syncwords:
            if len(pair) != 2 or not 0 < pair[1] <= pair[0]:
                raise ConfigurationError(f"Invalid syncword pair chosen: {pair}")
        if not 0.0 <= self.delta < 0.5:
            raise ConfigurationError(f"delta must lie in [0, 0.5), got {self.delta}")
        if self.workers < 1 or self.chunk_frames < 1:
            raise ConfigurationError("workers and chunk_frames must be >= 1")
        return self

@dataclass_json
@dataclass
class RunConfig:
    frame: FrameConfig = field(default_factory=FrameConfig)
    modem: ModemParams = field(default_factory=ModemParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    output_dir: str = "results"
    csv_name: str = "fser.csv"
    plot_name: str = "fser.svg"
    master_seed: int = 0x5EED

    @property
    def csv_path(self):
        return os.path.join(self.output_dir, self.csv_name)

    @property
    def plot_path(self):
        return os.path.join(self.output_dir, self.plot_name)

    def frame_for(self, k, threshold, **seeds):
        return dataclasses.replace(self.frame, k=k, threshold=threshold, threshold_ratio=None, **seeds)

    def validate(self):
        self.frame.validate()
        self.modem.validate()
        self.channel.validate()
        self.sweep.validate()
        for k, threshold in self.sweep.syncwords:
            self.frame_for(k, threshold).validate()
        return self

def parse_bool(text):
    text = text.strip().lower()
    if text in TRUE_WORDS:
        return True
    if text in FALSE_WORDS:
        return False
    raise ConfigurationError(f"Expected a boolean, got '{text}'")

def parse_pairs(text):
    # "300:210,500:350"
    try:
        return [[int(a, 0), int(b, 0)] for a, b in (item.split(':') for item in text.split(',') if item.strip())]
    except ValueError:
        raise ConfigurationError(f"Expected k:T pairs separated by commas, got '{text}'")

def coerce(current, text, key):
    if not isinstance(text, str):
        return text
    try:
        if isinstance(current, bool):
            return parse_bool(text)
        if isinstance(current, int):
            return int(text, 0)
        if isinstance(current, float):
            return float(text)
        if isinstance(current, list):
            return parse_pairs(text)
        if current is None:
            return None if text.lower() in ("none", "null", "") else float(text)
    except ValueError:
        raise ConfigurationError(f"Invalid value for {key}: '{text}'")
    return text

def apply_setting(tree, key, value):
    node = tree
    parts = key.split('.')
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            raise ConfigurationError(f"Unknown configuration section '{part}' in '{key}'")
        node = node[part]
    if parts[-1] not in node:
        raise ConfigurationError(f"Unknown configuration key '{key}'")
    node[parts[-1]] = coerce(node[parts[-1]], value, key)

def flatten(tree, prefix=""):
    items = []
    for key, value in tree.items():
        name = prefix + key
        if isinstance(value, dict):
            items.extend(flatten(value, name + "."))
        else:
            items.append((name, value))
    return items

def load_settings(path):
    if path.endswith('.json'):
        return flatten(load_json(path))
    return list(parse_key_values(path).items())

def load_run_config(path=None, overrides=()):
    tree = RunConfig().to_dict()
    if path is None and os.path.exists(DEFAULT_SETTINGS):
        path = DEFAULT_SETTINGS
    if path is not None:
        for key, value in load_settings(path):
            apply_setting(tree, key, value)
    for item in overrides:
        if '=' not in item:
            raise ConfigurationError(f"Override must look like section.field=value, got '{item}'")
        key, value = item.split('=', 1)
        apply_setting(tree, key.strip(), value.strip())
    return RunConfig.from_dict(tree)
