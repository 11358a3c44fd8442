from dataclasses import asdict, dataclass, fields
import logging
from pathlib import Path

import numpy as np

from noise_channels import DECAY_FIELD, SWEEPABLE_KINDS, TIMED_KINDS
from qec_errors import ConfigError

OUTPUT_FORMATS = ("csv", "json")
GRID_SCALES = ("linear", "log")


@dataclass
class ExperimentConfig:
    """
    A sweep experiment: code, channel, grid, trial budget and output.

    The grid runs over ``epsilon`` for Pauli kinds and over the duration ``t``
    for phase_damping and depolarizing_markov, which are swept through their
    equivalent Pauli channels. ``seed`` has no default; every randomized run
    names its seed explicitly.
    """
    code: str = None
    kind: str = "depolarizing_1q"
    epsilon: float = None
    gamma: float = None
    gamma_tilde: float = None
    big_gamma: float = None
    t: float = None
    grid_start: float = None
    grid_stop: float = None
    grid_points: int = 1
    grid_scale: str = "linear"
    trials: int = 10000
    seed: int = None
    workers: int = 1
    out: str = None
    format: str = "csv"
    syndrome_flip_q: float = 0.0

    @property
    def is_timed(self):
        return self.kind in TIMED_KINDS

    @property
    def grid_key(self):
        """The channel key the grid runs over: the duration ``t`` for timed kinds, else ``epsilon``."""
        return "t" if self.is_timed else "epsilon"

    def channel_settings(self, value):
        """Channel keys for one grid point, ready for ``channel_from_settings``."""
        settings = {key: getattr(self, key) for key in ("kind", "epsilon", "gamma", "gamma_tilde", "big_gamma", "t")}
        settings[self.grid_key] = float(value)
        return settings

    def validate(self):
        """Raises ConfigError naming the first offending key."""
        if not self.code:
            raise ConfigError("missing key 'code'")
        if self.kind not in SWEEPABLE_KINDS:
            raise ConfigError(f"kind: sweeps need one of {', '.join(SWEEPABLE_KINDS)}, got '{self.kind}'")
        timed = self.is_timed
        if timed:
            decay_key = DECAY_FIELD[self.kind]
            decay = getattr(self, decay_key)
            if decay is None or decay < 0:
                raise ConfigError(f"{decay_key}: {self.kind} needs a non-negative decay constant, got {decay}")
        point = self.t if timed else self.epsilon
        if self.grid_start is None and point is not None:
            self.grid_start = self.grid_stop = point
        if self.grid_start is None:
            raise ConfigError(f"missing key 'grid_start' (or '{self.grid_key}')")
        if self.grid_stop is None:
            self.grid_stop = self.grid_start
        for key in ("grid_start", "grid_stop"):
            value = getattr(self, key)
            if value < 0.0 or (not timed and value > 1.0):
                bounds = ">= 0" if timed else "in [0, 1]"
                raise ConfigError(f"{key} must lie {bounds}, got {value}")
        if self.grid_points < 1:
            raise ConfigError(f"grid_points must be at least 1, got {self.grid_points}")
        if self.grid_scale not in GRID_SCALES:
            raise ConfigError(f"grid_scale must be linear or log, got '{self.grid_scale}'")
        if self.grid_scale == "log" and self.grid_start <= 0:
            raise ConfigError("grid_start must be positive on a log grid")
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if self.seed is None:
            raise ConfigError("missing key 'seed'; pass --seed or set it in the config file")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError(f"format must be csv or json, got '{self.format}'")
        if not 0.0 <= self.syndrome_flip_q <= 1.0:
            raise ConfigError(f"syndrome_flip_q must lie in [0, 1], got {self.syndrome_flip_q}")
        return self

    def grid(self):
        if self.grid_points == 1:
            return np.array([self.grid_start])
        if self.grid_scale == "log":
            return np.geomspace(self.grid_start, self.grid_stop, self.grid_points)
        return np.linspace(self.grid_start, self.grid_stop, self.grid_points)

    def with_overrides(self, **overrides):
        """Command-line values win over file values; None means not given."""
        for key, value in overrides.items():
            if value is not None:
                setattr(self, key, value)
        return self

    def to_dict(self):
        return asdict(self)


FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
CASTS = {"str": str, "float": float, "int": int}


def parse_config_text(text):
    """
    Parses flat ``key = value`` lines; ``#`` starts a comment.

    Returns:
        ExperimentConfig: unvalidated; call ``validate()``.
    """
    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in FIELD_TYPES:
            raise ConfigError(f"line {line_no}: unknown key '{key}'")
        cast = CASTS[FIELD_TYPES[key] if isinstance(FIELD_TYPES[key], str) else FIELD_TYPES[key].__name__]
        try:
            values[key] = cast(value)
        except ValueError:
            raise ConfigError(f"line {line_no}: {key} = {value!r} is not a valid {cast.__name__}")
    return ExperimentConfig(**values)


def load_config(path):
    config_file = Path(path)
    if not config_file.exists():
        raise ConfigError(f"config file '{path}' not found")
    config = parse_config_text(config_file.read_text(encoding="utf-8"))
    logging.info(f"Loaded experiment config from {path}: code={config.code}, kind={config.kind}")
    return config
