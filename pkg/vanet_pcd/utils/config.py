"""
Configuration management for the content distribution simulator
Parses, validates and emits scenario files in the flat ``key = value`` format
"""

import math
import logging
import configparser
from dataclasses import dataclass, asdict, fields, replace as dataclass_replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple, Union

from vanet_pcd.utils.constants import (
    SCENARIO_DEFAULTS, SCHEMES, INTEGER_KEYS, BOOLEAN_KEYS, STRING_KEYS,
    PATH_LOSS_EXPONENT, ERROR_MESSAGES,
)
from vanet_pcd.utils.exceptions import ConfigError

logger = logging.getLogger("vanet_pcd.utils.config")

# Scenario files have no section headers; they are read under this one
_SECTION = "scenario"

_TRUE_WORDS = ("true", "yes", "on", "1")
_FALSE_WORDS = ("false", "no", "off", "0")

_POSITIVE_KEYS = (
    "T", "L", "D", "alpha", "beta", "Ms", "v_min", "v_max", "d_min", "d_max",
    "a", "W", "c_0", "eta", "R_los",
)


def db_to_linear(value_db: float) -> float:
    """Convert a power ratio in dB to a linear ratio"""
    return 10.0 ** (value_db / 10.0)


def parse_ratio(text: str) -> float:
    """Linear power ratio from a plain number or a value with a dB suffix"""
    text = text.strip()
    if text.lower().endswith("db"):
        return db_to_linear(float(text[:-2].strip()))
    return float(text)


@dataclass(frozen=True)
class ScenarioConfig:
    """All scenario parameters, named after the model symbols

    Dimensional values use SI units: seconds, meters, m/s, Hz, bits, b/s.
    ``kappa`` is stored as a linear power ratio.
    """

    T: float = SCENARIO_DEFAULTS["T"]
    N: int = SCENARIO_DEFAULTS["N"]
    L: float = SCENARIO_DEFAULTS["L"]
    L_per_N: float = SCENARIO_DEFAULTS["L_per_N"]
    N_max: int = SCENARIO_DEFAULTS["N_max"]
    K: int = SCENARIO_DEFAULTS["K"]
    D: float = SCENARIO_DEFAULTS["D"]
    alpha: float = SCENARIO_DEFAULTS["alpha"]
    beta: float = SCENARIO_DEFAULTS["beta"]
    M: int = SCENARIO_DEFAULTS["M"]
    Ms: float = SCENARIO_DEFAULTS["Ms"]
    v_min: float = SCENARIO_DEFAULTS["v_min"]
    v_max: float = SCENARIO_DEFAULTS["v_max"]
    d_min: float = SCENARIO_DEFAULTS["d_min"]
    d_max: float = SCENARIO_DEFAULTS["d_max"]
    a: float = SCENARIO_DEFAULTS["a"]
    p: float = SCENARIO_DEFAULTS["p"]
    W: float = SCENARIO_DEFAULTS["W"]
    c_0: float = SCENARIO_DEFAULTS["c_0"]
    eta: float = SCENARIO_DEFAULTS["eta"]
    kappa: float = parse_ratio(SCENARIO_DEFAULTS["kappa"])
    R_los: float = SCENARIO_DEFAULTS["R_los"]
    t_max: int = SCENARIO_DEFAULTS["t_max"]
    seed: int = SCENARIO_DEFAULTS["seed"]
    scheme: str = SCENARIO_DEFAULTS["scheme"]
    warm_start: bool = SCENARIO_DEFAULTS["warm_start"]
    seeds_per_point: int = SCENARIO_DEFAULTS["seeds_per_point"]
    workers: int = SCENARIO_DEFAULTS["workers"]

    def __post_init__(self):
        self.validate()

    def validate(self):
        """Check every invariant, raising ConfigError naming the first violation"""
        for key in _POSITIVE_KEYS:
            value = getattr(self, key)
            if not value > 0:
                raise ConfigError(ERROR_MESSAGES["NOT_POSITIVE"].format(key=key, value=value))

        for key in ("N", "N_max", "K", "M", "t_max", "seeds_per_point", "workers"):
            value = getattr(self, key)
            if value < 1:
                raise ConfigError(ERROR_MESSAGES["NOT_POSITIVE"].format(key=key, value=value))

        if self.seed < 0:
            raise ConfigError(f"Configuration key 'seed' must be non-negative, got {self.seed}")
        if not self.L_per_N >= 0:
            raise ConfigError(f"Configuration key 'L_per_N' must be non-negative, got {self.L_per_N}")
        if not self.kappa >= 0:
            raise ConfigError(f"Configuration key 'kappa' must be non-negative, got {self.kappa}")
        if not 0 < self.p < 0.5:
            raise ConfigError(ERROR_MESSAGES["BAD_PROBABILITY"].format(value=self.p))
        if self.v_min > self.v_max:
            raise ConfigError(ERROR_MESSAGES["BAD_SPEEDS"].format(v_min=self.v_min, v_max=self.v_max))
        if self.scheme not in SCHEMES:
            raise ConfigError(ERROR_MESSAGES["BAD_SCHEME"].format(
                value=self.scheme, choices=", ".join(SCHEMES)))

    @property
    def fleet_length(self) -> float:
        """Effective fleet length L, honoring the L_per_N coupling"""
        if self.L_per_N > 0:
            return self.L_per_N * self.N
        return self.L

    @property
    def packet_size(self) -> float:
        """Packet size s = Ms / M in bits"""
        return self.Ms / self.M

    @property
    def total_demand(self) -> int:
        """N * M packets"""
        return self.N * self.M

    def channel_params(self):
        """Channel parameters derived from this scenario"""
        from vanet_pcd.core.channel import ChannelParams

        return ChannelParams(
            bandwidth=self.W,
            snr=self.eta,
            rician_k=self.kappa,
            path_loss_exponent=PATH_LOSS_EXPONENT,
            slot_length=self.T,
            packet_size=self.packet_size,
        )

    def replace(self, **overrides) -> "ScenarioConfig":
        """Copy with overridden values; string values are coerced like file values"""
        coerced = {key: _coerce(key, value) if isinstance(value, str) else value
                   for key, value in overrides.items()}
        for key in coerced:
            if key not in _FIELD_NAMES:
                raise ConfigError(ERROR_MESSAGES["UNKNOWN_KEY"].format(key=key))
        return dataclass_replace(self, **coerced)

    def to_dict(self) -> Dict[str, Any]:
        """Dictionary of all parameters"""
        return asdict(self)


_FIELD_NAMES = tuple(f.name for f in fields(ScenarioConfig))


def _coerce(key: str, raw: str) -> Any:
    """Convert one textual value to the type of its key"""
    text = raw.strip()

    if key in STRING_KEYS:
        return text

    if key in BOOLEAN_KEYS:
        lowered = text.lower()
        if lowered in _TRUE_WORDS:
            return True
        if lowered in _FALSE_WORDS:
            return False
        raise ConfigError(ERROR_MESSAGES["NOT_BOOLEAN"].format(key=key, value=raw))

    if key in INTEGER_KEYS:
        try:
            return int(text)
        except ValueError:
            pass
        try:
            number = float(text)
        except ValueError:
            raise ConfigError(ERROR_MESSAGES["NOT_INTEGER"].format(key=key, value=raw)) from None
        if not number.is_integer():
            raise ConfigError(ERROR_MESSAGES["NOT_INTEGER"].format(key=key, value=raw))
        return int(number)

    if key == "kappa" and text.lower().endswith("db"):
        try:
            return parse_ratio(text)
        except ValueError:
            raise ConfigError(ERROR_MESSAGES["NOT_NUMERIC"].format(key=key, value=raw)) from None

    try:
        number = float(text)
    except ValueError:
        raise ConfigError(ERROR_MESSAGES["NOT_NUMERIC"].format(key=key, value=raw)) from None
    if math.isnan(number):
        raise ConfigError(ERROR_MESSAGES["NOT_NUMERIC"].format(key=key, value=raw))
    return number


def config_from_mapping(values: Mapping[str, Any]) -> ScenarioConfig:
    """Build a validated config from key -> value pairs, defaults for the rest"""
    kwargs = {}
    for key, value in values.items():
        if key not in _FIELD_NAMES:
            raise ConfigError(ERROR_MESSAGES["UNKNOWN_KEY"].format(key=key))
        kwargs[key] = _coerce(key, value) if isinstance(value, str) else value
    return ScenarioConfig(**kwargs)


def parse_config(source: str) -> ScenarioConfig:
    """Parse scenario text into a validated ScenarioConfig

    Args:
        source: Flat ``key = value`` text, one key per line, ``#`` comments

    Returns:
        ScenarioConfig with defaults for omitted keys

    Raises:
        ConfigError: unknown key, malformed value or violated invariant
    """
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#",),
        interpolation=None,
        default_section="__defaults__",
    )
    parser.optionxform = str  # keys are case sensitive (N vs n)

    try:
        parser.read_string(f"[{_SECTION}]\n{source}")
    except configparser.Error as e:
        raise ConfigError(f"Malformed configuration: {e}") from None

    if parser.sections() != [_SECTION]:
        raise ConfigError("Configuration files must not contain section headers")

    values = dict(parser.items(_SECTION))
    config = config_from_mapping(values)
    logger.debug(f"Parsed configuration with {len(values)} explicit keys")
    return config


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """Load and validate a scenario file"""
    path = Path(path)
    if not path.exists():
        raise ConfigError(ERROR_MESSAGES["CONFIG_NOT_FOUND"].format(path=path))

    config = parse_config(path.read_text(encoding="utf-8"))
    logger.info(f"Configuration loaded from {path}")
    return config


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(config: ScenarioConfig) -> str:
    """Render a config in the scenario file format (re-parses to an equal config)"""
    lines = ["# Scenario configuration", "# kappa is a linear power ratio"]
    for key, value in config.to_dict().items():
        lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def save_config(config: ScenarioConfig, path: Union[str, Path]) -> Path:
    """Write a config to disk"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit_config(config), encoding="utf-8", newline="\n")
    logger.info(f"Configuration saved to {path}")
    return path


def _expand_range(text: str) -> List[str]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(ERROR_MESSAGES["BAD_SWEEP"].format(value=text))
    try:
        numbers = [float(part) for part in parts]
    except ValueError:
        raise ConfigError(ERROR_MESSAGES["BAD_SWEEP"].format(value=text)) from None

    start, stop = numbers[0], numbers[1]
    step = numbers[2] if len(numbers) == 3 else 1.0
    if step <= 0 or stop < start:
        raise ConfigError(ERROR_MESSAGES["BAD_SWEEP"].format(value=text))

    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    values = [start + index * step for index in range(count)]
    return [str(int(v)) if float(v).is_integer() else repr(v) for v in values]


def parse_sweep(expression: str) -> Tuple[str, List[str]]:
    """Parse ``KEY=LIST`` where LIST mixes values and inclusive ``start:stop[:step]`` ranges

    Example:
        >>> parse_sweep("N=5:30:5")
        ('N', ['5', '10', '15', '20', '25', '30'])
    """
    key, sep, rest = expression.partition("=")
    key = key.strip()
    if not sep or not key or not rest.strip():
        raise ConfigError(ERROR_MESSAGES["BAD_SWEEP"].format(value=expression))
    if key not in _FIELD_NAMES:
        raise ConfigError(ERROR_MESSAGES["UNKNOWN_KEY"].format(key=key))

    values: List[str] = []
    for item in rest.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            values.extend(_expand_range(item))
        else:
            values.append(item)

    # validate each value eagerly so a bad sweep fails before any run
    for value in values:
        _coerce(key, value)
    return key, values
