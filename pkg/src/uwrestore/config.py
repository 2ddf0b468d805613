"""Pipeline configuration as a flat ``section.key = value`` text file.

Blank lines and ``#`` comments are ignored.  Every key is optional; missing
keys keep their defaults, unknown keys are an error.
"""

import configparser
import dataclasses
from dataclasses import dataclass, field

from .admm import SolverParams
from .color import ColorParams
from .guided import MASK_FILTER, TRANSMISSION_FILTER, GuidedFilterParams
from .illumination import IlluminationParams
from .transmission import TransmissionParams

DISPLAY_MODES = ("reflectance", "lit")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OutputOptions:
    suffix: str = "_restored"
    panel: bool = False
    report: str = ""
    dump_intermediates: bool = False
    display: str = "reflectance"
    rho: float = 0.5
    size_cap: int = 1024
    workers: int = 4

    def __post_init__(self):
        if self.display not in DISPLAY_MODES:
            raise ValueError(f"display must be one of {DISPLAY_MODES}")
        if not self.rho >= 0:
            raise ValueError("rho must be non-negative")
        if self.size_cap < 1 or self.workers < 1:
            raise ValueError("size_cap and workers must be >= 1")
        if not self.suffix:
            raise ValueError("suffix must be non-empty")


@dataclass(frozen=True)
class PipelineConfig:
    color: ColorParams = field(default_factory=ColorParams)
    illumination: IlluminationParams = field(default_factory=IlluminationParams)
    mask_filter: GuidedFilterParams = MASK_FILTER
    transmission: TransmissionParams = field(default_factory=TransmissionParams)
    transmission_filter: GuidedFilterParams = TRANSMISSION_FILTER
    solver: SolverParams = field(default_factory=SolverParams)
    output: OutputOptions = field(default_factory=OutputOptions)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


SECTIONS = tuple(f.name for f in dataclasses.fields(PipelineConfig))


def _coerce(text, default, key):
    text = text.strip()
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot read {text!r} as {type(default).__name__}") from None
    return text


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse(text, base=None):
    """Parse config text on top of ``base`` (defaults if omitted)."""
    base = PipelineConfig() if base is None else base
    reader = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       comment_prefixes=("#",), inline_comment_prefixes=("#",))
    reader.optionxform = str
    try:
        reader.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    changes = {}
    for key, raw in reader["config"].items():
        section, _, name = key.partition(".")
        if section not in SECTIONS or not name:
            raise ConfigError(f"unknown key {key!r}")
        group = getattr(base, section)
        if name not in {f.name for f in dataclasses.fields(group)}:
            raise ConfigError(f"unknown key {key!r}")
        changes.setdefault(section, {})[name] = _coerce(raw, getattr(group, name), key)

    updated = {}
    for section, values in changes.items():
        try:
            updated[section] = dataclasses.replace(getattr(base, section), **values)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{section}: {exc}") from None
    return base.replace(**updated)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def serialize(config):
    lines = []
    for section in SECTIONS:
        group = getattr(config, section)
        for f in dataclasses.fields(group):
            lines.append(f"{section}.{f.name} = {_format(getattr(group, f.name))}")
        lines.append("")
    return "\n".join(lines)
