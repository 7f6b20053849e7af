"""Pipeline configuration.

All knobs live in one flat namespace resolvable from (in increasing
precedence) built-in defaults, a ``key = value`` config file, ``CEREBRO_*``
environment variables, and CLI flags.  Unknown keys are rejected loudly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from typing import Mapping

from .errors import ConfigError

ENV_PREFIX = "CEREBRO_"


@dataclass(frozen=True)
class LayoutConfig:
    """Pixel-space parameters of the 2D scene.

    The midline is x = 0; y grows downward (SVG sense), so trees rise above
    ``cow_baseline_y`` and the carotid band hangs below it.
    """

    layer_height: float = 40.0
    cow_baseline_y: float = 420.0
    band_gutter: float = 16.0
    canvas_width: float = 1200.0
    stroke_min: float = 1.0
    stroke_max: float = 12.0
    carotid_band_height: float = 180.0
    carotid_amplitude: float = 30.0
    acomm_arc_rise: float = 26.0
    pcomm_arc_drop: float = 30.0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ConfigError(f"layout parameter {f.name} must be positive")
        if self.stroke_min >= self.stroke_max:
            raise ConfigError("stroke_min must be less than stroke_max")


@dataclass(frozen=True)
class EngineConfig:
    """Full engine configuration: layout pixels plus model parameters."""

    layout: LayoutConfig = field(default_factory=LayoutConfig)
    axis: str = "+x+y+z"
    # fraction of the scan's vertical extent an internal carotid must descend
    ic_min_drop_fraction: float = 0.3
    # runs shorter than this fraction of chain length are segmentation jitter
    bend_noise_fraction: float = 0.05
    narrowing_threshold: float = 0.5
    widening_threshold: float = 1.5
    # flow divisor: tree depth (default) or metric height above the ring
    flow_divisor: str = "depth"
    # width normalization: per-scan min/max unless a fixed corpus range is given
    radius_lo: float | None = None
    radius_hi: float | None = None
    # C1 tolerance on left/right ring extent disparity
    ring_extent_tolerance: float = 0.2


_LAYOUT_KEYS = {f.name for f in fields(LayoutConfig)}
_ENGINE_KEYS = {f.name for f in fields(EngineConfig)} - {"layout"}


def default_config() -> EngineConfig:
    return EngineConfig()


def parse_config_text(text: str) -> dict[str, str]:
    """Parse a flat ``key = value`` document; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line_no}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"config line {line_no}: empty key")
        if key in out:
            raise ConfigError(f"config line {line_no}: duplicate key {key!r}")
        out[key] = value
    return out


def _coerce(key: str, value: str):
    if key == "axis":
        return value
    if key == "flow_divisor":
        if value not in ("depth", "height"):
            raise ConfigError(f"flow_divisor must be 'depth' or 'height', got {value!r}")
        return value
    if key in ("radius_lo", "radius_hi") and value.lower() in ("", "none"):
        return None
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"config key {key!r}: expected a number, got {value!r}") from None


def apply_overrides(config: EngineConfig, overrides: Mapping[str, str]) -> EngineConfig:
    """Overlay string-valued settings onto a config, rejecting unknown keys."""
    layout_kwargs = {}
    engine_kwargs = {}
    for key, value in overrides.items():
        if key in _LAYOUT_KEYS:
            layout_kwargs[key] = _coerce(key, value)
        elif key in _ENGINE_KEYS:
            engine_kwargs[key] = _coerce(key, value)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    layout = replace(config.layout, **layout_kwargs) if layout_kwargs else config.layout
    return replace(config, layout=layout, **engine_kwargs)


def env_overrides(environ: Mapping[str, str] | None = None) -> dict[str, str]:
    """Collect ``CEREBRO_<KEY>`` environment settings (lower-cased keys)."""
    environ = os.environ if environ is None else environ
    out = {}
    for name, value in environ.items():
        if name.startswith(ENV_PREFIX):
            out[name[len(ENV_PREFIX):].lower()] = value
    return out


def resolve_config(
    file_text: str | None = None,
    environ: Mapping[str, str] | None = None,
    flags: Mapping[str, str] | None = None,
) -> EngineConfig:
    """Defaults, then file, then environment, then flags."""
    config = default_config()
    if file_text is not None:
        config = apply_overrides(config, parse_config_text(file_text))
    config = apply_overrides(config, env_overrides(environ))
    if flags:
        config = apply_overrides(config, flags)
    return config


def config_echo(config: EngineConfig) -> dict:
    """Flat JSON-friendly snapshot embedded in exported scenes."""
    out: dict = {}
    for f in fields(LayoutConfig):
        out[f.name] = getattr(config.layout, f.name)
    for name in sorted(_ENGINE_KEYS):
        out[name] = getattr(config, name)
    return out
