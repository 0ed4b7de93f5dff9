"""Flat key-value configuration: parsing, defaults, validation.

Format: one ``section.key = value`` per line, ``#`` starts a comment, blank
lines ignored.  Unknown keys are rejected with their line number.  Angles are
degrees, frequencies MHz, lengths mm; conversion to radians/SI happens when
the physical objects are built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .model import (CavityDecays, CavityGeometry, PumpDrive,
                    decays_from_mirror_specs)
from .source import OpoSource

CALIBRATE = "calibrate"


def _fraction(lo_open=False, hi=1.0):
    def check(key, value):
        v = _as_float(key, value)
        if (v <= 0.0 if lo_open else v < 0.0) or v > hi:
            lo = "(0" if lo_open else "[0"
            raise ConfigError(f"{key} must be in {lo}, {hi}], got {v}")
        return v
    return check


def _as_float(key, value):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} expects a number, got {value!r}") from None


def _positive(key, value):
    v = _as_float(key, value)
    if v <= 0.0:
        raise ConfigError(f"{key} must be > 0, got {v}")
    return v


def _pump_fraction(key, value):
    v = _as_float(key, value)
    if v < 0.0:
        raise ConfigError(f"{key} must be >= 0, got {v}")
    if v >= 1.0:
        raise ConfigError(f"{key} at/above threshold: {v} >= 1")
    return v


def _angle_deg(key, value):
    return _as_float(key, value)


def _index(key, value):
    v = _as_float(key, value)
    if v < 1.0:
        raise ConfigError(f"{key} must be >= 1, got {v}")
    return v


def _points(key, value):
    try:
        v = int(str(value))
    except ValueError:
        raise ConfigError(f"{key} expects an integer, got {value!r}") from None
    if v < 3:
        raise ConfigError(f"{key} must be >= 3, got {v}")
    return v


def _precision(key, value):
    try:
        v = int(str(value))
    except ValueError:
        raise ConfigError(f"{key} expects an integer, got {value!r}") from None
    if not 1 <= v <= 17:
        raise ConfigError(f"{key} must be in [1, 17], got {v}")
    return v


def _efficiency(key, value):
    if isinstance(value, str) and value.strip().lower() == CALIBRATE:
        return CALIBRATE
    v = _as_float(key, value)
    if not 0.0 < v <= 1.0:
        raise ConfigError(f"{key} must be in (0, 1] or 'calibrate', got {v}")
    return v


def _choice(*options):
    def check(key, value):
        v = str(value).strip().lower()
        if v not in options:
            raise ConfigError(f"{key} must be one of {options}, got {value!r}")
        return v
    return check


def _db(key, value):
    v = _as_float(key, value)
    if v >= 0.0:
        raise ConfigError(f"{key} must be below 0 dB, got {v}")
    return v


def _path(key, value):
    return str(value)


def _cavity_keys(section, t_out_default):
    return {
        f"{section}.t_in": (0.005, _fraction()),
        f"{section}.t_out": (t_out_default, _fraction()),
        f"{section}.round_trip_loss": (0.002, _fraction()),
        f"{section}.geometric_length_mm": (60.0, _positive),
        f"{section}.crystal_length_mm": (12.0, _positive),
        f"{section}.crystal_index": (1.830, _index),
        f"{section}.pump_fraction": (0.5, _pump_fraction),
        f"{section}.pump_phase_deg": (0.0, _angle_deg),
    }


# key -> (default, validator); mirror specs default to the bench values
_SCHEMA: dict[str, tuple] = {
    **_cavity_keys("opa", 0.03),
    **_cavity_keys("opo", 0.07),
    "detection.lo_angle_deg": (0.0, _angle_deg),
    "detection.efficiency": (CALIBRATE, _efficiency),
    "detection.target_squeezing_db": (-2.0, _db),
    "scan.span_gammas": (8.0, _positive),
    "scan.points": (801, _points),
    "scan.sideband_mhz": (3.5, _positive),
    "scan.input": ("squeezed", _choice("squeezed", "vacuum")),
    "scan.observable": ("noise", _choice("noise", "reflection")),
    "output.path": ("scan.csv", _path),
    "output.precision": (9, _precision),
}


@dataclass
class Config:
    """Validated configuration with provenance of applied defaults."""

    values: dict = field(default_factory=dict)
    defaulted: tuple = ()

    def __getitem__(self, key: str):
        return self.values[key]

    def resolved_items(self) -> list[tuple[str, object]]:
        """Every key with its resolved value, schema order."""
        return [(k, self.values[k]) for k in _SCHEMA]

    def to_text(self) -> str:
        """Canonical re-parseable configuration text."""
        lines = []
        for key, value in self.resolved_items():
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def geometry(self, section: str) -> CavityGeometry:
        return CavityGeometry(
            geometric_length=self[f"{section}.geometric_length_mm"] * 1e-3,
            crystal_length=self[f"{section}.crystal_length_mm"] * 1e-3,
            crystal_index=self[f"{section}.crystal_index"],
        )

    def decays(self, section: str) -> CavityDecays:
        return decays_from_mirror_specs(
            t_in=self[f"{section}.t_in"],
            t_out=self[f"{section}.t_out"],
            round_trip_loss=self[f"{section}.round_trip_loss"],
            geom=self.geometry(section),
        )

    def pump(self, section: str) -> PumpDrive:
        return PumpDrive.from_power_fraction(
            self[f"{section}.pump_fraction"],
            phi=math.radians(self[f"{section}.pump_phase_deg"]),
        )

    def opo_source(self) -> OpoSource:
        return OpoSource(decays=self.decays("opo"),
                         x=math.sqrt(self["opo.pump_fraction"]))

    @property
    def sideband(self) -> float:
        """Analysis sideband in rad/s."""
        return 2.0 * math.pi * self["scan.sideband_mhz"] * 1e6

    @property
    def lo_angle(self) -> float:
        return math.radians(self["detection.lo_angle_deg"])


def parse_config(text: str) -> Config:
    """Parse and validate configuration text, applying documented defaults.

    Raises :class:`ConfigError` with a line number for malformed lines,
    unknown keys, duplicates, and range violations.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if value == "":
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        raw[key] = value

    values: dict[str, object] = {}
    defaulted = []
    for key, (default, validator) in _SCHEMA.items():
        if key in raw:
            values[key] = validator(key, raw[key])
        else:
            values[key] = default
            defaulted.append(key)
    return Config(values=values, defaulted=tuple(defaulted))


def load_config(path: str | None) -> Config:
    """Read a config file, or return pure defaults when ``path`` is None."""
    if path is None:
        return parse_config("")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
