"""JSON run configuration (``schema_version`` 1).

A configuration is one JSON object with optional sections ``scenario``,
``impairments``, ``geometry``, ``design`` and ``sweep``.  Unknown keys are
rejected and every section present is validated when the document is
loaded, before anything is computed.  Dimensional fields take strings with
a unit suffix, see :mod:`firstphoton.units`.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ._validation import DomainError, check_kappa, check_positive_int
from .analytic import Scenario
from .design import ConfluenceGrid
from .geometry import Geometry, resolutions, uncertainty_bins
from .montecarlo import Impairments
from .units import UnitError, parse_quantity

SCHEMA_VERSION = 1
PRESETS = ("table1", "worked-example", "nighttime")

ANALYTIC_SWEEP_PARAMS = ("kappa", "n_s", "m_max", "kappa_n_s")
DESIGN_SWEEP_PARAMS = ("kappa", "m_max", "pr_e_target")


class ConfigError(ValueError):
    """Configuration is malformed or fails validation."""


@dataclass(frozen=True)
class ConfluenceSection:
    kappa_max: float
    pr_e_range: tuple[float, float]
    grid: ConfluenceGrid


@dataclass(frozen=True)
class DesignSection:
    kappa: float
    m_max: int
    pr_e_target: float
    saturation_m: Optional[tuple[int, ...]] = None
    confluence: Optional[ConfluenceSection] = None


@dataclass(frozen=True)
class SweepParameter:
    name: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class SweepSection:
    target: str
    parameters: tuple[SweepParameter, ...]


@dataclass(frozen=True)
class ConfigDocument:
    raw: dict = field(repr=False)
    scenario: Optional[Scenario] = None
    impairments: Optional[Impairments] = None
    geometry: Optional[Geometry] = None
    design: Optional[DesignSection] = None
    sweep: Optional[SweepSection] = None

    def require(self, section: str):
        value = getattr(self, section)
        if value is None:
            raise ConfigError(f"missing required section {section!r}")
        return value


def _check_keys(section: str, data: Any, required: set, optional: set) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be a JSON object")
    unknown = sorted(set(data) - required - optional)
    if unknown:
        raise ConfigError(f"unknown key(s) in {section!r}: {', '.join(unknown)}")
    missing = sorted(required - set(data))
    if missing:
        raise ConfigError(f"missing key(s) in {section!r}: {', '.join(missing)}")
    return data


def _number(section: str, key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    return value


def _quantity(section: str, key: str, value, kind: str) -> float:
    try:
        return parse_quantity(value, kind)
    except UnitError as exc:
        raise ConfigError(f"{section}.{key}: {exc}") from None


def _parse_scenario(data) -> Scenario:
    d = _check_keys("scenario", data, {"source", "kappa", "n_s", "m_max"}, set())
    if d["source"] not in ("number", "coherent"):
        raise ConfigError("scenario.source must be 'number' or 'coherent'")
    return Scenario(
        d["source"],
        _number("scenario", "kappa", d["kappa"]),
        _number("scenario", "n_s", d["n_s"]),
        _number("scenario", "m_max", d["m_max"]),
    )


_GEOMETRY_FIELDS = {
    "wavelength": ("wavelength_m", "length"),
    "aperture": ("aperture_m", "length"),
    "range": ("range_m", "length"),
    "range_uncertainty": ("range_uncertainty_m", "length"),
    "pulse_duration": ("pulse_duration_s", "time"),
    "v_transverse": ("v_transverse_mps", "speed"),
    "v_longitudinal": ("v_longitudinal_mps", "speed"),
    "accel_longitudinal": ("accel_longitudinal_mps2", "acceleration"),
    "doppler_uncertainty": ("doppler_uncertainty_hz", "frequency"),
    "pulse_repetition": ("pulse_repetition_s", "time"),
}
_GEOMETRY_REQUIRED = {"wavelength", "aperture", "range", "range_uncertainty", "pulse_duration", "pulses"}


def _parse_geometry(data) -> Geometry:
    d = _check_keys("geometry", data, _GEOMETRY_REQUIRED, set(_GEOMETRY_FIELDS) - _GEOMETRY_REQUIRED)
    kwargs = {"pulses": _number("geometry", "pulses", d["pulses"])}
    for key, (attr, kind) in _GEOMETRY_FIELDS.items():
        if key in d:
            kwargs[attr] = _quantity("geometry", key, d[key], kind)
    geometry = Geometry(**kwargs)
    resolutions(geometry)  # pulse-repetition guard
    return geometry


def _parse_impairments(data, geometry: Optional[Geometry]) -> Impairments:
    d = _check_keys("impairments", data, set(), {"eta", "n_b", "dcr", "bins_total", "bins_range", "pulse_duration"})
    kwargs: dict[str, Any] = {}
    if "eta" in d:
        kwargs["eta"] = _number("impairments", "eta", d["eta"])
    if "n_b" in d:
        kwargs["n_b"] = _number("impairments", "n_b", d["n_b"])
    if "dcr" in d:
        kwargs["dcr"] = _quantity("impairments", "dcr", d["dcr"], "rate")
    if "pulse_duration" in d:
        kwargs["pulse_duration_s"] = _quantity("impairments", "pulse_duration", d["pulse_duration"], "time")
    for key in ("bins_total", "bins_range"):
        if key in d:
            kwargs[key] = _number("impairments", key, d[key])
    if geometry is not None:
        # unspecified bin counts and pulse duration follow the geometry
        bins = uncertainty_bins(geometry)
        kwargs.setdefault("bins_range", bins.b_range)
        kwargs.setdefault("bins_total", bins.b_total)
        kwargs.setdefault("pulse_duration_s", geometry.pulse_duration_s)
    elif kwargs.get("dcr", 0.0) > 0.0 and "pulse_duration_s" not in kwargs:
        raise ConfigError("impairments.pulse_duration is required when dcr > 0 and no geometry is given")
    return Impairments(**kwargs)


def _parse_design(data) -> DesignSection:
    d = _check_keys("design", data, {"kappa", "m_max", "pr_e_target"}, {"saturation_m", "confluence"})
    saturation = None
    if "saturation_m" in d:
        if not isinstance(d["saturation_m"], list) or not d["saturation_m"]:
            raise ConfigError("design.saturation_m must be a non-empty list of pulse counts")
        saturation = tuple(check_positive_int("design.saturation_m", _number("design", "saturation_m", m)) for m in d["saturation_m"])
    confluence = None
    if "confluence" in d:
        confluence = _parse_confluence(d["confluence"])
    # an out-of-range target is an unreachable design, reported at run time
    return DesignSection(
        kappa=check_kappa(_number("design", "kappa", d["kappa"]), allow_one=False),
        m_max=check_positive_int("design.m_max", _number("design", "m_max", d["m_max"])),
        pr_e_target=_number("design", "pr_e_target", d["pr_e_target"]),
        saturation_m=saturation,
        confluence=confluence,
    )


def _parse_confluence(data) -> ConfluenceSection:
    keys = {"kappa_min", "kappa_max", "pr_min", "pr_max", "kappa_per_decade", "pr_per_decade", "m_values"}
    d = _check_keys("design.confluence", data, set(), keys)
    defaults = ConfluenceGrid()
    grid = ConfluenceGrid(
        kappa_min=_number("confluence", "kappa_min", d.get("kappa_min", defaults.kappa_min)),
        kappa_per_decade=int(_number("confluence", "kappa_per_decade", d.get("kappa_per_decade", defaults.kappa_per_decade))),
        pr_per_decade=int(_number("confluence", "pr_per_decade", d.get("pr_per_decade", defaults.pr_per_decade))),
        m_values=tuple(int(_number("confluence", "m_values", m)) for m in d.get("m_values", defaults.m_values)),
    )
    if grid.kappa_per_decade < 1 or grid.pr_per_decade < 1 or not grid.m_values:
        raise ConfigError("design.confluence grid must have at least one point per decade and one M value")
    return ConfluenceSection(
        kappa_max=_number("confluence", "kappa_max", d.get("kappa_max", 1e-3)),
        pr_e_range=(_number("confluence", "pr_min", d.get("pr_min", 1e-9)), _number("confluence", "pr_max", d.get("pr_max", 1e-1))),
        grid=grid,
    )


def _parse_sweep_parameter(data, allowed) -> SweepParameter:
    d = _check_keys("sweep.parameters[]", data, {"name"}, {"start", "stop", "num", "spacing", "values"})
    name = d["name"]
    if name not in allowed:
        raise ConfigError(f"cannot sweep {name!r}; allowed: {', '.join(allowed)}")
    if "values" in d:
        if set(d) & {"start", "stop", "num", "spacing"}:
            raise ConfigError(f"sweep parameter {name!r}: give either 'values' or a range, not both")
        if not isinstance(d["values"], list):
            raise ConfigError(f"sweep parameter {name!r}: 'values' must be a list")
        values = tuple(_number("sweep", name, v) for v in d["values"])
    else:
        missing = {"start", "stop", "num"} - set(d)
        if missing:
            raise ConfigError(f"sweep parameter {name!r} needs {', '.join(sorted(missing))} or 'values'")
        start, stop = _number("sweep", "start", d["start"]), _number("sweep", "stop", d["stop"])
        num = _number("sweep", "num", d["num"])
        if not float(num).is_integer():
            raise ConfigError(f"sweep parameter {name!r}: num must be an integer")
        num = max(0, int(num))
        spacing = d.get("spacing", "linear")
        if spacing == "linear":
            values = tuple(float(v) for v in np.linspace(start, stop, num))
        elif spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"sweep parameter {name!r}: log spacing needs positive bounds")
            values = tuple(float(v) for v in np.geomspace(start, stop, num))
        else:
            raise ConfigError(f"sweep parameter {name!r}: spacing must be 'linear' or 'log'")
    if not values:
        raise ConfigError(f"sweep parameter {name!r} has an empty range")
    return SweepParameter(name, values)


def _parse_sweep(data) -> SweepSection:
    d = _check_keys("sweep", data, {"parameters"}, {"target"})
    target = d.get("target", "analytic")
    if target not in ("analytic", "design"):
        raise ConfigError("sweep.target must be 'analytic' or 'design'")
    params = d["parameters"]
    if not isinstance(params, list) or not 1 <= len(params) <= 2:
        raise ConfigError("sweep.parameters must list one or two parameters")
    allowed = ANALYTIC_SWEEP_PARAMS if target == "analytic" else DESIGN_SWEEP_PARAMS
    parsed = tuple(_parse_sweep_parameter(p, allowed) for p in params)
    if len(parsed) == 2 and parsed[0].name == parsed[1].name:
        raise ConfigError("sweep parameters must be distinct")
    return SweepSection(target, parsed)


def parse_config(raw: dict) -> ConfigDocument:
    """Validate a decoded JSON document."""
    d = _check_keys(
        "<root>", raw, {"schema_version"}, {"description", "scenario", "impairments", "geometry", "design", "sweep"}
    )
    if d["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {d['schema_version']!r}; expected {SCHEMA_VERSION}")
    try:
        geometry = _parse_geometry(d["geometry"]) if "geometry" in d else None
        return ConfigDocument(
            raw=copy.deepcopy(raw),
            scenario=_parse_scenario(d["scenario"]) if "scenario" in d else None,
            impairments=_parse_impairments(d["impairments"], geometry) if "impairments" in d else None,
            geometry=geometry,
            design=_parse_design(d["design"]) if "design" in d else None,
            sweep=_parse_sweep(d["sweep"]) if "sweep" in d else None,
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply ``section.key=value`` overrides; values are JSON when they parse as JSON."""
    raw = copy.deepcopy(raw)
    for item in overrides:
        path, sep, text = item.partition("=")
        if not sep or not path:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = raw
        keys = path.split(".")
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {item!r} descends into a non-object")
        node[keys[-1]] = value
    return raw


def load_raw(path: Optional[str] = None, preset: Optional[str] = None) -> dict:
    if path and preset:
        raise ConfigError("give either --config or --preset, not both")
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; available: {', '.join(PRESETS)}")
        text = resources.files("firstphoton.presets").joinpath(f"{preset}.json").read_text(encoding="utf-8")
    elif path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    else:
        return {"schema_version": SCHEMA_VERSION}
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


def load_config(path: Optional[str] = None, preset: Optional[str] = None, overrides: Optional[list] = None) -> ConfigDocument:
    return parse_config(apply_overrides(load_raw(path, preset), overrides or []))
