"""Run configuration: INI-style nested key-value files, dotted-path overrides,
validation with field-path errors, and a canonical echo for file headers.

Example::

    [vapor]
    temperature = 403.15
    b_field = 0.016

    [run]
    runner = pulse
    geometry = qwp_pbs

Overrides use the same paths: ``--set vapor.b_field=-0.016``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .ensemble import EnsembleSpec
from .errors import ConfigError, SlowLightError
from .vapor import (
    BOHR_MAGNETON_HZ_PER_T,
    CS_D1_NATURAL_HWHM,
    DEFAULT_G_EFF,
    DensityModel,
    FrequencyGrid,
    SpectralLine,
    VaporConfig,
    default_line_table,
    format_line_table,
    load_line_table,
    parse_line_table,
)

RUNNERS = ("scan", "pulse", "sweep")
GEOMETRIES = ("linear_pbs", "qwp_pbs")
NONE_WORDS = ("", "none", "null")


@dataclass(frozen=True)
class SweepSpec:
    b_min: float = -0.016
    b_max: float = 0.016
    steps: int = 33
    slow_path: bool = False
    slow_samples: int = 400


@dataclass(frozen=True)
class TcspcSpec:
    irf_fwhm: float = 400e-12
    rep_rate: float = 15e6
    bin_width: float = 100e-12
    total_counts: int | None = 1_000_000
    seed: int = 7


@dataclass(frozen=True)
class RunConfig:
    vapor: VaporConfig = field(default_factory=VaporConfig)
    lines: tuple[SpectralLine, ...] = field(default_factory=default_line_table)
    grid: FrequencyGrid = field(default_factory=lambda: FrequencyGrid.centered(40e9, 2 ** 16))
    ensemble: EnsembleSpec = field(default_factory=EnsembleSpec)
    geometry: str = "qwp_pbs"
    runner: str = "pulse"
    operating_point: float = 0.0
    input_angle: float = 0.0
    workers: int = 1
    sweep: SweepSpec = field(default_factory=SweepSpec)
    tcspc: TcspcSpec = field(default_factory=TcspcSpec)
    output_dir: str = "out"


# ---------------------------------------------------------------------------
# field parsers

def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _optional_float(text: str) -> float | None:
    return None if text.strip().lower() in NONE_WORDS else _float(text)


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        value = float(text)
    if not math.isfinite(value) or value != int(value):
        raise ValueError("must be an integer")
    return int(value)


def _optional_int(text: str) -> int | None:
    return None if text.strip().lower() in NONE_WORDS else _int(text)


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError("must be a boolean")


def _choice(options: Iterable[str]) -> Callable[[str], str]:
    options = tuple(options)

    def parse(text: str) -> str:
        value = text.strip()
        if value not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return value

    return parse


def _check(path: str, ok: bool, reason: str):
    if not ok:
        raise ConfigError(path, reason)


# section -> key -> (parser, default text)
_DEFAULTS = RunConfig()
SCHEMA: dict[str, dict[str, tuple[Callable, str]]] = {
    "vapor": {
        "temperature": (_float, repr(_DEFAULTS.vapor.temperature)),
        "length": (_float, repr(_DEFAULTS.vapor.length)),
        "b_field": (_float, repr(_DEFAULTS.vapor.b_field)),
        "line_center_frequency": (_float, repr(_DEFAULTS.vapor.line_center_frequency)),
        "density_override": (_optional_float, "none"),
        "density_a": (_float, repr(DensityModel().a)),
        "density_b": (_float, repr(DensityModel().b)),
        "amplitude_calibration": (_float, repr(_DEFAULTS.vapor.amplitude_calibration)),
        "electron_charge": (_float, repr(_DEFAULTS.vapor.electron_charge)),
        "electron_mass": (_float, repr(_DEFAULTS.vapor.electron_mass)),
        "atom_mass": (_float, repr(_DEFAULTS.vapor.atom_mass)),
    },
    "lines": {
        "file": (str, ""),
        "table": (str, ""),
        "g_eff": (_float, repr(DEFAULT_G_EFF)),
        "natural_hwhm": (_float, repr(CS_D1_NATURAL_HWHM)),
    },
    "grid": {
        "start": (_float, repr(_DEFAULTS.grid.start)),
        "step": (_float, repr(_DEFAULTS.grid.step)),
        "count": (_int, repr(_DEFAULTS.grid.count)),
    },
    "ensemble": {
        "lifetime": (_float, repr(_DEFAULTS.ensemble.lifetime)),
        "jitter_fwhm": (_float, repr(_DEFAULTS.ensemble.jitter_fwhm)),
        "center_detuning": (_float, repr(_DEFAULTS.ensemble.center_detuning)),
        "samples": (_int, repr(_DEFAULTS.ensemble.samples)),
        "seed": (_int, repr(_DEFAULTS.ensemble.seed)),
    },
    "run": {
        "runner": (_choice(RUNNERS), _DEFAULTS.runner),
        "geometry": (_choice(GEOMETRIES), _DEFAULTS.geometry),
        "operating_point": (_float, repr(_DEFAULTS.operating_point)),
        "input_angle": (_float, repr(_DEFAULTS.input_angle)),
        "workers": (_int, repr(_DEFAULTS.workers)),
        "output_dir": (str, _DEFAULTS.output_dir),
    },
    "sweep": {
        "b_min": (_float, repr(_DEFAULTS.sweep.b_min)),
        "b_max": (_float, repr(_DEFAULTS.sweep.b_max)),
        "steps": (_int, repr(_DEFAULTS.sweep.steps)),
        "slow_path": (_bool, "false"),
        "slow_samples": (_int, repr(_DEFAULTS.sweep.slow_samples)),
    },
    "tcspc": {
        "irf_fwhm": (_float, repr(_DEFAULTS.tcspc.irf_fwhm)),
        "rep_rate": (_float, repr(_DEFAULTS.tcspc.rep_rate)),
        "bin_width": (_float, repr(_DEFAULTS.tcspc.bin_width)),
        "total_counts": (_optional_int, repr(_DEFAULTS.tcspc.total_counts)),
        "seed": (_int, repr(_DEFAULTS.tcspc.seed)),
    },
}


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=None)
    parser.optionxform = str  # keep key case
    for section, keys in SCHEMA.items():
        parser.add_section(section)
        for key, (_, default) in keys.items():
            parser.set(section, key, default)
    return parser


def apply_override(parser: configparser.ConfigParser, assignment: str) -> None:
    path, sep, value = assignment.partition("=")
    path = path.strip()
    if not sep:
        raise ConfigError(path or assignment, "override must look like section.key=value")
    section, dot, key = path.partition(".")
    if not dot or section not in SCHEMA or key not in SCHEMA[section]:
        raise ConfigError(path, "unknown configuration field")
    parser.set(section, key, value.strip())


def _read(parser: configparser.ConfigParser, text: str, source: str) -> None:
    incoming = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    incoming.optionxform = str
    try:
        incoming.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(source, f"cannot parse: {exc}") from None
    for section in incoming.sections():
        if section not in SCHEMA:
            raise ConfigError(section, "unknown configuration section")
        for key, value in incoming.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{section}.{key}", "unknown configuration field")
            parser.set(section, key, value)


def _value(parser, section: str, key: str):
    func, _ = SCHEMA[section][key]
    text = parser.get(section, key)
    try:
        return func(text)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key}", f"invalid value {text!r}: {exc}") from None


def _build(parser: configparser.ConfigParser, base_dir: Path) -> RunConfig:
    v = {key: _value(parser, "vapor", key) for key in SCHEMA["vapor"]}
    _check("vapor.temperature", v["temperature"] > 0, "must be > 0")
    _check("vapor.length", v["length"] > 0, "must be > 0")
    _check("vapor.line_center_frequency", v["line_center_frequency"] > 0, "must be > 0")
    _check("vapor.density_override", v["density_override"] is None or v["density_override"] >= 0,
           "must be >= 0 when set")
    _check("vapor.amplitude_calibration", v["amplitude_calibration"] > 0, "must be > 0")
    for key in ("electron_charge", "electron_mass", "atom_mass"):
        _check(f"vapor.{key}", v[key] > 0, "must be > 0")
    vapor = VaporConfig(
        temperature=v["temperature"], length=v["length"], b_field=v["b_field"],
        line_center_frequency=v["line_center_frequency"], density_override=v["density_override"],
        density_model=DensityModel(v["density_a"], v["density_b"]),
        amplitude_calibration=v["amplitude_calibration"], electron_charge=v["electron_charge"],
        electron_mass=v["electron_mass"], atom_mass=v["atom_mass"])

    ln = {key: _value(parser, "lines", key) for key in SCHEMA["lines"]}
    _check("lines.natural_hwhm", ln["natural_hwhm"] > 0, "must be > 0")
    try:
        if ln["table"].strip():
            _check("lines", not ln["file"].strip(), "give either lines.file or lines.table, not both")
            lines = parse_line_table(ln["table"])
        elif ln["file"].strip():
            path = Path(ln["file"].strip())
            if not path.is_absolute():
                path = base_dir / path
            _check("lines.file", path.is_file(), f"file not found: {path}")
            lines = load_line_table(path)
        else:
            lines = default_line_table(ln["g_eff"] * BOHR_MAGNETON_HZ_PER_T, ln["natural_hwhm"])
    except SlowLightError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("lines", str(exc)) from None

    g = {key: _value(parser, "grid", key) for key in SCHEMA["grid"]}
    _check("grid.step", g["step"] > 0, "must be > 0")
    _check("grid.count", g["count"] >= 2 and not g["count"] & (g["count"] - 1),
           "must be a power of two >= 2")
    grid = FrequencyGrid(g["start"], g["step"], g["count"])

    e = {key: _value(parser, "ensemble", key) for key in SCHEMA["ensemble"]}
    _check("ensemble.lifetime", e["lifetime"] > 0, "must be > 0")
    _check("ensemble.jitter_fwhm", e["jitter_fwhm"] >= 0, "must be >= 0")
    _check("ensemble.samples", e["samples"] >= 1, "must be >= 1")
    _check("ensemble.seed", 0 <= e["seed"] < 2 ** 64, "must be a 64-bit unsigned integer")
    ensemble = EnsembleSpec(**e)

    r = {key: _value(parser, "run", key) for key in SCHEMA["run"]}
    _check("run.workers", r["workers"] >= 1, "must be >= 1")
    _check("run.output_dir", bool(r["output_dir"].strip()), "must not be empty")

    s = {key: _value(parser, "sweep", key) for key in SCHEMA["sweep"]}
    if r["runner"] == "sweep":
        _check("sweep.steps", s["steps"] >= 2, "must be >= 2 for the sweep runner")
    _check("sweep.b_max", s["b_max"] >= s["b_min"], "must be >= sweep.b_min")
    _check("sweep.slow_samples", s["slow_samples"] >= 1, "must be >= 1")
    sweep = SweepSpec(**s)

    t = {key: _value(parser, "tcspc", key) for key in SCHEMA["tcspc"]}
    _check("tcspc.irf_fwhm", t["irf_fwhm"] >= 0, "must be >= 0")
    _check("tcspc.rep_rate", t["rep_rate"] > 0, "must be > 0")
    _check("tcspc.bin_width", t["bin_width"] > 0, "must be > 0")
    _check("tcspc.total_counts", t["total_counts"] is None or t["total_counts"] > 0,
           "must be > 0 or none")
    tcspc = TcspcSpec(**t)

    return RunConfig(vapor=vapor, lines=lines, grid=grid, ensemble=ensemble,
                     geometry=r["geometry"], runner=r["runner"],
                     operating_point=r["operating_point"], input_angle=r["input_angle"],
                     workers=r["workers"], sweep=sweep, tcspc=tcspc, output_dir=r["output_dir"])


def load_config(path: str | Path | None = None, overrides: Iterable[str] = (),
                text: str | None = None) -> RunConfig:
    """Resolve defaults, then the file (or ``text``), then ``overrides``."""
    parser = _parser()
    base_dir = Path.cwd()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError("config", f"file not found: {path}")
        _read(parser, path.read_text(encoding="utf-8"), str(path))
        base_dir = path.parent
    if text is not None:
        _read(parser, text, "<text>")
    for assignment in overrides:
        apply_override(parser, assignment)
    return _build(parser, base_dir)


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(cfg: RunConfig) -> str:
    """Canonical, fully resolved INI text (the output directory is omitted)."""
    v = cfg.vapor
    table = format_line_table(cfg.lines).strip().splitlines()
    sections = {
        "vapor": {
            "temperature": v.temperature, "length": v.length, "b_field": v.b_field,
            "line_center_frequency": v.line_center_frequency,
            "density_override": v.density_override,
            "density_a": v.density_model.a, "density_b": v.density_model.b,
            "amplitude_calibration": v.amplitude_calibration,
            "electron_charge": v.electron_charge, "electron_mass": v.electron_mass,
            "atom_mass": v.atom_mass,
        },
        "lines": {"table": "\n    ".join([""] + [row for row in table if not row.startswith("#")])},
        "grid": {"start": cfg.grid.start, "step": cfg.grid.step, "count": cfg.grid.count},
        "ensemble": {
            "lifetime": cfg.ensemble.lifetime, "jitter_fwhm": cfg.ensemble.jitter_fwhm,
            "center_detuning": cfg.ensemble.center_detuning, "samples": cfg.ensemble.samples,
            "seed": cfg.ensemble.seed,
        },
        "run": {
            "runner": cfg.runner, "geometry": cfg.geometry,
            "operating_point": cfg.operating_point, "input_angle": cfg.input_angle,
            "workers": cfg.workers,
        },
        "sweep": vars(cfg.sweep),
        "tcspc": vars(cfg.tcspc),
    }
    out = []
    for section, values in sections.items():
        out.append(f"[{section}]")
        out.extend(f"{key} = {_fmt(value)}" for key, value in values.items())
        out.append("")
    return "\n".join(out).rstrip() + "\n"


def config_from_header(header_lines: Iterable[str]) -> RunConfig:
    """Rebuild a configuration from the echo stored in an output file header."""
    body = []
    started = False
    for line in header_lines:
        if line.startswith("["):
            started = True
        if started:
            body.append(line)
    return load_config(text="\n".join(body))
