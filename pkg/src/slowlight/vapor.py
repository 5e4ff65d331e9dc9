"""Polarization-resolved susceptibility of a hot cesium vapor (D1 manifold).

Lines are Doppler broadened by evaluating the complex probability function
(Faddeeva ``w``), so real and imaginary parts of the susceptibility come from
one analytic expression. Zeeman splitting is a linear bulk shift per circular
component. Susceptibility is in SI units, ``n = sqrt(1 + chi)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import constants
from scipy.special import wofz

from .errors import InvalidArgumentError, ResolutionError

# Cs D1 (6S1/2 -> 6P1/2)
CS_D1_FREQUENCY = 335.116048807e12  # Hz
CS_MASS = 132.905451931 * constants.atomic_mass  # kg
CS_D1_NATURAL_HWHM = 4.575e6 / 2  # Hz
CS_GROUND_SPLITTING = 9.192631770e9  # Hz
CS_EXCITED_SPLITTING = 1.2e9  # Hz, rounded value quoted for the 6P1/2 level
BOHR_MAGNETON_HZ_PER_T = constants.physical_constants["Bohr magneton in Hz/T"][0]

# Effective Lande factor of the bulk sigma+/sigma- shift: first moment of the
# D1 sigma+ spectrum, (g_J' m_J' - g_J m_J) = 2/3 * 1/2 + 2 * 1/2.
DEFAULT_G_EFF = 4.0 / 3.0
DEFAULT_ZEEMAN_SLOPE = DEFAULT_G_EFF * BOHR_MAGNETON_HZ_PER_T

# Global susceptibility scale: D1 oscillator strength (0.3449) times a factor
# 0.872 from the one-time calibration of the zero-field ensemble delay to 25 ns
# (slowlight.calibration.calibrate_amplitude).
DEFAULT_AMPLITUDE_CALIBRATION = 0.30072


class Polarization(enum.Enum):
    SIGMA_PLUS = "sigma+"
    SIGMA_MINUS = "sigma-"

    @property
    def sign(self) -> int:
        return 1 if self is Polarization.SIGMA_PLUS else -1

    @classmethod
    def parse(cls, value: "Polarization | str") -> "Polarization":
        if isinstance(value, cls):
            return value
        aliases = {"sigma+": cls.SIGMA_PLUS, "+": cls.SIGMA_PLUS, "plus": cls.SIGMA_PLUS,
                   "sigma-": cls.SIGMA_MINUS, "-": cls.SIGMA_MINUS, "minus": cls.SIGMA_MINUS}
        try:
            return aliases[str(value).strip().lower()]
        except KeyError:
            raise InvalidArgumentError(f"unknown polarization {value!r}") from None


@dataclass(frozen=True)
class DensityModel:
    """Saturated vapor pressure ``log10(P / Pa) = a - b / T``.

    Defaults are a least-squares fit of the liquid-phase cesium vapor pressure
    curve over 330-430 K.
    """

    a: float = 9.29994
    b: float = 3888.365


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of detunings (Hz) relative to the line center frequency."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.step)):
            raise InvalidArgumentError("grid start/step must be finite")
        if self.step <= 0:
            raise InvalidArgumentError(f"grid step must be > 0, got {self.step}")
        if self.count < 2 or self.count & (self.count - 1):
            raise InvalidArgumentError(f"grid count must be a power of two >= 2, got {self.count}")

    @classmethod
    def centered(cls, half_span: float, count: int) -> "FrequencyGrid":
        """Grid covering ``[-half_span, half_span)``; symmetric about zero."""
        step = 2.0 * half_span / count
        return cls(start=-half_span, step=step, count=count)

    @property
    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    @property
    def time_step(self) -> float:
        """Sampling interval of the Fourier-dual time grid."""
        return 1.0 / (self.step * self.count)

    @property
    def time_window(self) -> float:
        return 1.0 / self.step

    def index_of(self, frequency: float) -> float:
        return (frequency - self.start) / self.step


@dataclass(frozen=True)
class SpectralLine:
    detuning: float  # Hz, relative to the line center frequency
    weight: float
    natural_hwhm: float = CS_D1_NATURAL_HWHM  # Hz
    zeeman_slope: float = DEFAULT_ZEEMAN_SLOPE  # Hz/T, applied as +B for sigma+

    def __post_init__(self):
        for name in ("detuning", "weight", "natural_hwhm", "zeeman_slope"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"line {name} must be finite")
        if self.weight < 0:
            raise InvalidArgumentError(f"line weight must be >= 0, got {self.weight}")
        if self.natural_hwhm <= 0:
            raise InvalidArgumentError(f"line natural_hwhm must be > 0, got {self.natural_hwhm}")


LineTable = tuple  # tuple[SpectralLine, ...]


def default_line_table(zeeman_slope: float = DEFAULT_ZEEMAN_SLOPE,
                       natural_hwhm: float = CS_D1_NATURAL_HWHM) -> tuple[SpectralLine, ...]:
    """Four D1 hyperfine components centered on the reference frequency.

    Each pair is weighted by its ground-level degeneracy 2F+1: the F=4 pair sits
    at lower frequency with weight 9, the F=3 pair at higher frequency with weight 7.
    """
    g = CS_GROUND_SPLITTING / 2
    e = CS_EXCITED_SPLITTING / 2
    layout = [(-g - e, 9.0), (-g + e, 9.0), (g - e, 7.0), (g + e, 7.0)]
    return tuple(SpectralLine(d, w, natural_hwhm, zeeman_slope) for d, w in layout)


@dataclass(frozen=True)
class VaporConfig:
    temperature: float = 403.15  # K
    length: float = 0.25  # m
    b_field: float = 0.0  # T, positive = parallel to propagation
    line_center_frequency: float = CS_D1_FREQUENCY  # Hz
    density_override: float | None = None  # m^-3
    density_model: DensityModel = field(default_factory=DensityModel)
    amplitude_calibration: float = DEFAULT_AMPLITUDE_CALIBRATION
    electron_charge: float = constants.e
    electron_mass: float = constants.m_e
    atom_mass: float = CS_MASS

    def __post_init__(self):
        if not self.temperature > 0:
            raise InvalidArgumentError(f"temperature must be > 0, got {self.temperature}")
        if not self.length > 0:
            raise InvalidArgumentError(f"length must be > 0, got {self.length}")
        # zero is allowed: an evacuated cell
        if self.density_override is not None and not self.density_override >= 0:
            raise InvalidArgumentError(f"density_override must be >= 0, got {self.density_override}")
        if not self.amplitude_calibration > 0:
            raise InvalidArgumentError("amplitude_calibration must be > 0")
        if not math.isfinite(self.b_field):
            raise InvalidArgumentError("b_field must be finite")

    def with_(self, **changes) -> "VaporConfig":
        return replace(self, **changes)

    def density(self) -> float:
        return number_density(self.temperature, self.density_model, self.density_override)

    def doppler_sigma(self) -> float:
        return doppler_sigma(self.temperature, self.atom_mass, self.line_center_frequency)

    def prefactor(self) -> float:
        """Susceptibility strength in rad/s for unit (normalized) line weight."""
        omega0 = 2 * np.pi * self.line_center_frequency
        return (self.amplitude_calibration * self.density() * self.electron_charge ** 2
                / (2 * self.electron_mass * constants.epsilon_0 * omega0))


@dataclass(frozen=True)
class SusceptibilityProfile:
    grid: FrequencyGrid
    chi: np.ndarray = field(repr=False)
    polarization: Polarization
    reference_frequency: float = CS_D1_FREQUENCY


def _require_finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("non-finite input")


def lorentzian_susceptibility(detuning_from_line, line: SpectralLine, prefactor: float):
    """Bare (homogeneous) line: ``prefactor * weight / (delta - i*gamma)``.

    ``detuning_from_line`` is line center minus probe frequency, in Hz; the
    conversion to angular units happens here. Im(result) >= 0.
    """
    _require_finite(detuning_from_line, prefactor)
    delta = 2 * np.pi * np.asarray(detuning_from_line, dtype=float)
    gamma = 2 * np.pi * line.natural_hwhm
    return prefactor * line.weight / (delta - 1j * gamma)


def number_density(temperature: float, model: DensityModel = DensityModel(),
                   override: float | None = None) -> float:
    """Saturated vapor number density ``P(T) / (k_B T)`` in m^-3."""
    if override is not None:
        return override
    if not math.isfinite(temperature) or temperature <= 0:
        raise InvalidArgumentError(f"temperature must be finite and > 0, got {temperature}")
    pressure = 10.0 ** (model.a - model.b / temperature)
    return pressure / (constants.k * temperature)


def doppler_sigma(temperature: float, atom_mass: float = CS_MASS,
                  line_center_frequency: float = CS_D1_FREQUENCY) -> float:
    """Standard deviation (Hz) of the Maxwell-Boltzmann Doppler shift."""
    return line_center_frequency / constants.c * math.sqrt(constants.k * temperature / atom_mass)


def zeeman_shift_lines(table: Sequence[SpectralLine], b_field: float,
                       polarization: Polarization | str) -> tuple[SpectralLine, ...]:
    s = Polarization.parse(polarization).sign
    return tuple(replace(line, detuning=line.detuning + s * line.zeeman_slope * b_field)
                 for line in table)


def doppler_susceptibility(line: SpectralLine, grid: FrequencyGrid, temperature: float,
                           atom_mass: float = CS_MASS, prefactor: float = 1.0,
                           line_center_frequency: float = CS_D1_FREQUENCY) -> np.ndarray:
    """Lorentzian line convolved with the thermal Gaussian, via ``wofz``.

    With ``delta = 2*pi*(nu_line - nu)``, ``s = 2*pi*sigma_D`` and
    ``z = (-delta + i*gamma) / (sqrt(2) s)`` the convolution is
    ``i*sqrt(pi)/(sqrt(2) s) * w(z)``.
    """
    if not temperature > 0:
        raise InvalidArgumentError(f"temperature must be > 0, got {temperature}")
    sigma_d = doppler_sigma(temperature, atom_mass, line_center_frequency)
    if grid.step > line.natural_hwhm and grid.step > sigma_d / 4:
        raise ResolutionError(
            f"grid step {grid.step:.4g} Hz resolves neither the natural width "
            f"({line.natural_hwhm:.4g} Hz) nor the Doppler width ({sigma_d:.4g} Hz)")
    delta = 2 * np.pi * (line.detuning - grid.values)
    gamma = 2 * np.pi * line.natural_hwhm
    s = 2 * np.pi * sigma_d * math.sqrt(2)
    z = (-delta + 1j * gamma) / s
    return prefactor * line.weight * (1j * math.sqrt(math.pi) / s) * wofz(z)


def build_susceptibility(config: VaporConfig, table: Sequence[SpectralLine], grid: FrequencyGrid,
                         polarization: Polarization | str) -> SusceptibilityProfile:
    """Sum of Doppler-broadened, Zeeman-shifted lines.

    Line weights are relative: they are normalized to unit sum, so the overall
    strength is set by density and ``amplitude_calibration`` alone.
    """
    polarization = Polarization.parse(polarization)
    if len(table) == 0:
        raise InvalidArgumentError("line table is empty")
    total_weight = sum(line.weight for line in table)
    if total_weight <= 0:
        raise InvalidArgumentError("line table has zero total weight")
    shifted = zeeman_shift_lines(table, config.b_field, polarization)
    margin = 10 * config.doppler_sigma()
    lo = min(line.detuning for line in shifted) - margin
    hi = max(line.detuning for line in shifted) + margin
    if lo < grid.start or hi > grid.stop:
        raise ResolutionError(
            f"grid [{grid.start:.4g}, {grid.stop:.4g}] Hz must span the lines plus 10 Doppler widths "
            f"[{lo:.4g}, {hi:.4g}] Hz")
    prefactor = config.prefactor() / total_weight
    chi = np.zeros(grid.count, dtype=complex)
    for line in shifted:
        chi += doppler_susceptibility(line, grid, config.temperature, config.atom_mass,
                                      prefactor, config.line_center_frequency)
    return SusceptibilityProfile(grid, chi, polarization, config.line_center_frequency)


_LINE_KEYS = ("detuning_hz", "weight", "hwhm_hz", "zeeman_slope_hz_per_t")


def parse_line_table(text: str) -> tuple[SpectralLine, ...]:
    """Parse ``key=value`` records, one spectral line per text line.

    Blank lines and ``#`` comments are ignored; keys may appear in any order
    and are separated by commas or whitespace.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        record = {}
        for item in body.replace(",", " ").split():
            key, sep, value = item.partition("=")
            if not sep:
                raise InvalidArgumentError(f"line {lineno}: expected key=value, got {item!r}")
            record[key.strip()] = value.strip()
        unknown = set(record) - set(_LINE_KEYS)
        missing = set(_LINE_KEYS) - set(record)
        if unknown or missing:
            raise InvalidArgumentError(
                f"line {lineno}: unknown keys {sorted(unknown)}, missing keys {sorted(missing)}")
        try:
            values = [float(record[k]) for k in _LINE_KEYS]
        except ValueError as exc:
            raise InvalidArgumentError(f"line {lineno}: {exc}") from None
        lines.append(SpectralLine(*values))
    if not lines:
        raise InvalidArgumentError("line table file contains no lines")
    return tuple(lines)


def load_line_table(path: str | Path) -> tuple[SpectralLine, ...]:
    return parse_line_table(Path(path).read_text(encoding="utf-8"))


def format_line_table(table: Iterable[SpectralLine]) -> str:
    rows = ["# detuning_hz, weight, hwhm_hz, zeeman_slope_hz_per_t"]
    for line in table:
        rows.append(f"detuning_hz={line.detuning!r}, weight={line.weight!r}, "
                    f"hwhm_hz={line.natural_hwhm!r}, zeeman_slope_hz_per_t={line.zeeman_slope!r}")
    return "\n".join(rows) + "\n"
