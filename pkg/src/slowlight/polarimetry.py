"""Jones calculus in the circular basis: decomposition, per-helicity
propagation, analyzer projections, Faraday angle and DAVLL error signal.

Conventions (fixed once):

* circular unit vectors ``e+ = (x + i y)/sqrt(2)``, ``e- = (x - i y)/sqrt(2)``;
  linear light at angle ``theta`` is ``(exp(-i theta) e+ + exp(i theta) e-)/sqrt(2)``;
* the quarter-wave plate has its fast axis at +45 degrees to the PBS axes,
  which sends sigma+ to the H port and sigma- to the V port.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dispersion import IndexProfile
from .ensemble import EnsembleSpec, IntensityTrace, sample_carriers
from .errors import InvalidArgumentError, WindowTooShortError
from .propagation import (
    EDGE_ENERGY_LIMIT,
    SpectralAmplitude,
    _check_grid,
    _phase,
    default_t_start,
    lorentzian_photon,
    propagate_spectrum,
    to_wavepacket,
    transfer_function,
)
from .vapor import FrequencyGrid

SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True)
class PolarizedSpectrum:
    grid: FrequencyGrid
    sigma_plus: np.ndarray = field(repr=False)
    sigma_minus: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class PolarizedWavepacket:
    t_start: float
    t_step: float
    sigma_plus: np.ndarray = field(repr=False)
    sigma_minus: np.ndarray = field(repr=False)

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.t_step * np.arange(self.sigma_plus.size)


@dataclass(frozen=True)
class PortSignals:
    port_h: np.ndarray
    port_v: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.port_h + self.port_v


def decompose_linear(angle: float, spectrum: SpectralAmplitude) -> PolarizedSpectrum:
    a = spectrum.amplitude * SQRT_HALF
    return PolarizedSpectrum(spectrum.grid, a * np.exp(-1j * angle), a * np.exp(1j * angle))


def to_cartesian(state) -> tuple[np.ndarray, np.ndarray]:
    """Jones components ``(E_x, E_y)`` of a circular-basis state."""
    p, m = state.sigma_plus, state.sigma_minus
    return SQRT_HALF * (p + m), 1j * SQRT_HALF * (p - m)


def from_cartesian(ex, ey) -> tuple[np.ndarray, np.ndarray]:
    return SQRT_HALF * (ex - 1j * ey), SQRT_HALF * (ex + 1j * ey)


def recompose_linear(state: PolarizedSpectrum, angle: float = 0.0) -> SpectralAmplitude:
    """Amplitude along a linear axis at ``angle`` (inverse of :func:`decompose_linear`)."""
    ex, ey = to_cartesian(state)
    return SpectralAmplitude(state.grid, np.cos(angle) * ex + np.sin(angle) * ey)


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def waveplate(retardance: float, fast_axis: float) -> np.ndarray:
    """Jones matrix of a retarder; the slow axis lags by ``retardance``."""
    core = np.diag([1.0, np.exp(1j * retardance)])
    return rotation(-fast_axis) @ core @ rotation(fast_axis)


QUARTER_WAVE_45 = waveplate(np.pi / 2, np.pi / 4)


def _apply(matrix: np.ndarray, ex, ey):
    return matrix[0, 0] * ex + matrix[0, 1] * ey, matrix[1, 0] * ex + matrix[1, 1] * ey


def project_pbs_linear(state) -> PortSignals:
    """PBS directly behind the cell (Faraday-rotation geometry)."""
    ex, ey = to_cartesian(state)
    return PortSignals(np.abs(ex) ** 2, np.abs(ey) ** 2)


def project_qwp_pbs(state) -> PortSignals:
    """Quarter-wave plate at 45 degrees then PBS: sigma+ -> H, sigma- -> V."""
    ex, ey = _apply(QUARTER_WAVE_45, *to_cartesian(state))
    return PortSignals(np.abs(ex) ** 2, np.abs(ey) ** 2)


def project_analyzer(state, angle: float) -> np.ndarray:
    """Intensity behind an ideal linear analyzer at ``angle``."""
    ex, ey = to_cartesian(state)
    return np.abs(np.cos(angle) * ex + np.sin(angle) * ey) ** 2


def propagate_polarized(state: PolarizedSpectrum, profile_plus: IndexProfile,
                        profile_minus: IndexProfile, length: float) -> PolarizedSpectrum:
    _check_grid(profile_plus.grid, profile_minus.grid)
    plus = propagate_spectrum(SpectralAmplitude(state.grid, state.sigma_plus), profile_plus, length)
    minus = propagate_spectrum(SpectralAmplitude(state.grid, state.sigma_minus), profile_minus, length)
    return PolarizedSpectrum(state.grid, plus.amplitude, minus.amplitude)


def to_time(state: PolarizedSpectrum, t_start: float | None = None) -> PolarizedWavepacket:
    plus = to_wavepacket(SpectralAmplitude(state.grid, state.sigma_plus), t_start)
    minus = to_wavepacket(SpectralAmplitude(state.grid, state.sigma_minus), t_start)
    return PolarizedWavepacket(plus.t_start, plus.t_step, plus.amplitude, minus.amplitude)


def faraday_rotation_angle(profile_plus: IndexProfile, profile_minus: IndexProfile,
                           length: float) -> np.ndarray:
    """``(n+ - n-) pi nu L / c`` per grid point, in radians."""
    _check_grid(profile_plus.grid, profile_minus.grid)
    return 0.5 * (profile_plus.n_minus_one - profile_minus.n_minus_one) * profile_plus.wavenumber * length


def davll_signal(ports: PortSignals) -> np.ndarray:
    return ports.port_h - ports.port_v


def continuous_wave_ports(profile_plus: IndexProfile, profile_minus: IndexProfile, length: float,
                          geometry: str = "linear_pbs", angle: float = 0.0) -> PortSignals:
    """Per-frequency port transmissions for unit-intensity linear input."""
    grid = profile_plus.grid
    state = decompose_linear(angle, SpectralAmplitude(grid, np.ones(grid.count, dtype=complex)))
    return project(propagate_polarized(state, profile_plus, profile_minus, length), geometry)


def project(state, geometry: str) -> PortSignals:
    if geometry == "linear_pbs":
        return project_pbs_linear(state)
    if geometry == "qwp_pbs":
        return project_qwp_pbs(state)
    raise InvalidArgumentError(f"unknown geometry {geometry!r}")


def ensemble_ports(spec: EnsembleSpec, profile_plus: IndexProfile, profile_minus: IndexProfile,
                   length: float, geometry: str = "qwp_pbs", angle: float = 0.0,
                   t_start: float | None = None) -> tuple[IntensityTrace, IntensityTrace]:
    """Ensemble-averaged port traces; each photon is projected before averaging."""
    grid = profile_plus.grid
    _check_grid(grid, profile_minus.grid)
    if t_start is None:
        t_start = default_t_start(grid)
    h_plus = transfer_function(profile_plus, length)
    h_minus = transfer_function(profile_minus, length)
    k = np.arange(grid.count)
    pre = _phase(k * grid.step * t_start)
    rot_p, rot_m = SQRT_HALF * np.exp(-1j * angle), SQRT_HALF * np.exp(1j * angle)
    sum_h = np.zeros(grid.count)
    sum_v = np.zeros(grid.count)
    carriers = sample_carriers(spec)
    for c in carriers:
        photon = lorentzian_photon(spec.lifetime, float(c), grid).amplitude * pre
        state = PolarizedWavepacket(t_start, grid.time_step,
                                    grid.step * np.fft.fft(rot_p * photon * h_plus),
                                    grid.step * np.fft.fft(rot_m * photon * h_minus))
        ports = project(state, geometry)
        sum_h += ports.port_h
        sum_v += ports.port_v
    traces = tuple(IntensityTrace(t_start, grid.time_step, s / carriers.size) for s in (sum_h, sum_v))
    total = traces[0].intensity + traces[1].intensity
    m = max(1, int(total.size * 0.01))
    if (total[:m].sum() + total[-m:].sum()) > EDGE_ENERGY_LIMIT * total.sum():
        raise WindowTooShortError("ensemble port traces leak into the window edges")
    return traces


def write_ports_csv(axis_name: str, axis: np.ndarray, ports: PortSignals, path: str | Path,
                    header: str = "") -> None:
    from .io import write_csv

    write_csv(path, [axis_name, "port_h", "port_v"], [axis, ports.port_h, ports.port_v], header=header)

