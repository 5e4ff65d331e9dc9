"""Refractive index, group index/delay, transmission and a Kramers-Kronig check."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import constants

from .errors import FrequencyRangeError, InvalidArgumentError, ResolutionError
from .vapor import FrequencyGrid, Polarization, SusceptibilityProfile, CS_D1_FREQUENCY


@dataclass(frozen=True)
class IndexProfile:
    """Complex index ``n_c = n' + i*alpha/(2k)`` sampled on a detuning grid.

    ``n_minus_one`` holds ``n' - 1`` so that the tiny deviation from unity
    keeps full floating-point precision; ``n_real`` is derived from it.
    """

    grid: FrequencyGrid
    n_minus_one: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)  # intensity absorption coefficient, 1/m
    polarization: Polarization = Polarization.SIGMA_PLUS
    reference_frequency: float = CS_D1_FREQUENCY

    @property
    def n_real(self) -> np.ndarray:
        return 1.0 + self.n_minus_one

    @property
    def absolute_frequency(self) -> np.ndarray:
        return self.reference_frequency + self.grid.values

    @property
    def wavenumber(self) -> np.ndarray:
        return 2 * np.pi * self.absolute_frequency / constants.c

    @property
    def nc_minus_one(self) -> np.ndarray:
        return self.n_minus_one + 1j * self.alpha / (2 * self.wavenumber)

    @classmethod
    def vacuum(cls, grid: FrequencyGrid, polarization=Polarization.SIGMA_PLUS,
               reference_frequency: float = CS_D1_FREQUENCY) -> "IndexProfile":
        zeros = np.zeros(grid.count)
        return cls(grid, zeros, zeros.copy(), polarization, reference_frequency)


def index_from_susceptibility(profile: SusceptibilityProfile) -> IndexProfile:
    """``n_c = sqrt(1 + chi)``; ``alpha = 2 (omega/c) Im n_c``."""
    chi = np.asarray(profile.chi, dtype=complex)
    # sqrt(1+chi) - 1 without cancellation
    nc_minus_one = chi / (1.0 + np.sqrt(1.0 + chi))
    omega = 2 * np.pi * (profile.reference_frequency + profile.grid.values)
    alpha = 2 * omega / constants.c * nc_minus_one.imag
    return IndexProfile(profile.grid, nc_minus_one.real, alpha, profile.polarization,
                        profile.reference_frequency)


def _derivative(values: np.ndarray, step: float) -> np.ndarray:
    """Fourth-order central difference; second order in the two edge bins."""
    d = np.gradient(values, step, edge_order=2)
    if values.size >= 5:
        d[2:-2] = (-values[4:] + 8 * values[3:-1] - 8 * values[1:-3] + values[:-4]) / (12 * step)
    return d


def group_index_minus_one(profile: IndexProfile) -> np.ndarray:
    """``n_g - 1`` on every grid point."""
    dn = _derivative(profile.n_minus_one, profile.grid.step)
    return profile.n_minus_one + profile.absolute_frequency * dn


def _at(profile: IndexProfile, values: np.ndarray, frequency: float) -> float:
    grid = profile.grid
    if not grid.start < frequency < grid.stop:
        raise FrequencyRangeError(
            f"frequency {frequency:.6g} Hz outside grid ({grid.start:.6g}, {grid.stop:.6g})")
    return float(np.interp(frequency, grid.values, values))


def group_index(profile: IndexProfile, frequency: float) -> float:
    """Group index ``n' + nu dn'/dnu`` at a detuning strictly inside the grid."""
    return 1.0 + _at(profile, group_index_minus_one(profile), frequency)


def group_delay(profile: IndexProfile, frequency: float, length: float) -> float:
    """Delay relative to vacuum transit, ``(n_g - 1) L / c``."""
    return _at(profile, group_index_minus_one(profile), frequency) * length / constants.c


def transmission(profile: IndexProfile, length: float) -> np.ndarray:
    if length < 0:
        raise InvalidArgumentError(f"length must be >= 0, got {length}")
    return np.exp(-profile.alpha * length)


def hilbert_transform(values: np.ndarray, pad_factor: int = 8) -> np.ndarray:
    """``(1/pi) PV int f(y) / (x - y) dy`` on a uniform grid.

    Uses the transform-domain multiplier ``-i sign(k)`` on a zero-padded copy
    so the periodic kernel approximates the aperiodic one.
    """
    n = values.size
    m = n * pad_factor
    spectrum = np.fft.fft(values, m)
    k = np.fft.fftfreq(m)
    return np.fft.ifft(-1j * np.sign(k) * spectrum)[:n].real


def kramers_kronig_residual(profile: IndexProfile, edge_tolerance: float = 1e-4) -> float:
    """Max deviation of ``n' - 1`` rebuilt from ``alpha``, relative to max ``|n' - 1|``.

    For a causal medium ``n' - 1 = -H[n'']`` with ``n'' = alpha / 2k``.
    """
    stored = profile.n_minus_one
    scale = np.max(np.abs(stored))
    n_imag = profile.alpha / (2 * profile.wavenumber)
    if scale == 0 and not np.any(n_imag):
        return 0.0
    peak = np.max(np.abs(n_imag))
    if max(abs(n_imag[0]), abs(n_imag[-1])) > edge_tolerance * peak:
        raise ResolutionError("absorption has not decayed at the grid edges; widen the grid")
    rebuilt = -hilbert_transform(n_imag)
    return float(np.max(np.abs(rebuilt - stored)) / scale)


def write_index_csv(profile: IndexProfile, path: str | Path, header: str = "") -> None:
    from .io import write_csv

    write_csv(path, ["detuning_hz", "n_real", "alpha_per_m"],
              [profile.grid.values, profile.n_real, profile.alpha], header=header)
