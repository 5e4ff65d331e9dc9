"""Spectral-diffusion ensembles and synthetic TCSPC histograms.

Each emission event is a Fourier-limited photon whose carrier is drawn from a
Gaussian. Sample ``i`` always uses its own generator stream derived from
``(seed, i)``, so results do not depend on evaluation order or batching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dispersion import IndexProfile
from .errors import InvalidArgumentError, WindowTooShortError
from .propagation import (
    EDGE_ENERGY_LIMIT,
    EDGE_FRACTION_BINS,
    _phase,
    centroid,
    default_t_start,
    lorentzian_photon,
    peak_time,
    transfer_function,
)

FWHM_PER_SIGMA = 2 * math.sqrt(2 * math.log(2))


@dataclass(frozen=True)
class EnsembleSpec:
    lifetime: float = 500e-12  # s
    jitter_fwhm: float = 3e9  # Hz
    center_detuning: float = 0.0  # Hz, relative to the window center
    samples: int = 2000
    seed: int = 20190101

    def __post_init__(self):
        if not self.lifetime > 0:
            raise InvalidArgumentError(f"lifetime must be > 0, got {self.lifetime}")
        if not self.jitter_fwhm >= 0:
            raise InvalidArgumentError(f"jitter_fwhm must be >= 0, got {self.jitter_fwhm}")
        if self.samples < 1:
            raise InvalidArgumentError(f"samples must be >= 1, got {self.samples}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class IntensityTrace:
    t_start: float
    t_step: float
    intensity: np.ndarray = field(repr=False)

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.t_step * np.arange(self.intensity.size)

    def energy(self) -> float:
        return float(self.intensity.sum() * self.t_step)

    def centroid(self) -> float:
        return centroid(self.times, self.intensity)

    def peak(self) -> float:
        return peak_time(self.times, self.intensity)


def sample_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_carriers(spec: EnsembleSpec) -> np.ndarray:
    sigma = spec.jitter_fwhm / FWHM_PER_SIGMA
    draws = np.array([sample_stream(spec.seed, i).standard_normal() for i in range(spec.samples)])
    return spec.center_detuning + sigma * draws


def photon_intensities(carriers, lifetime: float, profile: IndexProfile, length: float,
                       t_start: float | None = None) -> np.ndarray:
    """Time-domain intensity of each propagated photon, one row per carrier."""
    grid = profile.grid
    if t_start is None:
        t_start = default_t_start(grid)
    h = transfer_function(profile, length)
    n = grid.count
    k = np.arange(n)
    pre_phase = _phase(k * grid.step * t_start)
    rows = []
    for c in np.atleast_1d(carriers):
        spectrum = lorentzian_photon(lifetime, float(c), grid).amplitude
        # the global phase exp(-2 pi i nu_0 t) drops out of |a|^2
        amp = grid.step * np.fft.fft(spectrum * h * pre_phase)
        rows.append(np.abs(amp) ** 2)
    return np.array(rows)


def _edge_fraction(intensity: np.ndarray) -> float:
    total = intensity.sum()
    if total == 0:
        return 0.0
    m = max(1, int(intensity.size * EDGE_FRACTION_BINS))
    return float((intensity[:m].sum() + intensity[-m:].sum()) / total)


def mean_intensity(carriers, lifetime: float, profile: IndexProfile, length: float,
                   t_start: float | None = None, batch: int = 64) -> IntensityTrace:
    """Arithmetic mean of single-photon intensities, summed in carrier order."""
    grid = profile.grid
    if t_start is None:
        t_start = default_t_start(grid)
    carriers = np.atleast_1d(np.asarray(carriers, dtype=float))
    total = np.zeros(grid.count)
    for lo in range(0, carriers.size, batch):
        for row in photon_intensities(carriers[lo:lo + batch], lifetime, profile, length, t_start):
            total += row
    mean = total / carriers.size
    if _edge_fraction(mean) > EDGE_ENERGY_LIMIT:
        raise WindowTooShortError(
            f"ensemble edge energy fraction {_edge_fraction(mean):.3g} exceeds {EDGE_ENERGY_LIMIT}")
    return IntensityTrace(t_start, grid.time_step, mean)


def ensemble_intensity(spec: EnsembleSpec, profile: IndexProfile, length: float,
                       t_start: float | None = None) -> IntensityTrace:
    return mean_intensity(sample_carriers(spec), spec.lifetime, profile, length, t_start)


def reference_centroid(spec: EnsembleSpec, profile: IndexProfile, t_start: float | None = None) -> float:
    """Centroid of the unpropagated photon (carrier independent)."""
    vacuum = IndexProfile.vacuum(profile.grid, profile.polarization, profile.reference_frequency)
    return mean_intensity([spec.center_detuning], spec.lifetime, vacuum, 0.0, t_start).centroid()


def ensemble_delay(spec: EnsembleSpec, profile: IndexProfile, length: float) -> float:
    """Centroid delay of the ensemble trace relative to the emitted photon."""
    return ensemble_intensity(spec, profile, length).centroid() - reference_centroid(spec, profile)


def gaussian_blur(trace: IntensityTrace, fwhm: float) -> IntensityTrace:
    """Circular convolution with a unit-area Gaussian instrument response."""
    if fwhm <= 0:
        return trace
    sigma = fwhm / FWHM_PER_SIGMA
    f = np.fft.rfftfreq(trace.intensity.size, trace.t_step)
    kernel = np.exp(-2 * (np.pi * sigma * f) ** 2)
    blurred = np.fft.irfft(np.fft.rfft(trace.intensity) * kernel, trace.intensity.size)
    return IntensityTrace(trace.t_start, trace.t_step, np.clip(blurred, 0.0, None))


def fold(trace: IntensityTrace, period: float, bin_width: float | None = None) -> IntensityTrace:
    """Fold onto ``[0, period)`` and rebin; values stay a rate per unit time."""
    if not period > 0:
        raise InvalidArgumentError(f"repetition period must be > 0, got {period}")
    if bin_width is None:
        bin_width = trace.t_step
    nbins = int(math.ceil(period / bin_width - 1e-9))
    phase = np.mod(trace.times, period)
    idx = np.minimum(np.floor(phase / bin_width + 1e-9).astype(int), nbins - 1)
    counts = np.bincount(idx, weights=trace.intensity * trace.t_step, minlength=nbins)
    return IntensityTrace(0.0, bin_width, counts / bin_width)


def synthesize_tcspc(trace: IntensityTrace, irf_fwhm: float = 400e-12, rep_rate: float = 15e6,
                     total_counts: int | None = None, seed: int = 0,
                     bin_width: float | None = 100e-12) -> IntensityTrace:
    """Detector-realistic histogram: IRF blur, fold at the repetition period, Poisson counts.

    ``total_counts=None`` is the infinite-count limit and returns the folded
    rate without noise. Otherwise bins hold integer counts whose expected
    total is ``total_counts``.
    """
    if not rep_rate > 0:
        raise InvalidArgumentError(f"rep_rate must be > 0, got {rep_rate}")
    folded = fold(gaussian_blur(trace, irf_fwhm), 1.0 / rep_rate, bin_width)
    if total_counts is None:
        return folded
    weights = folded.intensity / folded.intensity.sum()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    counts = rng.poisson(total_counts * weights).astype(float)
    return IntensityTrace(folded.t_start, folded.t_step, counts)


def write_tcspc_csv(trace: IntensityTrace, path: str | Path, header: str = "") -> None:
    from .io import write_csv

    write_csv(path, ["time_s", "counts"], [trace.times, trace.intensity], header=header)
