"""Independent reference computations used to check the fast paths."""

import numpy as np

from slowlight.calibration import profiles
from slowlight.propagation import exponential_photon, transfer_function
from slowlight.vapor import FrequencyGrid, VaporConfig, default_line_table

ORACLE_GRID = FrequencyGrid.centered(10e9, 4096)


def oracle_fixture():
    """Calibrated 130 C sigma+ profile and a smooth-onset photon on the 4096-point grid."""
    plus, _ = profiles(VaporConfig(temperature=403.15), default_line_table(), ORACLE_GRID)
    photon = exponential_photon(500e-12, 0.0, ORACLE_GRID, rise_time=100e-12)
    return plus, photon


def impulse_response(transfer, grid, lags, chunk=512):
    """``h(tau) = sum_k H(nu_k) exp(-2 pi i nu_k tau) dnu`` by direct summation."""
    nu = grid.values
    out = np.empty(lags.size, dtype=complex)
    for lo in range(0, lags.size, chunk):
        tau = lags[lo:lo + chunk, None]
        cycles = nu[None, :] * tau
        out[lo:lo + chunk] = np.exp(-2j * np.pi * (cycles - np.round(cycles))) @ transfer * grid.step
    return out


def brute_force_propagate(amplitude, t_step, profile, length):
    """Direct time-domain convolution of a sampled input with the medium impulse response."""
    grid = profile.grid
    n = amplitude.size
    lags = np.arange(-(n - 1), n) * t_step
    h = impulse_response(transfer_function(profile, length), grid, lags)
    out = np.empty(n, dtype=complex)
    for i in range(n):
        # h at lag (i - m) for m = 0..n-1
        out[i] = np.dot(h[i + n - 1::-1][:n], amplitude) * t_step
    return out


def gaussian_ensemble_centroid(profile, length, lifetime=500e-12, jitter_fwhm=3e9, nodes=401, width=5.0):
    """Expected centroid of the jittered ensemble by quadrature over the carrier density.

    The ensemble trace is the carrier-averaged intensity, so its centroid is the
    density-weighted first moment divided by the density-weighted energy.
    """
    from slowlight.ensemble import FWHM_PER_SIGMA, photon_intensities
    from slowlight.propagation import default_t_start

    grid = profile.grid
    sigma = jitter_fwhm / FWHM_PER_SIGMA
    carriers = np.linspace(-width * sigma, width * sigma, nodes)
    density = np.exp(-0.5 * (carriers / sigma) ** 2)
    times = default_t_start(grid) + grid.time_step * np.arange(grid.count)
    energy = moment = 0.0
    for lo in range(0, nodes, 50):
        rows = photon_intensities(carriers[lo:lo + 50], lifetime, profile, length)
        energy += density[lo:lo + 50] @ rows.sum(axis=1)
        moment += density[lo:lo + 50] @ (rows @ times)
    return moment / energy


def central_window(envelope, level=0.5):
    """Contiguous index span around the grid centre where ``envelope >= level``."""
    ok = envelope >= level
    lo = hi = ok.size // 2
    while lo > 0 and ok[lo - 1]:
        lo -= 1
    while hi < ok.size - 1 and ok[hi + 1]:
        hi += 1
    return slice(lo, hi + 1)
