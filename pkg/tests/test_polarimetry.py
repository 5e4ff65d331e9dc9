import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import find_peaks

from oracles import central_window
from slowlight.calibration import profiles
from slowlight.dispersion import IndexProfile, transmission
from slowlight.ensemble import EnsembleSpec
from slowlight.errors import InvalidArgumentError
from slowlight.polarimetry import (
    QUARTER_WAVE_45,
    PolarizedSpectrum,
    PortSignals,
    continuous_wave_ports,
    davll_signal,
    decompose_linear,
    ensemble_ports,
    faraday_rotation_angle,
    from_cartesian,
    project,
    project_analyzer,
    project_pbs_linear,
    project_qwp_pbs,
    propagate_polarized,
    recompose_linear,
    to_cartesian,
    to_time,
    write_ports_csv,
)
from slowlight.propagation import SpectralAmplitude, lorentzian_photon
from slowlight.vapor import FrequencyGrid, SpectralLine, VaporConfig

SMALL = FrequencyGrid.centered(1e9, 256)


def random_spectrum(rng, grid=SMALL):
    return SpectralAmplitude(grid, rng.standard_normal(grid.count) + 1j * rng.standard_normal(grid.count))


# --- decomposition -------------------------------------------------------

def test_horizontal_decomposition(rng):
    spec = random_spectrum(rng)
    state = decompose_linear(0.0, spec)
    np.testing.assert_allclose(np.abs(state.sigma_plus), np.abs(spec.amplitude) / np.sqrt(2), rtol=1e-15)
    np.testing.assert_array_equal(state.sigma_plus, state.sigma_minus)


@given(st.floats(-np.pi, np.pi))
@settings(max_examples=30)
def test_recomposition_is_inverse(angle):
    spec = random_spectrum(np.random.default_rng(0))
    back = recompose_linear(decompose_linear(angle, spec), angle)
    np.testing.assert_allclose(back.amplitude, spec.amplitude, rtol=0, atol=1e-15 * 8)
    state = decompose_linear(angle, spec)
    energy = np.sum(np.abs(state.sigma_plus) ** 2 + np.abs(state.sigma_minus) ** 2)
    assert energy == pytest.approx(np.sum(np.abs(spec.amplitude) ** 2), rel=1e-14)


def test_quarter_turn_flips_relative_phase(rng):
    spec = random_spectrum(rng)
    a = decompose_linear(0.0, spec)
    b = decompose_linear(np.pi / 2, spec)
    rel_a = a.sigma_plus / a.sigma_minus
    rel_b = b.sigma_plus / b.sigma_minus
    np.testing.assert_allclose(rel_b, -rel_a, rtol=1e-14)


def test_cartesian_round_trip(rng):
    ex = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    ey = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    plus, minus = from_cartesian(ex, ey)
    back = to_cartesian(PolarizedSpectrum(SMALL, plus, minus))
    np.testing.assert_allclose(back[0], ex, rtol=1e-15)
    np.testing.assert_allclose(back[1], ey, rtol=1e-15)


# --- propagation ---------------------------------------------------------

def test_equal_profiles_preserve_polarization(rng, hot_profiles):
    prof = hot_profiles[0]
    state = decompose_linear(0.3, random_spectrum(rng, prof.grid))
    out = propagate_polarized(state, prof, prof, 0.25)
    alive = np.abs(out.sigma_minus) > 1e-100
    ratio_in = state.sigma_plus[alive] / state.sigma_minus[alive]
    ratio_out = out.sigma_plus[alive] / out.sigma_minus[alive]
    np.testing.assert_allclose(ratio_out, ratio_in, rtol=1e-12)


def test_vacuum_is_identity(rng):
    vac = IndexProfile.vacuum(SMALL)
    state = decompose_linear(0.7, random_spectrum(rng))
    out = propagate_polarized(state, vac, vac, 0.25)
    np.testing.assert_array_equal(out.sigma_plus, state.sigma_plus)
    np.testing.assert_array_equal(out.sigma_minus, state.sigma_minus)


def test_grid_mismatch(rng):
    state = decompose_linear(0.0, random_spectrum(rng))
    with pytest.raises(InvalidArgumentError):
        propagate_polarized(state, IndexProfile.vacuum(SMALL),
                            IndexProfile.vacuum(FrequencyGrid.centered(2e9, 256)), 0.25)


def component_centroids(profile_pair, grid):
    photon = lorentzian_photon(500e-12, 0.0, grid)
    out = to_time(propagate_polarized(decompose_linear(0.0, photon), *profile_pair, 0.25))
    t = out.times
    return [np.dot(t, np.abs(a) ** 2) / np.sum(np.abs(a) ** 2) for a in (out.sigma_plus, out.sigma_minus)]


def test_field_reverses_component_delays(hot_config, table, default_grid, hot_profiles_16mt):
    plus_first = component_centroids(hot_profiles_16mt, default_grid)
    reversed_field = component_centroids(profiles(hot_config.with_(b_field=-0.016), table, default_grid),
                                         default_grid)
    diff = plus_first[0] - plus_first[1]
    assert abs(diff) > 100e-12
    assert reversed_field[0] - reversed_field[1] == pytest.approx(-diff, rel=1e-6)


# --- projections ---------------------------------------------------------

def test_pure_sigma_plus_goes_to_h():
    ones = np.ones(4, dtype=complex)
    ports = project_qwp_pbs(PolarizedSpectrum(SMALL, ones, 0 * ones))
    np.testing.assert_allclose(ports.port_h, 1.0, rtol=1e-15)
    assert np.all(ports.port_v < 1e-30)
    ports = project_qwp_pbs(PolarizedSpectrum(SMALL, 0 * ones, ones))
    assert np.all(ports.port_h < 1e-30)


def test_quarter_wave_matrix_is_unitary():
    np.testing.assert_allclose(QUARTER_WAVE_45 @ QUARTER_WAVE_45.conj().T, np.eye(2), atol=1e-15)


def test_balanced_input_splits_evenly(rng):
    ports = project_qwp_pbs(decompose_linear(0.0, random_spectrum(rng)))
    np.testing.assert_allclose(ports.port_h, ports.port_v, rtol=1e-14)


def test_horizontal_light_exits_h(rng):
    spec = random_spectrum(rng)
    ports = project_pbs_linear(decompose_linear(0.0, spec))
    np.testing.assert_allclose(ports.port_h, np.abs(spec.amplitude) ** 2, rtol=1e-14)
    assert np.all(ports.port_v == 0)


def test_quarter_turn_rotation_swaps_ports(rng):
    spec = random_spectrum(rng)
    ports = project_pbs_linear(decompose_linear(np.pi / 2, spec))
    np.testing.assert_allclose(ports.port_v, np.abs(spec.amplitude) ** 2, rtol=1e-14)
    assert np.all(ports.port_h < 1e-28 * np.abs(spec.amplitude).max() ** 2)


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["linear_pbs", "qwp_pbs"]))
@settings(max_examples=30)
def test_projections_are_lossless(seed, geometry):
    rng = np.random.default_rng(seed)
    plus = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    minus = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    ports = project(PolarizedSpectrum(SMALL, plus, minus), geometry)
    total = np.abs(plus) ** 2 + np.abs(minus) ** 2
    np.testing.assert_allclose(ports.total, total, rtol=1e-12)
    assert np.all(ports.port_h >= 0) and np.all(ports.port_v >= 0)


def test_unknown_geometry():
    with pytest.raises(InvalidArgumentError):
        project(PolarizedSpectrum(SMALL, np.ones(2), np.ones(2)), "wollaston")


@given(st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi))
@settings(max_examples=30)
def test_malus_law(polarizer, analyzer):
    spec = SpectralAmplitude(SMALL, np.ones(SMALL.count, dtype=complex))
    vac = IndexProfile.vacuum(SMALL)
    out = propagate_polarized(decompose_linear(polarizer, spec), vac, vac, 0.25)
    recomposed = recompose_linear(out, polarizer)
    np.testing.assert_allclose(np.abs(recomposed.amplitude) ** 2, 1.0, rtol=1e-12)
    np.testing.assert_allclose(project_analyzer(out, analyzer), np.cos(analyzer - polarizer) ** 2,
                               rtol=0, atol=1e-12)
    ports = project_pbs_linear(out)
    np.testing.assert_allclose(ports.port_h, np.cos(polarizer) ** 2, atol=1e-12)


def test_spectral_and_temporal_projections_agree(hot_profiles_16mt, default_grid):
    photon = lorentzian_photon(500e-12, 0.4e9, default_grid)
    state = propagate_polarized(decompose_linear(0.2, photon), *hot_profiles_16mt, 0.25)
    packet = to_time(state)
    for geometry in ("linear_pbs", "qwp_pbs"):
        spectral = project(state, geometry)
        temporal = project(packet, geometry)
        for s, t in ((spectral.port_h, temporal.port_h), (spectral.port_v, temporal.port_v)):
            assert np.sum(s) * default_grid.step == pytest.approx(np.sum(t) * packet.t_step, rel=1e-12)


# --- Faraday angle and oscillations ---------------------------------------

def test_faraday_angle_zero_field(hot_profiles):
    assert np.all(faraday_rotation_angle(*hot_profiles, 0.25) == 0)


def test_faraday_angle_antisymmetric(warm_config, table, default_grid, warm_profiles):
    reverse = profiles(warm_config.with_(b_field=-warm_config.b_field), table, default_grid)
    np.testing.assert_array_equal(faraday_rotation_angle(*reverse, 0.25),
                                  -faraday_rotation_angle(*warm_profiles, 0.25))


def test_ports_follow_faraday_angle_for_equal_absorption(warm_profiles):
    plus, minus = warm_profiles
    shared = 0.5 * (plus.alpha + minus.alpha)
    p = IndexProfile(plus.grid, plus.n_minus_one, shared)
    m = IndexProfile(minus.grid, minus.n_minus_one, shared)
    theta = faraday_rotation_angle(p, m, 0.25)
    ports = continuous_wave_ports(p, m, 0.25, "linear_pbs")
    envelope = np.exp(-shared * 0.25)
    np.testing.assert_allclose(ports.port_h, envelope * np.cos(theta) ** 2, rtol=0, atol=1e-12)
    np.testing.assert_allclose(ports.port_v, envelope * np.sin(theta) ** 2, rtol=0, atol=1e-12)


def test_pi_crossings_match_oscillation_periods(warm_profiles, warm_zero_field):
    ports = continuous_wave_ports(*warm_profiles, 0.25, "linear_pbs")
    theta = faraday_rotation_angle(*warm_profiles, 0.25)
    span = central_window(transmission(warm_zero_field, 0.25))
    crossings = np.count_nonzero(np.diff(np.floor(theta[span] / np.pi)))
    ratio = ports.port_h[span] / ports.total[span]
    peaks, _ = find_peaks(ratio)
    # maxima sit at theta = k pi; the extra one at the turning point of theta is not a period
    at_multiples = [i for i in peaks if abs(np.sin(theta[span][i])) < 0.2]
    assert len(at_multiples) == crossings
    assert crossings >= 4
    assert ratio.min() < 1e-3 and ratio.max() > 0.999


# --- DAVLL ---------------------------------------------------------------

def test_davll_zero_field(hot_profiles):
    signal = davll_signal(continuous_wave_ports(*hot_profiles, 0.25, "qwp_pbs"))
    assert np.max(np.abs(signal)) < 1e-15


def single_line_davll(b_field):
    grid = FrequencyGrid.centered(4e9, 2 ** 14)
    cfg = VaporConfig(temperature=330.0, b_field=b_field, density_override=3e15)
    pair = profiles(cfg, (SpectralLine(0.0, 1.0),), grid)
    return grid, davll_signal(continuous_wave_ports(*pair, 0.25, "qwp_pbs")), transmission(pair[0], 0.25)


def test_davll_dispersive_zero_at_line_center():
    grid, signal, t_plus = single_line_davll(1e-4)
    assert 0.05 < t_plus.min() < 0.95  # optically thin enough to see the line shape
    centre = int(np.argmin(np.abs(grid.values)))
    core = slice(centre - 400, centre + 401)
    sign_changes = np.nonzero(np.diff(np.sign(signal[core])))[0] + core.start
    nearest = sign_changes[np.argmin(np.abs(grid.values[sign_changes]))]
    assert abs(grid.values[nearest]) <= grid.step
    # odd about the line up to the second-order term of sqrt(1 + chi)
    mirror = signal[1:][::-1]
    np.testing.assert_allclose(signal[1:], -mirror, rtol=0, atol=1e-5 * np.abs(signal).max())


def test_davll_flips_with_field():
    _, forward, _ = single_line_davll(2e-4)
    _, backward, _ = single_line_davll(-2e-4)
    np.testing.assert_allclose(backward, -forward, rtol=0, atol=1e-14)


# --- ensemble port traces ------------------------------------------------

def test_zero_field_ports_identical(hot_profiles):
    h, v = ensemble_ports(EnsembleSpec(samples=8), *hot_profiles, 0.25)
    np.testing.assert_allclose(h.intensity, v.intensity, rtol=1e-12, atol=1e-14 * h.intensity.max())


def test_port_delays_antisymmetric_in_field(hot_config, table, default_grid, hot_profiles_16mt):
    spec = EnsembleSpec(samples=40)
    h_fwd, v_fwd = ensemble_ports(spec, *hot_profiles_16mt, 0.25)
    reverse = profiles(hot_config.with_(b_field=-0.016), table, default_grid)
    h_rev, v_rev = ensemble_ports(spec, *reverse, 0.25)
    assert abs(h_fwd.centroid() - v_rev.centroid()) < 1e-12
    assert abs(v_fwd.centroid() - h_rev.centroid()) < 1e-12
    assert abs(h_fwd.centroid() - v_fwd.centroid()) > 100e-12


def test_ports_csv(tmp_path):
    from slowlight.io import read_csv

    ports = PortSignals(np.array([0.1, 0.2]), np.array([0.3, 0.4]))
    path = tmp_path / "ports.csv"
    write_ports_csv("detuning_hz", np.array([-1.0, 1.0]), ports, path)
    columns, data, _ = read_csv(path)
    assert columns == ["detuning_hz", "port_h", "port_v"]
    np.testing.assert_array_equal(data[:, 1], ports.port_h)
