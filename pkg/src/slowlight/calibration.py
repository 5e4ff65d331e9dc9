"""One-time calibration of the two free model scales.

``amplitude_calibration`` is fixed by a one-dimensional root find so the
zero-field ensemble centroid delay at 130 C equals 25 ns. The effective Zeeman
g-factor is not fitted; :func:`routing_span` reports the span it produces.
"""

from __future__ import annotations

from dataclasses import replace

from scipy.optimize import brentq

from .dispersion import group_delay, index_from_susceptibility
from .ensemble import EnsembleSpec, ensemble_delay
from .vapor import (
    BOHR_MAGNETON_HZ_PER_T,
    FrequencyGrid,
    Polarization,
    VaporConfig,
    build_susceptibility,
    default_line_table,
)

TARGET_DELAY = 25e-9
DEFAULT_GRID = FrequencyGrid.centered(40e9, 2 ** 16)


def profiles(config: VaporConfig, table, grid: FrequencyGrid):
    return tuple(index_from_susceptibility(build_susceptibility(config, table, grid, pol))
                 for pol in (Polarization.SIGMA_PLUS, Polarization.SIGMA_MINUS))


def zero_field_delay(amplitude: float, config: VaporConfig = VaporConfig(), table=None,
                     grid: FrequencyGrid = DEFAULT_GRID, spec: EnsembleSpec = EnsembleSpec()) -> float:
    table = default_line_table() if table is None else table
    cfg = replace(config, amplitude_calibration=amplitude, b_field=0.0)
    plus = index_from_susceptibility(build_susceptibility(cfg, table, grid, Polarization.SIGMA_PLUS))
    return ensemble_delay(spec, plus, cfg.length)


def calibrate_amplitude(target: float = TARGET_DELAY, config: VaporConfig = VaporConfig(),
                        table=None, grid: FrequencyGrid = DEFAULT_GRID,
                        spec: EnsembleSpec = EnsembleSpec(), bracket=(0.1, 1.0),
                        xtol: float = 1e-5) -> float:
    return brentq(lambda a: zero_field_delay(a, config, table, grid, spec) - target,
                  *bracket, xtol=xtol)


def routing_difference(config: VaporConfig, table, grid: FrequencyGrid = DEFAULT_GRID,
                       spec: EnsembleSpec | None = None, operating_point: float = 0.0) -> float:
    """sigma+ minus sigma- delay at ``config.b_field``.

    Uses the ensemble centroid when ``spec`` is given, the analytic group
    delay at ``operating_point`` otherwise.
    """
    plus, minus = profiles(config, table, grid)
    if spec is None:
        return (group_delay(plus, operating_point, config.length)
                - group_delay(minus, operating_point, config.length))
    return ensemble_delay(spec, plus, config.length) - ensemble_delay(spec, minus, config.length)


def routing_span(g_eff: float, b_max: float = 0.016, config: VaporConfig = VaporConfig(),
                 grid: FrequencyGrid = DEFAULT_GRID, spec: EnsembleSpec | None = EnsembleSpec()) -> float:
    """Span of the sigma+/sigma- delay difference over ``[-b_max, b_max]``.

    The difference is odd in B by construction, so the span is twice its
    value at ``+b_max``.
    """
    table = default_line_table(zeeman_slope=g_eff * BOHR_MAGNETON_HZ_PER_T)
    diff = routing_difference(replace(config, b_field=b_max), table, grid, spec)
    return 2 * abs(diff)


if __name__ == "__main__":
    amp = calibrate_amplitude()
    print(f"amplitude_calibration = {amp!r}")
    cfg = VaporConfig(amplitude_calibration=amp)
    for g in (2 / 3, 4 / 3, 8 / 3):
        print(f"g_eff = {g:.4f}: ensemble span = {routing_span(g, config=cfg):.4e} s, "
              f"analytic span = {routing_span(g, config=cfg, spec=None):.4e} s")
    print("analytic zero-field delay:",
          group_delay(profiles(cfg, default_line_table(), DEFAULT_GRID)[0], 0.0, cfg.length))
