"""The three runners behind the command line: frequency scan, pulsed ensemble,
magnetic-field sweep. Each writes CSV files whose header carries the fully
resolved configuration, so any output can be regenerated from itself.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import RunConfig, format_config
from .dispersion import IndexProfile, group_delay, index_from_susceptibility, transmission, write_index_csv
from .ensemble import EnsembleSpec, ensemble_delay, mean_intensity, synthesize_tcspc, write_tcspc_csv
from .errors import InvalidArgumentError
from .io import write_csv, write_summary
from .polarimetry import (
    PortSignals,
    continuous_wave_ports,
    davll_signal,
    ensemble_ports,
    faraday_rotation_angle,
    write_ports_csv,
)
from .propagation import default_t_start
from .vapor import Polarization, VaporConfig, build_susceptibility


def header_for(cfg: RunConfig, content: str) -> str:
    return f"slowlight {cfg.runner} output: {content}\n{format_config(cfg)}"


def index_profiles(cfg: RunConfig, vapor: VaporConfig | None = None) -> tuple[IndexProfile, IndexProfile]:
    vapor = cfg.vapor if vapor is None else vapor
    return tuple(index_from_susceptibility(build_susceptibility(vapor, cfg.lines, cfg.grid, pol))
                 for pol in (Polarization.SIGMA_PLUS, Polarization.SIGMA_MINUS))


def run_scan(cfg: RunConfig, out_dir: str | Path) -> dict[str, Path]:
    """Continuous-wave port transmissions versus probe detuning."""
    out_dir = Path(out_dir)
    plus, minus = index_profiles(cfg)
    zero_field = index_profiles(cfg, cfg.vapor.with_(b_field=0.0))[0]
    ports = continuous_wave_ports(plus, minus, cfg.vapor.length, cfg.geometry, cfg.input_angle)
    detuning = cfg.grid.values
    files = {
        "ports": out_dir / "scan_ports.csv",
        "spectra": out_dir / "scan_spectra.csv",
        "index_plus": out_dir / "index_sigma_plus.csv",
        "index_minus": out_dir / "index_sigma_minus.csv",
    }
    write_ports_csv("detuning_hz", detuning, ports, files["ports"],
                    header_for(cfg, "port transmission per unit input intensity"))
    write_csv(files["spectra"],
              ["detuning_hz", "transmission_zero_field", "transmission_sigma_plus",
               "transmission_sigma_minus", "transmission_total", "faraday_angle_rad", "davll"],
              [detuning, transmission(zero_field, cfg.vapor.length),
               transmission(plus, cfg.vapor.length), transmission(minus, cfg.vapor.length),
               ports.total, faraday_rotation_angle(plus, minus, cfg.vapor.length),
               davll_signal(ports)],
              header=header_for(cfg, "transmission spectra, Faraday angle and DAVLL signal"))
    write_index_csv(plus, files["index_plus"], header_for(cfg, "sigma+ refractive index"))
    write_index_csv(minus, files["index_minus"], header_for(cfg, "sigma- refractive index"))
    return files


def _delay_or_nan(estimate, reference: float) -> float:
    try:
        return estimate() - reference
    except InvalidArgumentError:
        return math.nan


def run_pulse(cfg: RunConfig, out_dir: str | Path) -> dict[str, Path]:
    """Ensemble-averaged port traces, synthetic TCSPC histograms and delay summary."""
    out_dir = Path(out_dir)
    plus, minus = index_profiles(cfg)
    t_start = default_t_start(cfg.grid)
    trace_h, trace_v = ensemble_ports(cfg.ensemble, plus, minus, cfg.vapor.length,
                                      cfg.geometry, cfg.input_angle, t_start)
    vacuum = IndexProfile.vacuum(cfg.grid, reference_frequency=cfg.vapor.line_center_frequency)
    reference = mean_intensity([cfg.ensemble.center_detuning], cfg.ensemble.lifetime, vacuum, 0.0, t_start)
    ref_centroid, ref_peak = reference.centroid(), reference.peak()

    files = {
        "ports": out_dir / "pulse_ports.csv",
        "tcspc_h": out_dir / "tcspc_port_h.csv",
        "tcspc_v": out_dir / "tcspc_port_v.csv",
        "summary": out_dir / "pulse_summary.txt",
    }
    write_ports_csv("time_s", trace_h.times, PortSignals(trace_h.intensity, trace_v.intensity),
                    files["ports"], header_for(cfg, "ensemble-averaged port intensity (1/s)"))
    summary: dict[str, object] = {
        "reference_centroid_s": ref_centroid,
        "reference_peak_s": ref_peak,
    }
    tc = cfg.tcspc
    for name, trace, key in (("h", trace_h, "tcspc_h"), ("v", trace_v, "tcspc_v")):
        # the two ports get independent, reproducible noise streams
        seed = tc.seed * 2 + (0 if name == "h" else 1)
        hist = synthesize_tcspc(trace, tc.irf_fwhm, tc.rep_rate, tc.total_counts, seed, tc.bin_width)
        write_tcspc_csv(hist, files[key], header_for(cfg, f"synthetic TCSPC histogram, port {name}"))
        summary[f"port_{name}_energy"] = trace.energy()
        summary[f"port_{name}_centroid_delay_s"] = _delay_or_nan(trace.centroid, ref_centroid)
        summary[f"port_{name}_peak_delay_s"] = _delay_or_nan(trace.peak, ref_peak)
    summary["routing_centroid_difference_s"] = (summary["port_h_centroid_delay_s"]
                                                - summary["port_v_centroid_delay_s"])
    write_summary(files["summary"], summary, header_for(cfg, "delay summary"))
    return files


def sweep_fields(cfg: RunConfig) -> np.ndarray:
    """Field values, symmetric about zero whenever ``b_min == -b_max``."""
    s = cfg.sweep
    fractions = np.arange(s.steps) / (s.steps - 1)
    mid = 0.5 * (s.b_min + s.b_max)
    half = 0.5 * (s.b_max - s.b_min)
    return mid + half * (2 * fractions - 1)


def _sweep_point(cfg: RunConfig, b_field: float) -> tuple[float, ...]:
    vapor = cfg.vapor.with_(b_field=float(b_field))
    plus, minus = index_profiles(cfg, vapor)
    fast = (group_delay(plus, cfg.operating_point, vapor.length),
            group_delay(minus, cfg.operating_point, vapor.length))
    if not cfg.sweep.slow_path:
        return fast
    spec: EnsembleSpec = replace(cfg.ensemble, samples=cfg.sweep.slow_samples)
    return fast + (ensemble_delay(spec, plus, vapor.length), ensemble_delay(spec, minus, vapor.length))


def run_sweep(cfg: RunConfig, out_dir: str | Path) -> dict[str, Path]:
    """Per-helicity delay versus field: analytic group delay, optionally ensemble centroids."""
    out_dir = Path(out_dir)
    fields = sweep_fields(cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(lambda b: _sweep_point(cfg, b), fields))
    else:
        rows = [_sweep_point(cfg, b) for b in fields]
    rows = np.array(rows)
    columns = ["b_field_t", "delay_sigma_plus_s", "delay_sigma_minus_s", "delay_difference_s"]
    data = [fields, rows[:, 0], rows[:, 1], rows[:, 0] - rows[:, 1]]
    summary: dict[str, object] = {
        "analytic_difference_span_s": float(np.ptp(rows[:, 0] - rows[:, 1])),
    }
    if cfg.sweep.slow_path:
        columns += ["ensemble_delay_sigma_plus_s", "ensemble_delay_sigma_minus_s",
                    "ensemble_delay_difference_s"]
        data += [rows[:, 2], rows[:, 3], rows[:, 2] - rows[:, 3]]
        fast, slow = rows[:, :2], rows[:, 2:]
        disagreement = float(np.max(np.abs(slow - fast) / np.abs(fast)))
        summary["ensemble_difference_span_s"] = float(np.ptp(rows[:, 2] - rows[:, 3]))
        summary["max_relative_disagreement"] = disagreement
        summary["agree_within_10_percent"] = disagreement <= 0.10
    files = {"sweep": out_dir / "sweep.csv", "summary": out_dir / "sweep_summary.txt"}
    write_csv(files["sweep"], columns, data, header=header_for(cfg, "delay versus magnetic field"))
    write_summary(files["summary"], summary, header_for(cfg, "sweep summary"))
    return files


RUNNERS = {"scan": run_scan, "pulse": run_pulse, "sweep": run_sweep}


def run(cfg: RunConfig, out_dir: str | Path | None = None) -> dict[str, Path]:
    return RUNNERS[cfg.runner](cfg, cfg.output_dir if out_dir is None else out_dir)
