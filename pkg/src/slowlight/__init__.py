"""Slow-light delay and magneto-optical polarization routing of single photons
in a hot cesium vapor cell."""

from .config import RunConfig, load_config
from .dispersion import IndexProfile, group_delay, group_index, index_from_susceptibility
from .ensemble import EnsembleSpec, ensemble_delay, ensemble_intensity
from .errors import (
    ConfigError,
    FrequencyRangeError,
    InvalidArgumentError,
    ResolutionError,
    SlowLightError,
    WindowTooShortError,
)
from .vapor import (
    FrequencyGrid,
    Polarization,
    SpectralLine,
    VaporConfig,
    build_susceptibility,
    default_line_table,
)

__all__ = [
    "ConfigError", "EnsembleSpec", "FrequencyGrid", "FrequencyRangeError", "IndexProfile",
    "InvalidArgumentError", "Polarization", "ResolutionError", "RunConfig", "SlowLightError",
    "SpectralLine", "VaporConfig", "WindowTooShortError", "build_susceptibility",
    "default_line_table", "ensemble_delay", "ensemble_intensity", "group_delay", "group_index",
    "index_from_susceptibility", "load_config",
]

__version__ = "0.1.0"
