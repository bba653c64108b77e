"""System configuration, JSON loading with unit tags, and config hashing.

All lengths are stored in meters and all powers/gains in linear units.
Config files may give length entries relative to the carrier wavelength
(``{"wavelengths": 0.5}``), gains in dB (``{"db": -30}``), and angles in
degrees (``{"degrees": 30}``); tagged values are resolved when the file is
loaded so that silent unit mistakes cannot propagate.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass

from ._validation import check_power_of_two

__all__ = ["SystemConfig", "SolverSettings", "ConfigError", "load_config", "config_hash"]


class ConfigError(ValueError):
    """Raised when a configuration file cannot be parsed or validated."""


@dataclass(frozen=True)
class SystemConfig:
    """Physical scalars of one link: array sizes, geometry, power, path loss.

    Defaults give a 4x4 link with quadrature PSK, half-wavelength minimum
    spacing, movement regions of eight wavelengths, and a 40 m link with
    -30 dB reference gain and path-loss exponent 2.5.
    """

    n_tx: int = 4                # transmit movable antennas (power of 2)
    n_rx: int = 4                # receive movable antennas (power of 2)
    mod_order: int = 4           # constellation order M (power of 2)
    n_paths: int = 8             # propagation paths per side
    wavelength: float = 0.05     # carrier wavelength (m)
    min_spacing: float = 0.025   # minimum inter-antenna spacing (m)
    region_tx: float = 0.4       # transmit movement region upper bound (m)
    region_rx: float = 0.4       # receive movement region upper bound (m)
    power_budget: float = 1.0    # transmit power budget (W)
    noise_power: float = 1e-8    # receiver noise power (W)
    distance: float = 40.0       # link distance (m)
    ref_power_gain: float = 1e-3  # channel power gain at 1 m (linear)
    pathloss_exp: float = 2.5    # path-loss exponent
    constellation: str = "psk"   # "psk" or "qam"

    def __post_init__(self):
        check_power_of_two("n_tx", self.n_tx)
        check_power_of_two("n_rx", self.n_rx)
        check_power_of_two("mod_order", self.mod_order)
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")
        for name in ("wavelength", "min_spacing", "power_budget", "noise_power",
                     "distance", "ref_power_gain"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.region_tx < (self.n_tx - 1) * self.min_spacing:
            raise ValueError(
                f"region_tx={self.region_tx} cannot hold {self.n_tx} antennas "
                f"at spacing {self.min_spacing}"
            )
        if self.region_rx < (self.n_rx - 1) * self.min_spacing:
            raise ValueError(
                f"region_rx={self.region_rx} cannot hold {self.n_rx} antennas "
                f"at spacing {self.min_spacing}"
            )
        if self.constellation not in ("psk", "qam"):
            raise ValueError(f"constellation must be 'psk' or 'qam', got {self.constellation!r}")

    @property
    def avg_channel_gain(self) -> float:
        """Average end-to-end channel power gain (linear), from the path-loss model."""
        return self.ref_power_gain * self.distance ** (-self.pathloss_exp)

    @property
    def n_symbols(self) -> int:
        return self.n_tx * self.mod_order

    def replace(self, **kwargs) -> "SystemConfig":
        return dataclasses.replace(self, **kwargs)


@dataclass(frozen=True)
class SolverSettings:
    """Algorithmic knobs of the alternating-optimization solver."""

    kappa: float = 1e-3              # relative convergence threshold of the outer loop
    max_iter: int = 50               # outer iteration cap
    sca_tol: float = 1e-4            # relative stop tolerance of the precoder SCA loop
    sca_max_iter: int = 60
    n_starts: int = 3                # multi-start count (first start uses `init`)
    init: str = "fpa"                # "fpa", "spread", "random" or "greedy"
    gas_grid_step: float | None = None  # candidate-port spacing; None -> max(D, lambda/2)
    strict_paper_ordering: bool = False

    def __post_init__(self):
        if not (0 < self.kappa < 1):
            raise ValueError(f"kappa must be in (0, 1), got {self.kappa}")
        if self.max_iter < 1 or self.sca_max_iter < 1 or self.n_starts < 1:
            raise ValueError("max_iter, sca_max_iter and n_starts must be >= 1")
        if self.init not in ("fpa", "spread", "random", "greedy"):
            raise ValueError(
                f"init must be 'fpa', 'spread', 'random' or 'greedy', got {self.init!r}")

    def replace(self, **kwargs) -> "SolverSettings":
        return dataclasses.replace(self, **kwargs)


def _resolve_units(name: str, value, wavelength: float):
    """Resolve a possibly unit-tagged config value to base units."""
    if not isinstance(value, dict):
        return value
    if len(value) != 1:
        raise ConfigError(f"field '{name}': unit tag must have exactly one key, got {value!r}")
    tag, raw = next(iter(value.items()))
    if tag == "wavelengths":
        return float(raw) * wavelength
    if tag == "db":
        return 10.0 ** (float(raw) / 10.0)
    if tag == "degrees":
        return math.radians(float(raw))
    raise ConfigError(f"field '{name}': unknown unit tag {tag!r} "
                      "(expected 'wavelengths', 'db' or 'degrees')")


_INT_FIELDS = {"n_tx", "n_rx", "mod_order", "n_paths", "max_iter", "sca_max_iter", "n_starts"}


def _build_section(cls, raw: dict, wavelength: float):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} field(s): {sorted(unknown)}")
    resolved = {}
    for key, value in raw.items():
        value = _resolve_units(key, value, wavelength)
        if key in _INT_FIELDS and value is not None:
            value = int(value)
        resolved[key] = value
    try:
        return cls(**resolved)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path=None) -> tuple[SystemConfig, SolverSettings]:
    """Load a JSON config file; ``None`` returns the built-in defaults.

    The file holds two optional sections, ``system`` and ``solver``, whose
    keys mirror :class:`SystemConfig` and :class:`SolverSettings`.
    """
    if path is None:
        return SystemConfig(), SolverSettings()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be a JSON object, got {type(raw).__name__}")
    unknown = set(raw) - {"system", "solver"}
    if unknown:
        raise ConfigError(f"unknown top-level config section(s): {sorted(unknown)}")
    system_raw = dict(raw.get("system", {}))
    # Wavelength must resolve first: other lengths may be tagged relative to it.
    wavelength = system_raw.get("wavelength", SystemConfig.wavelength)
    if isinstance(wavelength, dict):
        raise ConfigError("field 'wavelength' must be a plain number in meters")
    cfg = _build_section(SystemConfig, system_raw, float(wavelength))
    settings = _build_section(SolverSettings, dict(raw.get("solver", {})), cfg.wavelength)
    return cfg, settings


def config_hash(cfg: SystemConfig, settings: SolverSettings | None = None) -> str:
    """Short stable hash of the resolved configuration, for output provenance."""
    payload = {"system": dataclasses.asdict(cfg)}
    if settings is not None:
        payload["solver"] = dataclasses.asdict(settings)
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
