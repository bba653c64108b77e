"""Far-field field-response channel model for linear movable-antenna arrays.

The end-to-end channel of a link whose antennas sit at positions ``u``
(transmit) and ``v`` (receive) is ``F(v)^H @ prm @ G(u)``: each antenna
contributes one column of per-path unit phasors whose phase grows linearly
with its position along the array axis, and the path-response matrix couples
transmit paths to receive paths. All types here are immutable after
construction and safe to share across threads or processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_rng
from .config import SystemConfig

__all__ = [
    "ChannelRealization",
    "AntennaLayout",
    "transmit_frv",
    "transmit_frm",
    "receive_frv",
    "receive_frm",
    "assemble_channel",
    "sample_channel",
    "check_layout",
]

_ANGLE_SLACK = 1e-12


def _check_wavelength(wavelength: float) -> float:
    if wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    return float(wavelength)


def transmit_frv(u_t: float, aod, wavelength: float) -> np.ndarray:
    """Field-response vector of one transmit antenna at position ``u_t``.

    Element ``i`` is the unit phasor ``exp(j*(2*pi/wavelength)*u_t*cos(aod[i]))``.
    """
    _check_wavelength(wavelength)
    aod = np.asarray(aod, dtype=float)
    return np.exp(1j * ((2.0 * np.pi / wavelength) * (u_t * np.cos(aod))))


def transmit_frm(u, aod, wavelength: float) -> np.ndarray:
    """Field-response matrix (paths x antennas); column ``t`` is ``transmit_frv(u[t])``."""
    _check_wavelength(wavelength)
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.size == 0:
        raise ValueError("position list must not be empty")
    aod = np.asarray(aod, dtype=float)
    return np.exp(1j * ((2.0 * np.pi / wavelength) * np.outer(np.cos(aod), u)))


def receive_frv(v_r: float, aoa, wavelength: float) -> np.ndarray:
    """Receive-side analogue of :func:`transmit_frv` (arrival angles)."""
    return transmit_frv(v_r, aoa, wavelength)


def receive_frm(v, aoa, wavelength: float) -> np.ndarray:
    """Receive-side analogue of :func:`transmit_frm`."""
    return transmit_frm(v, aoa, wavelength)


def _freeze(obj, name, value):
    object.__setattr__(obj, name, value)
    value.setflags(write=False)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Departure/arrival angles and the path-response matrix of one coherence block.

    ``prm`` has shape (len(aoa), len(aod)); it is diagonal for the simplified
    geometry model sampled by :func:`sample_channel` but may be full.
    """

    aod: np.ndarray
    aoa: np.ndarray
    prm: np.ndarray

    def __post_init__(self):
        aod = np.asarray(self.aod, dtype=float).reshape(-1)
        aoa = np.asarray(self.aoa, dtype=float).reshape(-1)
        prm = np.asarray(self.prm, dtype=complex)
        for name, ang in (("aod", aod), ("aoa", aoa)):
            if ang.size == 0:
                raise ValueError(f"{name} must not be empty")
            if np.any(ang < -_ANGLE_SLACK) or np.any(ang > np.pi + _ANGLE_SLACK):
                raise ValueError(f"{name} angles must lie in [0, pi]")
        if prm.ndim != 2 or prm.shape != (aoa.size, aod.size):
            raise ValueError(
                f"prm shape {prm.shape} inconsistent with {aoa.size} arrival "
                f"and {aod.size} departure angles"
            )
        _freeze(self, "aod", aod)
        _freeze(self, "aoa", aoa)
        _freeze(self, "prm", prm)

    @classmethod
    def diagonal(cls, aod, aoa, gains) -> "ChannelRealization":
        """Build a realization with a diagonal path-response matrix."""
        gains = np.asarray(gains, dtype=complex).reshape(-1)
        return cls(aod=aod, aoa=aoa, prm=np.diag(gains))

    @property
    def n_tx_paths(self) -> int:
        return self.aod.size

    @property
    def n_rx_paths(self) -> int:
        return self.aoa.size


@dataclass(frozen=True, eq=False)
class AntennaLayout:
    """Transmit and receive antenna positions (meters along each array axis)."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        _freeze(self, "u", np.asarray(self.u, dtype=float).reshape(-1).copy())
        _freeze(self, "v", np.asarray(self.v, dtype=float).reshape(-1).copy())


def check_layout(layout: AntennaLayout, cfg: SystemConfig, rtol: float = 1e-12) -> AntennaLayout:
    """Validate region bounds and pairwise spacing of a layout.

    Comparisons tolerate floating-point rounding at relative ``rtol``; no
    additional algorithmic slack is applied.
    """
    for name, pos, region, count in (
        ("u", layout.u, cfg.region_tx, cfg.n_tx),
        ("v", layout.v, cfg.region_rx, cfg.n_rx),
    ):
        if pos.size != count:
            raise ValueError(f"layout.{name} has {pos.size} positions, expected {count}")
        pad = rtol * max(region, 1.0)
        if np.any(pos < -pad) or np.any(pos > region + pad):
            raise ValueError(f"layout.{name} leaves the region [0, {region}]")
        if pos.size > 1:
            gaps = np.diff(np.sort(pos))
            if np.min(gaps) < cfg.min_spacing * (1.0 - rtol):
                raise ValueError(
                    f"layout.{name} violates the minimum spacing "
                    f"{cfg.min_spacing} (closest gap {np.min(gaps):.6g})"
                )
    return layout


def assemble_channel(layout: AntennaLayout, ch: ChannelRealization, cfg: SystemConfig) -> np.ndarray:
    """End-to-end channel matrix (n_rx x n_tx) for a layout and realization."""
    F = receive_frm(layout.v, ch.aoa, cfg.wavelength)
    G = transmit_frm(layout.u, ch.aod, cfg.wavelength)
    return F.conj().T @ ch.prm @ G


def sample_channel(cfg: SystemConfig, rng) -> ChannelRealization:
    """Draw one random realization of the simplified geometry model.

    Departure and arrival angles are i.i.d. uniform on [0, pi]; the
    path-response matrix is diagonal with circularly-symmetric complex
    Gaussian gains of total average power ``cfg.avg_channel_gain``.
    Deterministic for a fixed seeded generator.
    """
    rng = as_rng(rng)
    L = cfg.n_paths
    aod = rng.uniform(0.0, np.pi, size=L)
    aoa = rng.uniform(0.0, np.pi, size=L)
    scale = math.sqrt(cfg.avg_channel_gain / (2.0 * L))
    gains = scale * (rng.standard_normal(L) + 1j * rng.standard_normal(L))
    return ChannelRealization.diagonal(aod=aod, aoa=aoa, gains=gains)
