"""Comparison schemes: fixed arrays, greedy port selection, one-side movement.

Greedy antenna selection (GAS) places both arrays on grid ports chosen by
:func:`masm.selection.greedy_port_selection`, then runs a single precoder
optimization pass. This particular construction is this package's
definition of GAS; only its placement between the fixed and fully movable
schemes is meaningful, not its exact curve.
"""

from __future__ import annotations

import numpy as np

from .beamforming import sca_beamforming
from .channel import AntennaLayout, ChannelRealization, assemble_channel, check_layout
from .codebook import build_codebook
from .config import SolverSettings, SystemConfig
from .selection import greedy_port_selection
from .solver import initialize, solve

__all__ = ["SCHEMES", "fpa_scheme", "gas_scheme", "ma_one_side", "solve_scheme"]

SCHEMES = ("ma", "fpa", "gas", "ma-tx", "ma-rx")


def fpa_scheme(cfg: SystemConfig, ch: ChannelRealization,
               settings: SolverSettings | None = None) -> tuple:
    """Half-wavelength grids on both sides; only the precoder is optimized."""
    settings = settings or SolverSettings()
    w0, layout = initialize(cfg, "fpa")
    H = assemble_channel(layout, ch, cfg)
    codebook = build_codebook(cfg.n_tx, cfg.mod_order, cfg.constellation)
    w, _ = sca_beamforming(H, codebook, w0, cfg.power_budget,
                           tol_outer=settings.sca_tol, max_iter=settings.sca_max_iter)
    return w, layout


def gas_scheme(cfg: SystemConfig, ch: ChannelRealization, grid_step: float | None = None,
               settings: SolverSettings | None = None) -> tuple:
    """Greedy selection of grid ports on both sides, then one precoder pass."""
    settings = settings or SolverSettings()
    if grid_step is None:
        grid_step = settings.gas_grid_step
    sel_t, sel_r = greedy_port_selection(cfg, ch, grid_step)
    layout = AntennaLayout(u=sel_t, v=sel_r)
    check_layout(layout, cfg)
    H = assemble_channel(layout, ch, cfg)
    codebook = build_codebook(cfg.n_tx, cfg.mod_order, cfg.constellation)
    w0 = np.full(cfg.n_tx, np.sqrt(cfg.power_budget / cfg.n_tx), dtype=complex)
    w, _ = sca_beamforming(H, codebook, w0, cfg.power_budget,
                           tol_outer=settings.sca_tol, max_iter=settings.sca_max_iter)
    return w, layout


def ma_one_side(cfg: SystemConfig, ch: ChannelRealization, side: str,
                settings: SolverSettings | None = None, rng=None) -> tuple:
    """Full alternating loop with one array frozen on the half-wavelength grid."""
    if side not in ("tx", "rx"):
        raise ValueError(f"side must be 'tx' or 'rx', got {side!r}")
    w, layout, _ = solve(cfg, ch, settings, rng=rng, movable=side)
    return w, layout


def solve_scheme(scheme: str, cfg: SystemConfig, ch: ChannelRealization,
                 settings: SolverSettings | None = None, rng=None) -> tuple:
    """Run one named scheme; returns ``(w, layout, record_or_None)``."""
    if scheme == "ma":
        return solve(cfg, ch, settings, rng=rng, movable="both")
    if scheme == "ma-tx":
        w, layout = ma_one_side(cfg, ch, "tx", settings, rng)
        return w, layout, None
    if scheme == "ma-rx":
        w, layout = ma_one_side(cfg, ch, "rx", settings, rng)
        return w, layout, None
    if scheme == "fpa":
        w, layout = fpa_scheme(cfg, ch, settings)
        return w, layout, None
    if scheme == "gas":
        w, layout = gas_scheme(cfg, ch, settings=settings)
        return w, layout, None
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
