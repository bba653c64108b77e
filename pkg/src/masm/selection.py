"""Greedy port selection on a candidate grid.

Used both as the placement stage of the grid-selection baseline and as a
channel-aware initializer for the movable-antenna solver. Ports live on a
uniform grid whose pitch is at least the minimum spacing, so every subset
is feasible. Selection starts from the best single transmit/receive port
pair and then grows the two sides alternately, each step keeping the port
that maximizes the minimum pair distance of the partial system under
uniform full-power weights.
"""

from __future__ import annotations

import numpy as np

from .channel import AntennaLayout, ChannelRealization, assemble_channel
from .codebook import build_codebook
from .config import SystemConfig

__all__ = ["candidate_ports", "greedy_port_selection"]


def candidate_ports(region: float, step: float) -> np.ndarray:
    count = int(np.floor(region / step + 1e-9)) + 1
    return np.arange(count) * step


def _partial_min_distance(H: np.ndarray, power: float, points: np.ndarray) -> float:
    """Minimum pair distance of a partial system under uniform weights.

    Accepts any antenna count (the greedy path passes sizes that are not
    powers of two); degenerate single-symbol systems fall back to channel
    energy so the very first port still ranks sensibly.
    """
    t = H.shape[1]
    n = t * points.size
    if n < 2:
        return float(np.sum(np.abs(H) ** 2)) * power / t
    vectors = np.zeros((t, n), dtype=complex)
    for k in range(t):
        vectors[k, k * points.size:(k + 1) * points.size] = points
    ii, jj = np.triu_indices(n, k=1)
    diffs = vectors[:, ii] - vectors[:, jj]
    rx = np.sqrt(power / t) * (H @ diffs)
    return float(np.min(np.sum(np.abs(rx) ** 2, axis=0)))


def greedy_port_selection(cfg: SystemConfig, ch: ChannelRealization,
                          grid_step: float | None = None) -> tuple:
    """Select transmit and receive ports greedily; returns sorted (u, v)."""
    if grid_step is None:
        grid_step = max(cfg.min_spacing, cfg.wavelength / 2.0)
    if grid_step < cfg.min_spacing:
        raise ValueError(
            f"grid_step {grid_step} below the minimum spacing {cfg.min_spacing}"
        )
    ports_t = candidate_ports(cfg.region_tx, grid_step)
    ports_r = candidate_ports(cfg.region_rx, grid_step)
    if ports_t.size < cfg.n_tx or ports_r.size < cfg.n_rx:
        raise ValueError(
            f"grid offers {ports_t.size}/{ports_r.size} ports for "
            f"{cfg.n_tx}/{cfg.n_rx} antennas"
        )
    codebook = build_codebook(cfg.n_tx, cfg.mod_order, cfg.constellation)
    points = np.array([s.point for s in codebook.symbols[:cfg.mod_order]])

    def metric(sel_t, sel_r):
        layout = AntennaLayout(u=np.sort(sel_t), v=np.sort(sel_r))
        H = assemble_channel(layout, ch, cfg)
        return _partial_min_distance(H, cfg.power_budget, points)

    best_pair, best_val = None, -np.inf
    for pt in ports_t:
        for pr in ports_r:
            val = metric([pt], [pr])
            if val > best_val:
                best_pair, best_val = (pt, pr), val
    sel_t, sel_r = [best_pair[0]], [best_pair[1]]
    free_t = [p for p in ports_t if p != best_pair[0]]
    free_r = [p for p in ports_r if p != best_pair[1]]

    side = "tx"
    while len(sel_t) < cfg.n_tx or len(sel_r) < cfg.n_rx:
        if side == "tx" and len(sel_t) >= cfg.n_tx:
            side = "rx"
        if side == "rx" and len(sel_r) >= cfg.n_rx:
            side = "tx"
        sel, free, other = (sel_t, free_t, sel_r) if side == "tx" else (sel_r, free_r, sel_t)
        scores = [metric(sel + [p], other) if side == "tx" else metric(other, sel + [p])
                  for p in free]
        pick = int(np.argmax(scores))
        sel.append(free.pop(pick))
        side = "rx" if side == "tx" else "tx"
    return np.sort(sel_t), np.sort(sel_r)
