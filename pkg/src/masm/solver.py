"""Alternating optimization of the precoder and antenna positions.

One outer iteration updates the precoder by successive convex
approximation, then moves each transmit antenna and each receive antenna
once through its coordinate subproblem. Every block update is guarded so
the true objective (the minimum squared pair distance, recomputed from
scratch) never decreases; the loop stops when the relative objective gain
falls below ``kappa``.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_rng, check_precoder
from .beamforming import SolverFailure, sca_beamforming
from .channel import AntennaLayout, ChannelRealization, assemble_channel, check_layout
from .codebook import SmCodebook, build_codebook
from .config import SolverSettings, SystemConfig
from .metrics import min_distance
from .positioning import (
    RxExpansionBuilder,
    TxExpansionBuilder,
    _batch_rx,
    _batch_tx,
    _maximize_min_quadratics,
    feasible_intervals,
)

__all__ = ["SolveRecord", "initialize", "optimize", "solve"]

_MONOTONE_SLACK = 1e-9


@dataclass
class SolveRecord:
    """Convergence trace of one alternating-optimization run."""

    eta_history: list = field(default_factory=list)        # per iteration, entry 0 = init
    block_eta_history: list = field(default_factory=list)  # (label, eta) per block update
    wall_ms: list = field(default_factory=list)            # per iteration
    termination: str = "max-iterations"
    failures: list = field(default_factory=list)
    w_history: list | None = None
    u_history: list | None = None
    v_history: list | None = None

    @property
    def n_iterations(self) -> int:
        return max(len(self.eta_history) - 1, 0)

    @property
    def final_eta(self) -> float:
        return self.eta_history[-1]

    def iteration_lines(self):
        """JSON-lines view of the trace: one object per iteration."""
        for n, eta in enumerate(self.eta_history):
            wall = 0.0 if n == 0 else self.wall_ms[n - 1]
            yield json.dumps({"n": n, "eta": eta, "wall_ms": wall})


def initialize(cfg: SystemConfig, strategy: str = "fpa", rng=None,
               ch: ChannelRealization | None = None) -> tuple:
    """Feasible starting point: uniform full-power weights plus a layout.

    ``fpa`` places both arrays on a uniform grid at ``max(wavelength/2,
    min_spacing)``; ``spread`` spaces them uniformly over the whole region;
    ``random`` draws positions uniformly and repairs them to honor the
    spacing (sort, push apart, pull back inside the region); ``greedy``
    (channel-aware, needs ``ch``) seeds with the grid-port selection.
    """
    spacing = max(cfg.wavelength / 2.0, cfg.min_spacing)
    w = np.full(cfg.n_tx, np.sqrt(cfg.power_budget / cfg.n_tx), dtype=complex)
    if strategy == "fpa":
        for n, region in ((cfg.n_tx, cfg.region_tx), (cfg.n_rx, cfg.region_rx)):
            if (n - 1) * spacing > region:
                raise ValueError(
                    f"grid of {n} antennas at spacing {spacing} exceeds region {region}"
                )
        u = np.arange(cfg.n_tx) * spacing
        v = np.arange(cfg.n_rx) * spacing
    elif strategy == "spread":
        u = np.linspace(0.0, cfg.region_tx, cfg.n_tx)
        v = np.linspace(0.0, cfg.region_rx, cfg.n_rx)
    elif strategy == "random":
        rng = as_rng(rng)
        u = _repair(rng.uniform(0.0, cfg.region_tx, cfg.n_tx), cfg.region_tx, cfg.min_spacing)
        v = _repair(rng.uniform(0.0, cfg.region_rx, cfg.n_rx), cfg.region_rx, cfg.min_spacing)
    elif strategy == "greedy":
        if ch is None:
            raise ValueError("greedy initialization needs a channel realization")
        from .selection import greedy_port_selection
        u, v = greedy_port_selection(cfg, ch)
    else:
        raise ValueError(f"unknown init strategy {strategy!r}")
    layout = AntennaLayout(u=u, v=v)
    check_layout(layout, cfg)
    return w, layout


def _repair(pos: np.ndarray, region: float, spacing: float) -> np.ndarray:
    pos = np.sort(pos)
    for t in range(1, pos.size):
        pos[t] = max(pos[t], pos[t - 1] + spacing)
    if pos[-1] > region:
        pos[-1] = region
        for t in range(pos.size - 2, -1, -1):
            pos[t] = min(pos[t], pos[t + 1] - spacing)
    return pos


def _update_coordinate(builder, idx, own_pos, w, codebook: SmCodebook,
                       region: float, spacing: float, side: str, wavelength: float,
                       coord_iters: int = 8, coord_tol: float = 1e-6,
                       n_seeds: int = 3):
    """One antenna's position update via its surrogate subproblem.

    The trigonometric expansion of every pair is exact in this coordinate
    (the other antennas' contribution does not depend on it), so it is built
    once and the surrogate subproblem is iterated: each pass re-expands at
    the freshly accepted point, which lets the antenna travel beyond a
    single conservative step. Because the exact objective is cheap here, a
    half-wavelength lattice over the feasible intervals seeds a few extra
    surrogate iterations, and the best point wins; a final exact-objective
    guard keeps the whole update monotone.
    """
    intervals = feasible_intervals(idx, own_pos, region, spacing)
    tol_u = 1e-9 * region
    u_cur = float(own_pos[idx])
    if side == "tx":
        batch = _batch_tx(builder, idx, own_pos, w, codebook.diffs)
    else:
        batch = _batch_rx(builder, idx, own_pos, w, codebook.diffs)
    if batch.n_active == 0:
        return u_cur
    curv = batch.curvature_bounds()

    def g_exact(u):
        return float(np.min(batch.values(u)))

    def polish(u_s):
        # local refinement stays within the interval holding the seed; a
        # coarse position tolerance suffices until the final step
        local = [iv for iv in intervals if iv[0] - tol_u <= u_s <= iv[1] + tol_u]
        if not local:
            return u_s
        tol_coarse = max(tol_u, 1e-3 * wavelength)
        for step in range(coord_iters):
            f0 = batch.values(u_s)
            slope = batch.grads(u_s)
            u0s = np.full(batch.n_active, u_s)
            last = step == coord_iters - 1
            u_new, _ = _maximize_min_quadratics(
                u0s, f0, slope, curv, local, tol_u if last else tol_coarse)
            y_old = float(np.min(f0))
            y_new = float(np.min(batch.values(u_new)))
            if y_new <= y_old * (1.0 + coord_tol) or abs(u_new - u_s) <= tol_coarse:
                return u_new if y_new >= y_old else u_s
            u_s = u_new
        return u_s

    # candidate seeds: current point plus a half-wavelength lattice
    seeds = [u_cur]
    for lo, hi in intervals:
        seeds.extend([lo, hi])
        seeds.extend(np.arange(lo, hi, wavelength / 4.0)[1:])
    seeds = np.unique(np.asarray(seeds))
    scores = np.min(batch.values_grid(seeds), axis=1)
    order = np.argsort(scores)[::-1]
    picks = list(seeds[order[:n_seeds]])
    if u_cur not in picks:
        picks.append(u_cur)

    best_u, best_y = u_cur, g_exact(u_cur)
    for u_s in picks:
        u_fin = polish(float(u_s))
        y_fin = g_exact(u_fin)
        if y_fin > best_y:
            best_u, best_y = float(u_fin), y_fin
    return best_u


def optimize(cfg: SystemConfig, ch: ChannelRealization, w0, layout0: AntennaLayout,
             *, kappa: float = 1e-3, max_iter: int = 50, movable: str = "both",
             strict_paper_ordering: bool = False, sca_tol: float = 1e-4,
             sca_max_iter: int = 60, keep_iterates: bool = False,
             codebook: SmCodebook | None = None) -> tuple:
    """Run the alternating loop from a feasible start; returns ``(w, layout, record)``.

    ``movable`` selects which arrays may move: "both", "tx", "rx" or "none".
    With ``strict_paper_ordering`` the position blocks reuse the precoder
    (and, on the receive side, the transmit positions) from the start of the
    iteration instead of the freshest values; that literal ordering is kept
    as an option but loses the per-block monotonicity guarantee, so the
    runtime monotonicity check is skipped in that mode.
    """
    if movable not in ("both", "tx", "rx", "none"):
        raise ValueError(f"movable must be both/tx/rx/none, got {movable!r}")
    if codebook is None:
        codebook = build_codebook(cfg.n_tx, cfg.mod_order, cfg.constellation)
    check_layout(layout0, cfg)
    w = check_precoder(w0, cfg.power_budget)
    u = layout0.u.copy()
    v = layout0.v.copy()

    def eta_now():
        H = assemble_channel(AntennaLayout(u=u, v=v), ch, cfg)
        return min_distance(H, w, codebook).d_min

    record = SolveRecord()
    if keep_iterates:
        record.w_history, record.u_history, record.v_history = [], [], []
    eta = eta_now()
    record.eta_history.append(eta)

    def log_block(label, before):
        nonlocal eta
        eta = eta_now()
        record.block_eta_history.append((label, eta))
        if not strict_paper_ordering and eta < before - _MONOTONE_SLACK:
            raise RuntimeError(
                f"objective decreased at block {label}: {before:.6e} -> {eta:.6e}"
            )
        return eta

    for n in range(1, max_iter + 1):
        tic = time.perf_counter()
        eta_start = eta
        w_stale = w.copy()
        u_stale = u.copy()

        before = eta
        H = assemble_channel(AntennaLayout(u=u, v=v), ch, cfg)
        try:
            w, _ = sca_beamforming(H, codebook, w, cfg.power_budget,
                                   tol_outer=sca_tol, max_iter=sca_max_iter)
        except SolverFailure as exc:
            record.failures.append(f"iter {n} w-update: {exc}")
        log_block("w", before)

        if movable in ("both", "tx"):
            txb = TxExpansionBuilder(ch, v, cfg.wavelength)
            for k in range(cfg.n_tx):
                before = eta
                w_eff = w_stale if strict_paper_ordering else w
                u[k] = _update_coordinate(txb, k, u, w_eff, codebook,
                                          cfg.region_tx, cfg.min_spacing, "tx",
                                          cfg.wavelength)
                log_block(f"u{k}", before)

        if movable in ("both", "rx"):
            u_eff = u_stale if strict_paper_ordering else u
            rxb = RxExpansionBuilder(ch, u_eff, cfg.wavelength)
            for r in range(cfg.n_rx):
                before = eta
                w_eff = w_stale if strict_paper_ordering else w
                v[r] = _update_coordinate(rxb, r, v, w_eff, codebook,
                                          cfg.region_rx, cfg.min_spacing, "rx",
                                          cfg.wavelength)
                log_block(f"v{r}", before)

        record.eta_history.append(eta)
        record.wall_ms.append(1e3 * (time.perf_counter() - tic))
        if keep_iterates:
            record.w_history.append(w.copy())
            record.u_history.append(u.copy())
            record.v_history.append(v.copy())
        if abs(eta - eta_start) / max(eta_start, 1e-15) < kappa:
            record.termination = "converged"
            break

    if record.failures and record.termination != "converged":
        record.termination = "solver-failure"
    layout = AntennaLayout(u=u, v=v)
    check_layout(layout, cfg)
    return w, layout, record


def solve(cfg: SystemConfig, ch: ChannelRealization, settings: SolverSettings | None = None,
          rng=None, movable: str = "both", keep_iterates: bool = False) -> tuple:
    """Multi-start wrapper around :func:`optimize`; returns the best run.

    The first start uses the configured strategy (grid placement by
    default, which also guarantees the result never falls below the
    fixed-array baseline); additional starts draw random feasible positions
    for the movable sides only, leaving frozen sides on the grid.
    """
    settings = settings or SolverSettings()
    rng = as_rng(rng)
    best = None
    w_grid, grid = initialize(cfg, "fpa")
    later_starts = [s for s in ("spread", "greedy") if s != settings.init]
    for s in range(settings.n_starts):
        if s == 0:
            strategy = settings.init
        elif s - 1 < len(later_starts):
            strategy = later_starts[s - 1]
        else:
            strategy = "random"
        w0, layout0 = initialize(cfg, strategy, rng, ch=ch)
        u0 = layout0.u if movable in ("both", "tx") else grid.u
        v0 = layout0.v if movable in ("both", "rx") else grid.v
        out = optimize(
            cfg, ch, w0, AntennaLayout(u=u0, v=v0),
            kappa=settings.kappa, max_iter=settings.max_iter, movable=movable,
            strict_paper_ordering=settings.strict_paper_ordering,
            sca_tol=settings.sca_tol, sca_max_iter=settings.sca_max_iter,
            keep_iterates=keep_iterates,
        )
        if best is None or out[2].final_eta > best[2].final_eta:
            best = out
    return best
