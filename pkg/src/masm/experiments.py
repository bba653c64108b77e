"""Seeded experiment sweeps and their file outputs.

Each sweep is a pure function of the configuration and the seed list: one
listed seed produces one channel realization, every scheme is solved on that
same realization (paired comparison), and the noise stream of each
(seed, scheme, SNR) point is derived deterministically from those labels.
Results are therefore identical regardless of worker count or scheduling
order. CSV files carry the config hash and the seed list as comment lines
so they are self-describing.
"""

from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .baselines import SCHEMES, solve_scheme
from .ber import simulate_ber
from .channel import AntennaLayout, ChannelRealization, assemble_channel, check_layout, sample_channel
from .codebook import build_codebook
from .config import SolverSettings, SystemConfig, config_hash
from .metrics import min_distance, pep_upper_bound
from .solver import solve

__all__ = [
    "run_converge",
    "run_ber_vs_snr",
    "run_ber_vs_paths",
    "run_single",
    "load_single_run",
    "write_csv",
]

DEFAULT_SNR_GRID_DB = list(range(0, 15, 2))
DEFAULT_MIN_BITS = 100_000
DEFAULT_MAX_BITS = 1_000_000
DEFAULT_TARGET_ERRORS = 100


def _noise_rng(seed: int, scheme: str, snr_db: float) -> np.random.Generator:
    return np.random.default_rng(
        [int(seed), SCHEMES.index(scheme), int(round(1000 * snr_db)), 0x5EED]
    )


def _map_items(fn, items, workers: int):
    if workers <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _converge_item(args):
    cfg, settings, seed, L, M = args
    cfg_lm = cfg.replace(n_paths=L, mod_order=M)
    ch = sample_channel(cfg_lm, np.random.default_rng(seed))
    _, _, record = solve(cfg_lm, ch, settings, rng=np.random.default_rng([seed, 0xA0]))
    rows = []
    for line in record.iteration_lines():
        obj = json.loads(line)
        rows.append((seed, L, M, obj["n"], obj["eta"], obj["wall_ms"]))
    return rows


def run_converge(cfg: SystemConfig, settings: SolverSettings, seeds,
                 paths_list=None, mod_list=None, workers: int = 1) -> list:
    """Convergence traces: rows (seed, n_paths, mod_order, iteration, eta, wall_ms)."""
    paths_list = [cfg.n_paths] if paths_list is None else list(paths_list)
    mod_list = [cfg.mod_order] if mod_list is None else list(mod_list)
    items = [(cfg, settings, int(seed), int(L), int(M))
             for seed in seeds for L in paths_list for M in mod_list]
    rows = []
    for chunk in _map_items(_converge_item, items, workers):
        rows.extend(chunk)
    rows.sort(key=lambda rr: (rr[0], rr[1], rr[2], rr[3]))
    return rows


def _ber_item(args):
    cfg, settings, seed, schemes, snr_list, min_bits, max_bits, target_errors = args
    ch = sample_channel(cfg, np.random.default_rng(seed))
    codebook = build_codebook(cfg.n_tx, cfg.mod_order, cfg.constellation)
    out = []
    for scheme in schemes:
        w, layout, _ = solve_scheme(scheme, cfg, ch,
                                    settings, rng=np.random.default_rng([seed, 0xA0]))
        H = assemble_channel(layout, ch, cfg)
        for snr_db in snr_list:
            res = simulate_ber(
                H, w, codebook, snr_db, cfg.power_budget,
                rng=_noise_rng(seed, scheme, snr_db),
                min_bits=min_bits, max_bits=max_bits, target_errors=target_errors,
                ref_gain=cfg.avg_channel_gain / cfg.n_tx, seed_label=seed,
            )
            out.append((scheme, float(snr_db), seed, res.ber, res.ser, res.total_bits))
    return out


def _aggregate_ber(points, key_idx) -> list:
    groups = {}
    for pt in points:
        key = (pt[0], pt[key_idx])
        groups.setdefault(key, []).append(pt)
    rows = []
    for (scheme, xval), pts in sorted(groups.items()):
        bers = [p[3] for p in pts]
        sers = [p[4] for p in pts]
        bits = sum(p[5] for p in pts)
        rows.append((scheme, xval, float(np.mean(bers)), float(np.mean(sers)),
                     bits, len(pts)))
    return rows


def run_ber_vs_snr(cfg: SystemConfig, settings: SolverSettings, schemes, snr_list,
                   seeds, min_bits=DEFAULT_MIN_BITS, max_bits=DEFAULT_MAX_BITS,
                   target_errors=DEFAULT_TARGET_ERRORS, workers: int = 1) -> list:
    """BER sweep: rows (scheme, snr_db, ber, ser, total_bits, channels).

    The SNR axis is receive-referenced: noise power is the mean received
    power of one radiated symbol (budget split over the transmit antennas
    times the average channel gain) divided by the linear SNR, so the
    simulated operating region matches the plotted range. The mean is taken
    over per-channel error rates, each channel carrying its own optimized
    precoder and layout.
    """
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}; expected subset of {SCHEMES}")
    items = [(cfg, settings, int(seed), tuple(schemes), tuple(float(s) for s in snr_list),
              int(min_bits), int(max_bits), int(target_errors)) for seed in seeds]
    points = []
    for chunk in _map_items(_ber_item, items, workers):
        points.extend(chunk)
    return _aggregate_ber(points, key_idx=1)


def run_ber_vs_paths(cfg: SystemConfig, settings: SolverSettings, schemes, paths_list,
                     snr_db, seeds, min_bits=DEFAULT_MIN_BITS, max_bits=DEFAULT_MAX_BITS,
                     target_errors=DEFAULT_TARGET_ERRORS, workers: int = 1) -> list:
    """BER versus path count at fixed SNR: rows (scheme, n_paths, ber, ser, total_bits, channels)."""
    rows = []
    for L in paths_list:
        cfg_l = cfg.replace(n_paths=int(L))
        sub = run_ber_vs_snr(cfg_l, settings, schemes, [snr_db], seeds,
                             min_bits=min_bits, max_bits=max_bits,
                             target_errors=target_errors, workers=workers)
        rows.extend((scheme, int(L), ber, ser, bits, nch)
                    for scheme, _, ber, ser, bits, nch in sub)
    rows.sort(key=lambda rr: (rr[0], rr[1]))
    return rows


def _complex_to_pairs(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _pairs_to_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def run_single(cfg: SystemConfig, settings: SolverSettings, seed: int) -> dict:
    """One full solve dumped as a JSON document for debugging and regression."""
    ch = sample_channel(cfg, np.random.default_rng(seed))
    w, layout, record = solve(cfg, ch, settings, rng=np.random.default_rng([seed, 0xA0]))
    codebook = build_codebook(cfg.n_tx, cfg.mod_order, cfg.constellation)
    H = assemble_channel(layout, ch, cfg)
    d_min = min_distance(H, w, codebook).d_min
    return {
        "config_hash": config_hash(cfg, settings),
        "seed": int(seed),
        "system": dataclasses.asdict(cfg),
        "solver": dataclasses.asdict(settings),
        "channel": {
            "aod": ch.aod.tolist(),
            "aoa": ch.aoa.tolist(),
            "prm": _complex_to_pairs(ch.prm),
        },
        "record": {
            "eta_history": record.eta_history,
            "block_eta_history": [[lbl, eta] for lbl, eta in record.block_eta_history],
            "wall_ms": record.wall_ms,
            "termination": record.termination,
            "failures": record.failures,
        },
        "final": {
            "w": _complex_to_pairs(w),
            "u": layout.u.tolist(),
            "v": layout.v.tolist(),
            "d_min": d_min,
            "pep_bound": pep_upper_bound(d_min, cfg.noise_power, codebook.n_pairs),
            "n_pairs": codebook.n_pairs,
        },
    }


def load_single_run(document: dict):
    """Rebuild the solved system from a dump; returns (cfg, settings, ch, w, layout)."""
    cfg = SystemConfig(**document["system"])
    settings = SolverSettings(**document["solver"])
    ch = ChannelRealization(
        aod=np.asarray(document["channel"]["aod"]),
        aoa=np.asarray(document["channel"]["aoa"]),
        prm=_pairs_to_complex(document["channel"]["prm"]),
    )
    w = _pairs_to_complex(document["final"]["w"])
    layout = AntennaLayout(u=np.asarray(document["final"]["u"]),
                           v=np.asarray(document["final"]["v"]))
    check_layout(layout, cfg)
    return cfg, settings, ch, w, layout


def write_csv(path, header, rows, cfg: SystemConfig, settings: SolverSettings,
              seeds, command: str) -> None:
    """Write rows with `#` metadata comments (command, config hash, seeds)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# masm {command}\n")
        fh.write(f"# config_hash: {config_hash(cfg, settings)}\n")
        fh.write(f"# seeds: {','.join(str(int(s)) for s in seeds)}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)
