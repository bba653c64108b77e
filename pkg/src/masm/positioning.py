"""Single-coordinate update machinery for antenna positions.

With every other variable held fixed, the squared receive distance of one
codebook pair is a finite sum of cosines in the coordinate being moved:
path-pair beats plus cross terms against the contribution of the untouched
antennas. That harmonic form gives exact first and second derivatives and a
global curvature bound (set every cosine to +-1), which in turn yields a
concave quadratic under-estimator that is tight at the expansion point.
The coordinate subproblem maximizes the minimum of those quadratics over
the feasible intervals left between the other antennas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, receive_frm, transmit_frm

__all__ = [
    "CoordinateExpansion",
    "QuadraticSurrogate",
    "TxExpansionBuilder",
    "RxExpansionBuilder",
    "tx_expansion",
    "rx_expansion",
    "make_surrogate",
    "feasible_intervals",
    "maximize_min_surrogate",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class CoordinateExpansion:
    """One pair's squared distance as ``const + sum(amp * cos(freq*u + phase))``."""

    amp: np.ndarray    # nonnegative amplitudes
    freq: np.ndarray   # rad / meter
    phase: np.ndarray
    const: float

    def __post_init__(self):
        for name in ("amp", "freq", "phase"):
            arr = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            object.__setattr__(self, name, arr)
            arr.setflags(write=False)

    @property
    def is_constant(self) -> bool:
        return self.amp.size == 0

    def _angles(self, u):
        return np.multiply.outer(np.asarray(u, dtype=float), self.freq) + self.phase

    def value(self, u):
        out = self.const + np.cos(self._angles(u)) @ self.amp
        return float(out) if np.isscalar(u) or np.ndim(u) == 0 else out

    def grad(self, u):
        out = -np.sin(self._angles(u)) @ (self.amp * self.freq)
        return float(out) if np.isscalar(u) or np.ndim(u) == 0 else out

    def hess(self, u):
        out = -np.cos(self._angles(u)) @ (self.amp * self.freq**2)
        return float(out) if np.isscalar(u) or np.ndim(u) == 0 else out

    def curvature_bound(self) -> float:
        """Upper bound on |second derivative| over the whole axis."""
        return float(self.amp @ self.freq**2)


@dataclass(frozen=True)
class QuadraticSurrogate:
    """Concave lower bound of one expansion around ``u0``.

    Equals the expansion exactly at ``u0``; never exceeds it anywhere the
    curvature bound is valid (here: everywhere).
    """

    u0: float
    f0: float
    slope: float
    curvature: float  # nonnegative; 0 collapses to the tangent line

    def value(self, u):
        du = np.asarray(u, dtype=float) - self.u0
        out = self.f0 + self.slope * du - 0.5 * self.curvature * du * du
        return float(out) if np.isscalar(u) or np.ndim(u) == 0 else out


def make_surrogate(exp: CoordinateExpansion, u0: float) -> QuadraticSurrogate:
    return QuadraticSurrogate(
        u0=float(u0),
        f0=exp.value(u0),
        slope=exp.grad(u0),
        curvature=exp.curvature_bound(),
    )


class TxExpansionBuilder:
    """Shared receive-side quantities for all transmit-coordinate expansions.

    Everything here depends only on the receive positions and the channel
    realization, so one builder serves a whole sweep over transmit antennas
    and codebook pairs.
    """

    def __init__(self, ch: ChannelRealization, v, wavelength: float):
        self.wavelength = float(wavelength)
        self.k0 = 2.0 * np.pi / self.wavelength
        self.cos_aod = np.cos(ch.aod)
        F = receive_frm(v, ch.aoa, wavelength)
        self.B = F.conj().T @ ch.prm                    # n_rx x n_tx_paths
        BhB = self.B.conj().T @ self.B
        iu, ju = np.triu_indices(BhB.shape[0], k=1)
        off = BhB[iu, ju]
        self._beat_amp = 2.0 * np.abs(off)
        self._beat_phase = np.angle(off)
        self._beat_freq = self.k0 * (self.cos_aod[ju] - self.cos_aod[iu])
        self._cross_freq = np.tile(-self.k0 * self.cos_aod, self.B.shape[0])
        self._absB = np.abs(self.B).ravel()  # row-major (receive antenna, path)
        self._argB = np.angle(self.B).ravel()
        self._trBhB = float(np.real(np.trace(BhB)))
        self.aod = ch.aod

    def build(self, k: int, diff, u, w, G=None) -> CoordinateExpansion:
        """Expansion of one pair's squared distance in the position of antenna ``k``.

        ``G`` may carry a precomputed transmit field-response matrix for the
        current positions; sweeps over many pairs pass it to avoid rework.
        """
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=complex).reshape(-1)
        c = w * np.asarray(diff, dtype=complex).reshape(-1)
        c_k = c[k]
        if G is None:
            G = transmit_frm(u, self.aod, self.wavelength)
        lam = self.B @ (G @ c - c_k * G[:, k])          # contribution of antennas != k
        lam_norm2 = float(np.real(np.vdot(lam, lam)))
        if c_k == 0:
            return CoordinateExpansion(
                amp=np.empty(0), freq=np.empty(0), phase=np.empty(0), const=lam_norm2
            )
        abs_ck = abs(c_k)
        n_paths = self.cos_aod.size
        beat_amp = abs_ck**2 * self._beat_amp
        cross_amp = 2.0 * abs_ck * self._absB * np.repeat(np.abs(lam), n_paths)
        cross_phase = -self._argB - np.angle(c_k) + np.repeat(np.angle(lam), n_paths)
        const = abs_ck**2 * self._trBhB + lam_norm2
        return CoordinateExpansion(
            amp=np.concatenate([beat_amp, cross_amp]),
            freq=np.concatenate([self._beat_freq, self._cross_freq]),
            phase=np.concatenate([self._beat_phase, cross_phase]),
            const=const,
        )


class RxExpansionBuilder:
    """Transmit-side quantities shared by all receive-coordinate expansions.

    Only row ``r`` of the receive projection depends on the position of
    receive antenna ``r``, so the expansion carries the remaining rows as a
    constant and has no cross term.
    """

    def __init__(self, ch: ChannelRealization, u, wavelength: float):
        self.wavelength = float(wavelength)
        self.k0 = 2.0 * np.pi / self.wavelength
        self.cos_aoa = np.cos(ch.aoa)
        G = transmit_frm(u, ch.aod, wavelength)
        self.prmG = ch.prm @ G                          # n_rx_paths x n_tx
        self._iu, self._ju = np.triu_indices(ch.aoa.size, k=1)
        self._freq = self.k0 * (self.cos_aoa[self._ju] - self.cos_aoa[self._iu])
        self.aoa = ch.aoa

    def build(self, r: int, diff, v, w, F=None) -> CoordinateExpansion:
        """Expansion of one pair's squared distance in the position of antenna ``r``."""
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=complex).reshape(-1)
        q = self.prmG @ (w * np.asarray(diff, dtype=complex).reshape(-1))
        if F is None:
            F = receive_frm(v, self.aoa, self.wavelength)
        rows = F.conj().T @ q
        const_other = float(np.sum(np.abs(rows) ** 2) - np.abs(rows[r]) ** 2)
        rho = q[self._iu] * q[self._ju].conj()          # upper triangle of q q^H
        amp = 2.0 * np.abs(rho)
        if not np.any(amp):
            const = const_other + float(np.sum(np.abs(q) ** 2))
            return CoordinateExpansion(
                amp=np.empty(0), freq=np.empty(0), phase=np.empty(0), const=const
            )
        return CoordinateExpansion(
            amp=amp,
            freq=self._freq,
            phase=np.angle(rho),
            const=const_other + float(np.sum(np.abs(q) ** 2)),
        )


def tx_expansion(k, diff, ch, u, v, w, wavelength) -> CoordinateExpansion:
    """Convenience one-shot builder for a single transmit coordinate and pair."""
    return TxExpansionBuilder(ch, v, wavelength).build(k, diff, u, w)


def rx_expansion(r, diff, ch, u, v, w, wavelength) -> CoordinateExpansion:
    """Convenience one-shot builder for a single receive coordinate and pair."""
    return RxExpansionBuilder(ch, u, wavelength).build(r, diff, v, w)


@dataclass(eq=False)
class BatchExpansion:
    """Harmonic expansions of every non-degenerate pair, stacked as arrays.

    Row ``p`` describes pair ``p`` as ``const[p] + sum_m amp[p, m] *
    cos(freq[m]*u + phase[p, m])``; the frequencies are shared across pairs.
    Produces the same numbers as the per-pair builders, batched for the
    solver's inner loop.
    """

    amp: np.ndarray    # n_active x n_terms
    freq: np.ndarray   # n_terms
    phase: np.ndarray  # n_active x n_terms
    const: np.ndarray  # n_active

    @property
    def n_active(self) -> int:
        return self.const.size

    def values(self, u: float) -> np.ndarray:
        return self.const + np.sum(self.amp * np.cos(u * self.freq + self.phase), axis=1)

    def grads(self, u: float) -> np.ndarray:
        return -np.sum(self.amp * self.freq * np.sin(u * self.freq + self.phase), axis=1)

    def values_grid(self, u) -> np.ndarray:
        """Exact pair values on an array of positions: (n_u, n_active)."""
        u = np.asarray(u, dtype=float).reshape(-1)
        ang = u[:, None, None] * self.freq[None, None, :] + self.phase[None, :, :]
        return self.const[None, :] + np.sum(self.amp[None, :, :] * np.cos(ang), axis=2)

    def curvature_bounds(self) -> np.ndarray:
        return self.amp @ self.freq**2


def _batch_tx(builder: TxExpansionBuilder, k: int, u, w, diffs) -> BatchExpansion:
    w = np.asarray(w, dtype=complex).reshape(-1)
    c_all = w[:, None] * diffs                      # n_tx x n_pairs
    ck = c_all[k]
    active = ck != 0
    if not np.any(active):
        return BatchExpansion(amp=np.empty((0, 0)), freq=np.empty(0),
                              phase=np.empty((0, 0)), const=np.empty(0))
    c_act = c_all[:, active]
    ck = ck[active]
    G = transmit_frm(u, builder.aod, builder.wavelength)
    lam = builder.B @ (G @ c_act - np.outer(G[:, k], ck))   # n_rx x n_active
    abs_ck = np.abs(ck)[:, None]
    n_paths = builder.cos_aod.size
    lam_abs = np.repeat(np.abs(lam).T, n_paths, axis=1)     # n_active x (n_rx*n_paths)
    lam_arg = np.repeat(np.angle(lam).T, n_paths, axis=1)
    amp = np.concatenate([
        abs_ck**2 * builder._beat_amp[None, :],
        2.0 * abs_ck * builder._absB[None, :] * lam_abs,
    ], axis=1)
    phase = np.concatenate([
        np.broadcast_to(builder._beat_phase, (ck.size, builder._beat_phase.size)),
        -builder._argB[None, :] - np.angle(ck)[:, None] + lam_arg,
    ], axis=1)
    freq = np.concatenate([builder._beat_freq, builder._cross_freq])
    const = (np.abs(ck)**2 * builder._trBhB
             + np.sum(np.abs(lam)**2, axis=0))
    return BatchExpansion(amp=amp, freq=freq, phase=phase, const=const)


def _batch_rx(builder: RxExpansionBuilder, r: int, v, w, diffs) -> BatchExpansion:
    w = np.asarray(w, dtype=complex).reshape(-1)
    q_all = builder.prmG @ (w[:, None] * diffs)     # n_rx_paths x n_pairs
    rho = q_all[builder._iu, :] * q_all[builder._ju, :].conj()
    amp = 2.0 * np.abs(rho).T                        # n_pairs x n_beats
    active = np.any(amp > 0.0, axis=1)
    if not np.any(active):
        return BatchExpansion(amp=np.empty((0, 0)), freq=np.empty(0),
                              phase=np.empty((0, 0)), const=np.empty(0))
    F = receive_frm(v, builder.aoa, builder.wavelength)
    rows = F.conj().T @ q_all                        # n_rx x n_pairs
    const_other = np.sum(np.abs(rows)**2, axis=0) - np.abs(rows[r])**2
    const = const_other + np.sum(np.abs(q_all)**2, axis=0)
    return BatchExpansion(
        amp=amp[active],
        freq=builder._freq,
        phase=np.angle(rho).T[active],
        const=const[active],
    )


def feasible_intervals(k: int, positions, region: float, spacing: float) -> list:
    """Closed intervals of ``[0, region]`` at distance >= spacing from the others.

    The other positions must be mutually feasible, which guarantees the
    result is nonempty and contains the current position of antenna ``k``.
    """
    others = np.sort(np.delete(np.asarray(positions, dtype=float), k))
    zones: list = []
    for p in others:
        lo, hi = p - spacing, p + spacing
        if zones and lo < zones[-1][1]:
            zones[-1][1] = max(zones[-1][1], hi)
        else:
            zones.append([lo, hi])
    out = []
    cursor = 0.0
    for lo, hi in zones:
        if lo >= cursor:
            a, b = cursor, min(lo, region)
            if b >= a:
                out.append((a, b))
        cursor = max(cursor, hi)
        if cursor > region:
            break
    if cursor <= region:
        out.append((max(cursor, 0.0), region))
    return out


def _golden_max(fun, a: float, b: float, tol: float):
    """Maximize a quasiconcave function on [a, b] to position tolerance tol."""
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = fun(x1), fun(x2)
    while (b - a) > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = fun(x1)
    return 0.5 * (a + b)


def maximize_min_surrogate(surrogates, intervals, tol: float | None = None) -> tuple:
    """Maximize the pointwise minimum of concave quadratics over intervals.

    The minimum of concave quadratics is concave, hence unimodal on each
    interval, so golden-section search per interval is exact to tolerance;
    interval endpoints and every surrogate's expansion point are also tried,
    which guarantees no regression below the current position's value.
    Returns ``(u_best, min_surrogate_value)``.
    """
    if not surrogates:
        raise ValueError("need at least one surrogate")
    u0 = np.array([s.u0 for s in surrogates])
    f0 = np.array([s.f0 for s in surrogates])
    slope = np.array([s.slope for s in surrogates])
    curv = np.array([s.curvature for s in surrogates])
    return _maximize_min_quadratics(u0, f0, slope, curv, intervals, tol)


def _maximize_min_quadratics(u0, f0, slope, curv, intervals, tol=None) -> tuple:
    if not intervals:
        raise ValueError("need at least one feasible interval")

    def g(u):
        du = u - u0
        return float(np.min(f0 + slope * du - 0.5 * curv * du * du))

    hi_max = max(hi for _, hi in intervals)
    if tol is None:
        tol = 1e-9 * max(hi_max, 1.0e-30)

    candidates = []
    for lo, hi in intervals:
        candidates += [lo, hi]
        if hi - lo > tol:
            candidates.append(_golden_max(g, lo, hi, tol))
        for point in np.unique(u0):  # expansion points are feasible by construction
            if lo - tol <= point <= hi + tol:
                candidates.append(min(max(point, lo), hi))
    best_u = max(candidates, key=g)
    return float(best_u), g(float(best_u))
