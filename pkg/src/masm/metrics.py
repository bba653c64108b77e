"""Minimum pairwise receive distance, the Gaussian Q-function, and the
union-bound error estimate built from them.

The design objective throughout the package is the squared minimum
Euclidean distance among all precoded codebook pairs at the receiver;
square roots are only taken inside the error bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .codebook import SmCodebook

__all__ = ["DistanceReport", "min_distance", "pair_distances", "q_function", "pep_upper_bound"]


@dataclass(frozen=True, eq=False)
class DistanceReport:
    """Minimum squared pair distance and the pair attaining it."""

    d_min: float
    argmin_pair: tuple
    all_distances: np.ndarray | None = None


def pair_distances(H: np.ndarray, w, codebook: SmCodebook) -> np.ndarray:
    """Squared receive distance of every unordered codebook pair."""
    if codebook.n_pairs == 0:
        raise ValueError("codebook has no symbol pairs")
    w = np.asarray(w, dtype=complex).reshape(-1)
    scaled = H * w[None, :]                      # H @ diag(w)
    rx = scaled @ codebook.diffs                 # n_rx x n_pairs
    return np.sum(np.abs(rx) ** 2, axis=0)


def min_distance(H: np.ndarray, w, codebook: SmCodebook, keep_all: bool = False) -> DistanceReport:
    """Minimum squared pair distance; ties break toward the lowest pair index."""
    dists = pair_distances(H, w, codebook)
    p = int(np.argmin(dists))
    i, j = codebook.pair_index[p]
    return DistanceReport(
        d_min=float(dists[p]),
        argmin_pair=(int(i), int(j)),
        all_distances=dists if keep_all else None,
    )


def q_function(x):
    """Standard Gaussian tail probability, via the complementary error function."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def pep_upper_bound(d_min: float, noise_power: float, n_pairs: int) -> float:
    """Union bound on the symbol error probability from the minimum distance.

    Not clamped to [0, 1]: with many pairs the bound may exceed 1.
    """
    if noise_power <= 0:
        raise ValueError(f"noise_power must be positive, got {noise_power}")
    if d_min < 0:
        raise ValueError(f"d_min must be nonnegative, got {d_min}")
    if n_pairs < 1:
        raise ValueError(f"n_pairs must be >= 1, got {n_pairs}")
    return float(n_pairs * q_function(np.sqrt(d_min / (2.0 * noise_power))))
