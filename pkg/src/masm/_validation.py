"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

__all__ = ["as_rng", "is_power_of_two", "check_power_of_two", "check_precoder"]


def as_rng(seed=None) -> np.random.Generator:
    """Return a numpy Generator from a seed, Generator, or SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


def check_power_of_two(name: str, n: int) -> int:
    if not is_power_of_two(n):
        raise ValueError(f"{name} must be a power of 2 and >= 1, got {n!r}")
    return int(n)


def check_precoder(w, power: float, slack: float = 1e-9) -> np.ndarray:
    """Validate a diagonal-precoder weight vector against the power budget."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    used = float(np.sum(np.abs(w) ** 2))
    if used > power + slack:
        raise ValueError(
            f"precoder power {used:.6g} exceeds budget {power:.6g} (+{slack:g} slack)"
        )
    return w
