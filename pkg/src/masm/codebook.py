"""Spatial-modulation codebook: symbols, bit mapping, pairwise differences.

A spatial-modulation symbol activates exactly one of the ``n_tx`` transmit
antennas and sends one constellation point on it, so the codebook is the
Cartesian product of antenna indices and constellation points. The antenna
index carries the high bits in natural binary; the constellation index
carries the low bits Gray-coded, which keeps nearest-neighbour constellation
mistakes at one bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_power_of_two

__all__ = [
    "SmSymbol",
    "SmCodebook",
    "build_codebook",
    "bits_per_symbol",
    "symbol_to_bits",
    "bits_to_symbol",
    "gray_encode",
    "gray_decode",
]


def gray_encode(m: int) -> int:
    return m ^ (m >> 1)


def gray_decode(g: int) -> int:
    m = 0
    while g:
        m ^= g
        g >>= 1
    return m


def bits_per_symbol(n_tx: int, mod_order: int) -> int:
    """Bits carried per channel use: log2(n_tx) + log2(mod_order)."""
    check_power_of_two("n_tx", n_tx)
    check_power_of_two("mod_order", mod_order)
    return int(n_tx).bit_length() - 1 + int(mod_order).bit_length() - 1


def _psk_points(mod_order: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(mod_order) / mod_order)


def _qam_points(mod_order: int) -> np.ndarray:
    """Square QAM grid normalized to unit average energy."""
    side = int(round(np.sqrt(mod_order)))
    if side * side != mod_order:
        raise ValueError(f"qam constellation needs a square order, got {mod_order}")
    axis = 2 * np.arange(side) - (side - 1)
    points = (axis[:, None] + 1j * axis[None, :]).reshape(-1)
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


@dataclass(frozen=True, eq=False)
class SmSymbol:
    """One codebook entry: active antenna, constellation point, full vector."""

    antenna: int          # 0-based active transmit antenna
    point_index: int      # 0-based constellation index
    point: complex
    vector: np.ndarray    # length n_tx, single nonzero entry at `antenna`

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=complex).reshape(-1)
        object.__setattr__(self, "vector", vec)
        vec.setflags(write=False)


@dataclass(frozen=True, eq=False)
class SmCodebook:
    """All ``n_tx * mod_order`` symbols plus cached unordered pair differences.

    Symbol order is deterministic: antenna-major, constellation-minor.
    ``diffs[:, p]`` caches ``vectors[:, i] - vectors[:, j]`` for the p-th
    unordered pair ``pair_index[p] = (i, j)`` with ``i < j``.
    """

    n_tx: int
    mod_order: int
    constellation: str
    symbols: tuple
    vectors: np.ndarray     # n_tx x (n_tx*mod_order)
    pair_index: np.ndarray  # n_pairs x 2, i < j
    diffs: np.ndarray       # n_tx x n_pairs
    bits: np.ndarray        # (n_tx*mod_order) x bits_per_symbol, uint8

    def __post_init__(self):
        for name in ("vectors", "pair_index", "diffs", "bits"):
            getattr(self, name).setflags(write=False)

    @property
    def n_symbols(self) -> int:
        return self.n_tx * self.mod_order

    @property
    def n_pairs(self) -> int:
        """Unordered signal-pair count, the multiplier of the union bound."""
        return self.pair_index.shape[0]

    def bit_distance_table(self) -> np.ndarray:
        """Pairwise Hamming distances between symbol bit labels."""
        return (self.bits[:, None, :] != self.bits[None, :, :]).sum(axis=2)


def build_codebook(n_tx: int, mod_order: int, constellation: str = "psk") -> SmCodebook:
    """Construct the full spatial-modulation codebook for ``n_tx`` antennas."""
    check_power_of_two("n_tx", n_tx)
    check_power_of_two("mod_order", mod_order)
    if constellation == "psk":
        points = _psk_points(mod_order)
    elif constellation == "qam":
        points = _qam_points(mod_order)
    else:
        raise ValueError(f"unknown constellation {constellation!r}")

    n_sym = n_tx * mod_order
    vectors = np.zeros((n_tx, n_sym), dtype=complex)
    symbols = []
    for k in range(n_tx):
        for m in range(mod_order):
            idx = k * mod_order + m
            vectors[k, idx] = points[m]
            symbols.append(SmSymbol(antenna=k, point_index=m, point=complex(points[m]),
                                    vector=vectors[:, idx].copy()))

    ii, jj = np.triu_indices(n_sym, k=1)
    pair_index = np.column_stack([ii, jj]).astype(np.int64)
    diffs = vectors[:, ii] - vectors[:, jj]

    nbits = bits_per_symbol(n_tx, mod_order)
    bits = np.zeros((n_sym, nbits), dtype=np.uint8)
    for idx, sym in enumerate(symbols):
        bits[idx] = symbol_to_bits(sym, n_tx, mod_order)

    return SmCodebook(
        n_tx=n_tx,
        mod_order=mod_order,
        constellation=constellation,
        symbols=tuple(symbols),
        vectors=vectors,
        pair_index=pair_index,
        diffs=diffs,
        bits=bits,
    )


def _int_to_bits(value: int, width: int) -> list:
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def symbol_to_bits(sym: SmSymbol, n_tx: int, mod_order: int) -> np.ndarray:
    """Bit label of a symbol: antenna bits (natural), then Gray-coded point bits."""
    tx_bits = int(n_tx).bit_length() - 1
    pt_bits = int(mod_order).bit_length() - 1
    label = _int_to_bits(sym.antenna, tx_bits)
    label += _int_to_bits(gray_encode(sym.point_index), pt_bits)
    return np.asarray(label, dtype=np.uint8)


def bits_to_symbol(bits, codebook: SmCodebook) -> SmSymbol:
    """Inverse of :func:`symbol_to_bits` for a given codebook."""
    bits = np.asarray(bits).reshape(-1)
    nbits = bits_per_symbol(codebook.n_tx, codebook.mod_order)
    if bits.size != nbits:
        raise ValueError(f"expected {nbits} bits, got {bits.size}")
    tx_bits = int(codebook.n_tx).bit_length() - 1
    antenna = int("".join(str(int(b)) for b in bits[:tx_bits]), 2) if tx_bits else 0
    gray = int("".join(str(int(b)) for b in bits[tx_bits:]), 2) if nbits > tx_bits else 0
    point_index = gray_decode(gray)
    return codebook.symbols[antenna * codebook.mod_order + point_index]
