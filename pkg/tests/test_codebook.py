import itertools

import numpy as np
import pytest

from masm import bits_per_symbol, bits_to_symbol, build_codebook, symbol_to_bits
from masm.codebook import gray_decode, gray_encode


def test_bpsk_two_antennas_symbols_and_pairs():
    cb = build_codebook(2, 2)
    assert cb.n_symbols == 4
    assert cb.n_pairs == 6
    expected = [[1, 0], [-1, 0], [0, 1], [0, -1]]
    for sym, ref in zip(cb.symbols, expected):
        assert np.allclose(sym.vector, ref, atol=1e-15)


def test_qpsk_four_antennas_counts():
    cb = build_codebook(4, 4)
    assert cb.n_symbols == 16
    assert cb.n_pairs == 120


def test_symbols_have_unit_energy():
    for T, M in [(1, 2), (2, 4), (4, 4), (8, 8)]:
        cb = build_codebook(T, M)
        for sym in cb.symbols:
            assert np.linalg.norm(sym.vector) == pytest.approx(1.0, abs=1e-12)


def test_qam_codebook_unit_average_energy():
    cb = build_codebook(2, 16, constellation="qam")
    energies = [np.linalg.norm(s.vector) ** 2 for s in cb.symbols]
    assert np.mean(energies) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        build_codebook(2, 8, constellation="qam")  # non-square order


def test_bits_per_symbol_values():
    assert bits_per_symbol(4, 4) == 4
    assert bits_per_symbol(2, 2) == 2
    assert bits_per_symbol(1, 16) == 4


def test_rejects_non_power_of_two():
    for bad in (3, 6, 0, -2):
        with pytest.raises(ValueError):
            build_codebook(bad, 4)
        with pytest.raises(ValueError):
            bits_per_symbol(4, bad)


def test_zero_bits_map_to_first_symbol():
    cb = build_codebook(4, 4)
    sym = bits_to_symbol([0, 0, 0, 0], cb)
    assert sym.antenna == 0 and sym.point_index == 0


def test_bits_round_trip_exhaustive():
    for T, M in [(1, 2), (2, 2), (4, 4), (8, 2), (2, 8)]:
        cb = build_codebook(T, M)
        for sym in cb.symbols:
            bits = symbol_to_bits(sym, T, M)
            assert bits.size == bits_per_symbol(T, M)
            back = bits_to_symbol(bits, cb)
            assert back.antenna == sym.antenna
            assert back.point_index == sym.point_index


def test_bits_to_symbol_rejects_wrong_length():
    cb = build_codebook(4, 4)
    with pytest.raises(ValueError):
        bits_to_symbol([0, 1, 0], cb)


def test_gray_adjacent_indices_differ_in_one_bit():
    for M in (4, 8):
        for m in range(M):
            a = gray_encode(m)
            b = gray_encode((m + 1) % M)
            assert bin(a ^ b).count("1") == 1
    for m in range(64):
        assert gray_decode(gray_encode(m)) == m


def test_pair_norm_values_exhaustive():
    # squared pair distances: |s_a - s_b|^2 on the same antenna, else 2
    for T, M in itertools.product((1, 2, 4, 8), (2, 4, 8)):
        cb = build_codebook(T, M)
        for p in range(cb.n_pairs):
            i, j = cb.pair_index[p]
            d2 = np.linalg.norm(cb.diffs[:, p]) ** 2
            si, sj = cb.symbols[i], cb.symbols[j]
            if si.antenna == sj.antenna:
                assert d2 == pytest.approx(abs(si.point - sj.point) ** 2, abs=1e-12)
            else:
                assert d2 == pytest.approx(2.0, abs=1e-12)


def test_codebook_deterministic():
    a = build_codebook(4, 8)
    b = build_codebook(4, 8)
    assert np.array_equal(a.vectors, b.vectors)
    assert np.array_equal(a.pair_index, b.pair_index)
    assert np.array_equal(a.diffs, b.diffs)
    assert np.array_equal(a.bits, b.bits)


def test_pair_cache_matches_vectors():
    cb = build_codebook(4, 4)
    for p in [0, 17, 63, 119]:
        i, j = cb.pair_index[p]
        assert np.allclose(cb.diffs[:, p], cb.vectors[:, i] - cb.vectors[:, j])
