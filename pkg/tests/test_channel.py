import numpy as np
import pytest

from masm import (
    AntennaLayout,
    ChannelRealization,
    SystemConfig,
    assemble_channel,
    check_layout,
    receive_frm,
    receive_frv,
    sample_channel,
    transmit_frm,
    transmit_frv,
)


def test_frv_zero_position_gives_unit_phasors():
    g = transmit_frv(0.0, [0.3, 1.1, 2.0], 0.05)
    assert np.allclose(g, np.ones(3))


def test_frv_known_phases():
    # cos(0)=1 at half-wavelength displacement: phase pi
    g = transmit_frv(0.025, [0.0], 0.05)
    assert np.allclose(g, [-1.0])
    # cos(pi/3)=1/2: phase pi/2
    g = transmit_frv(0.025, [np.pi / 3], 0.05)
    assert np.allclose(g, [1j])


def test_receive_frv_known_phase():
    assert np.allclose(receive_frv(0.0, [0.7], 0.05), [1.0])
    assert np.allclose(receive_frv(0.0125, [0.0], 0.05), [1j])


def test_frv_rejects_bad_wavelength():
    with pytest.raises(ValueError):
        transmit_frv(0.0, [0.3], 0.0)
    with pytest.raises(ValueError):
        transmit_frv(0.0, [0.3], -1.0)


def test_frm_all_zero_positions():
    G = transmit_frm([0.0, 0.0], [0.1, 0.9, 2.2], 0.05)
    assert G.shape == (3, 2)
    assert np.allclose(G, 1.0)


def test_frm_rejects_empty_positions():
    with pytest.raises(ValueError):
        transmit_frm([], [0.1], 0.05)


def test_frm_matches_frv_per_column():
    rng = np.random.default_rng(7)
    u = rng.uniform(0, 0.4, 5)
    aod = rng.uniform(0, np.pi, 6)
    G = transmit_frm(u, aod, 0.05)
    for t in range(5):
        assert np.allclose(G[:, t], transmit_frv(u[t], aod, 0.05), rtol=0, atol=1e-13)
    F = receive_frm(u, aod, 0.05)
    for t in range(5):
        assert np.allclose(F[:, t], receive_frv(u[t], aod, 0.05), rtol=0, atol=1e-13)


def test_frv_elements_unit_magnitude():
    rng = np.random.default_rng(3)
    for _ in range(50):
        g = transmit_frv(rng.uniform(-1, 1), rng.uniform(0, np.pi, 8), 0.05)
        assert np.allclose(np.abs(g), 1.0, atol=1e-14)


def _entrywise_oracle(layout, ch, cfg):
    """Channel entries from the defining double sum, written independently."""
    n_rx, n_tx = layout.v.size, layout.u.size
    H = np.zeros((n_rx, n_tx), dtype=complex)
    k0 = 2 * np.pi / cfg.wavelength
    for r in range(n_rx):
        for t in range(n_tx):
            acc = 0.0 + 0.0j
            for lr in range(ch.aoa.size):
                f = np.exp(1j * k0 * layout.v[r] * np.cos(ch.aoa[lr]))
                for lt in range(ch.aod.size):
                    g = np.exp(1j * k0 * layout.u[t] * np.cos(ch.aod[lt]))
                    acc += np.conj(f) * ch.prm[lr, lt] * g
            H[r, t] = acc
    return H


def test_assemble_channel_entrywise_oracle(cfg):
    rng = np.random.default_rng(11)
    # full (non-diagonal) path response matrix to cover the general case
    ch = ChannelRealization(
        aod=rng.uniform(0, np.pi, 3),
        aoa=rng.uniform(0, np.pi, 5),
        prm=rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3)),
    )
    layout = AntennaLayout(u=rng.uniform(0, 0.4, 4), v=rng.uniform(0, 0.4, 4))
    H = assemble_channel(layout, ch, cfg)
    H_ref = _entrywise_oracle(layout, ch, cfg)
    assert np.allclose(H, H_ref, rtol=1e-12, atol=0)


def test_assemble_single_path_all_zero_positions(cfg):
    sigma = 0.3 - 0.7j
    ch = ChannelRealization(aod=[1.0], aoa=[2.0], prm=[[sigma]])
    layout = AntennaLayout(u=np.zeros(3), v=np.zeros(2))
    H = assemble_channel(layout, ch, cfg)
    assert np.allclose(H, sigma)


def test_assemble_single_path_rank_one(cfg):
    rng = np.random.default_rng(5)
    ch = ChannelRealization(aod=[0.4], aoa=[2.2], prm=[[1.1 + 0.2j]])
    layout = AntennaLayout(u=rng.uniform(0, 0.4, 4), v=rng.uniform(0, 0.4, 4))
    H = assemble_channel(layout, ch, cfg)
    s = np.linalg.svd(H, compute_uv=False)
    assert s[1] < 1e-10 * s[0]


def test_frm_magnitudes_invariant_to_common_shift(channel):
    # a common displacement multiplies each row by a path phasor only
    rng = np.random.default_rng(9)
    u = rng.uniform(0, 0.2, 4)
    G0 = transmit_frm(u, channel.aod, 0.05)
    G1 = transmit_frm(u + 0.07, channel.aod, 0.05)
    assert np.allclose(np.abs(G0), np.abs(G1), rtol=0, atol=1e-14)
    ratio = G1 / G0
    assert np.allclose(ratio, ratio[:, :1], atol=1e-12)  # per-row phasor


def test_realization_validates_inputs():
    with pytest.raises(ValueError):
        ChannelRealization(aod=[0.1, 4.0], aoa=[0.1], prm=[[1.0, 1.0]])
    with pytest.raises(ValueError):
        ChannelRealization(aod=[0.1], aoa=[0.1], prm=[[1.0], [2.0]])
    with pytest.raises(ValueError):
        ChannelRealization(aod=[], aoa=[0.1], prm=np.zeros((1, 0)))


def test_realization_arrays_read_only(channel):
    with pytest.raises(ValueError):
        channel.prm[0, 0] = 0


def test_sample_channel_average_gain():
    cfg = SystemConfig()
    # C0 = 1e-3 (-30 dB), d = 40 m, exponent 2.5
    assert cfg.avg_channel_gain == pytest.approx(1e-3 * 40.0 ** (-2.5), rel=1e-12)
    assert cfg.avg_channel_gain == pytest.approx(9.882117688026186e-08, rel=1e-12)


def test_sample_channel_deterministic(cfg):
    a = sample_channel(cfg, np.random.default_rng(99))
    b = sample_channel(cfg, np.random.default_rng(99))
    assert np.array_equal(a.aod, b.aod)
    assert np.array_equal(a.aoa, b.aoa)
    assert np.array_equal(a.prm, b.prm)


def test_sample_channel_mean_power_law_of_large_numbers(cfg):
    # vectorized stand-in for 1e5 realizations of sum_l |sigma_l|^2
    rng = np.random.default_rng(2024)
    n = 100_000
    L = cfg.n_paths
    scale2 = cfg.avg_channel_gain / (2.0 * L)
    z = rng.standard_normal((n, 2 * L))
    power = scale2 * np.sum(z * z, axis=1)
    assert abs(power.mean() - cfg.avg_channel_gain) < 0.02 * cfg.avg_channel_gain
    # sampler itself agrees on a smaller batch (same statistic, wider band)
    rng2 = np.random.default_rng(7)
    sampled = [np.sum(np.abs(np.diag(sample_channel(cfg, rng2).prm)) ** 2)
               for _ in range(4000)]
    assert abs(np.mean(sampled) - cfg.avg_channel_gain) < 0.05 * cfg.avg_channel_gain


def test_check_layout_accepts_grid_and_rejects_violations(cfg):
    good = AntennaLayout(u=np.arange(4) * 0.025, v=np.arange(4) * 0.025)
    check_layout(good, cfg)
    with pytest.raises(ValueError):
        check_layout(AntennaLayout(u=[0, 0.01, 0.05, 0.075], v=np.arange(4) * 0.025), cfg)
    with pytest.raises(ValueError):
        check_layout(AntennaLayout(u=[0, 0.025, 0.05, 0.5], v=np.arange(4) * 0.025), cfg)
    with pytest.raises(ValueError):
        check_layout(AntennaLayout(u=np.arange(3) * 0.025, v=np.arange(4) * 0.025), cfg)
