import numpy as np
import pytest

from masm import SystemConfig, sample_channel


@pytest.fixture
def cfg():
    return SystemConfig()


@pytest.fixture
def small_cfg():
    # 2x2 link with few paths: fast enough for end-to-end loops in tests
    return SystemConfig(n_tx=2, n_rx=2, mod_order=2, n_paths=2,
                        region_tx=0.2, region_rx=0.2)


def channel_for(cfg, seed):
    return sample_channel(cfg, np.random.default_rng(seed))


@pytest.fixture
def channel(cfg):
    return channel_for(cfg, 1234)
