import math

import numpy as np
import pytest

from rsspc import ChannelConfig, ConfigurationError, ebn0_to_sigma, llr, modulate, transmit
from rsspc.channel import hard_decision, stream


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2))


def test_sigma_formula():
    # Eb/N0 = 0 dB at rate 1/2 gives N0/2 = 1, i.e. unit variance.
    assert ebn0_to_sigma(0.0, 0.5) == pytest.approx(1.0)
    assert ebn0_to_sigma(10.0, 1.0) == pytest.approx(math.sqrt(0.05))
    assert ChannelConfig(3.0, 0.8).sigma_n == pytest.approx(ebn0_to_sigma(3.0, 0.8))


@pytest.mark.parametrize("rate", [0.0, -0.1, 1.5])
def test_bad_rate(rate):
    with pytest.raises(ConfigurationError):
        ebn0_to_sigma(1.0, rate)


def test_bpsk_mapping_and_hard_decision():
    assert list(modulate([0, 1, 1, 0])) == [1.0, -1.0, -1.0, 1.0]
    assert list(hard_decision([0.3, -0.1, 0.0, -2.0])) == [0, 1, 0, 1]


def test_noise_statistics():
    rng = stream(7, 0, 0)
    y = transmit(np.ones(400_000), 0.7, rng)
    noise = y - 1
    assert abs(noise.mean()) < 0.005
    assert noise.std() == pytest.approx(0.7, rel=0.01)


def test_uncoded_error_rate_matches_q_function():
    sigma = ebn0_to_sigma(4.0, 1.0)
    rng = stream(1)
    y = transmit(np.ones(1_000_000), sigma, rng)
    ber = np.mean(hard_decision(y))
    expected = q_function(1 / sigma)
    assert ber == pytest.approx(expected, rel=0.05)


def test_llr_scale_and_sign():
    out = llr([1.0, -0.5], 0.5)
    assert out == pytest.approx([8.0, -4.0])
    with pytest.raises(ConfigurationError):
        llr([1.0], 0.0)


def test_streams_are_reproducible_and_distinct():
    a = stream(3, 1, 2).standard_normal(5)
    b = stream(3, 1, 2).standard_normal(5)
    c = stream(3, 1, 3).standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_transmit_with_config_is_seeded():
    cfg = ChannelConfig(5.0, 0.5, seed=11)
    assert np.array_equal(transmit(np.ones(10), cfg), transmit(np.ones(10), cfg))


def test_transmit_argument_checks():
    with pytest.raises(ValueError):
        transmit(np.ones(3), 0.5)
    with pytest.raises(ConfigurationError):
        transmit(np.ones(3), -1.0, stream(0))
    assert np.array_equal(transmit(np.ones(3), 0.0, stream(0)), np.ones(3))
