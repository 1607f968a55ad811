"""BPSK over AWGN and channel LLRs.

Random streams: every frame draws from ``numpy.random.default_rng`` seeded
with the entropy tuple ``(seed, point, block)`` (via ``SeedSequence``), where
``point`` indexes the SNR grid and ``block`` a fixed-size block of frames.
The mapping is stable, so any block can be regenerated on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


def ebn0_to_sigma(ebn0_db: float, rate: float) -> float:
    if not 0 < rate <= 1:
        raise ConfigurationError(f"code rate must be in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float
    seed: int = 0

    @property
    def sigma_n(self) -> float:
        return ebn0_to_sigma(self.ebn0_db, self.rate)


def modulate(c) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(c, dtype=np.float64)


def stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng([seed, *key])


def transmit(x, channel: ChannelConfig | float, rng: np.random.Generator | None = None) -> np.ndarray:
    """y = x + n with i.i.d. N(0, sigma_n^2) noise.

    ``channel`` is a ChannelConfig or a bare sigma_n. Without an explicit
    ``rng`` the stream is derived from the config seed.
    """
    x = np.asarray(x, dtype=np.float64)
    if isinstance(channel, ChannelConfig):
        sigma_n = channel.sigma_n
        if rng is None:
            rng = stream(channel.seed)
    else:
        sigma_n = float(channel)
        if rng is None:
            raise ValueError("an rng is required when passing sigma_n directly")
    if sigma_n < 0:
        raise ConfigurationError("noise standard deviation must be non-negative")
    return x + sigma_n * rng.standard_normal(x.shape)


def llr(y, sigma_n: float) -> np.ndarray:
    if sigma_n <= 0:
        raise ConfigurationError("LLR needs a positive noise standard deviation")
    return (2.0 / sigma_n**2) * np.asarray(y, dtype=np.float64)


def hard_decision(y) -> np.ndarray:
    """Bit 1 for negative observations; zero maps to bit 0."""
    return (np.asarray(y) < 0).astype(np.uint8)
