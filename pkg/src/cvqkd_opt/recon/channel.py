"""Gaussian quantum channel simulation in shot-noise units."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import ChannelParams

__all__ = ["QuadratureBlock", "simulate_block"]


@dataclass(frozen=True)
class QuadratureBlock:
    """Correlated quadrature samples: Bob's y = t x + z with t = sqrt(eta T)
    and Var(z) = eta T xi + v_el + 1 (shot noise included)."""

    alice: np.ndarray
    bob: np.ndarray

    def __post_init__(self) -> None:
        if self.alice.shape != self.bob.shape or self.alice.ndim != 1:
            raise ValueError("alice and bob must be equal-length vectors")

    def __len__(self) -> int:
        return self.alice.size

    def estimate_channel(self) -> tuple[float, float]:
        """Least-squares (t_hat, sigma_z_sq_hat) from the block itself."""
        x, y = self.alice, self.bob
        t_hat = float(np.dot(x, y) / np.dot(x, x))
        resid = y - t_hat * x
        return t_hat, float(np.var(resid))

    def estimate_snr(self) -> float:
        t_hat, sz2_hat = self.estimate_channel()
        return t_hat * t_hat * float(np.var(self.alice)) / sz2_hat


def simulate_block(params: ChannelParams, v_a: float, length: int,
                   seed) -> QuadratureBlock:
    """Draw one raw-data block of the linear Gaussian channel.

    Deterministic for a given seed; ``seed`` may be an int or a sequence
    of ints (numpy SeedSequence entropy), which is how the Monte Carlo
    driver derives independent per-frame streams.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if v_a <= 0.0:
        raise ValueError("v_a must be positive")
    rng = np.random.default_rng(seed)
    x = rng.normal(0.0, np.sqrt(v_a), length)
    z = rng.normal(0.0, np.sqrt(params.noise_variance), length)
    y = params.amplitude_transmission * x + z
    return QuadratureBlock(alice=x, bob=y)
