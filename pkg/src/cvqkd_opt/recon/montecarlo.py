"""Monte Carlo frame-error-rate measurement of the full pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import ChannelParams
from .channel import simulate_block
from .decode import bp_decode
from .matrix import ParityCheckMatrix
from .multidim import multidim_reconcile

__all__ = ["FerEstimate", "measure_fer", "wilson_interval"]


def wilson_interval(failures: int, trials: int, z: float = 1.959963984540054):
    """Wilson score interval for a binomial proportion (default 95%)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = failures / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class FerEstimate:
    fer: float
    ci_low: float
    ci_high: float
    failures: int
    trials: int
    undetected: int
    mean_iterations: float

    def overlaps(self, other: "FerEstimate") -> bool:
        return self.ci_low <= other.ci_high and other.ci_low <= self.ci_high


def measure_fer(
    h: ParityCheckMatrix,
    params: ChannelParams,
    v_a: float,
    trials: int,
    seed: int,
    dim: int = 8,
    max_iter: int = 60,
) -> FerEstimate:
    """Estimate the FER of one code at one modulation variance.

    Each frame runs channel simulation, d-dimensional reconciliation and
    sum-product decoding.  Bob's random signs are folded into the LLRs
    (coset symmetry), so a frame succeeds exactly when the decoder
    converges to the all-zero word; convergence to anything else is an
    undetected error and counts as a failure.

    Frame randomness is drawn from streams keyed by (seed, frame index),
    so the estimate is bit-identical for any execution order or degree of
    parallelism.  Reconciliation output positions are interleaved per
    frame: the eight symbols of a tuple share their norms, and scattering
    them decorrelates that common reliability from graph locality.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = h.n_vars
    if n % dim != 0:
        raise ValueError(f"code length {n} is not divisible by dim {dim}")
    failures = 0
    undetected = 0
    iter_sum = 0
    for frame in range(trials):
        block = simulate_block(params, v_a, n, seed=[seed, frame, 0])
        llr, bits = multidim_reconcile(block, dim=dim, seed=[seed, frame, 1])
        folded = llr * (1.0 - 2.0 * bits)
        perm = np.random.default_rng([seed, frame, 2]).permutation(n)
        result = bp_decode(h, folded[perm], max_iter=max_iter)
        iter_sum += result.iterations
        if not result.converged or result.bits.any():
            failures += 1
            if result.converged:
                undetected += 1
    lo, hi = wilson_interval(failures, trials)
    return FerEstimate(
        fer=failures / trials,
        ci_low=lo,
        ci_high=hi,
        failures=failures,
        trials=trials,
        undetected=undetected,
        mean_iterations=iter_sum / trials,
    )
