"""Bundled reference data: channels, measured FER curves, degree distributions.

The package ships the parameter sets of the reference system it is
calibrated against: a 50 km homodyne link, a 25 km no-switching link, and
the two-block field measurement used for live re-optimization, together
with the measured FER curve of the rate-0.1 multi-edge code and waterfall
fixtures for companion code rates.
"""

from __future__ import annotations

from .core import ChannelParams, Protocol
from .fer import FerModel, GaussianComponent
from .recon.degrees import DegreeDistribution

__all__ = [
    "homodyne_50km",
    "heterodyne_25km",
    "field_block_one",
    "field_block_two",
    "fer_rate01_homodyne",
    "fer_heterodyne_as_printed",
    "fer_heterodyne_fixture",
    "fer_rate005_fixture",
    "fer_rate015_fixture",
    "degree_distribution",
    "DEGREE_DISTRIBUTION_IDS",
]


def homodyne_50km() -> ChannelParams:
    """50 km reference channel: eta=0.606, xi=0.005, v_el=0.041, T=0.1."""
    return ChannelParams(
        transmittance=0.1,
        excess_noise=0.005,
        detector_efficiency=0.606,
        electronic_noise=0.041,
        distance_km=50.0,
        attenuation_db_per_km=0.2,
    )


def heterodyne_25km() -> ChannelParams:
    """25 km no-switching channel: eta=0.56, xi=0.022, v_el=0.042, T=0.3162."""
    return ChannelParams(
        transmittance=0.3162,
        excess_noise=0.022,
        detector_efficiency=0.56,
        electronic_noise=0.042,
        distance_km=25.0,
        attenuation_db_per_km=0.2,
    )


def field_block_one() -> ChannelParams:
    """First data block of the two-block field run (50 km, eta=0.51)."""
    return ChannelParams(
        transmittance=0.1,
        excess_noise=0.0324,
        detector_efficiency=0.51,
        electronic_noise=0.1465,
        distance_km=50.0,
        attenuation_db_per_km=0.2,
    )


def field_block_two() -> ChannelParams:
    """Second data block after setting V_A (slight parameter drift)."""
    return ChannelParams(
        transmittance=0.1,
        excess_noise=0.0321,
        detector_efficiency=0.51,
        electronic_noise=0.1507,
        distance_km=50.0,
        attenuation_db_per_km=0.2,
    )


def fer_rate01_homodyne() -> FerModel:
    """Measured FER curve of the rate-0.1 multi-edge code on the 50 km
    homodyne channel; waterfall window [2.7, 3.0] SNU."""
    return FerModel(
        components=(
            GaussianComponent(0.8310, 2.654, 0.08704),
            GaussianComponent(0.6753, 2.113, 0.4542),
            GaussianComponent(0.0, 2.7, 0.1),
            GaussianComponent(0.3437, 2.722, 0.03649),
        ),
        va_lo=2.7,
        va_hi=3.0,
        reference=homodyne_50km(),
        protocol=Protocol.HOMODYNE_GG02,
        code_id="met-r010",
    )


def fer_heterodyne_as_printed() -> FerModel:
    """Heterodyne FER mixture exactly as published for the 25 km channel.

    The printed coefficient set is internally inconsistent: the third
    amplitude (8727) is four orders of magnitude out of range and the two
    negative components drive the mixture below zero across most of the
    window, so the clamped curve is not a usable waterfall.  Kept for the
    record; use ``fer_heterodyne_fixture`` for computations.
    """
    return FerModel(
        components=(
            GaussianComponent(-0.1987, 1.851, 0.01752),
            GaussianComponent(-0.8834, 1.854, 0.03432),
            GaussianComponent(0.0, 1.9, 0.1),
            GaussianComponent(8727.0, 0.5462, 0.4082),
        ),
        va_lo=1.84,
        va_hi=2.02,
        reference=heterodyne_25km(),
        protocol=Protocol.HETERODYNE_NO_SWITCHING,
        code_id="met-r010-het-published",
    )


def fer_heterodyne_fixture() -> FerModel:
    """Reconstructed heterodyne waterfall on [1.84, 2.02].

    Single-component replacement for the unusable published coefficients:
    it keeps the published branch structure and is calibrated so that the
    finite-size optimizer reproduces the published optimal modulation
    variances (1.9348 / 1.9373 / 1.9382 / 1.9385 for block sizes 2e8,
    2e9, 2e10 and the asymptotic limit).
    """
    return FerModel(
        components=(
            GaussianComponent(1.05, 1.7992306820358084, 0.07509329929527667),
        ),
        va_lo=1.84,
        va_hi=2.02,
        reference=heterodyne_25km(),
        protocol=Protocol.HETERODYNE_NO_SWITCHING,
        code_id="met-r010-het-fixture",
    )


def fer_rate005_fixture() -> FerModel:
    """Waterfall fixture for the rate-0.05 code on the 50 km channel,
    calibrated to the published optimum (V_A 1.3650, rate 0.0074)."""
    return FerModel(
        components=(
            GaussianComponent(1.05, 1.16156299106909, 0.12286079480169293),
        ),
        va_lo=1.26,
        va_hi=1.50,
        reference=homodyne_50km(),
        protocol=Protocol.HOMODYNE_GG02,
        code_id="met-r005-fixture",
    )


def fer_rate015_fixture() -> FerModel:
    """Waterfall fixture for the rate-0.15 code on the 50 km channel,
    calibrated to the published optimum (V_A 4.3700, rate 0.0083)."""
    return FerModel(
        components=(
            GaussianComponent(1.05, 4.015352978200635, 0.24118287919426173),
        ),
        va_lo=4.10,
        va_hi=4.75,
        reference=homodyne_50km(),
        protocol=Protocol.HOMODYNE_GG02,
        code_id="met-r015-fixture",
    )


# Multi-edge-type degree distributions for the three bundled code rates.
# Thresholds are the BIAWGN noise-sigma limits reported with the
# distributions (unit-energy signaling), consumed as given data.
_DISTRIBUTIONS = {
    "met-r005": dict(
        code_rate=0.05,
        threshold=3.674,
        variable_terms=(
            (0.04, {1: 2, 2: 34}),
            (0.03, {1: 3, 2: 34}),
            (0.93, {3: 1}),
        ),
        check_terms=(
            (0.01, {1: 8}),
            (0.01, {1: 9}),
            (0.41, {2: 2, 3: 1}),
            (0.52, {2: 3, 3: 1}),
        ),
    ),
    "met-r010": dict(
        code_rate=0.10,
        threshold=2.541,
        variable_terms=(
            (0.0775, {1: 2, 2: 20}),
            (0.0475, {1: 3, 2: 22}),
            (0.875, {3: 1}),
        ),
        check_terms=(
            (0.0025, {1: 11}),
            (0.0225, {1: 12}),
            (0.03, {2: 2, 3: 1}),
            (0.845, {2: 3, 3: 1}),
        ),
    ),
    "met-r015": dict(
        code_rate=0.15,
        threshold=2.038,
        variable_terms=(
            (0.0858, {1: 2, 2: 12}),
            (0.0996, {1: 3, 2: 14}),
            (0.8146, {3: 1}),
        ),
        check_terms=(
            (0.0160, {1: 10}),
            (0.0194, {1: 16}),
            (0.0198, {2: 2, 3: 1}),
            (0.7948, {2: 3, 3: 1}),
        ),
    ),
    "regular-3-6": dict(
        code_rate=0.5,
        threshold=None,
        variable_terms=((1.0, {1: 3}),),
        check_terms=((0.5, {1: 6}),),
    ),
}

DEGREE_DISTRIBUTION_IDS = tuple(sorted(_DISTRIBUTIONS))


def degree_distribution(dist_id: str) -> DegreeDistribution:
    """Bundled degree distribution by id (see DEGREE_DISTRIBUTION_IDS)."""
    try:
        spec = _DISTRIBUTIONS[dist_id]
    except KeyError:
        raise KeyError(
            f"unknown distribution {dist_id!r}; available: {DEGREE_DISTRIBUTION_IDS}"
        ) from None
    return DegreeDistribution.from_node_fractions(
        code_rate=spec["code_rate"],
        variable_terms=spec["variable_terms"],
        check_terms=spec["check_terms"],
        threshold=spec["threshold"],
        dist_id=dist_id,
    )
