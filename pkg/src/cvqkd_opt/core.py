"""Closed-form secret-key-rate model for Gaussian-modulated CV-QKD.

All noise quantities are expressed in shot-noise units (SNU).  Two
protocols are covered: coherent states with homodyne detection, and the
no-switching variant where both quadratures are measured (heterodyne).

The measured channel is summarized by the transmittance ``T``, the excess
noise ``xi`` referred to the channel input, the detector efficiency
``eta`` and the electronic noise ``v_el``.  Finite-size security replaces
``T`` and ``xi`` by worst-case values certified by parameter estimation on
``m`` symbols, and subtracts a privacy-amplification penalty ``delta(n)``
from the rate.

Every function in this module is pure and accepts either scalars or numpy
arrays for the modulation variance, broadcasting elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import CovarianceError, ParameterEstimationError

__all__ = [
    "Protocol",
    "ChannelParams",
    "FiniteSizeConfig",
    "WorstCaseBounds",
    "SkrBreakdown",
    "nominal_bounds",
    "finite_size_bounds",
    "detection_noise",
    "line_noise",
    "total_noise",
    "snr",
    "mutual_information",
    "reconciliation_efficiency",
    "holevo_bound",
    "delta_n",
    "skr_finite",
]

# Absolute tolerance for discriminants and eigenvalue physicality; covers
# double-precision round-off on products of order T^2 (V chi + 1)^2.
EIG_TOL = 1e-9


class Protocol(Enum):
    """Detection scheme; fixes the quadrature multiplexing factor mu."""

    HOMODYNE_GG02 = "homodyne_gg02"
    HETERODYNE_NO_SWITCHING = "heterodyne_no_switching"

    @property
    def mu(self) -> int:
        return 1 if self is Protocol.HOMODYNE_GG02 else 2

    @classmethod
    def parse(cls, name: str) -> "Protocol":
        key = name.strip().lower()
        for p in cls:
            if key in (p.value, p.name.lower()):
                return p
        if key in ("homodyne", "gg02", "hom"):
            return cls.HOMODYNE_GG02
        if key in ("heterodyne", "no_switching", "no-switching", "het"):
            return cls.HETERODYNE_NO_SWITCHING
        raise ValueError(f"unknown protocol {name!r}")


@dataclass(frozen=True)
class ChannelParams:
    """Physical-layer parameters in shot-noise units.

    ``transmittance`` may be given directly or derived from the fiber
    length via ``from_distance``; ``distance_km``/``attenuation_db_per_km``
    are kept for reporting only.
    """

    transmittance: float
    excess_noise: float
    detector_efficiency: float
    electronic_noise: float
    distance_km: float | None = None
    attenuation_db_per_km: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.transmittance <= 1.0:
            raise ValueError("transmittance must lie in (0, 1]")
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise ValueError("detector_efficiency must lie in (0, 1]")
        if self.excess_noise < 0.0:
            raise ValueError("excess_noise must be non-negative")
        if self.electronic_noise < 0.0:
            raise ValueError("electronic_noise must be non-negative")
        if self.distance_km is not None and self.distance_km < 0.0:
            raise ValueError("distance_km must be non-negative")
        if self.attenuation_db_per_km is not None and self.attenuation_db_per_km < 0.0:
            raise ValueError("attenuation_db_per_km must be non-negative")

    @classmethod
    def from_distance(
        cls,
        distance_km: float,
        excess_noise: float,
        detector_efficiency: float,
        electronic_noise: float,
        attenuation_db_per_km: float = 0.2,
    ) -> "ChannelParams":
        """Derive the transmittance as 10^(-alpha L / 10)."""
        t = 10.0 ** (-attenuation_db_per_km * distance_km / 10.0)
        return cls(
            transmittance=t,
            excess_noise=excess_noise,
            detector_efficiency=detector_efficiency,
            electronic_noise=electronic_noise,
            distance_km=distance_km,
            attenuation_db_per_km=attenuation_db_per_km,
        )

    @property
    def amplitude_transmission(self) -> float:
        """t = sqrt(eta T), the amplitude gain between Alice and Bob."""
        return math.sqrt(self.detector_efficiency * self.transmittance)

    @property
    def noise_variance(self) -> float:
        """sigma_z^2 = eta T xi + v_el + 1, total additive noise at Bob."""
        return (
            self.detector_efficiency * self.transmittance * self.excess_noise
            + self.electronic_noise
            + 1.0
        )

    def with_noise(self, excess_noise: float | None = None,
                   electronic_noise: float | None = None) -> "ChannelParams":
        kw = {}
        if excess_noise is not None:
            kw["excess_noise"] = excess_noise
        if electronic_noise is not None:
            kw["electronic_noise"] = electronic_noise
        return replace(self, **kw)


@dataclass(frozen=True)
class FiniteSizeConfig:
    """Block sizes and security parameters.

    ``block_size`` (N) splits into ``key_fraction`` (n) symbols for key
    distillation and ``pe_fraction`` (m = N - n) for parameter estimation.
    The ``asymptotic`` sentinel keeps the n/N prefactor but evaluates the
    infinite-sample limit: delta(n) = 0 and nominal worst-case bounds.
    """

    block_size: int
    key_fraction: int
    pe_fraction: int
    eps_pe: float = 1e-10
    eps_bar: float = 1e-10
    eps_pa: float = 1e-10
    confidence_coeff: float = 6.5
    asymptotic: bool = False

    def __post_init__(self) -> None:
        if self.key_fraction < 1 or self.pe_fraction < 1:
            raise ValueError("key_fraction and pe_fraction must be >= 1")
        if self.key_fraction + self.pe_fraction != self.block_size:
            raise ValueError("key_fraction + pe_fraction must equal block_size")
        for name in ("eps_pe", "eps_bar", "eps_pa"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.confidence_coeff <= 0.0:
            raise ValueError("confidence_coeff must be positive")

    @classmethod
    def split(cls, block_size: float, key_ratio: float = 0.5, **kwargs) -> "FiniteSizeConfig":
        """Split a block with the conventional n = N/2 default."""
        n_total = int(round(block_size))
        n_key = int(round(n_total * key_ratio))
        return cls(block_size=n_total, key_fraction=n_key,
                   pe_fraction=n_total - n_key, **kwargs)

    @classmethod
    def asymptotic_limit(cls, key_ratio: float = 0.5) -> "FiniteSizeConfig":
        """Infinite-block sentinel; the n/N prefactor is retained."""
        n_key = max(1, min(999, int(round(1000 * key_ratio))))
        return cls(block_size=1000, key_fraction=n_key,
                   pe_fraction=1000 - n_key, asymptotic=True)

    @property
    def key_ratio(self) -> float:
        return self.key_fraction / self.block_size


@dataclass(frozen=True)
class WorstCaseBounds:
    """Certified channel bounds from parameter estimation.

    ``t_min`` is the lower amplitude transmission t - dt; the worst-case
    transmittance is ``transmittance_min`` = t_min^2 / eta.  In the
    asymptotic sentinel t_min = t and xi_max = xi.
    """

    t_min: float
    xi_max: float
    t_nominal: float
    sigma_z_sq: float
    transmittance_min: float


@dataclass(frozen=True)
class SkrBreakdown:
    """Secret key rate with all intermediate diagnostics (bits/pulse)."""

    skr: float
    mutual_info: float
    beta: float
    holevo: float
    delta_n: float
    fer: float
    snr: float
    bounds: WorstCaseBounds


def nominal_bounds(params: ChannelParams) -> WorstCaseBounds:
    """Bounds evaluated at the measured channel (infinite-sample limit)."""
    t = params.amplitude_transmission
    return WorstCaseBounds(
        t_min=t,
        xi_max=params.excess_noise,
        t_nominal=t,
        sigma_z_sq=params.noise_variance,
        transmittance_min=params.transmittance,
    )


def finite_size_bounds(params: ChannelParams, fs: FiniteSizeConfig, v_a):
    """Worst-case transmittance and excess noise at confidence eps_PE.

    The estimators on m symbols give t - dt and sigma_z^2 + d sigma_z^2
    with dt = z sqrt(sigma_z^2 / (m V_A)) and d sigma_z^2 =
    z sigma_z^2 sqrt(2/m); the bounds follow as T_min = (t - dt)^2 / eta
    and xi_max = (sigma_z^2 + d sigma_z^2 - v_el - 1) / (eta T).

    Raises ParameterEstimationError when t - dt <= 0 anywhere, i.e. the
    sample cannot certify a positive channel.
    """
    if fs.asymptotic:
        return nominal_bounds(params)
    v_a = np.asarray(v_a, dtype=float)
    if np.any(v_a <= 0.0):
        raise ValueError("v_a must be positive")
    t = params.amplitude_transmission
    sz2 = params.noise_variance
    z = fs.confidence_coeff
    m = fs.pe_fraction
    dt = z * np.sqrt(sz2 / (m * v_a))
    t_min = t - dt
    if np.any(t_min <= 0.0):
        raise ParameterEstimationError(
            "t - dt <= 0: parameter-estimation sample too small to certify "
            "a positive channel (increase m or V_A, or lower the confidence "
            "coefficient)"
        )
    d_sz2 = z * sz2 * np.sqrt(2.0) / math.sqrt(m)
    xi_max = (sz2 + d_sz2 - params.electronic_noise - 1.0) / (
        params.detector_efficiency * params.transmittance
    )
    eta = params.detector_efficiency
    squeeze = np.ndim(v_a) == 0
    tm = float(t_min) if squeeze else t_min
    return WorstCaseBounds(
        t_min=tm,
        xi_max=float(xi_max),
        t_nominal=t,
        sigma_z_sq=sz2,
        transmittance_min=(float(t_min**2 / eta) if squeeze else t_min**2 / eta),
    )


def detection_noise(params: ChannelParams, protocol: Protocol) -> float:
    """Detector-added noise referred to Bob's input (chi_hom or chi_het)."""
    eta, vel = params.detector_efficiency, params.electronic_noise
    if protocol.mu == 1:
        return (1.0 + vel) / eta - 1.0
    return (2.0 + 2.0 * vel) / eta - 1.0


def line_noise(bounds: WorstCaseBounds):
    """Channel-added noise referred to the input, with worst-case bounds."""
    t_min = bounds.transmittance_min
    return (1.0 - t_min) / t_min + bounds.xi_max


def total_noise(params: ChannelParams, protocol: Protocol, bounds: WorstCaseBounds):
    """chi_tot = chi_line + chi_det / T_min, referred to the channel input."""
    return line_noise(bounds) + detection_noise(params, protocol) / bounds.transmittance_min


def snr(params: ChannelParams, protocol: Protocol, v_a, bounds: WorstCaseBounds):
    """Signal-to-noise ratio V_A / (1 + chi_tot) at Bob's reference point.

    The caller chooses nominal or worst-case bounds; code matching uses
    the nominal channel, security terms the worst case.
    """
    t_min = np.asarray(bounds.transmittance_min, dtype=float)
    if np.any(t_min <= 0.0):
        raise ParameterEstimationError("worst-case transmittance collapsed (T_min <= 0)")
    v_a = np.asarray(v_a, dtype=float)
    out = v_a / (1.0 + total_noise(params, protocol, bounds))
    return float(out) if out.ndim == 0 else out


def mutual_information(params: ChannelParams, protocol: Protocol, v_a,
                       bounds: WorstCaseBounds):
    """Shannon mutual information between Alice and Bob in bits/pulse.

    Homodyne: (1/2) log2((V + chi_tot) / (1 + chi_tot)) with V = V_A + 1;
    heterodyne carries both quadratures and doubles the rate.  Equals
    mu/2 * log2(1 + SNR).
    """
    v_a = np.asarray(v_a, dtype=float)
    chi = total_noise(params, protocol, bounds)
    out = protocol.mu * 0.5 * np.log2((v_a + 1.0 + chi) / (1.0 + chi))
    return float(out) if out.ndim == 0 else out


def reconciliation_efficiency(code_rate: float, mutual_info, protocol: Protocol):
    """beta = mu R / I.  Values outside [0, 1] are reported, not raised:
    the optimizer treats beta > 1 as an infeasibility constraint."""
    mutual_info = np.asarray(mutual_info, dtype=float)
    out = protocol.mu * code_rate / mutual_info
    return float(out) if out.ndim == 0 else out


def _g(x):
    """Bosonic entropy kernel G(x) = (x+1) log2(x+1) - x log2 x, G(0) = 0."""
    x = np.asarray(x, dtype=float)
    safe = np.maximum(x, 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (x + 1.0) * np.log2(x + 1.0) - safe * np.log2(safe)
    return np.where(x > 0.0, val, 0.0)


def holevo_bound(params: ChannelParams, protocol: Protocol, v_a,
                 bounds: WorstCaseBounds):
    """Upper bound on Eve's information about Bob's data, bits/pulse.

    Computed from the symplectic eigenvalues of the shared covariance
    matrix before and after Bob's measurement.  The fifth eigenvalue is
    identically 1 and contributes nothing through G(0) = 0.

    Raises CovarianceError when a discriminant is negative or an
    eigenvalue falls below 1 beyond EIG_TOL: the inputs then do not
    describe a physical Gaussian state.
    """
    v_a = np.asarray(v_a, dtype=float)
    t_min = bounds.transmittance_min
    chi_l = line_noise(bounds)
    chi_d = detection_noise(params, protocol)
    chi_t = chi_l + chi_d / t_min
    v = v_a + 1.0

    a = v**2 * (1.0 - 2.0 * t_min) + 2.0 * t_min + t_min**2 * (v + chi_l) ** 2
    b = t_min**2 * (v * chi_l + 1.0) ** 2
    sqrt_b = np.sqrt(b)
    den = t_min * (v + chi_t)
    if protocol.mu == 1:
        c = (v * sqrt_b + t_min * (v + chi_l) + a * chi_d) / den
        d = sqrt_b * (v + sqrt_b * chi_d) / den
    else:
        c = (
            a * chi_d**2 + b + 1.0
            + 2.0 * chi_d * (v * sqrt_b + t_min * (v + chi_l))
            + 2.0 * t_min * (v**2 - 1.0)
        ) / den**2
        d = ((v + sqrt_b * chi_d) / den) ** 2

    disc_ab = a**2 - 4.0 * b
    disc_cd = c**2 - 4.0 * d
    if np.any(disc_ab < -EIG_TOL) or np.any(disc_cd < -EIG_TOL):
        raise CovarianceError("negative discriminant: unphysical covariance matrix")
    disc_ab = np.maximum(disc_ab, 0.0)
    disc_cd = np.maximum(disc_cd, 0.0)

    lam = [
        np.sqrt(np.maximum((a + np.sqrt(disc_ab)) / 2.0, 0.0)),
        np.sqrt(np.maximum((a - np.sqrt(disc_ab)) / 2.0, 0.0)),
        np.sqrt(np.maximum((c + np.sqrt(disc_cd)) / 2.0, 0.0)),
        np.sqrt(np.maximum((c - np.sqrt(disc_cd)) / 2.0, 0.0)),
    ]
    for lam_i in lam:
        if np.any(lam_i < 1.0 - EIG_TOL):
            raise CovarianceError(
                "symplectic eigenvalue below 1: unphysical covariance matrix"
            )
    out = (
        _g((lam[0] - 1.0) / 2.0)
        + _g((lam[1] - 1.0) / 2.0)
        - _g((lam[2] - 1.0) / 2.0)
        - _g((lam[3] - 1.0) / 2.0)
    )
    return float(out) if out.ndim == 0 else out


def delta_n(fs: FiniteSizeConfig) -> float:
    """Privacy-amplification finite-size penalty in bits/pulse.

    delta(n) = 7 sqrt(log2(1/eps_bar)/n) + (2/n) log2(1/eps_pa); the
    asymptotic sentinel returns 0.
    """
    if fs.asymptotic:
        return 0.0
    n = fs.key_fraction
    return 7.0 * math.sqrt(math.log2(1.0 / fs.eps_bar) / n) + (
        2.0 / n
    ) * math.log2(1.0 / fs.eps_pa)


def _rate_prefactor(fs: FiniteSizeConfig) -> float:
    # Finite-size rates carry the key fraction n/N twice; the asymptotic
    # convention applies it once.  See README, "Rate conventions".
    ratio = fs.key_ratio
    return ratio if fs.asymptotic else ratio * ratio


def skr_finite(params: ChannelParams, protocol: Protocol, fs: FiniteSizeConfig,
               v_a: float, code_rate: float, fer: float) -> SkrBreakdown:
    """Finite-size secret key rate for a fixed code rate and frame error rate.

    K = prefactor * (1 - FER) * (mu R - S - delta(n)) with the Holevo
    bound S evaluated under worst-case parameter-estimation bounds.  The
    rate may be negative; it is returned unclamped so that optimizers see
    the full surface.
    """
    if not 0.0 <= fer <= 1.0:
        raise ValueError("fer must lie in [0, 1]")
    if v_a <= 0.0:
        raise ValueError("v_a must be positive")
    bounds = finite_size_bounds(params, fs, v_a)
    s = snr(params, protocol, v_a, bounds)
    info = mutual_information(params, protocol, v_a, bounds)
    beta = reconciliation_efficiency(code_rate, info, protocol)
    holevo = holevo_bound(params, protocol, v_a, bounds)
    dn = delta_n(fs)
    k = _rate_prefactor(fs) * (1.0 - fer) * (protocol.mu * code_rate - holevo - dn)
    return SkrBreakdown(
        skr=float(k),
        mutual_info=info,
        beta=beta,
        holevo=holevo,
        delta_n=dn,
        fer=fer,
        snr=s,
        bounds=bounds,
    )
