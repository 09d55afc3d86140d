"""Frame-error-rate curves as a function of the modulation variance.

A measured FER-vs-V_A curve for a fixed parity-check matrix is piecewise:
saturated at 1 below the waterfall window, 0 above it, and a clamped sum
of up to four Gaussian components inside.  Because a decoder only sees
the operating SNR, a curve measured under one channel can be re-anchored
to another channel by matching SNR values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .core import ChannelParams, Protocol, nominal_bounds, snr, total_noise
from .errors import FitError

__all__ = [
    "GaussianComponent",
    "FerModel",
    "FerMeasurementSet",
    "FitResult",
    "eval_fer",
    "fit_fer",
    "reanchor_to_snr",
    "ReanchoredFer",
]


@dataclass(frozen=True)
class GaussianComponent:
    """One mixture term a * exp(-((v - b)/c)^2).

    Negative amplitudes are legal (measured mixtures contain them), and a
    zero-amplitude component is a valid placeholder; the width must be
    positive.
    """

    amplitude: float
    center: float
    width: float

    def __post_init__(self) -> None:
        if self.width <= 0.0:
            raise ValueError("component width must be positive")


@dataclass(frozen=True)
class FerModel:
    """Piecewise FER curve with its reference channel.

    Below ``va_lo`` every frame fails (FER 1); above ``va_hi`` every frame
    decodes (FER 0); inside the window the Gaussian mixture applies,
    clamped to [0, 1].
    """

    components: tuple[GaussianComponent, ...]
    va_lo: float
    va_hi: float
    reference: ChannelParams
    protocol: Protocol
    code_id: str

    def __post_init__(self) -> None:
        if len(self.components) > 4:
            raise ValueError("at most four mixture components are supported")
        if not 0.0 < self.va_lo < self.va_hi:
            raise ValueError("need 0 < va_lo < va_hi")

    def __call__(self, v_a):
        return eval_fer(self, v_a)

    def breakpoints(self) -> tuple[float, float]:
        """Discontinuity abscissae of the piecewise curve."""
        return (self.va_lo, self.va_hi)

    def to_json(self) -> str:
        ref = self.reference
        doc = {
            "code_id": self.code_id,
            "va_lo": self.va_lo,
            "va_hi": self.va_hi,
            "components": [
                {"a": c.amplitude, "b": c.center, "c": c.width}
                for c in self.components
            ],
            "reference": {
                "T": ref.transmittance,
                "xi": ref.excess_noise,
                "eta": ref.detector_efficiency,
                "vel": ref.electronic_noise,
                "protocol": self.protocol.value,
            },
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "FerModel":
        doc = json.loads(text)
        ref = doc["reference"]
        return cls(
            components=tuple(
                GaussianComponent(c["a"], c["b"], c["c"]) for c in doc["components"]
            ),
            va_lo=float(doc["va_lo"]),
            va_hi=float(doc["va_hi"]),
            reference=ChannelParams(
                transmittance=float(ref["T"]),
                excess_noise=float(ref["xi"]),
                detector_efficiency=float(ref["eta"]),
                electronic_noise=float(ref["vel"]),
            ),
            protocol=Protocol.parse(ref["protocol"]),
            code_id=str(doc["code_id"]),
        )


def _mixture(components, v):
    out = np.zeros_like(v, dtype=float)
    for comp in components:
        out += comp.amplitude * np.exp(-(((v - comp.center) / comp.width) ** 2))
    return out


def eval_fer(model: FerModel, v_a):
    """FER at modulation variance v_a: 1 below the window, 0 above,
    clamp(mixture, 0, 1) inside.  Accepts scalars or arrays."""
    v = np.asarray(v_a, dtype=float)
    mix = np.clip(_mixture(model.components, v), 0.0, 1.0)
    out = np.where(v < model.va_lo, 1.0, np.where(v > model.va_hi, 0.0, mix))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FerMeasurementSet:
    """Monte Carlo FER measurements on a strictly increasing V_A grid."""

    va: tuple[float, ...]
    trials: tuple[int, ...]
    failures: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (len(self.va) == len(self.trials) == len(self.failures)):
            raise ValueError("va, trials and failures must have equal length")
        if any(t < 1 for t in self.trials):
            raise ValueError("trials must be positive")
        if any(f < 0 or f > t for f, t in zip(self.failures, self.trials)):
            raise ValueError("failures must lie in [0, trials]")
        if any(b <= a for a, b in zip(self.va, self.va[1:])):
            raise ValueError("va values must be strictly increasing")

    @property
    def fer(self) -> np.ndarray:
        return np.asarray(self.failures, dtype=float) / np.asarray(self.trials, dtype=float)

    CSV_HEADER = "va,trials,failures"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_HEADER.split(","))
        for row in zip(self.va, self.trials, self.failures):
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "FerMeasurementSet":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise FitError("empty CSV: expected header 'va,trials,failures'") from None
        if [h.strip() for h in header] != cls.CSV_HEADER.split(","):
            raise FitError(
                f"line 1: expected header {cls.CSV_HEADER!r}, got {','.join(header)!r}"
            )
        va, trials, failures = [], [], []
        for i, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise FitError(f"line {i}: expected 3 columns, got {len(row)}")
            try:
                va.append(float(row[0]))
                trials.append(int(row[1]))
                failures.append(int(row[2]))
            except ValueError as exc:
                raise FitError(f"line {i}: {exc}") from None
        return cls(va=tuple(va), trials=tuple(trials), failures=tuple(failures))


@dataclass(frozen=True)
class FitResult:
    model: FerModel
    rms: float
    n_starts: int


def _saturation_window(data: FerMeasurementSet) -> tuple[float, float]:
    """Boundary thresholds from observed saturation.

    va_lo is the end of the leading all-ones run, va_hi the start of the
    trailing all-zeros run.  Without a saturated run the window edge falls
    back to the data edge: no claim is made outside the measured grid, and
    the implicit FER 1 below it keeps optimizers out of unmeasured
    territory.
    """
    fer = data.fer
    va = data.va
    k = 0
    while k < len(va) and fer[k] == 1.0:
        k += 1
    va_lo = va[k - 1] if k > 0 else va[0]
    j = len(va)
    while j > 0 and fer[j - 1] == 0.0:
        j -= 1
    va_hi = va[j] if j < len(va) else va[-1]
    return va_lo, va_hi


def fit_fer(
    data: FerMeasurementSet,
    reference: ChannelParams,
    protocol: Protocol,
    code_id: str = "fitted",
    max_components: int = 4,
    n_starts: int = 20,
    seed: int = 20140722,
) -> FitResult:
    """Fit the piecewise mixture to measured FER points.

    The saturation thresholds are taken from the data, never fitted.  The
    mixture is fitted by Nelder-Mead simplex descent from ``n_starts``
    seeded random starts (centers inside the window, widths near a quarter
    window, amplitudes in [0, 1]); the lowest residual wins and ties break
    toward fewer effective components (|amplitude| > 1e-3).

    Raises FitError when the measurements never leave saturation or the
    transition window holds fewer than six points.
    """
    fer = data.fer
    if np.all(fer == 1.0) or np.all(fer == 0.0):
        raise FitError(
            "all-ones or all-zeros measurements: the V_A grid missed the "
            "waterfall region"
        )
    va_lo, va_hi = _saturation_window(data)
    va = np.asarray(data.va)
    in_window = (va >= va_lo) & (va <= va_hi)
    v_fit = va[in_window]
    f_fit = fer[in_window]
    transition = np.count_nonzero((f_fit > 0.0) & (f_fit < 1.0))
    if transition < 6:
        raise FitError(
            f"only {transition} points with 0 < FER < 1 in the transition "
            "window; need at least 6 to constrain the mixture"
        )

    def residual(theta: np.ndarray) -> float:
        mix = np.zeros_like(v_fit)
        for a, b, c in theta.reshape(-1, 3):
            mix += a * np.exp(-(((v_fit - b) / max(abs(c), 1e-6)) ** 2))
        return float(np.sum((np.clip(mix, 0.0, 1.0) - f_fit) ** 2))

    rng = np.random.default_rng(seed)
    width0 = (va_hi - va_lo) / 4.0
    best: tuple[float, int, np.ndarray] | None = None
    for _ in range(n_starts):
        theta0 = np.empty(3 * max_components)
        theta0[0::3] = rng.uniform(0.0, 1.0, max_components)
        theta0[1::3] = rng.uniform(va_lo, va_hi, max_components)
        theta0[2::3] = width0 * rng.uniform(0.5, 1.5, max_components)
        res = minimize(residual, theta0, method="Nelder-Mead",
                       options={"maxiter": 4000, "xatol": 1e-9, "fatol": 1e-12})
        theta = res.x
        effective = int(np.count_nonzero(np.abs(theta[0::3]) > 1e-3))
        key = (res.fun, effective)
        if best is None or key < (best[0], best[1]):
            best = (res.fun, effective, theta)
    assert best is not None
    sse, _, theta = best
    components = tuple(
        GaussianComponent(a, b, abs(c)) for a, b, c in theta.reshape(-1, 3)
    )
    model = FerModel(
        components=components,
        va_lo=float(va_lo),
        va_hi=float(va_hi),
        reference=reference,
        protocol=protocol,
        code_id=code_id,
    )
    return FitResult(model=model, rms=math.sqrt(sse / len(v_fit)), n_starts=n_starts)


class ReanchoredFer:
    """A measured FER curve mapped onto a different channel through SNR.

    A decoder's failure probability depends on the operating SNR only.
    For a query V_A under the new channel, the SNR is computed with the
    nominal (measured) channel values and inverted against the reference
    channel's total noise, and the original curve is evaluated at the
    reference-equivalent modulation variance.
    """

    def __init__(self, model: FerModel, new_params: ChannelParams,
                 new_protocol: Protocol):
        self.model = model
        self.params = new_params
        self.protocol = new_protocol
        chi_ref = total_noise(model.reference, model.protocol,
                              nominal_bounds(model.reference))
        chi_new = total_noise(new_params, new_protocol, nominal_bounds(new_params))
        # v' = snr_new(v) * (1 + chi_ref): a linear map between the two
        # nominal channels.
        self._scale = (1.0 + chi_ref) / (1.0 + chi_new)

    @property
    def scale(self) -> float:
        return self._scale

    def __call__(self, v_a):
        return eval_fer(self.model, np.asarray(v_a, dtype=float) * self._scale)

    def breakpoints(self) -> tuple[float, float]:
        return (self.model.va_lo / self._scale, self.model.va_hi / self._scale)


def reanchor_to_snr(model: FerModel, new_params: ChannelParams,
                    new_protocol: Protocol) -> ReanchoredFer:
    """FER-of-V_A under a new channel, matched through the nominal SNR."""
    return ReanchoredFer(model, new_params, new_protocol)
