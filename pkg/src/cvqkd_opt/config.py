"""Run configuration: flat key-value files with CLI-flag overrides.

Grammar: one ``key = value`` pair per line; ``#`` starts a comment; blank
lines are ignored.  Keys are lower_snake_case.  Physical quantities carry
explicit units in their key names (SNU for noise, km for distance).

Recognized keys:

    distance_km, attenuation_db_per_km, transmittance,
    excess_noise_snu, detector_efficiency, electronic_noise_snu,
    protocol            homodyne_gg02 | heterodyne_no_switching
    block_size, key_fraction, asymptotic (true/false),
    eps_pe, eps_bar, eps_pa, confidence_coeff,
    code_rate, modulation_variance_snu,
    fer_model           path to a FER-model JSON document
    output_dir, seed

Code registry entries (one code per id):

    code.<id>.rate, code.<id>.alist, code.<id>.fer_model

The environment variable CVQKD_CONFIG names the default config file.
Flags win over file values.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .core import ChannelParams, FiniteSizeConfig, Protocol
from .errors import ConfigError
from .fer import FerModel

__all__ = ["RunConfig", "parse_config_text", "DEFAULT_SEED", "CONFIG_ENV_VAR"]

DEFAULT_SEED = 20240214
CONFIG_ENV_VAR = "CVQKD_CONFIG"

_KNOWN_KEYS = {
    "distance_km",
    "attenuation_db_per_km",
    "transmittance",
    "excess_noise_snu",
    "detector_efficiency",
    "electronic_noise_snu",
    "protocol",
    "block_size",
    "key_fraction",
    "asymptotic",
    "eps_pe",
    "eps_bar",
    "eps_pa",
    "confidence_coeff",
    "code_rate",
    "modulation_variance_snu",
    "fer_model",
    "output_dir",
    "seed",
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse the flat key-value grammar into a string map."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: empty key or value")
        if not (key in _KNOWN_KEYS or key.startswith("code.")):
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


@dataclass
class RunConfig:
    """Everything a CLI command needs, resolved from file plus overrides."""

    values: dict[str, str] = field(default_factory=dict)
    source: str = "<defaults>"

    @classmethod
    def load(cls, path: str | os.PathLike | None, overrides: dict[str, str]) -> "RunConfig":
        """Read the config file (flag > file > environment default)."""
        chosen = path or os.environ.get(CONFIG_ENV_VAR)
        values: dict[str, str] = {}
        source = "<defaults>"
        if chosen:
            p = Path(chosen)
            if not p.is_file():
                raise FileNotFoundError(f"config file not found: {p}")
            values = parse_config_text(p.read_text(), source=str(p))
            source = str(p)
        for key, value in overrides.items():
            if value is not None:
                values[key] = str(value)
        return cls(values=values, source=source)

    # -- typed getters ------------------------------------------------

    def _get(self, key: str) -> str:
        try:
            return self.values[key]
        except KeyError:
            raise ConfigError(f"missing required config key {key!r}") from None

    def get_float(self, key: str, default: float | None = None) -> float:
        if key not in self.values:
            if default is None:
                raise ConfigError(f"missing required config key {key!r}")
            return default
        try:
            return float(self.values[key])
        except ValueError:
            raise ConfigError(f"config key {key!r} is not a number: "
                              f"{self.values[key]!r}") from None

    def get_int(self, key: str, default: int | None = None) -> int:
        return int(self.get_float(key, default))

    def get_bool(self, key: str, default: bool = False) -> bool:
        if key not in self.values:
            return default
        v = self.values[key].lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"config key {key!r} is not a boolean: {v!r}")

    @property
    def seed(self) -> int:
        return self.get_int("seed", DEFAULT_SEED)

    @property
    def output_dir(self) -> Path:
        return Path(self.values.get("output_dir", "."))

    def channel(self) -> ChannelParams:
        if "transmittance" in self.values:
            return ChannelParams(
                transmittance=self.get_float("transmittance"),
                excess_noise=self.get_float("excess_noise_snu"),
                detector_efficiency=self.get_float("detector_efficiency"),
                electronic_noise=self.get_float("electronic_noise_snu"),
                distance_km=self.get_float("distance_km", 0.0) or None,
                attenuation_db_per_km=self.get_float("attenuation_db_per_km", 0.0)
                or None,
            )
        if "distance_km" in self.values:
            return ChannelParams.from_distance(
                distance_km=self.get_float("distance_km"),
                excess_noise=self.get_float("excess_noise_snu"),
                detector_efficiency=self.get_float("detector_efficiency"),
                electronic_noise=self.get_float("electronic_noise_snu"),
                attenuation_db_per_km=self.get_float("attenuation_db_per_km", 0.2),
            )
        raise ConfigError("channel needs 'transmittance' or 'distance_km'")

    def protocol(self) -> Protocol:
        name = self.values.get("protocol", "homodyne_gg02")
        try:
            return Protocol.parse(name)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def finite_size(self) -> FiniteSizeConfig:
        kwargs = dict(
            eps_pe=self.get_float("eps_pe", 1e-10),
            eps_bar=self.get_float("eps_bar", 1e-10),
            eps_pa=self.get_float("eps_pa", 1e-10),
            confidence_coeff=self.get_float("confidence_coeff", 6.5),
        )
        if self.get_bool("asymptotic", default="block_size" not in self.values):
            return FiniteSizeConfig.asymptotic_limit()
        block = self.get_int("block_size")
        key = self.get_int("key_fraction", block // 2)
        return FiniteSizeConfig(block_size=block, key_fraction=key,
                                pe_fraction=block - key, **kwargs)

    def fer_model(self) -> FerModel:
        path = Path(self._get("fer_model"))
        if not path.is_file():
            raise FileNotFoundError(f"FER model file not found: {path}")
        return FerModel.from_json(path.read_text())

    def code_registry(self) -> dict[str, dict[str, str]]:
        """Grouped ``code.<id>.<field>`` entries."""
        registry: dict[str, dict[str, str]] = {}
        for key, value in self.values.items():
            if not key.startswith("code."):
                continue
            parts = key.split(".")
            if len(parts) != 3 or parts[2] not in ("rate", "alist", "fer_model"):
                raise ConfigError(
                    f"bad code registry key {key!r}; expected "
                    "code.<id>.rate|alist|fer_model"
                )
            registry.setdefault(parts[1], {})[parts[2]] = value
        return registry
