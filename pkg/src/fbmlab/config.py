"""Declarative experiment configuration.

INI-style key-value sections, parsed fail-closed: unknown sections or keys
are errors, so a typo cannot silently fall back to a default.  Every
parsed config is hash-addressable (sha256 over the canonical key-sorted
serialization); the hash is embedded in every output artifact so results
can be traced back to the exact configuration that produced them.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Invalid configuration file (maps to CLI exit code 2)."""


VERIFIER_NAMES = (
    "stability",
    "esti-int",
    "fernique",
    "hoeffding-small",
    "hoeffding-large",
    "t1-moments",
    "gaussian-tail",
    "phi-link",
)

# section -> key -> (type, default); default None marks a required key
_SCHEMA = {
    "experiment": {
        "name": (str, "experiment"),
        "seed": (int, 0),
    },
    "grid": {
        "t_max": (float, 1.0),
        "n_steps": (int, 256),
    },
    "fbm": {
        "hurst": (float, 0.75),
        "generator": (str, "circulant"),
        "n_paths": (int, 1000),
        "components": (int, 1),
    },
    "sde": {
        "model": (str, "additive"),
        "drift_b": (float, -1.0),
        "sigma": (float, 1.0),
        "x0": (float, 0.0),
    },
    "verify": {
        "verifiers": (str, ",".join(VERIFIER_NAMES)),
        "beta": (float, 0.6),
        "n_paths": (int, 20000),
        "horizons": (str, "1,2,4"),
        "delta": (float, 0.5),
        "c_delta_values": (str, "1,2,10,1e6"),
    },
}

_GENERATORS = ("cholesky", "circulant", "transfer")
_MODELS = ("additive", "scalar")


@dataclass
class ExperimentConfig:
    """Parsed, validated experiment configuration."""

    sections: dict = field(default_factory=dict)
    source_path: str = ""

    def get(self, section: str, key: str):
        return self.sections[section][key]

    @property
    def config_hash(self) -> str:
        canon = []
        for sec in sorted(self.sections):
            for key in sorted(self.sections[sec]):
                canon.append(f"{sec}.{key}={self.sections[sec][key]!r}")
        return hashlib.sha256("\n".join(canon).encode()).hexdigest()[:16]

    @property
    def verifier_list(self) -> list[str]:
        names = [v.strip() for v in self.get("verify", "verifiers").split(",") if v.strip()]
        for name in names:
            if name not in VERIFIER_NAMES:
                raise ConfigError(
                    f"unknown verifier {name!r}; known: {', '.join(VERIFIER_NAMES)}"
                )
        return names

    @property
    def horizon_list(self) -> list[float]:
        return [float(v) for v in self.get("verify", "horizons").split(",") if v.strip()]


def load_config(path: str, seed_override: int | None = None) -> ExperimentConfig:
    """Parse and validate an INI config file, fail-closed."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found or unreadable: {path}")
    sections: dict = {}
    for sec in parser.sections():
        if sec not in _SCHEMA:
            raise ConfigError(
                f"unknown section [{sec}]; known: {', '.join(sorted(_SCHEMA))}"
            )
        sections[sec] = {}
        for key, raw in parser.items(sec):
            if key not in _SCHEMA[sec]:
                raise ConfigError(
                    f"unknown key {key!r} in section [{sec}]; "
                    f"known: {', '.join(sorted(_SCHEMA[sec]))}"
                )
            typ, _default = _SCHEMA[sec][key]
            try:
                sections[sec][key] = typ(raw) if typ is not int else int(raw, 0)
            except ValueError as exc:
                raise ConfigError(
                    f"[{sec}] {key} = {raw!r}: expected {typ.__name__}"
                ) from exc
    # fill defaults for missing sections/keys
    for sec, keys in _SCHEMA.items():
        sections.setdefault(sec, {})
        for key, (_typ, default) in keys.items():
            sections[sec].setdefault(key, default)
    if seed_override is not None:
        sections["experiment"]["seed"] = int(seed_override)
    cfg = ExperimentConfig(sections=sections, source_path=str(path))
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    h = cfg.get("fbm", "hurst")
    if not 0.5 < h < 1.0:
        raise ConfigError(f"[fbm] hurst must be in (1/2, 1), got {h}")
    gen = cfg.get("fbm", "generator")
    if gen not in _GENERATORS:
        raise ConfigError(f"[fbm] generator must be one of {_GENERATORS}, got {gen!r}")
    model = cfg.get("sde", "model")
    if model not in _MODELS:
        raise ConfigError(f"[sde] model must be one of {_MODELS}, got {model!r}")
    if cfg.get("grid", "n_steps") < 1:
        raise ConfigError("[grid] n_steps must be >= 1")
    if cfg.get("grid", "t_max") <= 0:
        raise ConfigError("[grid] t_max must be positive")
    for key in ("n_paths",):
        if cfg.get("fbm", key) < 1 or cfg.get("verify", key) < 1:
            raise ConfigError(f"{key} must be >= 1")
    beta = cfg.get("verify", "beta")
    if not 0.0 < beta < 1.0:
        raise ConfigError(f"[verify] beta must be in (0, 1), got {beta}")
    cfg.verifier_list  # validates names
