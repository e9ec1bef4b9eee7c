"""Run configuration: defaults, TOML/JSON loading, env overrides.

Precedence: CLI flags > environment variables > config file > defaults.
Unknown keys are rejected.
"""

import copy
import json
import os
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError

ENV_SEED = "FTSBAND_SEED"
ENV_PARALLEL = "FTSBAND_PARALLEL"

DEFAULTS: dict = {
    "kernel": {
        "sigma": None,  # None -> calibrate
        "gamma": 1e-4,
        "d": None,  # None -> calibrate
        "ridge": 0.0,
    },
    "bootstrap": {
        "B": 1000,
        "h": 1,
        "seed": 0,
        "refit": True,
    },
    "bands": {
        "k": None,  # None -> ceil(sqrt(B))
        "alphas": [0.2, 0.1, 0.05],
        "slack": 1e-9,
    },
    "sim": {
        "n": 250,
        "m": 64,
        "m_prime": 5,
        "psi_diag": [0.45, 0.9, 0.34, 0.45],
        "gamma0_diag": [0.5, 0.23, 0.018],
        "eps": 0.05,
        "seed": 0,
        "burn_in": 0,
    },
    "split": {
        "train_frac": 0.6,
        "valid_frac": 0.2,
        "test_frac": 0.2,
    },
    "calibration": {
        "sigmas": [10.0, 50.0, 100.0],
        "ds": [3, 5, 7, 9],
        "gammas": [1e-6, 1e-4],
        "objective": "rmse",
        "band_alpha": 0.2,
    },
    "mc": {
        "replicates": 100,
        "N": 250,
        "base_seed": 1000,
        "max_failure_frac": 0.05,
    },
    "real": {
        "sqrt_transform": False,
        "refit_per_step": False,
    },
    "io": {
        "out_dir": ".",
    },
    "parallelism": 0,  # 0 -> available cores
}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key: {where}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where} must be a table/object")
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = value
    return out


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Build the effective config from file, environment and overrides."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        p = Path(path)
        try:
            if p.suffix.lower() == ".json":
                doc = json.loads(p.read_text(encoding="utf-8"))
            else:
                doc = tomllib.loads(p.read_text(encoding="utf-8"))
        except (OSError, ValueError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"config root must be a table/object: {path}")
        cfg = _merge(cfg, doc)
    if ENV_SEED in os.environ:
        try:
            seed = int(os.environ[ENV_SEED])
        except ValueError as exc:
            raise ConfigError(f"{ENV_SEED} must be an integer") from exc
        cfg["bootstrap"]["seed"] = seed
        cfg["sim"]["seed"] = seed
        cfg["mc"]["base_seed"] = seed
    if ENV_PARALLEL in os.environ:
        try:
            cfg["parallelism"] = int(os.environ[ENV_PARALLEL])
        except ValueError as exc:
            raise ConfigError(f"{ENV_PARALLEL} must be an integer") from exc
    if overrides:
        cfg = _merge(cfg, overrides)
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    b = cfg["bootstrap"]
    if b["B"] < 1 or b["h"] < 1:
        raise ConfigError("bootstrap.B and bootstrap.h must be >= 1")
    for alpha in cfg["bands"]["alphas"]:
        if not 0.0 < alpha < 1.0:
            raise ConfigError(f"alpha {alpha} outside (0, 1)")
    if cfg["kernel"]["gamma"] < 0:
        raise ConfigError("kernel.gamma must be >= 0")
    if cfg["parallelism"] < 0:
        raise ConfigError("parallelism must be >= 0")
    if not 0.0 <= cfg["mc"]["max_failure_frac"] <= 1.0:
        raise ConfigError("mc.max_failure_frac must be in [0, 1]")


def effective_parallelism(cfg: dict) -> int:
    p = int(cfg["parallelism"])
    if p == 0:
        p = os.cpu_count() or 1
    return max(1, p)
