#!/usr/bin/env python3
"""
settings.py
Configuration loader, logging setup and the JSON-lines audit trail.

The YAML file (codim_one.yaml, or $CODIM_ONE_CONFIG) is merged key by key
over built-in defaults; a missing or unreadable file falls back to the
defaults. $CODIM_ONE_MAX_SPAIRS overrides the S-pair cap, and command-line
flags override both (see codim_one.py).
"""
from __future__ import annotations

import copy
import json
import logging
import os
import time
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

CONFIG_FILE = Path(os.getenv("CODIM_ONE_CONFIG", Path(__file__).parent / "codim_one.yaml"))

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "groebner": {"max_spairs": 1000000, "advisory_prime": None},
    "certify": {"saturation_bound": 10},
    "runner": {"jobs": 1},
    "debug": {"validate_terms": False},
    "logging": {"log_level": "WARNING", "audit_file": None, "include_timestamps": True},
}

AUDIT: Dict[str, Any] = {"file": None, "include_timestamps": True}


class ConfigError(Exception):
    """Raised when a configuration value has the wrong shape."""
    pass


class Settings:
    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path else CONFIG_FILE
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Dict[str, Any]]:
        """Defaults overlaid with the YAML file, then the environment."""
        merged = copy.deepcopy(DEFAULTS)
        try:
            with open(self.path, "r", encoding="utf-8") as f:
                loaded = yaml.safe_load(f) or {}
        except Exception:
            # Fallback to defaults
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{self.path}: top level must be a mapping")
        for section, values in loaded.items():
            if section not in merged:
                logging.getLogger("codim_one.settings").warning("unknown config section %r", section)
                continue
            if not isinstance(values, dict):
                raise ConfigError(f"{self.path}: section {section!r} must be a mapping")
            merged[section].update(values)
        env_cap = os.getenv("CODIM_ONE_MAX_SPAIRS")
        if env_cap:
            merged["groebner"]["max_spairs"] = int(env_cap)
        return merged

    def get(self, section: str, key: str) -> Any:
        return self.config.get(section, {}).get(key)

    def set(self, section: str, key: str, value: Any) -> None:
        if value is not None:
            self.config.setdefault(section, {})[key] = value


def setup_logging(level: str = "WARNING", verbose: bool = False) -> None:
    lvl = logging.DEBUG if verbose else getattr(logging, str(level).upper(), logging.WARNING)
    logging.basicConfig(level=lvl, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("codim_one").setLevel(lvl)


def configure_audit(path: Optional[str], include_timestamps: bool = True) -> None:
    AUDIT["file"] = Path(path) if path else None
    AUDIT["include_timestamps"] = include_timestamps


def _audit_write(entry: Dict[str, Any]) -> None:
    target = AUDIT["file"]
    if target is None:
        return
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry, ensure_ascii=False, default=str) + "\n")
    except Exception:
        pass


def audit(action: str, target: str, ok: bool, extra: Dict[str, Any] = None) -> None:
    """One audit record per verified piece of evidence or task verdict."""
    entry: Dict[str, Any] = {}
    if AUDIT["include_timestamps"]:
        entry["ts"] = int(time.time())
    entry.update({"action": action, "target": target, "ok": ok})
    if extra: entry.update(extra)
    _audit_write(entry)
