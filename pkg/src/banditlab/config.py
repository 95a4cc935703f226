"""Flat ``key = value`` experiment configuration files.

Blank lines and lines starting with ``#`` are ignored. Dotted keys define
profiles and datasets::

    profiles = TS PD M
    environments = covertype; bernoulli:0.9,0.1
    modes = normal, positive
    horizon = 20000
    profile.PD.beta = 50
    profile.MINE.tau = 0.8
    dataset.toy.path = data/toy.csv
    dataset.toy.label_column = 0
"""

from __future__ import annotations

import re
from pathlib import Path

from .core import WEIGHTS, BiasProfile
from .ingestion import DatasetSpec

KEYS = {"profiles", "environments", "modes", "horizon", "runs", "seed", "jitter", "data_dir",
        "out", "format", "jobs", "trace", "raw"}
KEY_ALIASES = {"profile": "profiles", "env": "environments", "environment": "environments",
               "mode": "modes", "base_seed": "seed", "data-dir": "data_dir"}
PROFILE_FIELDS = set(WEIGHTS) | {f"jitter_{w}" for w in WEIGHTS}
DATASET_FIELDS = {"path", "delimiter", "label_column", "header", "classes"}


class ConfigError(ValueError):
    pass


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse config text into plain values plus ``profile``/``dataset`` sections."""
    values: dict = {}
    profiles: dict[str, dict[str, str]] = {}
    datasets: dict[str, dict[str, str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = key.strip(), value.strip()
        if key.startswith(("profile.", "dataset.")):
            section, _, rest = key.partition(".")
            name, _, fld = rest.rpartition(".")
            allowed = PROFILE_FIELDS if section == "profile" else DATASET_FIELDS
            if not name or fld not in allowed:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
            target = profiles if section == "profile" else datasets
            target.setdefault(name, {})[fld] = value
            continue
        key = KEY_ALIASES.get(key, key)
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = value
    values["profile"] = profiles
    values["dataset"] = datasets
    return values


def read_config(path) -> dict:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), str(path))


def split_names(text: str) -> list[str]:
    return [t for t in re.split(r"[\s,;]+", text) if t]


def split_envs(text: str) -> list[str]:
    # commas belong to bernoulli specs, so environments split on ';' and whitespace
    return [t for t in re.split(r"[\s;]+", text) if t]


def parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected on/off, got {text!r}")


def build_profiles(sections: dict[str, dict[str, str]]) -> dict[str, BiasProfile]:
    """Profiles from ``profile.<NAME>.<field>`` keys; unknown names start from unit weights."""
    out = {}
    for name, fields in sections.items():
        try:
            out[name] = BiasProfile.from_dict(fields, name=name)
        except ValueError as exc:
            raise ConfigError(f"profile {name}: {exc}") from None
    return out


def build_datasets(sections: dict[str, dict[str, str]]) -> dict[str, DatasetSpec]:
    out = {}
    for name, fields in sections.items():
        if "path" not in fields:
            raise ConfigError(f"dataset {name}: path is required")
        col = fields.get("label_column", "last")
        try:
            out[name] = DatasetSpec(
                name=name,
                path=Path(fields["path"]),
                delimiter=fields.get("delimiter", ","),
                label_column=col if col == "last" else int(col),
                has_header=parse_bool(fields.get("header", "off")),
                declared_classes=int(fields["classes"]) if "classes" in fields else None,
            )
        except ValueError as exc:
            raise ConfigError(f"dataset {name}: {exc}") from None
    return out
