"""Load class-label columns from delimited text datasets.

Only the label column is read; features are ignored. Distinct label strings
are mapped to arm indices in sorted order, so the mapping is the same on
every run and platform.
"""

from __future__ import annotations

import csv
import gzip
import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

logger = logging.getLogger(__name__)

UCI_URL = "https://archive.ics.uci.edu/ml/datasets.html"
DATA_DIR_ENV = "BANDITLAB_DATA_DIR"


class DatasetError(Exception):
    """Base class for dataset loading failures."""


class MissingDatasetError(DatasetError, FileNotFoundError):
    pass


class MalformedRowError(DatasetError):
    def __init__(self, path, line: int, message: str) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class EmptyDatasetError(DatasetError):
    pass


class ClassCountMismatchError(DatasetError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    """Where a dataset lives and how to find its label column.

    ``label_column`` is a 0-based index or the string ``"last"``.
    ``fetch_hint`` is shown when the file is missing.
    """

    name: str
    path: Path
    delimiter: str = ","
    label_column: int | str = "last"
    has_header: bool = False
    declared_classes: int | None = None
    title: str = ""
    fetch_hint: str = ""

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise ValueError(f"delimiter must be a single character, got {self.delimiter!r}")
        if self.label_column != "last" and not isinstance(self.label_column, int):
            raise ValueError(f"label_column must be an int or 'last', got {self.label_column!r}")
        object.__setattr__(self, "path", Path(self.path))

    def with_data_dir(self, data_dir) -> "DatasetSpec":
        return replace(self, path=Path(data_dir) / self.path.name)


class LoadedLabels(NamedTuple):
    labels: tuple[int, ...]
    n_classes: int
    class_names: tuple[str, ...]


def resolve_path(path: Path) -> Path | None:
    if path.exists():
        return path
    gz = path.with_name(path.name + ".gz")
    if gz.exists():
        return gz
    return None


def missing_message(spec: DatasetSpec) -> str:
    lines = [
        f"dataset {spec.title or spec.name!r} not found at {spec.path}",
        f"Download it from the UCI Machine Learning Repository ({UCI_URL})",
        f"and save it as {spec.path.name} (optionally gzipped as {spec.path.name}.gz)",
        f"in the data directory (--data-dir, config key data_dir, or ${DATA_DIR_ENV}).",
    ]
    if spec.fetch_hint:
        lines.append(spec.fetch_hint)
    return "\n".join(lines)


def load_labels(spec: DatasetSpec, strict: bool = False) -> LoadedLabels:
    """Read the label column of ``spec``.

    A class count different from ``spec.declared_classes`` is logged as a
    warning, or raised as ClassCountMismatchError when ``strict`` is set.
    """
    path = resolve_path(spec.path)
    if path is None:
        raise MissingDatasetError(missing_message(spec))
    opener = gzip.open if path.suffix == ".gz" else open
    raw: list[str] = []
    n_cols = None
    with opener(path, "rt", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=spec.delimiter)
        for row in reader:
            line = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if n_cols is None:
                n_cols = len(row)
                if spec.label_column == "last":
                    col = n_cols - 1
                else:
                    col = spec.label_column
                    if not 0 <= col < n_cols:
                        raise MalformedRowError(path, line, f"label column {col} out of range for {n_cols} columns")
                if spec.has_header:
                    continue
            elif len(row) != n_cols:
                raise MalformedRowError(path, line, f"expected {n_cols} columns, found {len(row)}")
            label = row[col].strip()
            if not label:
                raise MalformedRowError(path, line, "empty label")
            raw.append(label)
    if not raw:
        raise EmptyDatasetError(f"{path}: no data rows")
    class_names = tuple(sorted(set(raw)))
    index = {name: i for i, name in enumerate(class_names)}
    k = len(class_names)
    if spec.declared_classes is not None and k != spec.declared_classes:
        msg = f"{spec.name}: file has {k} classes, registry declares {spec.declared_classes}"
        if strict:
            raise ClassCountMismatchError(msg)
        logger.warning(msg)
    return LoadedLabels(tuple(index[y] for y in raw), k, class_names)


def default_data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


_REGISTRY = (
    DatasetSpec("covertype", Path("covtype.data"), label_column="last", declared_classes=7,
                title="Covertype"),
    DatasetSpec("cnae-9", Path("CNAE-9.data"), label_column=0, declared_classes=9,
                title="CNAE-9"),
    DatasetSpec("internet-ads", Path("ad.data"), label_column="last", declared_classes=2,
                title="Internet Advertisements"),
    DatasetSpec("poker-hand", Path("poker-hand.data"), label_column="last", declared_classes=9,
                title="Poker Hand",
                fetch_hint="Concatenate poker-hand-training-true.data and "
                           "poker-hand-testing.data into poker-hand.data."),
)


def registry(data_dir=None) -> list[DatasetSpec]:
    data_dir = Path(data_dir) if data_dir is not None else default_data_dir()
    return [spec.with_data_dir(data_dir) for spec in _REGISTRY]


def _key(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


_ALIASES = {
    "covtype": "covertype",
    "cnae9": "cnae-9",
    "ad": "internet-ads",
    "ads": "internet-ads",
    "internetadvertisements": "internet-ads",
    "poker": "poker-hand",
}


def lookup(name: str, data_dir=None) -> DatasetSpec:
    key = _key(name)
    specs = {_key(s.name): s for s in registry(data_dir)}
    key = _key(_ALIASES.get(key, key))
    if key not in specs:
        raise KeyError(f"unknown dataset {name!r}; valid names: "
                       f"{', '.join(s.name for s in _REGISTRY)}")
    return specs[key]


def is_registered(name: str) -> bool:
    try:
        lookup(name, ".")
    except KeyError:
        return False
    return True
