"""Label-only stand-ins for the registry datasets.

Each fixture has the instance count and per-class counts of the published
UCI file, written as one label per line. Rows are grouped by class; the
environment shuffles them anyway. A one-column file satisfies both
``label_column=0`` and ``"last"``, so fixtures load through the normal
registry specs.
"""

from __future__ import annotations

from pathlib import Path

from .ingestion import lookup

CLASS_COUNTS: dict[str, dict[str, int]] = {
    "covertype": {"1": 211840, "2": 283301, "3": 35754, "4": 2747,
                  "5": 9493, "6": 17367, "7": 20510},
    "cnae-9": {str(c): 120 for c in range(1, 10)},
    "internet-ads": {"ad.": 458, "nonad.": 2821},
    # training + testing files; the raw data has 10 hand classes
    "poker-hand": {"0": 513702, "1": 433097, "2": 48828, "3": 21634, "4": 3978,
                   "5": 2050, "6": 1460, "7": 236, "8": 17, "9": 8},
}


def write_labels(path, counts: dict[str, int]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for label, n in counts.items():
            fh.write((label + "\n") * n)
    return path


def write_fixture(name: str, data_dir) -> Path:
    """Write the stand-in for registry dataset ``name`` into ``data_dir``."""
    spec = lookup(name, data_dir)
    return write_labels(spec.path, CLASS_COUNTS[spec.name])


def write_all(data_dir, names=None) -> list[Path]:
    return [write_fixture(n, data_dir) for n in (names or CLASS_COUNTS)]
