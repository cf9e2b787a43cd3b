"""Dataset ingestion.

Datasets are CSV files with a header row, all-numeric feature columns
and a final ``label`` column. The two raw class values are mapped to
{-1, +1}: the lexicographically smaller one becomes -1. A few snapshot
datasets ship inside the package (see ``data/README.md`` for
provenance); ``load_dataset`` accepts either a filesystem path or a
bundled name.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np


@dataclass
class Dataset:
    name: str
    features: np.ndarray
    labels: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        if self.features.ndim != 2:
            raise ValueError("features must be an N x D matrix")
        if self.labels.shape[0] != self.features.shape[0]:
            raise ValueError("label count does not match feature rows")
        classes = set(np.unique(self.labels).tolist())
        if classes != {-1, 1}:
            raise ValueError(f"labels must be -1/+1 with both present, got {classes}")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def _data_root():
    return resources.files("qcensemble") / "data"


def bundled_dataset_names() -> list[str]:
    return sorted(
        p.name.removesuffix(".csv")
        for p in _data_root().iterdir()
        if p.name.endswith(".csv")
    )


def resolve_dataset_path(path_or_name) -> Path:
    """Accept a CSV path, or the name of a bundled dataset."""
    path = Path(path_or_name)
    if path.exists():
        return path
    candidate = _data_root() / f"{path_or_name}.csv"
    if candidate.is_file():
        return Path(str(candidate))
    raise FileNotFoundError(
        f"{path_or_name!r} is neither a file nor one of {bundled_dataset_names()}"
    )


def load_dataset(path_or_name, name: str | None = None) -> Dataset:
    path = resolve_dataset_path(path_or_name)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise ValueError(f"{path}: empty dataset file")
    header = rows[0]
    if len(header) < 2 or header[-1] != "label":
        raise ValueError(f"{path}: expected feature columns plus a final 'label' column")

    raw_labels: list[str] = []
    feature_rows: list[list[float]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} columns")
        try:
            feature_rows.append([float(v) for v in row[:-1]])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-numeric feature value") from exc
        raw_labels.append(row[-1])

    classes = sorted(set(raw_labels))
    if len(classes) != 2:
        raise ValueError(f"{path}: need exactly 2 classes, found {len(classes)}")
    mapping = {classes[0]: -1, classes[1]: 1}
    labels = np.array([mapping[v] for v in raw_labels], dtype=np.int64)
    features = np.array(feature_rows, dtype=np.float64)
    if not np.all(np.isfinite(features)):
        raise ValueError(f"{path}: features contain non-finite values")
    return Dataset(
        name=name or path.stem,
        features=features,
        labels=labels,
        provenance=f"loaded from {path}; class map {mapping}",
    )
