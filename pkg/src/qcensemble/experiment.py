"""Experiment orchestration: Monte Carlo cross-validation, sweeps, export.

Evaluation follows repeated random splitting: per run, an independent
seeded shuffle yields an 80/20 (by default) train/validation split, the
normalizer is fitted on the training part only, and one accuracy record
is produced per (dataset, configuration, run).

Reproducibility contract: every random decision derives from
(master seed, dataset name, run index, configuration hash), so a sweep
re-run with the same master seed emits byte-identical result files, for
any worker count. Exported files therefore leave the wall_ms column
empty unless timings are explicitly requested; measured times stay on
the in-memory records either way.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import preprocessing as prep
from .classifiers import ClassifierConfig, predict
from .data import Dataset
from .encoding import EncodedDataset, unit_encode
from .ensembles import (
    StackingSpec,
    bagging_fit,
    bagging_predict,
    boosting_fit,
    boosting_predict,
    default_stacking_spec,
    stacking_fit,
    stacking_predict,
)
from .seeding import derive_seed, derived_int, make_rng

logger = logging.getLogger(__name__)

ENSEMBLES = ("none", "bagging", "boosting", "stacking")

RESULT_COLUMNS = [
    "dataset",
    "ensemble",
    "classifier",
    "k",
    "normalization",
    "mode",
    "shots",
    "n_internal",
    "s_samples",
    "run",
    "seed",
    "accuracy",
    "wall_ms",
]

GROUP_COLUMNS = RESULT_COLUMNS[:9]

Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class EvalConfig:
    """One (ensemble, classifier, normalization, mode) evaluation cell."""

    ensemble: str = "none"
    classifier: str = "cosine"
    k: int = 3
    normalization: str = "none"
    mode: str = "statevector"
    shots: int = 8192
    n_internal: int = 30
    s_samples: int = 8
    folds: int = 5
    balanced: bool = False
    stacking: StackingSpec | None = None

    def __post_init__(self):
        from .classifiers import KINDS, MODES

        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"ensemble must be one of {ENSEMBLES}")
        if self.classifier not in KINDS:
            raise ValueError(f"classifier must be one of {KINDS}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.normalization not in prep.NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {prep.NORMALIZATIONS}")
        if self.mode == "sampled" and self.shots < 1:
            raise ValueError("sampled mode needs shots >= 1")
        if min(self.n_internal, self.s_samples, self.folds, self.k) < 1:
            raise ValueError("k, n_internal, s_samples and folds must be positive")

    def stacking_spec(self) -> StackingSpec:
        return self.stacking or default_stacking_spec(self.mode, self.shots)

    @property
    def classifier_name(self) -> str:
        return "mixed" if self.ensemble == "stacking" else self.classifier

    def config_hash(self) -> str:
        # With on_raw stacking the outer normalization is inert, so it must
        # not influence derived seeds either.
        on_raw = self.ensemble == "stacking" and self.stacking_spec().on_raw
        text = repr(
            (
                self.ensemble,
                self.classifier_name,
                self.k,
                "raw" if on_raw else self.normalization,
                self.mode,
                self.shots,
                self.n_internal,
                self.s_samples,
                self.folds,
                self.balanced,
                self.stacking,
            )
        )
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class ExperimentResult:
    dataset: str
    ensemble: str
    classifier: str
    k: int | None
    normalization: str
    mode: str
    shots: int
    n_internal: int | None
    s_samples: int | None
    run: int
    seed: int
    accuracy: float
    wall_ms: float
    n_val: int

    def row(self, timings: bool = False) -> dict:
        """Exported view: the stable result columns, accuracy at 6 decimals."""
        return {
            "dataset": self.dataset,
            "ensemble": self.ensemble,
            "classifier": self.classifier,
            "k": self.k,
            "normalization": self.normalization,
            "mode": self.mode,
            "shots": self.shots,
            "n_internal": self.n_internal,
            "s_samples": self.s_samples,
            "run": self.run,
            "seed": self.seed,
            "accuracy": round(self.accuracy, 6),
            "wall_ms": round(self.wall_ms, 3) if timings else None,
        }


def mc_splits(
    dataset: Dataset, runs: int, train_fraction: float = 0.8, seed: int = 0
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Independent seeded shuffles into floor(N * fraction) / remainder splits."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    n = dataset.n_samples
    n_train = int(np.floor(n * train_fraction))
    if n_train < 1 or n_train >= n:
        raise ValueError(f"split {n_train}/{n - n_train} leaves an empty part")
    splits = []
    for run in range(runs):
        rng = make_rng(derive_seed(seed, "mc-split", dataset.name, run))
        perm = rng.permutation(n)
        splits.append((perm[:n_train], perm[n_train:]))
    return splits


def evaluate_split(
    dataset: Dataset,
    config: EvalConfig,
    run: int,
    train_idx: np.ndarray,
    val_idx: np.ndarray,
    master_seed: int = 0,
) -> ExperimentResult:
    """Fit on the training part of one split and score the validation part."""
    run_seed = derived_int(master_seed, dataset.name, run, config.config_hash())
    started = time.perf_counter()

    x_train, y_train = dataset.features[train_idx], dataset.labels[train_idx]
    x_val, y_val = dataset.features[val_idx], dataset.labels[val_idx]

    spec = config.stacking_spec() if config.ensemble == "stacking" else None
    if spec is not None and spec.on_raw:
        norm = prep.fit("none", x_train)
    else:
        norm = prep.fit(config.normalization, x_train)
    x_train = prep.apply(norm, x_train)
    x_val = prep.apply(norm, x_val, is_test=True)

    if config.ensemble == "none":
        if config.balanced:
            keep = prep.balance_subsample(y_train, derive_seed(run_seed, "subsample"))
            x_train, y_train = x_train[keep], y_train[keep]
        base = ClassifierConfig(
            kind=config.classifier,
            k=config.k,
            mode=config.mode,
            shots=config.shots,
            seed=derived_int(run_seed, "single"),
        )
        encoded = EncodedDataset.from_raw(x_train, y_train)
        labels = [predict(encoded, unit_encode(v), base).label for v in x_val]
    elif config.ensemble == "bagging":
        base = ClassifierConfig(
            kind=config.classifier, k=config.k, mode=config.mode, shots=config.shots
        )
        model = bagging_fit(
            x_train,
            y_train,
            base,
            config.n_internal,
            config.s_samples,
            balanced=config.balanced,
            seed=run_seed,
        )
        labels = [bagging_predict(model, v).label for v in x_val]
    elif config.ensemble == "boosting":
        base = ClassifierConfig(
            kind=config.classifier, k=config.k, mode=config.mode, shots=config.shots
        )
        model = boosting_fit(
            x_train,
            y_train,
            base,
            config.n_internal,
            config.s_samples,
            seed=run_seed,
            balanced=config.balanced,
        )
        labels = [boosting_predict(model, v).label for v in x_val]
    else:
        model = stacking_fit(x_train, y_train, spec, folds=config.folds, seed=run_seed)
        labels = [stacking_predict(model, v).label for v in x_val]

    accuracy = float(np.mean(np.asarray(labels) == y_val))
    wall_ms = (time.perf_counter() - started) * 1000.0
    is_ensemble = config.ensemble in ("bagging", "boosting")
    uses_k = config.classifier == "knn" and config.ensemble != "stacking"
    return ExperimentResult(
        dataset=dataset.name,
        ensemble=config.ensemble,
        classifier=config.classifier_name,
        k=config.k if uses_k else None,
        normalization=config.normalization,
        mode=config.mode,
        shots=config.shots if config.mode == "sampled" else 0,
        n_internal=config.n_internal if is_ensemble else None,
        s_samples=config.s_samples if is_ensemble else None,
        run=run,
        seed=run_seed,
        accuracy=accuracy,
        wall_ms=wall_ms,
        n_val=int(val_idx.size),
    )


def _evaluate_cell(cell) -> ExperimentResult | None:
    """Worker entry point; failures become None rows, logged with context."""
    dataset, config, run, tr, va, seed = cell
    try:
        return evaluate_split(dataset, config, run, tr, va, master_seed=seed)
    except Exception:
        logger.exception(
            "run failed: dataset=%s config=%s run=%d", dataset.name, config, run
        )
        return None


def run_experiment(
    datasets,
    configs,
    runs: int = 10,
    train_fraction: float = 0.8,
    seed: int = 0,
    threads: int = 1,
) -> list[ExperimentResult]:
    """Evaluate every (dataset x config x run) cell; failures are logged,
    recorded as missing rows, and never abort the sweep.

    ``threads`` counts worker processes: the grid is embarrassingly
    parallel and every cell derives its own seeds, so results do not
    depend on the worker count.
    """
    datasets = list(datasets)
    configs = list(configs)
    cells = []
    for dataset in datasets:
        splits = mc_splits(dataset, runs, train_fraction, seed)
        for config in configs:
            for run, (tr, va) in enumerate(splits):
                cells.append((dataset, config, run, tr, va, seed))

    if threads > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(_evaluate_cell, cells, chunksize=1))
    else:
        raw = [_evaluate_cell(cell) for cell in cells]
    return sort_results([r for r in raw if r is not None])


def _sort_key(result: ExperimentResult):
    row = result.row()
    return tuple(
        (value is None, value) for value in (row[c] for c in RESULT_COLUMNS[:10])
    )


def sort_results(results) -> list[ExperimentResult]:
    return sorted(results, key=_sort_key)


def aggregate_results(results) -> list[dict]:
    """Per-configuration mean/median accuracy with a binomial 95% CI.

    The CI treats the pooled correct-prediction count over all runs of a
    configuration as binomial and uses the normal approximation.
    """
    groups: dict[tuple, list[ExperimentResult]] = {}
    for result in sort_results(results):
        key = tuple(result.row()[c] for c in GROUP_COLUMNS)
        groups.setdefault(key, []).append(result)
    aggregates = []
    for key, members in groups.items():
        accs = np.array([m.accuracy for m in members])
        total = sum(m.n_val for m in members)
        pooled = sum(m.accuracy * m.n_val for m in members) / total
        half = Z95 * np.sqrt(max(pooled * (1.0 - pooled), 0.0) / total)
        entry = dict(zip(GROUP_COLUMNS, key))
        entry.update(
            n_runs=len(members),
            n_predictions=total,
            mean_accuracy=round(float(accs.mean()), 6),
            median_accuracy=round(float(np.median(accs)), 6),
            ci95_low=round(max(0.0, pooled - half), 6),
            ci95_high=round(min(1.0, pooled + half), 6),
        )
        aggregates.append(entry)
    return aggregates


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def aggregates_path(path) -> str:
    import os.path

    stem, ext = os.path.splitext(str(path))
    return f"{stem}_aggregates{ext or '.csv'}"


def export_results(results, path, fmt: str = "csv", timings: bool = False) -> str:
    """Write sorted records plus a per-configuration aggregate block.

    CSV keeps exactly the stable result columns and writes the aggregate
    table to a ``*_aggregates.csv`` sibling; JSON holds both under one
    document. Returns the main output path.
    """
    results = sort_results(results)
    if not results:
        raise ValueError("no results to export")
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    aggregates = aggregate_results(results)

    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(RESULT_COLUMNS)
            for result in results:
                row = result.row(timings=timings)
                writer.writerow([_format_cell(row[c]) for c in RESULT_COLUMNS])
        agg_cols = list(aggregates[0].keys())
        with open(aggregates_path(path), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(agg_cols)
            for entry in aggregates:
                writer.writerow([_format_cell(entry[c]) for c in agg_cols])
    else:
        document = {
            "records": [
                {**r.row(timings=timings), "n_val": r.n_val} for r in results
            ],
            "aggregates": aggregates,
        }
        with open(path, "w") as fh:
            json.dump(document, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return str(path)


def read_results(path, fmt: str = "csv") -> list[dict]:
    """Load the records of an exported result file as plain dicts."""
    if fmt == "json":
        with open(path) as fh:
            return json.load(fh)["records"]
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
