"""Protocol-scale reproduction bands on the bundled iris datasets.

These run the real 10x80/20 Monte Carlo protocol with ensembles of 30
internal classifiers on 8-sample subsets, so they are the slowest part
of the suite outside the acceptance gate (~15 s together).
"""

import numpy as np

from qcensemble.cli import build_parser, _grid_configs
from qcensemble.data import bundled_dataset_names, load_dataset
from qcensemble.experiment import EvalConfig, run_experiment

IRIS = [n for n in bundled_dataset_names() if n.startswith("iris")]


def mean_accuracy(results) -> float:
    return float(np.mean([r.accuracy for r in results]))


def test_bagging_cosine_std_accuracy_band():
    """30x8 bagging with the cosine classifier and standardization lands in
    the [0.8, 1.0] band on the hardest iris pair."""
    dataset = load_dataset("iris_versicolor_virginica")
    results = run_experiment(
        [dataset],
        [EvalConfig(ensemble="bagging", classifier="cosine", normalization="std",
                    n_internal=30, s_samples=8)],
        runs=10,
        seed=0,
        threads=2,
    )
    assert len(results) == 10
    assert 0.8 <= mean_accuracy(results) <= 1.0


def test_boosting_tracks_bagging_for_distance_std():
    """Boosting stays within 0.02 of bagging (usually above) for the
    distance classifier with standardization, averaged over the iris sets."""
    iris = [load_dataset(name) for name in IRIS]
    common = dict(classifier="distance", normalization="std",
                  n_internal=30, s_samples=8)
    bagging = run_experiment(
        iris, [EvalConfig(ensemble="bagging", **common)], runs=10, seed=0, threads=2
    )
    boosting = run_experiment(
        iris, [EvalConfig(ensemble="boosting", **common)], runs=10, seed=0, threads=2
    )
    assert mean_accuracy(boosting) >= mean_accuracy(bagging) - 0.02


def test_default_grid_is_sixteen_configurations_per_combination():
    args = build_parser().parse_args([
        "grid-search", "--dataset", "x", "--out", "y",
        "--classifier", "cosine", "--ensemble", "bagging",
        "--normalization", "std",
    ])
    configs = _grid_configs(args)
    assert len(configs) == 16
    assert {(c.n_internal, c.s_samples) for c in configs} == {
        (n, s) for n in (5, 10, 30, 50) for s in (6, 8, 10, 20)
    }
