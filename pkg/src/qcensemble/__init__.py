"""Quantum-classifier ensembles on a dense statevector simulation kernel."""

from .classifiers import ClassifierConfig, Prediction, classical_oracle, predict
from .data import Dataset, bundled_dataset_names, load_dataset
from .encoding import EncodedDataset, unit_encode
from .ensembles import (
    InternalSpec,
    StackingSpec,
    bagging_fit,
    bagging_predict,
    boosting_fit,
    boosting_predict,
    default_stacking_spec,
    stacking_fit,
    stacking_predict,
)
from .experiment import (
    EvalConfig,
    ExperimentResult,
    export_results,
    mc_splits,
    read_results,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "ClassifierConfig",
    "Dataset",
    "EncodedDataset",
    "EvalConfig",
    "ExperimentResult",
    "InternalSpec",
    "Prediction",
    "StackingSpec",
    "bagging_fit",
    "bagging_predict",
    "boosting_fit",
    "boosting_predict",
    "bundled_dataset_names",
    "classical_oracle",
    "default_stacking_spec",
    "export_results",
    "load_dataset",
    "mc_splits",
    "predict",
    "read_results",
    "run_experiment",
    "stacking_fit",
    "stacking_predict",
    "unit_encode",
]
