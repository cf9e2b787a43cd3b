"""Bagging, AdaBoost and stacking over the quantum classifiers.

The quantum classifiers are instance-based, so "training" an internal
model means storing its (normalized, encoded) data subset; no further
optimization happens. Ensemble predictions combine internal labels:

* bagging: majority vote, label = sign(sum of internal labels);
* boosting: weighted vote, label = sign(sum of alpha-weighted labels);
* stacking: a meta-classifier consumes internal predictions plus their
  confidences, assembled as [pred_1..pred_M, conf_1..conf_M].

Boosting is discrete AdaBoost: alpha = 0.5 ln((1-err+eps)/(err+eps))
with eps = 1e-10 guarding the logarithm, multiplicative reweighting
w <- w exp(-alpha y h), and renormalization each iteration. Classifiers
with error above one half keep their negative alpha instead of aborting;
weak quantum learners on tiny subsets cross that line routinely.

Fitting draws all randomness through seeds derived from (ensemble seed,
role, iteration), so models are reproducible and independent of
evaluation order; boosting is sequential by construction, everything
else is safe to parallelize.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import preprocessing as prep
from .classifiers import ClassifierConfig, Prediction, predict, sign_plus
from .encoding import EncodedDataset, unit_encode
from .seeding import derive_seed, derived_int, make_rng

ADABOOST_EPS = 1e-10


def majority_combine(labels) -> Prediction:
    """Unweighted majority vote over internal labels, ties to +1."""
    total = int(np.sum(labels))
    return Prediction(
        label=sign_plus(total),
        confidence=abs(total) / len(labels),
        decision_value=float(total),
    )


def weighted_combine(alphas, labels) -> Prediction:
    """Alpha-weighted vote over internal labels, ties to +1."""
    alphas = np.asarray(alphas, dtype=np.float64)
    total = float(np.sum(alphas * np.asarray(labels)))
    denom = float(np.sum(np.abs(alphas)))
    return Prediction(
        label=sign_plus(total),
        confidence=abs(total) / denom if denom > 0 else 0.0,
        decision_value=total,
    )


@dataclass
class InternalModel:
    """One stored-subset classifier inside an ensemble."""

    config: ClassifierConfig
    train: EncodedDataset

    def predict_encoded(self, x_encoded) -> Prediction:
        return predict(self.train, x_encoded, self.config)


@dataclass
class BaggingModel:
    internals: list[InternalModel]
    subsets: list[np.ndarray]
    n_internal: int
    s_samples: int
    balanced: bool
    seed: int


@dataclass
class BoostingModel:
    internals: list[InternalModel]
    alphas: np.ndarray
    weight_history: list[np.ndarray]
    n_internal: int
    s_samples: int
    balanced: bool
    seed: int


def _draw_subset(labels, s_samples, balanced, seed, weights=None) -> np.ndarray:
    if balanced:
        return prep.stratified_draw(labels, s_samples, seed, weights=weights)
    rng = make_rng(seed)
    return rng.choice(len(labels), size=s_samples, replace=True, p=weights)


def bagging_fit(
    features,
    labels,
    base: ClassifierConfig,
    n_internal: int,
    s_samples: int,
    balanced: bool = False,
    seed: int = 0,
) -> BaggingModel:
    """Store n_internal subsets of s_samples rows drawn with replacement."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size < 1:
        raise ValueError("training set is empty")
    if n_internal < 1 or s_samples < 1:
        raise ValueError("need n_internal >= 1 and s_samples >= 1")
    internals, subsets = [], []
    for m in range(n_internal):
        idx = _draw_subset(
            labels, s_samples, balanced, derive_seed(seed, "bagging-subset", m)
        )
        cfg = replace(base, seed=derived_int(seed, "bagging-clf", m))
        internals.append(
            InternalModel(cfg, EncodedDataset.from_raw(features[idx], labels[idx]))
        )
        subsets.append(idx)
    return BaggingModel(internals, subsets, n_internal, s_samples, balanced, seed)


def bagging_predict(model: BaggingModel, x) -> Prediction:
    x_enc = unit_encode(x)
    votes = [m.predict_encoded(x_enc).label for m in model.internals]
    return majority_combine(votes)


def boosting_fit(
    features,
    labels,
    base: ClassifierConfig,
    n_internal: int,
    s_samples: int,
    seed: int = 0,
    balanced: bool = False,
) -> BoostingModel:
    """Sequential AdaBoost over stored-subset quantum classifiers."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size < 1:
        raise ValueError("training set is empty")
    if n_internal < 1 or s_samples < 1:
        raise ValueError("need n_internal >= 1 and s_samples >= 1")

    encoded_rows = [unit_encode(row) for row in features]
    w = np.full(labels.size, 1.0 / labels.size)
    internals: list[InternalModel] = []
    alphas: list[float] = []
    history: list[np.ndarray] = []
    for t in range(n_internal):
        idx = _draw_subset(
            labels, s_samples, balanced, derive_seed(seed, "boosting-subset", t), weights=w
        )
        cfg = replace(base, seed=derived_int(seed, "boosting-clf", t))
        internal = InternalModel(
            cfg, EncodedDataset.from_raw(features[idx], labels[idx])
        )
        preds = np.array(
            [internal.predict_encoded(row).label for row in encoded_rows]
        )
        err = float(w[preds != labels].sum())
        alpha = 0.5 * np.log((1.0 - err + ADABOOST_EPS) / (err + ADABOOST_EPS))
        w = w * np.exp(-alpha * labels * preds)
        w = w / w.sum()
        internals.append(internal)
        alphas.append(alpha)
        history.append(w.copy())
    return BoostingModel(
        internals, np.array(alphas), history, n_internal, s_samples, balanced, seed
    )


def boosting_predict(model: BoostingModel, x) -> Prediction:
    x_enc = unit_encode(x)
    votes = [m.predict_encoded(x_enc).label for m in model.internals]
    return weighted_combine(model.alphas, votes)


# --- stacking -----------------------------------------------------------

@dataclass(frozen=True)
class InternalSpec:
    """A classifier plus the normalization it applies to its own inputs."""

    config: ClassifierConfig
    normalization: str = "none"


@dataclass(frozen=True)
class StackingSpec:
    internals: tuple[InternalSpec, ...]
    meta: InternalSpec
    stratified_folds: bool = False
    # When True the harness feeds raw (un-normalized) features to the
    # stacking model, so internal normalizers work from raw data instead
    # of composing with the experiment-level normalization.
    on_raw: bool = False


def default_stacking_spec(
    mode: str = "statevector", shots: int = 8192, **kwargs
) -> StackingSpec:
    """The tested configuration: cosine+std, distance+std, 1NN/3NN+minmax,
    combined by a 5NN meta-classifier without normalization."""
    mk = lambda kind, k: ClassifierConfig(kind=kind, k=k, mode=mode, shots=shots)
    return StackingSpec(
        internals=(
            InternalSpec(mk("cosine", 3), "std"),
            InternalSpec(mk("distance", 3), "std"),
            InternalSpec(mk("knn", 1), "minmax"),
            InternalSpec(mk("knn", 3), "minmax"),
        ),
        meta=InternalSpec(mk("knn", 5), "none"),
        **kwargs,
    )


@dataclass
class FittedInternal:
    spec: InternalSpec
    config: ClassifierConfig
    normalizer: prep.Normalizer
    train: EncodedDataset


@dataclass
class StackingModel:
    internals: list[FittedInternal]
    meta: FittedInternal
    meta_matrix: np.ndarray
    folds: int
    seed: int


def _fold_assignment(labels, folds, stratified, seed) -> np.ndarray:
    """Fold id per sample from a seeded shuffle."""
    n = labels.size
    rng = make_rng(derive_seed(seed, "stacking-folds"))
    fold_of = np.empty(n, dtype=np.int64)
    if stratified:
        for cls in (-1, 1):
            cls_idx = rng.permutation(np.flatnonzero(labels == cls))
            for pos, i in enumerate(cls_idx):
                fold_of[i] = pos % folds
    else:
        perm = rng.permutation(n)
        for pos, i in enumerate(perm):
            fold_of[i] = pos % folds
    return fold_of


def stacking_fit(
    features, labels, spec: StackingSpec, folds: int = 5, seed: int = 0
) -> StackingModel:
    """Out-of-fold internal predictions feed the meta-classifier's training set.

    Every internal fits its own normalizer per fold (and again on the
    full set for the final refit); the meta-classifier trains on the
    [predictions | confidences] matrix under its own normalizer.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.size
    if n < 1:
        raise ValueError("training set is empty")
    if not spec.internals:
        raise ValueError("need at least one internal classifier")
    if folds < 2 or folds > n:
        raise ValueError(f"folds must be in [2, {n}], got {folds}")
    if spec.stratified_folds:
        smallest = min(np.sum(labels == -1), np.sum(labels == 1))
        if folds > smallest:
            raise ValueError(
                f"stratified folds={folds} exceed the smallest class ({smallest})"
            )
    if spec.meta.config.kind == "knn" and spec.meta.config.k > n:
        raise ValueError("meta k-NN needs at least k training samples")

    m = len(spec.internals)
    fold_of = _fold_assignment(labels, folds, spec.stratified_folds, seed)
    meta_matrix = np.zeros((n, 2 * m))
    for j, internal in enumerate(spec.internals):
        for f in range(folds):
            va = np.flatnonzero(fold_of == f)
            tr = np.flatnonzero(fold_of != f)
            norm_f = prep.fit(internal.normalization, features[tr])
            enc = EncodedDataset.from_raw(
                prep.apply(norm_f, features[tr]), labels[tr]
            )
            cfg = replace(
                internal.config, seed=derived_int(seed, "stacking-oof", j, f)
            )
            x_va = prep.apply(norm_f, features[va], is_test=True)
            for row, x in zip(va, x_va):
                pred = predict(enc, unit_encode(x), cfg)
                meta_matrix[row, j] = pred.label
                meta_matrix[row, m + j] = pred.confidence

    meta_norm = prep.fit(spec.meta.normalization, meta_matrix)
    meta_cfg = replace(spec.meta.config, seed=derived_int(seed, "stacking-meta"))
    meta = FittedInternal(
        spec.meta,
        meta_cfg,
        meta_norm,
        EncodedDataset.from_raw(prep.apply(meta_norm, meta_matrix), labels),
    )

    fitted: list[FittedInternal] = []
    for j, internal in enumerate(spec.internals):
        norm_full = prep.fit(internal.normalization, features)
        cfg = replace(internal.config, seed=derived_int(seed, "stacking-full", j))
        fitted.append(
            FittedInternal(
                internal,
                cfg,
                norm_full,
                EncodedDataset.from_raw(prep.apply(norm_full, features), labels),
            )
        )
    return StackingModel(fitted, meta, meta_matrix, folds, seed)


def stacking_meta_row(model: StackingModel, x) -> np.ndarray:
    """Internal predictions and confidences for one input, in fixed layout."""
    x = np.asarray(x, dtype=np.float64)
    m = len(model.internals)
    row = np.zeros(2 * m)
    for j, fitted in enumerate(model.internals):
        xn = prep.apply(fitted.normalizer, x[None, :], is_test=True)[0]
        pred = predict(fitted.train, unit_encode(xn), fitted.config)
        row[j] = pred.label
        row[m + j] = pred.confidence
    return row


def stacking_predict(model: StackingModel, x) -> Prediction:
    row = stacking_meta_row(model, x)
    meta_in = prep.apply(model.meta.normalizer, row[None, :], is_test=True)[0]
    return predict(model.meta.train, unit_encode(meta_in), model.meta.config)
