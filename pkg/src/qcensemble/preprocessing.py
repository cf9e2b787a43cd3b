"""Data normalization and class-balancing utilities.

Normalizers are fitted on training rows only and applied to both train
and validation rows; min-max clips validation values that fall outside
the fitted range. Standardization divides by the population standard
deviation by default (ddof=0); pass ddof=1 at fit time for the sample
convention.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .seeding import make_rng

logger = logging.getLogger(__name__)

NORMALIZATIONS = ("none", "std", "minmax")


@dataclass(frozen=True)
class Normalizer:
    kind: str
    shift: np.ndarray  # mean (std) or min (minmax); zeros for none
    scale: np.ndarray  # std or (max - min); ones for none

    @property
    def n_features(self) -> int:
        return self.shift.shape[0]


def fit(kind: str, train_features, ddof: int = 0) -> Normalizer:
    """Fit per-feature parameters from training rows only."""
    if kind not in NORMALIZATIONS:
        raise ValueError(f"kind must be one of {NORMALIZATIONS}, got {kind!r}")
    X = np.asarray(train_features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("training features must be a non-empty N x D matrix")
    if kind == "none":
        return Normalizer(kind, np.zeros(X.shape[1]), np.ones(X.shape[1]))
    if kind == "std":
        return Normalizer(kind, X.mean(axis=0), X.std(axis=0, ddof=ddof))
    return Normalizer(kind, X.min(axis=0), X.max(axis=0) - X.min(axis=0))


def apply(norm: Normalizer, features, is_test: bool = False) -> np.ndarray:
    """Transform rows with fitted parameters; degenerate features map to 0."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != norm.n_features:
        raise ValueError(
            f"expected {norm.n_features} feature columns, got shape {X.shape}"
        )
    if norm.kind == "none":
        return X.copy()
    safe = np.where(norm.scale == 0.0, 1.0, norm.scale)
    out = (X - norm.shift) / safe
    out[:, norm.scale == 0.0] = 0.0
    if norm.kind == "minmax" and is_test:
        out = np.clip(out, 0.0, 1.0)
    return out


def _class_indices(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(labels)
    neg = np.flatnonzero(labels == -1)
    pos = np.flatnonzero(labels == 1)
    if neg.size == 0 or pos.size == 0:
        raise ValueError("both classes must be present")
    return neg, pos


def balance_subsample(labels, seed) -> np.ndarray:
    """Reduce the majority class to the minority count, without replacement."""
    neg, pos = _class_indices(labels)
    rng = make_rng(seed)
    minority, majority = (neg, pos) if neg.size <= pos.size else (pos, neg)
    kept = rng.choice(majority, size=minority.size, replace=False)
    return np.sort(np.concatenate([minority, kept]))


def stratified_draw(labels, size: int, seed, weights=None) -> np.ndarray:
    """Draw size//2 indices per class, i.i.d. with replacement.

    Optional per-sample weights bias the draw within each class (used by
    boosting when balanced subsets are requested).
    """
    if size < 2:
        raise ValueError("stratified draw needs size >= 2")
    if size % 2 == 1:
        logger.warning("odd size %d rounds down to %d per class", size, size // 2)
    neg, pos = _class_indices(labels)
    rng = make_rng(seed)
    per_class = size // 2
    drawn = []
    for cls_idx in (neg, pos):
        p = None
        if weights is not None:
            w = np.asarray(weights, dtype=np.float64)[cls_idx]
            total = w.sum()
            p = w / total if total > 0 else None
        drawn.append(rng.choice(cls_idx, size=per_class, replace=True, p=p))
    return np.concatenate(drawn)


def balance(labels, strategy: str, size: int | None = None, seed=0) -> np.ndarray:
    """Dispatch between the two balancing strategies, returning indices."""
    if strategy == "subsample":
        return balance_subsample(labels, seed)
    if strategy == "stratified_draw":
        if size is None:
            raise ValueError("stratified_draw needs a size")
        return stratified_draw(labels, size, seed)
    raise ValueError(f"unknown balance strategy {strategy!r}")
