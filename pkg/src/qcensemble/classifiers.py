"""Three amplitude-encoded quantum binary classifiers.

Each classifier exists in two modes: ``statevector`` reads exact
probabilities off the final amplitudes, ``sampled`` draws a finite
number of measurement shots. Closed-form classical oracles for the same
decision rules live here too, used for cross-checking.

Decision conventions shared by everything downstream:

* Ties break to +1: ``sign(0) = +1``.
* k-NN neighbor ties (equal score) break by ascending training index.
* The k-NN ranks by squared overlap, so it is blind to the sign of the
  inner product; features should live on the same semi-axis for it to
  behave like a euclidean k-NN.

In sampled mode the shot stream is derived from (config seed, test
vector bytes), which makes predictions deterministic and independent of
call order or parallel scheduling.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .encoding import (
    EncodedDataset,
    build_cosine_state,
    build_distance_state,
    build_knn_state,
)
from .seeding import derive_seed
from .simulator import (
    PostSelectionExhausted,
    apply_cswap,
    apply_hadamard,
    exact_probabilities,
    marginal_probabilities,
    post_select,
    sample_shots,
)

logger = logging.getLogger(__name__)

KINDS = ("cosine", "distance", "knn")
MODES = ("statevector", "sampled")

SQRT2 = np.sqrt(2.0)
P0_EXHAUSTED_TOL = 1e-15


def sign_plus(value: float) -> int:
    """Sign with the fixed tie rule: sign(0) = +1."""
    return 1 if value >= 0 else -1


@dataclass
class Prediction:
    """A signed label with its confidence and the pre-sign decision value."""

    label: int
    confidence: float
    decision_value: float


@dataclass(frozen=True)
class ClassifierConfig:
    kind: str = "cosine"
    k: int = 3
    mode: str = "statevector"
    shots: int = 8192
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "sampled" and self.shots < 1:
            raise ValueError("sampled mode needs shots >= 1")
        if self.kind == "knn":
            if self.k < 1:
                raise ValueError("k must be positive")
            if self.k % 2 == 0:
                warnings.warn("even k can produce voting ties; odd k recommended")


def _shot_seed(cfg: ClassifierConfig, x: np.ndarray):
    return derive_seed(cfg.seed, cfg.kind, np.asarray(x, dtype=np.float64))


def _abstain(reason: str) -> Prediction:
    logger.warning("post-selection exhausted (%s); abstaining with default +1", reason)
    return Prediction(label=1, confidence=0.0, decision_value=0.0)


def cosine_predict(train: EncodedDataset, x, cfg: ClassifierConfig) -> Prediction:
    """SWAP test of |+> against the branch ancilla of the cosine state.

    The ancilla-1 probability is (1 - <psi_x|psi>)/4, so the label is
    sign(1 - 4 P(1)) and the decision value spans [-1/sqrt2, 1/sqrt2];
    confidence rescales that to [0, 1].
    """
    if cfg.kind != "cosine":
        raise ValueError(f"config kind is {cfg.kind!r}, expected 'cosine'")
    state, layout = build_cosine_state(train, x)
    swap_anc = layout["swap_ancilla"][0]
    apply_hadamard(state, layout["plus"][0])
    apply_hadamard(state, swap_anc)
    apply_cswap(state, swap_anc, layout["plus"], layout["branch"])
    apply_hadamard(state, swap_anc)

    if cfg.mode == "statevector":
        p1 = exact_probabilities(state, [swap_anc])["1"]
    else:
        counts = sample_shots(state, [swap_anc], cfg.shots, _shot_seed(cfg, x))
        p1 = counts.frequency("1")

    decision = 1.0 - 4.0 * p1
    return Prediction(
        label=sign_plus(decision),
        confidence=min(1.0, SQRT2 * abs(decision)),
        decision_value=decision,
    )


def distance_predict(train: EncodedDataset, x, cfg: ClassifierConfig) -> Prediction:
    """Interference circuit: H on the branch ancilla, conditional label readout.

    The ancilla and label qubits are measured; ancilla-1 shots are
    discarded and the label distribution is estimated among the rest.
    The label is sign(P(0|0) - 1/2).
    """
    if cfg.kind != "distance":
        raise ValueError(f"config kind is {cfg.kind!r}, expected 'distance'")
    state, layout = build_distance_state(train, x)
    branch, label_q = layout["branch"][0], layout["label"][0]
    apply_hadamard(state, branch)
    measured = [branch, label_q]

    if cfg.mode == "statevector":
        probs = exact_probabilities(state, measured)
        p00, p01 = probs["00"], probs["01"]
        kept = p00 + p01
        if kept < P0_EXHAUSTED_TOL:
            return _abstain("exact retention probability is zero")
        p_cond = p00 / kept
    else:
        counts = sample_shots(state, measured, cfg.shots, _shot_seed(cfg, x))
        try:
            retained, _ = post_select(counts, 0, 0)
        except PostSelectionExhausted as exc:
            return _abstain(str(exc))
        p_cond = retained.frequency("0")

    decision = p_cond - 0.5
    return Prediction(
        label=sign_plus(decision),
        confidence=2.0 * abs(decision),
        decision_value=decision,
    )


def _conditional_index_distribution(joint: np.ndarray, n_samples: int) -> np.ndarray:
    """Normalize a per-index mass vector; fall back to uniform when empty."""
    total = joint.sum()
    if total <= 0.0:
        return np.full(n_samples, 1.0 / n_samples)
    return joint / total


def knn_contrasts(train: EncodedDataset, x, cfg: ClassifierConfig) -> np.ndarray:
    """Per-index contrast Q(i) = P(i|0) - P(i|1) from the k-NN SWAP test."""
    state, layout = build_knn_state(train, x)
    ancilla = layout["ancilla"][0]
    apply_hadamard(state, ancilla)
    apply_cswap(state, ancilla, layout["feature_test"], layout["feature_train"])
    apply_hadamard(state, ancilla)
    measured = [ancilla, *layout["index"]]
    n = train.n_samples

    mass0 = np.zeros(n)
    mass1 = np.zeros(n)
    if cfg.mode == "statevector":
        marg = marginal_probabilities(state, measured)
        for i in range(n):
            mass0[i] = marg[i << 1]
            mass1[i] = marg[(i << 1) | 1]
    else:
        counts = sample_shots(state, measured, cfg.shots, _shot_seed(cfg, x))
        for key, c in counts.counts.items():
            i = sum(int(b) << j for j, b in enumerate(key[1:]))
            if i >= n:
                continue
            if key[0] == "0":
                mass0[i] += c
            else:
                mass1[i] += c

    p_given_0 = _conditional_index_distribution(mass0, n)
    p_given_1 = _conditional_index_distribution(mass1, n)
    return p_given_0 - p_given_1


def rank_by_score(scores: np.ndarray) -> list[int]:
    """Indices sorted by descending score, ties broken by ascending index."""
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def _vote(labels_topk: np.ndarray, k: int) -> Prediction:
    vote_sum = int(np.sum(labels_topk))
    return Prediction(
        label=sign_plus(vote_sum),
        confidence=(k + abs(vote_sum)) / (2.0 * k),
        decision_value=vote_sum / k,
    )


def knn_predict(train: EncodedDataset, x, cfg: ClassifierConfig) -> Prediction:
    """Majority vote over the k indices with the largest contrast Q(i)."""
    if cfg.kind != "knn":
        raise ValueError(f"config kind is {cfg.kind!r}, expected 'knn'")
    if cfg.k > train.n_samples:
        raise ValueError(f"k={cfg.k} exceeds training size {train.n_samples}")
    order = rank_by_score(knn_contrasts(train, x, cfg))
    top = order[: cfg.k]
    return _vote(train.labels[top], cfg.k)


def predict(train: EncodedDataset, x, cfg: ClassifierConfig) -> Prediction:
    """Dispatch on cfg.kind."""
    if cfg.kind == "cosine":
        return cosine_predict(train, x, cfg)
    if cfg.kind == "distance":
        return distance_predict(train, x, cfg)
    return knn_predict(train, x, cfg)


# --- classical closed-form oracles -------------------------------------

def classical_fidelities(train: EncodedDataset, x) -> np.ndarray:
    """Squared overlap of the encoded test vector with each training row."""
    return (train.features @ np.asarray(x, dtype=np.float64)) ** 2


def classical_oracle(
    kind: str, train: EncodedDataset, x, k: int | None = None
) -> Prediction:
    """Direct evaluation of the closed-form decision rules.

    The decision_value is the raw weighted sum (cosine, distance) or the
    vote fraction (knn); confidences use the same rescaling as the
    quantum classifiers so both sides are comparable after scaling.
    """
    x = np.asarray(x, dtype=np.float64)
    n = train.n_samples
    if kind == "cosine":
        total = float(np.sum(train.labels * (train.features @ x)))
        return Prediction(
            label=sign_plus(total),
            confidence=min(1.0, abs(total) / n),
            decision_value=total,
        )
    if kind == "distance":
        sq_dist = np.sum((train.features - x) ** 2, axis=1)
        total = float(np.sum(train.labels * (1.0 - 0.25 * sq_dist)))
        p0 = 0.5 + float(np.sum(train.features @ x)) / (2.0 * n)
        if p0 < P0_EXHAUSTED_TOL:
            return _abstain("classical retention probability is zero")
        scaled = total / (2.0 * n * p0)
        return Prediction(
            label=sign_plus(total),
            confidence=min(1.0, 2.0 * abs(scaled)),
            decision_value=total,
        )
    if kind == "knn":
        if k is None:
            raise ValueError("knn oracle needs k")
        if k > n:
            raise ValueError(f"k={k} exceeds training size {n}")
        order = rank_by_score(classical_fidelities(train, x))
        return _vote(train.labels[order[:k]], k)
    raise ValueError(f"unknown oracle kind {kind!r}")
