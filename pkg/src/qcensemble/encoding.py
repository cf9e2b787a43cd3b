"""Classical-to-quantum data encoding.

Feature vectors are amplitude-encoded: zero-padded to the next power of
two, scaled to unit norm, and stored in the amplitudes of a
``ceil(log2 D)``-qubit register. Binary labels are basis-encoded on one
qubit via l = (1 - y) / 2, so +1 -> |0> and -1 -> |1>.

The three ``build_*_state`` functions prepare the composite initial
states of the cosine, distance and k-NN classifier circuits by directly
setting amplitudes (plus X/MCX label injection for the distance
circuit). Each returns the state together with its register layout; all
registers are little-endian per the simulator convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulator import (
    RegisterLayout,
    StateVector,
    apply_mcx,
    init_from_amplitudes,
)

ZERO_NORM_TOL = 1e-12


def next_pow2(n: int) -> int:
    if n < 1:
        raise ValueError("need at least one element")
    return 1 << (n - 1).bit_length()


def unit_encode(x) -> np.ndarray:
    """Zero-pad to the next power of two and scale to unit norm.

    All-zero inputs (possible after min-max normalization) fall back to
    the uniform unit vector of the padded dimension, keeping the cosine
    similarity defined.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size < 1:
        raise ValueError("cannot encode an empty vector")
    padded = np.zeros(next_pow2(x.size))
    padded[: x.size] = x
    norm = np.linalg.norm(padded)
    if norm < ZERO_NORM_TOL:
        return np.full(padded.size, 1.0 / np.sqrt(padded.size))
    return padded / norm


def encode_label(y: int) -> int:
    """Map a label in {-1, +1} to its qubit basis state: +1 -> 0, -1 -> 1."""
    if y == 1:
        return 0
    if y == -1:
        return 1
    raise ValueError(f"label must be -1 or +1, got {y!r}")


@dataclass
class EncodedDataset:
    """Training data after amplitude/basis encoding.

    features holds unit-norm rows of width padded_dim; encoded_labels is
    the basis-encoded form of the +-1 labels.
    """

    features: np.ndarray
    labels: np.ndarray
    encoded_labels: np.ndarray
    padded_dim: int
    padded_count: int

    @classmethod
    def from_raw(cls, features, labels) -> "EncodedDataset":
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] < 1:
            raise ValueError("features must be a non-empty N x D matrix")
        labels = np.asarray(labels, dtype=np.int64).reshape(-1)
        if labels.shape[0] != features.shape[0]:
            raise ValueError("label count does not match feature rows")
        encoded = np.stack([unit_encode(row) for row in features])
        bits = np.array([encode_label(int(y)) for y in labels], dtype=np.int64)
        return cls(
            features=encoded,
            labels=labels,
            encoded_labels=bits,
            padded_dim=encoded.shape[1],
            padded_count=next_pow2(features.shape[0]),
        )

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def index_qubits(self) -> int:
        return (self.padded_count - 1).bit_length()

    @property
    def feature_qubits(self) -> int:
        return (self.padded_dim - 1).bit_length()


def _check_test_vector(train: EncodedDataset, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != train.padded_dim:
        raise ValueError(
            f"test vector has dimension {x.shape[0]}, training data {train.padded_dim}"
        )
    if abs(np.linalg.norm(x) - 1.0) > 1e-8:
        raise ValueError("test vector must be unit norm; run unit_encode first")
    return x


def build_cosine_state(
    train: EncodedDataset, x
) -> tuple[StateVector, RegisterLayout]:
    """Initial state of the cosine classifier circuit.

    The branch ancilla splits the superposition into the training branch
    (1/sqrt(N)) sum_i |i>|x_i>|l_i> at branch=0 and the test branch
    (1/sqrt(N)) sum_i |i>|x>|-> at branch=1, weighted 1/sqrt(2) each.
    The swap ancilla and the |+> qubit of the SWAP test are reserved in
    |0>; the classifier applies the Hadamards.
    """
    x = _check_test_vector(train, x)
    nn, nd = train.index_qubits, train.feature_qubits
    layout = RegisterLayout.from_sizes(
        [
            ("swap_ancilla", 1),
            ("plus", 1),
            ("branch", 1),
            ("label", 1),
            ("feature", nd),
            ("index", nn),
        ]
    )
    n_samples, n_pad, d_pad = train.n_samples, train.padded_count, train.padded_dim
    amps = np.zeros(2 ** layout.n_qubits, dtype=np.complex128)
    # Axes (index, feature, label, branch, plus, swap); C-order flattening
    # puts the last axis at qubit 0, matching the layout above.
    view = amps.reshape(n_pad, d_pad, 2, 2, 2, 2)
    coeff = 1.0 / np.sqrt(2.0 * n_samples)
    minus = 1.0 / np.sqrt(2.0)
    for i in range(n_samples):
        li = int(train.encoded_labels[i])
        view[i, :, li, 0, 0, 0] = coeff * train.features[i]
        view[i, :, 0, 1, 0, 0] = coeff * minus * x
        view[i, :, 1, 1, 0, 0] = -coeff * minus * x
    return init_from_amplitudes(layout, amps), layout


def build_distance_state(
    train: EncodedDataset, x
) -> tuple[StateVector, RegisterLayout]:
    """Initial state of the distance classifier circuit.

    Amplitudes realize (1/sqrt(2N)) sum_i |i>(|0>|x> + |1>|x_i>)|l_i>.
    The label qubit stays |0> during amplitude initialization; labels are
    then injected with X / multi-controlled X gates conditioned on the
    index register, one gate per training index with l_i = 1 (a single
    uncontrolled X when every label is 1).
    """
    x = _check_test_vector(train, x)
    nn, nd = train.index_qubits, train.feature_qubits
    layout = RegisterLayout.from_sizes(
        [("label", 1), ("feature", nd), ("branch", 1), ("index", nn)]
    )
    n_samples, n_pad, d_pad = train.n_samples, train.padded_count, train.padded_dim
    amps = np.zeros(2 ** layout.n_qubits, dtype=np.complex128)
    view = amps.reshape(n_pad, 2, d_pad, 2)  # (index, branch, feature, label)
    coeff = 1.0 / np.sqrt(2.0 * n_samples)
    for i in range(n_samples):
        view[i, 0, :, 0] = coeff * x
        view[i, 1, :, 0] = coeff * train.features[i]
    state = init_from_amplitudes(layout, amps)

    label_qubit = layout["label"][0]
    index_qubits = layout["index"]
    flip = [i for i in range(n_samples) if train.encoded_labels[i] == 1]
    if len(flip) == n_samples:
        # Padding slots carry zero amplitude, so a bare X is safe.
        apply_mcx(state, [], label_qubit)
    else:
        for i in flip:
            controls = [(q, (i >> j) & 1) for j, q in enumerate(index_qubits)]
            apply_mcx(state, controls, label_qubit)
    return state, layout


def build_knn_state(train: EncodedDataset, x) -> tuple[StateVector, RegisterLayout]:
    """Initial state of the k-NN circuit: |0>|x> (1/sqrt(N)) sum_i |x_i>|i>.

    Labels are not encoded; the k-NN keeps them classical. The ancilla is
    the SWAP-test control between the two feature registers.
    """
    x = _check_test_vector(train, x)
    nn, nd = train.index_qubits, train.feature_qubits
    layout = RegisterLayout.from_sizes(
        [
            ("ancilla", 1),
            ("index", nn),
            ("feature_train", nd),
            ("feature_test", nd),
        ]
    )
    n_samples, n_pad, d_pad = train.n_samples, train.padded_count, train.padded_dim
    amps = np.zeros(2 ** layout.n_qubits, dtype=np.complex128)
    view = amps.reshape(d_pad, d_pad, n_pad, 2)  # (test, train, index, ancilla)
    coeff = 1.0 / np.sqrt(n_samples)
    for i in range(n_samples):
        view[:, :, i, 0] = coeff * np.outer(x, train.features[i])
    return init_from_amplitudes(layout, amps), layout
