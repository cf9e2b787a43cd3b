"""Dense statevector simulation kernel.

The kernel provides exactly the primitives the three classifier circuits
need: direct amplitude initialization, Hadamard, (multi-controlled) X,
controlled-SWAP, exact marginal probabilities, seeded shot sampling, and
post-selection on a measured bit.

Conventions, fixed once here and relied on everywhere:

* **Bit order.** Qubit ``q`` is the q-th least-significant bit of the
  basis-state integer index. ``|q1 q0> = |10>`` is therefore index 2.
* **Measurement keys.** A measurement over qubits ``[q_0, ..., q_{m-1}]``
  produces bitstring keys whose j-th character is the outcome of
  ``measured[j]``.
* **Randomness.** Shot sampling uses numpy's PCG64 generator so counts
  are bit-reproducible across platforms for a given seed.

Gates are in-place amplitude transforms; there is no general unitary
support and no noise model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .seeding import make_rng

NORM_ATOL = 1e-8


class PostSelectionExhausted(RuntimeError):
    """Raised when post-selection would retain zero shots."""


@dataclass(frozen=True)
class RegisterLayout:
    """Named qubit registers over a contiguous range of qubit indices.

    Register qubit lists are ordered least-significant first: the j-th
    qubit of a register holds bit j of the value stored in it.
    """

    registers: dict[str, tuple[int, ...]]

    def __post_init__(self):
        seen: set[int] = set()
        for name, qubits in self.registers.items():
            for q in qubits:
                if q in seen:
                    raise ValueError(f"qubit {q} assigned to more than one register")
                seen.add(q)
        if seen and seen != set(range(max(seen) + 1)):
            raise ValueError("register qubits must cover 0..n_qubits-1 without gaps")

    @classmethod
    def from_sizes(cls, sizes: list[tuple[str, int]]) -> "RegisterLayout":
        """Assign consecutive qubit indices, starting at qubit 0."""
        regs: dict[str, tuple[int, ...]] = {}
        next_q = 0
        for name, size in sizes:
            regs[name] = tuple(range(next_q, next_q + size))
            next_q += size
        return cls(regs)

    @property
    def n_qubits(self) -> int:
        return sum(len(qs) for qs in self.registers.values())

    def __getitem__(self, name: str) -> tuple[int, ...]:
        return self.registers[name]


@dataclass
class StateVector:
    """Complex amplitudes of an n-qubit register, always unit norm."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


@dataclass
class ShotCounts:
    """Measured bitstring counts over a declared qubit subset."""

    counts: dict[str, int]
    total_shots: int
    n_bits: int = field(default=0)

    def __post_init__(self):
        if self.n_bits == 0 and self.counts:
            self.n_bits = len(next(iter(self.counts)))
        for key, c in self.counts.items():
            if len(key) != self.n_bits:
                raise ValueError(f"key {key!r} does not have {self.n_bits} bits")
            if c < 0:
                raise ValueError("counts must be non-negative")
        if sum(self.counts.values()) != self.total_shots:
            raise ValueError("counts must sum to total_shots")

    def frequency(self, key: str) -> float:
        return self.counts.get(key, 0) / self.total_shots


def init_from_amplitudes(layout: RegisterLayout, amps: np.ndarray) -> StateVector:
    """Create a state holding the given amplitudes, renormalized to unit norm.

    The input must already be normalized to within 1e-8; the residual
    renormalization only cleans up floating-point drift.
    """
    n = layout.n_qubits
    amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
    if amps.shape != (2**n,):
        raise ValueError(f"layout has {n} qubits but got {amps.shape[0]} amplitudes")
    norm = np.sqrt(np.sum(np.abs(amps) ** 2))
    if norm == 0.0:
        raise ValueError("cannot initialize from an all-zero amplitude array")
    if abs(norm - 1.0) > NORM_ATOL:
        raise ValueError(f"amplitudes have norm {norm:.3e}, expected 1 within {NORM_ATOL}")
    return StateVector(n, amps / norm)


def _check_qubit(state: StateVector, qubit: int):
    if not 0 <= qubit < state.n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {state.n_qubits}-qubit state")


def apply_hadamard(state: StateVector, qubit: int) -> StateVector:
    """Map amplitude pairs (a0, a1) over `qubit` to ((a0+a1)/sqrt2, (a0-a1)/sqrt2)."""
    _check_qubit(state, qubit)
    n = state.n_qubits
    view = state.amplitudes.reshape(2 ** (n - qubit - 1), 2, 2**qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    view[:, 0, :] = (a0 + a1) * inv_sqrt2
    view[:, 1, :] = (a0 - a1) * inv_sqrt2
    return state


def apply_mcx(
    state: StateVector,
    controls: list[tuple[int, int]],
    target: int,
) -> StateVector:
    """Flip `target` on basis states where every control matches its polarity.

    ``controls`` is a list of (qubit, polarity) pairs; polarity 1 means
    control-on-|1>, polarity 0 control-on-|0>. With no controls this is a
    plain X gate.
    """
    _check_qubit(state, target)
    used = {target}
    for q, pol in controls:
        _check_qubit(state, q)
        if q in used:
            raise ValueError(f"qubit {q} used twice in MCX")
        used.add(q)
        if pol not in (0, 1):
            raise ValueError(f"control polarity must be 0 or 1, got {pol}")

    idx = np.arange(2**state.n_qubits)
    sel = np.ones(idx.shape, dtype=bool)
    for q, pol in controls:
        sel &= ((idx >> q) & 1) == pol
    # Swap each (target=0, target=1) pair once.
    lo = idx[sel & (((idx >> target) & 1) == 0)]
    hi = lo | (1 << target)
    amps = state.amplitudes
    amps[lo], amps[hi] = amps[hi], amps[lo].copy()
    return state


def apply_cswap(
    state: StateVector,
    control: int,
    reg_a: list[int] | tuple[int, ...],
    reg_b: list[int] | tuple[int, ...],
) -> StateVector:
    """Exchange registers a and b pairwise on basis states with control=1."""
    if len(reg_a) != len(reg_b):
        raise ValueError(f"register length mismatch: {len(reg_a)} vs {len(reg_b)}")
    _check_qubit(state, control)
    used = {control}
    for q in (*reg_a, *reg_b):
        _check_qubit(state, q)
        if q in used:
            raise ValueError(f"qubit {q} overlaps another CSWAP operand")
        used.add(q)

    idx = np.arange(2**state.n_qubits)
    ctrl_on = ((idx >> control) & 1) == 1
    amps = state.amplitudes
    # Pairwise Fredkin gates commute, so swap one qubit pair at a time.
    for qa, qb in zip(reg_a, reg_b):
        differs = (((idx >> qa) & 1) != ((idx >> qb) & 1))
        lo = idx[ctrl_on & differs & (((idx >> qa) & 1) == 1)]
        hi = lo ^ (1 << qa) ^ (1 << qb)
        amps[lo], amps[hi] = amps[hi], amps[lo].copy()
    return state


def _bucket_indices(n_qubits: int, measured: list[int]) -> np.ndarray:
    """Bucket id per basis state; bit j of the bucket is measured[j]'s bit."""
    idx = np.arange(2**n_qubits)
    bucket = np.zeros(idx.shape, dtype=np.int64)
    for j, q in enumerate(measured):
        bucket |= ((idx >> q) & 1) << j
    return bucket


def _bucket_key(bucket: int, n_bits: int) -> str:
    return "".join(str((bucket >> j) & 1) for j in range(n_bits))


def marginal_probabilities(state: StateVector, measured: list[int]) -> np.ndarray:
    """Marginal distribution over measured qubits as an array.

    Entry b is the probability of the outcome whose j-th measured bit is
    bit j of b.
    """
    if not measured:
        raise ValueError("measured qubit list must be non-empty")
    for q in measured:
        _check_qubit(state, q)
    if len(set(measured)) != len(measured):
        raise ValueError("measured qubits must be distinct")
    probs = np.abs(state.amplitudes) ** 2
    bucket = _bucket_indices(state.n_qubits, measured)
    return np.bincount(bucket, weights=probs, minlength=2 ** len(measured))


def exact_probabilities(state: StateVector, measured: list[int]) -> dict[str, float]:
    """Exact marginal probability table over the measured qubits."""
    marg = marginal_probabilities(state, measured)
    m = len(measured)
    return {_bucket_key(b, m): float(p) for b, p in enumerate(marg)}


def sample_shots(
    state: StateVector,
    measured: list[int],
    shots: int,
    seed,
) -> ShotCounts:
    """Draw i.i.d. measurement outcomes from the exact marginal distribution.

    Deterministic for a given seed (int, SeedSequence, or Generator).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    marg = marginal_probabilities(state, measured)
    marg = np.clip(marg, 0.0, None)
    marg = marg / marg.sum()
    rng = make_rng(seed)
    draws = rng.multinomial(shots, marg)
    m = len(measured)
    counts = {_bucket_key(b, m): int(c) for b, c in enumerate(draws) if c > 0}
    return ShotCounts(counts, shots, n_bits=m)


def post_select(
    counts: ShotCounts, qubit_position: int, outcome: int
) -> tuple[ShotCounts, float]:
    """Keep shots whose bit at `qubit_position` equals `outcome`; project it out.

    Returns the projected counts and the retention fraction. Raises
    :class:`PostSelectionExhausted` when no shot survives.
    """
    if not counts.counts:
        raise ValueError("cannot post-select on empty counts")
    if not 0 <= qubit_position < counts.n_bits:
        raise ValueError(f"position {qubit_position} out of range")
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")

    want = str(outcome)
    retained: dict[str, int] = {}
    kept = 0
    for key, c in counts.counts.items():
        if key[qubit_position] == want:
            retained[key[:qubit_position] + key[qubit_position + 1 :]] = c
            kept += c
    if kept == 0:
        raise PostSelectionExhausted(
            f"no shots with bit {qubit_position} = {outcome} out of {counts.total_shots}"
        )
    projected = ShotCounts(retained, kept, n_bits=counts.n_bits - 1)
    return projected, kept / counts.total_shots


def dump_amplitudes(state: StateVector, path=None) -> list[list[float]]:
    """Debug dump: amplitudes as index-ordered [re, im] pairs, optionally to JSON."""
    pairs = [[float(a.real), float(a.imag)] for a in state.amplitudes]
    if path is not None:
        with open(path, "w") as fh:
            json.dump(pairs, fh)
    return pairs
