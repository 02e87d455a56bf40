"""Dense statevector engine.

Basis ordering: qubit 0 is the most significant bit, so the bitstring of a
basis index printed left to right lists qubits 0..n-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, DimensionError, GateError

MAX_QUBITS = 24
NORM_TOL = 1e-10
ZERO_PROB = 1e-14


@dataclass(frozen=True, eq=False)
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise DimensionError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.shape[0]}"
            )
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(np.vdot(amps, amps).real - 1.0) > NORM_TOL:
            raise ValueError("amplitudes flagged normalized but norm deviates from 1")

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def renormalized(self) -> "Statevector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot renormalize the zero vector")
        return Statevector(self.n_qubits, self.amplitudes / nrm)

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[int(bits, 2)])

    def __repr__(self) -> str:
        support = int(np.count_nonzero(np.abs(self.amplitudes) > 1e-12))
        return f"Statevector(n_qubits={self.n_qubits}, support={support}, normalized={self.normalized})"


def from_amplitudes(amplitudes: Sequence[complex] | np.ndarray, normalize: bool = True) -> Statevector:
    """Wrap a raw amplitude vector; the length must be a power of two."""
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    n = amps.shape[0].bit_length() - 1
    if amps.shape[0] != 1 << n:
        raise DimensionError(f"length {amps.shape[0]} is not a power of two")
    if normalize:
        nrm = np.linalg.norm(amps)
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        amps = amps / nrm
    return Statevector(n, amps, normalized=normalize)


def zero_state(n: int) -> Statevector:
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"n must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return Statevector(n, amps)


def basis_state(bits: str) -> Statevector:
    amps = np.zeros(1 << len(bits), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return Statevector(len(bits), amps)


def bitstring(index: int, n: int) -> str:
    return format(index, f"0{n}b")


def _check_qubits(n: int, qubits: Sequence[int]) -> None:
    if len(set(qubits)) != len(qubits):
        raise GateError(f"qubit indices collide: {list(qubits)}")
    for q in qubits:
        if not 0 <= q < n:
            raise GateError(f"qubit index {q} out of range for {n} qubits")


def apply_matrix_array(amps: np.ndarray, n: int, matrix: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to the listed qubits of a raw amplitude array.

    The first listed qubit is the most significant bit of the matrix index.
    """
    k = len(qubits)
    psi = amps.reshape((2,) * n)
    psi = np.moveaxis(psi, list(qubits), list(range(k)))
    shape = psi.shape
    psi = matrix @ psi.reshape(1 << k, -1)
    psi = np.moveaxis(psi.reshape(shape), list(range(k)), list(qubits))
    return psi.reshape(-1)


def apply_matrix(state: Statevector, matrix: np.ndarray, qubits: Sequence[int]) -> Statevector:
    qubits = list(qubits)
    _check_qubits(state.n_qubits, qubits)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (1 << len(qubits), 1 << len(qubits)):
        raise GateError(f"matrix shape {matrix.shape} does not match {len(qubits)} qubits")
    out = apply_matrix_array(np.array(state.amplitudes), state.n_qubits, matrix, qubits)
    return Statevector(state.n_qubits, out, normalized=state.normalized)


def apply_gate(state: Statevector, gate) -> Statevector:
    """Apply a circuit gate (anything exposing ``qubits`` and ``unitary()``)."""
    return apply_matrix(state, gate.unitary(), gate.qubits)


def inner_product(a: Statevector, b: Statevector) -> complex:
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"{a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


class Projection(NamedTuple):
    state: Statevector | None
    probability: float

    @property
    def valid(self) -> bool:
        return self.state is not None


def project_qubit(state: Statevector, qubit: int, value: int) -> Projection:
    """Project ``qubit`` onto ``value`` and renormalize.

    An outcome with Born probability below 1e-14 yields ``state=None`` rather
    than a vector of NaNs.
    """
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise GateError(f"qubit index {qubit} out of range for {n} qubits")
    if value not in (0, 1):
        raise ValueError("value must be 0 or 1")
    psi = np.array(state.amplitudes).reshape(1 << qubit, 2, -1)
    psi[:, 1 - value, :] = 0.0
    psi = psi.reshape(-1)
    prob = float(np.vdot(psi, psi).real)
    if prob < ZERO_PROB:
        return Projection(None, prob)
    return Projection(Statevector(n, psi / np.sqrt(prob)), prob)


def probabilities(state: Statevector, cutoff: float = 1e-15) -> dict[int, float]:
    p = np.abs(state.amplitudes) ** 2
    idx = np.flatnonzero(p > cutoff)
    return {int(i): float(p[i]) for i in idx}


def probability_vector(state: Statevector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def sample(state: Statevector, shots: int, seed: int | None = None) -> dict[int, int]:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = probability_vector(state)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, p)
    idx = np.flatnonzero(counts)
    return {int(i): int(counts[i]) for i in idx}


def entanglement_entropy(state: Statevector, cut: int) -> float:
    """Von Neumann entropy (nats) of qubits 0..cut-1."""
    n = state.n_qubits
    if not 1 <= cut <= n - 1:
        raise ValueError(f"cut must be in [1, {n - 1}], got {cut}")
    mat = np.asarray(state.amplitudes).reshape(1 << cut, 1 << (n - cut))
    s = np.linalg.svd(mat, compute_uv=False)
    p = s**2
    p = p[p > ZERO_PROB]
    return float(-np.sum(p * np.log(p)))
