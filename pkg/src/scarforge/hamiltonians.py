"""Sparse operator builders.

Sites are labelled 1..N as in the model definition (site i is qubit i-1).
Every term is assembled by ``site_term``, a single Kronecker-product kernel,
so all operators share one bit convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from . import refstates
from .errors import DimensionError
from .qsim import Statevector

HERM_TOL = 1e-12

_LOCAL = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Y": np.array([[0.0, -1j], [1j, 0.0]]),
    "Z": np.diag([1.0, -1.0]),
    "P": np.diag([1.0, 0.0]),  # |0><0|
    "Pp": np.diag([0.0, 1.0]),  # |1><1|
}


@dataclass(frozen=True, eq=False)
class SparseOperator:
    matrix: sp.csr_matrix
    hermitian: bool = True

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=complex)
        m.sum_duplicates()
        m.sort_indices()
        m.eliminate_zeros()
        object.__setattr__(self, "matrix", m)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator must be square, got {m.shape}")
        if self.hermitian:
            diff = m - m.conj().T
            if diff.nnz and np.max(np.abs(diff.data)) > HERM_TOL:
                raise ValueError("operator flagged hermitian but is not")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entries(self) -> dict[tuple[int, int], complex]:
        coo = self.matrix.tocoo()
        return {(int(r), int(c)): complex(v) for r, c, v in zip(coo.row, coo.col, coo.data)}

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(self.matrix + other.matrix, self.hermitian and other.hermitian)

    def scaled(self, c: float) -> "SparseOperator":
        return SparseOperator(self.matrix * c, self.hermitian and np.isreal(c))


def site_term(N: int, ops: Mapping[int, str], coeff: complex = 1.0) -> sp.csr_matrix:
    """coeff * (tensor product of local operators); ``ops`` maps site (1..N) to a label."""
    for s in ops:
        if not 1 <= s <= N:
            raise ValueError(f"site {s} outside 1..{N}")
    factors = [sp.csr_matrix(_LOCAL[ops.get(s, "I")]) for s in range(1, N + 1)]
    return coeff * reduce(lambda a, b: sp.kron(a, b, format="csr"), factors)


def _sum(N: int, terms) -> sp.csr_matrix:
    acc = sp.csr_matrix((1 << N, 1 << N), dtype=complex)
    for ops, c in terms:
        acc = acc + site_term(N, ops, c)
    return acc


def build_H0(N: int, lam: float, delta: float, J: float) -> SparseOperator:
    if N < 3:
        raise ValueError("N must be >= 3")
    terms = []
    for i in range(2, N):
        terms.append(({i: "X"}, lam))
        terms.append(({i - 1: "Z", i: "X", i + 1: "Z"}, -lam))
    terms += [({i: "Z"}, delta) for i in range(1, N + 1)]
    terms += [({i: "Z", i + 1: "Z"}, J) for i in range(1, N)]
    return SparseOperator(_sum(N, terms))


def build_Hxi(N: int, xi: float) -> SparseOperator:
    if xi == 0:
        raise ValueError("xi must be nonzero")
    if N < 3:
        raise ValueError("N must be >= 3")
    terms = []
    for i in range(2, N):
        terms.append(({i - 1: "P", i: "Pp", i + 1: "P"}, 1.0 / xi))
        terms.append(({i - 1: "P", i: "P", i + 1: "P"}, xi))
        terms.append(({i - 1: "P", i: "X", i + 1: "P"}, -((-1) ** i)))
    return SparseOperator(_sum(N, terms))


def build_HX(N: int) -> SparseOperator:
    terms = []
    for i in range(2, N):
        terms.append(({}, 0.5))
        terms.append(({i: "X"}, -0.5 * (-1) ** i))
    return SparseOperator(_sum(N, terms))


def build_HP(N: int) -> SparseOperator:
    terms = []
    for i in range(2, N):
        terms.append(({i - 1: "Pp", i: "Pp"}, 1.0))
        terms.append(({i: "Pp", i + 1: "Pp"}, 1.0))
        terms.append(({i - 1: "P", i + 1: "P"}, 0.5))
        terms.append(({i - 1: "P", i: "X", i + 1: "P"}, -0.5 * (-1) ** i))
    return SparseOperator(_sum(N, terms))


def interpolate(HX: SparseOperator, HP: SparseOperator, s: float, T: float) -> SparseOperator:
    if T <= 0:
        u = 1.0
    else:
        if not 0 <= s <= T:
            raise ValueError(f"s={s} outside [0, {T}]")
        u = s / T
    return SparseOperator((1 - u) * HX.matrix + u * HP.matrix)


def build_Hs(N: int, s: float, T: float) -> SparseOperator:
    return interpolate(build_HX(N), build_HP(N), s, T)


def build_nDW(N: int) -> SparseOperator:
    terms = []
    for i in range(1, N):
        terms.append(({}, 0.5))
        terms.append(({i: "Z", i + 1: "Z"}, -0.5))
    return SparseOperator(_sum(N, terms))


def build_Mz(N: int) -> SparseOperator:
    return SparseOperator(_sum(N, [({i: "Z"}, 1.0) for i in range(1, N + 1)]))


H_LAMBDA_COMPRESSED = 0.0
H_DELTA_COMPRESSED = 2.0


def build_HJ_compressed(N: int) -> SparseOperator:
    """H_J on the k_max-qubit encoding; compressed qubit i carries site 2(i+1)."""
    if N % 2 or N < 6:
        raise ValueError(f"N must be even and >= 6, got {N}")
    n = N // 2 - 1
    terms = [({1: "Z"}, 1.0), ({n: "Z"}, -1.0), ({}, 1.0 - N / 2)]
    terms += [({i: "Z", i + 1: "Z"}, -1.0) for i in range(1, n)]
    return SparseOperator(_sum(n, terms))


def scar_energy(N: int, k: int, delta: float, J: float) -> float:
    return delta * N + J * (N - 1) - (2 * delta + 4 * J) * k


def _check(op: SparseOperator, state: Statevector) -> None:
    if op.dim != state.dim:
        raise DimensionError(f"operator dim {op.dim} vs state dim {state.dim}")


def matvec(op: SparseOperator, state: Statevector) -> Statevector:
    _check(op, state)
    return Statevector(state.n_qubits, op.matrix @ np.asarray(state.amplitudes), normalized=False)


def expectation(op: SparseOperator, state: Statevector) -> float:
    _check(op, state)
    if not op.hermitian:
        raise ValueError("expectation needs a hermitian operator")
    psi = np.asarray(state.amplitudes)
    val = np.vdot(psi, op.matrix @ psi)
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag}")
    return float(val.real)


def commutator_norm(a: SparseOperator, b: SparseOperator) -> float:
    """Largest entry magnitude of [A, B]."""
    c = a.matrix @ b.matrix - b.matrix @ a.matrix
    c.eliminate_zeros()
    return float(np.max(np.abs(c.data))) if c.nnz else 0.0


def boundary_zero_indices(N: int) -> np.ndarray:
    """Basis indices with sites 1 and N empty, ascending."""
    idx = np.arange(1 << N, dtype=np.int64)
    return idx[(idx & ((1 << (N - 1)) | 1)) == 0]


def fibonacci_indices(N: int, boundary_zero: bool = False) -> np.ndarray:
    idx = refstates.constrained_indices(N)
    if boundary_zero:
        idx = idx[(idx & ((1 << (N - 1)) | 1)) == 0]
    return idx


def restrict(op: SparseOperator, indices: np.ndarray) -> sp.csr_matrix:
    """Submatrix on a basis subset (the caller guarantees the subset is invariant)."""
    return op.matrix[indices][:, indices].tocsr()


def residual_norm(op: SparseOperator, state: Statevector, energy: float) -> float:
    psi = np.asarray(state.amplitudes)
    return float(np.linalg.norm(op.matrix @ psi - energy * psi))
