"""Brute-force reference states and the combinatorics behind them.

Site labels: site i (1-based, left to right) is qubit i-1. "Odd sites"
therefore means qubits 0, 2, 4, ... of a full N-site register.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import qsim
from .errors import CapacityError
from .qsim import Statevector


@lru_cache(maxsize=None)
def fib(n: int) -> int:
    """Fibonacci numbers with F_1 = F_2 = 1 (and F_0 = 0)."""
    if n < 0:
        raise ValueError("fib index must be >= 0")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def count_constrained(N: int, k: int) -> int:
    """Number of weight-k, no-adjacent-ones strings on N sites with both ends 0."""
    if k < 0 or N - k - 1 < k:
        return 0
    return math.comb(N - k - 1, k)


def fib_dim(m: int) -> int:
    """Dimension of the Fibonacci-constrained space of m free sites."""
    return fib(m + 2)


def max_tower_k(N: int) -> int:
    """Largest k with a nonempty weight-k sector (N/2 - 1 for even N)."""
    return (N - 1) // 2


def normalization_Z(N: int, xi: complex) -> float:
    r2 = abs(xi) ** 2
    return float(sum(r2**k * count_constrained(N, k) for k in range(max_tower_k(N) + 1)))


def constrained_indices(m: int) -> np.ndarray:
    """Basis indices of m-bit strings with no two adjacent ones, ascending."""
    idx = np.arange(1 << m, dtype=np.int64)
    return idx[(idx & (idx >> 1)) == 0]


def popcount(idx: np.ndarray) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    out = np.zeros_like(idx)
    v = idx.copy()
    while np.any(v):
        out += v & 1
        v >>= 1
    return out


def _bit(idx: np.ndarray, q: int, n: int) -> np.ndarray:
    return (idx >> (n - 1 - q)) & 1


def _site_sign(idx: np.ndarray, n: int, first_site: int) -> np.ndarray:
    """prod over occupied sites of (-1)^site, with qubit 0 sitting at ``first_site``."""
    parity = np.zeros_like(idx)
    for q in range(n):
        if (q + first_site) % 2:
            parity ^= _bit(idx, q, n)
    return 1 - 2 * parity


def _check_n(n: int) -> None:
    if not 1 <= n <= qsim.MAX_QUBITS:
        raise CapacityError(f"register of {n} qubits is outside [1, {qsim.MAX_QUBITS}]")


def xi_state(N: int, xi: complex) -> Statevector:
    """|xi> on N sites: boundary sites empty, weight xi^|S| and sign prod (-1)^i."""
    if N < 4:
        raise ValueError("xi_state needs N >= 4")
    _check_n(N)
    idx = constrained_indices(N)
    edge = (1 << (N - 1)) | 1
    idx = idx[(idx & edge) == 0]
    wt = popcount(idx)
    amps = np.zeros(1 << N, dtype=complex)
    amps[idx] = _site_sign(idx, N, 1) * np.power(complex(xi), wt)
    amps /= math.sqrt(normalization_Z(N, xi))
    return Statevector(N, amps)


def xi_inner_state(m: int, xi: complex, tilde: bool = False) -> Statevector:
    """|xi;m> (or its sign-free twin) on the m interior sites 2..m+1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    _check_n(m)
    idx = constrained_indices(m)
    wt = popcount(idx)
    amps = np.zeros(1 << m, dtype=complex)
    vals = np.power(complex(xi), wt)
    if not tilde:
        vals = vals * _site_sign(idx, m, 2)
    amps[idx] = vals
    return qsim.from_amplitudes(amps)


def embed(inner: Statevector, left: int = 1, right: int = 1) -> Statevector:
    """Pad a register with |0> qubits on both sides."""
    amps = np.asarray(inner.amplitudes)
    out = np.zeros((1 << left, inner.dim, 1 << right), dtype=complex)
    out[0, :, 0] = amps
    return Statevector(inner.n_qubits + left + right, out.reshape(-1), normalized=inner.normalized)


def strip(full: Statevector, left: int = 1, right: int = 1) -> Statevector:
    """Inverse of ``embed``; the dropped qubits must be |0>."""
    n = full.n_qubits - left - right
    amps = np.asarray(full.amplitudes).reshape(1 << left, 1 << n, 1 << right)
    inner = amps[0, :, 0]
    if not np.isclose(np.vdot(inner, inner).real, np.vdot(amps, amps).real, atol=1e-12):
        raise ValueError("boundary qubits are not in |0>")
    return Statevector(n, inner, normalized=full.normalized)


def raising_operator_apply(support: dict[int, complex], N: int) -> dict[int, complex]:
    """Q^dag = sum_{i=2}^{N-1} (-1)^i P_{i-1} sigma^+_i P_{i+1} on a sparse vector."""
    out: dict[int, complex] = {}
    for idx, amp in support.items():
        for site in range(2, N):
            q = site - 1
            mask = (1 << (N - q)) | (1 << (N - 1 - q)) | (1 << (N - 2 - q))
            if idx & mask:
                continue
            new = idx | (1 << (N - 1 - q))
            out[new] = out.get(new, 0.0) + (-1) ** site * amp
    return out


def scar_state(N: int, k: int) -> Statevector:
    """|S_k> = (Q^dag)^k |Omega> / (k! sqrt(N(N,k)))."""
    if not 0 <= k <= max_tower_k(N):
        raise ValueError(f"k must be in [0, {max_tower_k(N)}] for N={N}")
    _check_n(N)
    support: dict[int, complex] = {0: 1.0}
    for _ in range(k):
        support = raising_operator_apply(support, N)
    scale = 1.0 / (math.factorial(k) * math.sqrt(count_constrained(N, k)))
    amps = np.zeros(1 << N, dtype=complex)
    for idx, amp in support.items():
        amps[idx] = amp * scale
    return Statevector(N, amps)


def _uniform(n: int, idx: np.ndarray) -> Statevector:
    if idx.size == 0:
        raise ValueError("empty support")
    amps = np.zeros(1 << n, dtype=complex)
    amps[idx] = 1.0 / math.sqrt(idx.size)
    return Statevector(n, amps)


def projected_dicke(m: int, k: int) -> Statevector:
    """Equal superposition of weight-k strings on m sites with no adjacent ones."""
    _check_n(m)
    idx = constrained_indices(m)
    return _uniform(m, idx[popcount(idx) == k])


def dicke(m: int, k: int) -> Statevector:
    _check_n(m)
    idx = np.arange(1 << m, dtype=np.int64)
    return _uniform(m, idx[popcount(idx) == k])


def apply_fib_projector(state: Statevector, first: int = 0, last: int | None = None) -> tuple[Statevector, float]:
    """Zero every amplitude with adjacent ones inside qubits [first, last].

    Returns the unnormalized result and its squared norm.
    """
    n = state.n_qubits
    last = n - 1 if last is None else last
    if not 0 <= first <= last < n:
        raise ValueError(f"invalid qubit range [{first}, {last}] for {n} qubits")
    idx = np.arange(1 << n, dtype=np.int64)
    width = last - first + 1
    window = (idx >> (n - 1 - last)) & ((1 << width) - 1)
    keep = (window & (window >> 1)) == 0
    amps = np.where(keep, state.amplitudes, 0.0)
    weight = float(np.vdot(amps, amps).real)
    return Statevector(n, amps, normalized=False), weight


def tilde_transform(state: Statevector, first_site: int = 1) -> Statevector:
    """Apply Z on every odd site; qubit 0 sits at site ``first_site``.

    Use ``first_site=2`` for interior registers such as |xi;m>.
    """
    n = state.n_qubits
    idx = np.arange(1 << n, dtype=np.int64)
    sign = _site_sign(idx, n, first_site)
    return Statevector(n, sign * np.asarray(state.amplitudes), normalized=state.normalized)


def weight_sector(state: Statevector, k: int) -> tuple[Statevector, float]:
    """Keep only Hamming-weight-k amplitudes (unnormalized) and their squared norm."""
    idx = np.arange(state.dim, dtype=np.int64)
    amps = np.where(popcount(idx) == k, state.amplitudes, 0.0)
    return Statevector(state.n_qubits, amps, normalized=False), float(np.vdot(amps, amps).real)


def dicke_recursion_residual(N: int, n: int) -> float:
    """Norm of |D^N_n> - a |D^{N-2}_{n-1}>|01> - b |D^{N-1}_n>|0> for the projected Dicke states."""
    if N < 3 or n < 1 or count_constrained(N + 2, n) < 1:
        raise ValueError(f"recursion needs N >= 3 and a nonempty weight-{n} sector")
    lhs = np.asarray(projected_dicke(N, n).amplitudes)
    rhs = np.zeros_like(lhs)
    a2 = n / (N - n + 1)
    b2 = (N - 2 * n + 1) / (N - n + 1)
    if a2 > 0:
        tail = np.array([0, 1, 0, 0], dtype=complex)  # |01>
        if n == 1:
            head = np.zeros(1 << (N - 2), dtype=complex)
            head[0] = 1.0
        else:
            head = np.asarray(projected_dicke(N - 2, n - 1).amplitudes)
        rhs += math.sqrt(a2) * np.kron(head, tail)
    if b2 > 0:
        rhs += math.sqrt(b2) * np.kron(np.asarray(projected_dicke(N - 1, n).amplitudes), np.array([1, 0]))
    return float(np.linalg.norm(lhs - rhs))
