"""Scar-state circuits: the variational staircase ansatz and the exact k_max circuit.

Ansatz gates are labelled by the site index j of their first qubit:
U_j acts on sites j..j+3 (qubits j-1..j+2), rotating the middle pair when both
outer sites are empty. Inside the weight-k constrained sector every U_j is a
set of disjoint Givens rotations, which the optimizer exploits.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import circuits, qsim, refstates
from .circuits import Circuit
from .qsim import Statevector

EARLY_EXIT = 1e-12
DEFAULT_RESTARTS = 2000


def n_params_formula(N: int, k: int) -> int:
    if N % 2 == 0:
        return N * N // 4 - k * (k - 1) - 2
    return (N * N - 1) // 4 - k * (k - 1) - 2


@dataclass(frozen=True)
class AnsatzSpec:
    N: int
    k: int
    layers: tuple[tuple[int, ...], ...]  # gate indices j per staircase, application order

    @property
    def gate_sequence(self) -> tuple[int, ...]:
        return tuple(j for layer in self.layers for j in layer)

    @property
    def n_params(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def initial_bits(self) -> str:
        return "01" * self.k + "0" * (self.N - 2 * self.k)


def build_ansatz(N: int, k: int) -> AnsatzSpec:
    """Growing every-other-site staircases, then one full staircase.

    Staircase t reaches index M = 2k-1+t and holds every index of M's parity
    up to M; the last partial staircase reaches N-3. Gates in a staircase act
    from the largest index down.
    """
    if k < 1 or N < 2 * k + 2:
        raise ValueError(f"need k >= 1 and N >= 2k+2, got N={N}, k={k}")
    layers = []
    for M in range(2 * k - 1, N - 2):
        layers.append(tuple(range(M, 0, -2)))
    layers.append(tuple(range(N - 3, 0, -1)))
    spec = AnsatzSpec(N, k, tuple(layers))
    expected = n_params_formula(N, k)
    if spec.n_params != expected:
        raise AssertionError(f"ansatz has {spec.n_params} parameters, formula gives {expected}")
    return spec


def initial_state(spec: AnsatzSpec) -> Statevector:
    return qsim.basis_state(spec.initial_bits())


def ansatz_circuit(spec: AnsatzSpec, theta, final_z: bool = False, strip_boundary: bool = False) -> Circuit:
    """Gate-level circuit from |0...0>: X gates for the initial state, then the staircases.

    With ``strip_boundary`` the two always-empty end sites are dropped and the
    edge gates U_1, U_{N-3} lose one control (cxy instead of dcxy).
    """
    theta = np.asarray(theta, dtype=float)
    N = spec.N
    if theta.shape != (spec.n_params,):
        raise ValueError(f"expected {spec.n_params} angles, got {theta.shape}")
    off = 1 if strip_boundary else 0
    n = N - 2 * off
    gates = [circuits.x(2 * i + 1 - off) for i in range(spec.k)]
    for j, a in zip(spec.gate_sequence, theta):
        q = j - 1  # first qubit on the full register
        if strip_boundary and j == 1:
            gates.append(circuits.cxy(q + 3 - off, q + 1 - off, q + 2 - off, a))
        elif strip_boundary and j == N - 3:
            gates.append(circuits.cxy(q - off, q + 1 - off, q + 2 - off, a))
        else:
            gates.append(circuits.dcxy(q - off, a))
    if final_z:
        # odd sites; boundary sites are empty so their Z is dropped
        gates.extend(circuits.z(s - 1 - off) for s in range(3, N, 2))
    meta = {"name": "sk_variational", "N": N, "k": spec.k, "layers": [list(l) for l in spec.layers],
            "gate_order": "decreasing index within each staircase", "boundary_stripped": strip_boundary}
    return Circuit(n, tuple(gates), meta)


def apply_ansatz(spec: AnsatzSpec, theta) -> Statevector:
    """Full-register forward evaluation; returns the tilde-frame state (no final Z layer)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.n_params,):
        raise ValueError(f"expected {spec.n_params} angles, got {theta.shape}")
    state = initial_state(spec)
    amps = np.array(state.amplitudes)
    for j, a in zip(spec.gate_sequence, theta):
        g = circuits.dcxy(j - 1, a)
        amps = qsim.apply_matrix_array(amps, spec.N, g.unitary(), g.qubits)
    return Statevector(spec.N, amps)


class SectorModel:
    """The ansatz restricted to weight-k constrained strings with empty boundaries."""

    def __init__(self, spec: AnsatzSpec):
        self.spec = spec
        N = spec.N
        idx = refstates.constrained_indices(N)
        idx = idx[(refstates.popcount(idx) == spec.k) & ((idx & ((1 << (N - 1)) | 1)) == 0)]
        self.basis = idx
        self.dim = idx.size
        pos = {int(v): i for i, v in enumerate(idx)}
        self.start = pos[int(spec.initial_bits(), 2)]
        self.pairs: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for j in set(spec.gate_sequence):
            q = j - 1
            sh = [N - 1 - (q + t) for t in range(4)]
            p_list, r_list = [], []
            for v in idx:
                v = int(v)
                bits = [(v >> s) & 1 for s in sh]
                if bits == [0, 0, 1, 0]:
                    w = v ^ (1 << sh[1]) ^ (1 << sh[2])
                    p_list.append(pos[v])
                    r_list.append(pos[w])
            self.pairs[j] = (np.array(p_list, dtype=np.int64), np.array(r_list, dtype=np.int64))
        self.target = np.full(self.dim, 1.0 / math.sqrt(self.dim))

    def forward(self, theta) -> np.ndarray:
        psi = np.zeros(self.dim)
        psi[self.start] = 1.0
        for j, a in zip(self.spec.gate_sequence, theta):
            p, r = self.pairs[j]
            c, s = math.cos(a), math.sin(a)
            x, y = psi[p], psi[r]
            psi[p] = c * x - s * y
            psi[r] = s * x + c * y
        return psi

    def infidelity(self, theta) -> float:
        return 1.0 - float(self.target @ self.forward(theta)) ** 2

    def value_and_grad(self, theta) -> tuple[float, np.ndarray]:
        seq = self.spec.gate_sequence
        psi = self.forward(theta)
        ov = float(self.target @ psi)
        lam = self.target.copy()
        grad = np.empty(len(seq))
        for i in range(len(seq) - 1, -1, -1):
            p, r = self.pairs[seq[i]]
            c, s = math.cos(theta[i]), math.sin(theta[i])
            x, y = psi[p], psi[r]
            a, b = c * x + s * y, -s * x + c * y  # undo the gate
            psi[p], psi[r] = a, b
            lp, lr = lam[p], lam[r]
            grad[i] = lp @ (-s * a - c * b) + lr @ (c * a - s * b)
            lam[p], lam[r] = c * lp + s * lr, -s * lp + c * lr
        return 1.0 - ov * ov, -2.0 * ov * grad

    def embed(self, vec: np.ndarray) -> Statevector:
        amps = np.zeros(1 << self.spec.N, dtype=complex)
        amps[self.basis] = vec
        return Statevector(self.spec.N, amps)


@dataclass
class RestartRecord:
    restart: int
    infidelity: float
    iterations: int


@dataclass
class OptimizeResult:
    N: int
    k: int
    theta: np.ndarray
    infidelity: float
    best_restart: int
    seed: int
    history: list[RestartRecord] = field(default_factory=list)

    def history_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["restart", "infidelity", "iterations"])
        for h in self.history:
            w.writerow([h.restart, repr(h.infidelity), h.iterations])
        return buf.getvalue()


def _local_search(model: SectorModel, theta0: np.ndarray, maxiter: int):
    res = minimize(
        model.value_and_grad,
        theta0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": maxiter, "ftol": 1e-16, "gtol": 1e-12},
    )
    theta = np.mod(res.x, 2 * math.pi)
    return theta, model.infidelity(theta), int(res.nit)


def optimize_ansatz(
    N: int,
    k: int,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    stop_below: float = EARLY_EXIT,
    maxiter: int = 1000,
) -> OptimizeResult:
    """Minimize 1 - |<psi(theta)|S~_k>|^2 over seeded uniform restarts in [0, 2pi).

    Restart r draws from ``default_rng([seed, r])``; the best restart is picked
    by (infidelity, restart index). Stops once a restart gets below ``stop_below``.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    spec = build_ansatz(N, k)
    model = SectorModel(spec)
    best = None
    history = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        theta0 = rng.uniform(0.0, 2 * math.pi, spec.n_params)
        theta, inf, nit = _local_search(model, theta0, maxiter)
        history.append(RestartRecord(r, inf, nit))
        if best is None or (inf, r) < (best[0], best[1]):
            best = (inf, r, theta)
        if inf < stop_below:
            break
    inf, r, theta = best
    return OptimizeResult(N, k, theta, max(inf, 0.0), r, seed, history)


# ---------------------------------------------------------------- k_max


@dataclass(frozen=True)
class KmaxPlan:
    N: int

    def __post_init__(self):
        if self.N % 2 or self.N < 4:
            raise ValueError(f"N must be even and >= 4, got {self.N}")

    @property
    def k_max(self) -> int:
        return self.N // 2 - 1

    @property
    def theta(self) -> tuple[float, ...]:
        return tuple(2.0 * math.atan(math.sqrt(self.N / 2 - i)) for i in range(1, self.k_max + 1))


def _cascade(theta, qubits) -> list[circuits.Gate]:
    gates = [circuits.ry(qubits[0], theta[0])]
    for i in range(1, len(theta)):
        gates.append(circuits.cry1(qubits[i - 1], qubits[i], theta[i]))
    return gates


def kmax_circuit(N: int) -> Circuit:
    """Exact |S~_{k_max}> on N qubits using N-3 two-qubit gates."""
    if N % 2 or N < 6:
        raise ValueError(f"kmax_circuit needs even N >= 6, got {N}")
    plan = KmaxPlan(N)
    even = [s - 1 for s in range(2, N - 1, 2)]  # qubits of sites 2, 4, ..., N-2
    gates = _cascade(plan.theta, even)
    gates.extend(circuits.c0not(q, q + 1) for q in even)
    return Circuit(N, tuple(gates), {"name": "sk_kmax", "N": N, "k": plan.k_max})


def kmax_compressed_circuit(N: int) -> Circuit:
    if N % 2 or N < 6:
        raise ValueError(f"kmax_compressed_circuit needs even N >= 6, got {N}")
    plan = KmaxPlan(N)
    gates = _cascade(plan.theta, list(range(plan.k_max)))
    return Circuit(plan.k_max, tuple(gates), {"name": "sk_kmax_compressed", "N": N, "k": plan.k_max})


def decode_bits(bits: str) -> str:
    """Compressed k_max string -> full N-site string (1 -> 10, 0 -> 01, empty ends)."""
    return "0" + "".join("10" if b == "1" else "01" for b in bits) + "0"


def decode_state(state: Statevector) -> Statevector:
    n = state.n_qubits
    N = 2 * n + 2
    amps = np.zeros(1 << N, dtype=complex)
    for i, a in enumerate(state.amplitudes):
        if a != 0:
            amps[int(decode_bits(qsim.bitstring(i, n)), 2)] = a
    return Statevector(N, amps, normalized=state.normalized)


def compressed_fib_projection(bits: str) -> bool:
    return "01" not in bits


_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}
# compressed |0> -> |01>, |1> -> |10> on the (even, odd) site pair
_ENCODER = np.zeros((4, 2), dtype=complex)
_ENCODER[1, 0] = 1.0
_ENCODER[2, 1] = 1.0


def encode_pauli_pair(p_even: str, p_odd: str) -> tuple[complex, str]:
    """Compress P_{2i} P'_{2i+1} to ``coeff * Q`` on one qubit (Q in I/X/Y/Z).

    Computed as E^dag (P (x) P') E and decomposed on the Pauli basis.
    A coefficient of 0 means the term has no weight in the encoded space.
    """
    if p_even not in _PAULI or p_odd not in _PAULI:
        raise ValueError(f"unknown Pauli label in {p_even!r}{p_odd!r}")
    op = _ENCODER.conj().T @ np.kron(_PAULI[p_even], _PAULI[p_odd]) @ _ENCODER
    for name, P in _PAULI.items():
        c = np.trace(P.conj().T @ op) / 2
        if abs(c) > 1e-12:
            if not np.allclose(op, c * P, atol=1e-12):  # pragma: no cover - never mixed
                raise AssertionError("compressed operator is not a single Pauli")
            c = complex(round(c.real), round(c.imag))
            return (c.real if c.imag == 0 else c), name
    return 0.0, "I"
