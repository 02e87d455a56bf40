"""Automaton-built MPS for projected Dicke states and sequential QR compilation.

An open-boundary MPS stores per-site tensors ``T[s, a, b]`` (physical index
first) and boundary vectors ``L``, ``R`` so that

    amplitude(x) = L @ T[x_1] @ T[x_2] @ ... @ T[x_m] @ R.

Compilation sweeps left to right. At each site the (left bond, physical)
pair is grouped into rows, a thin QR with nonnegative diagonal splits off an
isometry ``V_i: a_i -> (a_{i-1}, s_i)``, and R is pushed into the next site.
The circuit applies the isometries in reverse (site m first): each one reads
its input bond from the qubits just below its physical qubit and writes the
smaller-index bond plus the physical bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import circuits, qsim
from .circuits import Circuit
from .errors import DimensionError
from .qsim import Statevector

RANK_TOL = 1e-12
GS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MPS:
    tensors: tuple[np.ndarray, ...]  # each (2, chi_l, chi_r)
    L: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        ts = tuple(np.asarray(t) for t in self.tensors)
        object.__setattr__(self, "tensors", ts)
        object.__setattr__(self, "L", np.asarray(self.L).reshape(-1))
        object.__setattr__(self, "R", np.asarray(self.R).reshape(-1))
        if not ts:
            raise DimensionError("MPS needs at least one site")
        if ts[0].shape[1] != self.L.shape[0] or ts[-1].shape[2] != self.R.shape[0]:
            raise DimensionError("boundary vectors do not match the end tensors")
        for i, (a, b) in enumerate(zip(ts, ts[1:])):
            if a.shape[2] != b.shape[1]:
                raise DimensionError(f"bond mismatch between sites {i} and {i + 1}")
        for i, t in enumerate(ts):
            if t.ndim != 3 or t.shape[0] != 2:
                raise DimensionError(f"site {i} tensor must have shape (2, chi_l, chi_r)")

    @property
    def m(self) -> int:
        return len(self.tensors)

    @property
    def chi(self) -> int:
        return max(max(t.shape[1], t.shape[2]) for t in self.tensors)


def dfa_transition_matrices(k: int) -> tuple[np.ndarray, np.ndarray]:
    """(M0, M1) over automaton states (S0, A1, B1, ..., A_{k-1}, B_{k-1}, F_k).

    State indices: S0 = 0, A_j = 2j - 1, B_j = 2j, F_k = 2k - 1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    d = 2 * k
    M0 = np.zeros((d, d))
    M1 = np.zeros((d, d))
    S0, F = 0, d - 1
    M0[S0, S0] = 1
    if k == 1:
        M1[S0, F] = 1
    else:
        M1[S0, 1] = 1  # S0 -1-> A1
        for j in range(1, k):
            a, b = 2 * j - 1, 2 * j
            M0[a, b] = 1
            M0[b, b] = 1
            M1[b, 2 * j + 1 if j < k - 1 else F] = 1
    M0[F, F] = 1
    return M0, M1


def projected_dicke_mps(m: int, k: int) -> MPS:
    if m < 1 or k < 0:
        raise ValueError("need m >= 1, k >= 0")
    if math.comb(m - k + 1, k) < 1 if m - k + 1 >= 0 else True:
        raise ValueError(f"no weight-{k} constrained strings on {m} sites")
    if k == 0:
        t = np.array([[[1.0]], [[0.0]]])
        return MPS(tuple(t for _ in range(m)), np.ones(1), np.ones(1))
    M0, M1 = dfa_transition_matrices(k)
    t = np.stack([M0, M1])
    d = 2 * k
    L = np.zeros(d)
    L[0] = 1
    R = np.zeros(d)
    R[-1] = 1
    return MPS(tuple(t for _ in range(m)), L, R)


def random_mps(m: int, chi: int, seed: int) -> MPS:
    rng = np.random.default_rng(seed)
    ts = tuple(rng.normal(size=(2, chi, chi)) for _ in range(m))
    return MPS(ts, rng.normal(size=chi), rng.normal(size=chi))


def mps_amplitude(mps: MPS, bits: str) -> float:
    if len(bits) != mps.m:
        raise DimensionError(f"bitstring length {len(bits)} != {mps.m} sites")
    v = mps.L
    for t, b in zip(mps.tensors, bits):
        v = v @ t[int(b)]
    return v @ mps.R


def mps_vector(mps: MPS) -> np.ndarray:
    """Unnormalized dense amplitudes (qubit 0 = first site = most significant bit)."""
    if mps.m > 20:
        raise DimensionError("dense contraction limited to 20 sites")
    v = mps.L.reshape(1, -1)
    for t in mps.tensors:
        v = np.einsum("xa,sab->xsb", v, t).reshape(-1, t.shape[2])
    return v @ mps.R


def mps_to_state(mps: MPS) -> Statevector:
    return qsim.from_amplitudes(mps_vector(mps))


@dataclass(frozen=True, eq=False)
class IsometryStaircase:
    n_qubits: int
    blocks: tuple[tuple[tuple[int, ...], np.ndarray], ...]  # application order
    bonds: tuple[int, ...] = field(default=())  # kept bond dimensions r_0..r_m
    scale: float = 1.0  # norm of the compiled MPS

    def circuit(self, **metadata) -> Circuit:
        gates = [circuits.ublock(w, u) for w, u in self.blocks]
        meta = {"name": "mps_staircase", "bonds": list(self.bonds)}
        meta.update(metadata)
        return Circuit(self.n_qubits, tuple(gates), meta)


def _qr_nonneg(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q, r = np.linalg.qr(a, mode="reduced")
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d, r * d[:, None]


def complete_unitary(cols: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns to a dim x dim unitary by Gram-Schmidt on e_0, e_1, ..."""
    basis = [cols[:, j] for j in range(cols.shape[1])]
    for e in range(dim):
        if len(basis) == dim:
            break
        v = np.zeros(dim, dtype=cols.dtype)
        v[e] = 1.0
        for _ in range(2):  # modified Gram-Schmidt, twice for stability
            for b in basis:
                v = v - np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm < GS_TOL:
            continue
        basis.append(v / nrm)
    return np.stack(basis, axis=1)


def _nbits(r: int) -> int:
    return max(0, math.ceil(math.log2(r))) if r > 1 else 0


def compile_mps(mps: MPS) -> IsometryStaircase:
    """Sequential QR compilation into one unitary block per site."""
    m = mps.m
    tensors = [np.asarray(t, dtype=float if np.isrealobj(t) else complex) for t in mps.tensors]
    # fold boundary vectors into the end tensors; bond order (a_{i-1}, s_i, a_i)
    sites = [np.transpose(t, (1, 0, 2)) for t in tensors]
    sites[0] = np.einsum("a,asb->sb", mps.L, sites[0])[None]
    sites[-1] = np.einsum("asb,b->as", sites[-1], mps.R)[:, :, None]

    isos: list[np.ndarray] = []
    bonds = [1]
    carry = np.ones((1, 1))
    for i, t in enumerate(sites):
        t = np.einsum("xa,asb->xsb", carry, t)
        r_left = t.shape[0]
        mat = t.reshape(r_left * 2, t.shape[2])
        q, r = _qr_nonneg(mat)
        if i == m - 1:
            keep = np.ones(1, dtype=bool)
        else:
            norms = np.linalg.norm(r, axis=1)
            keep = norms > RANK_TOL * max(1.0, norms.max(initial=0.0))
            if not keep.any():
                raise ValueError("MPS describes the zero vector")
        isos.append(q[:, keep])
        carry = r[keep]
        bonds.append(int(keep.sum()))
    scale = float(abs(carry[0, 0]))
    if scale == 0.0:
        raise ValueError("MPS describes the zero vector")

    blocks = []
    for i in range(m - 1, -1, -1):
        iso = isos[i]  # rows (a_{i-1}, s_i), cols a_i
        b_out = _nbits(bonds[i])
        w = b_out + 1
        dim = 1 << w
        cols = np.zeros((dim, iso.shape[1]), dtype=iso.dtype)
        cols[: iso.shape[0]] = iso
        u = complete_unitary(cols, dim)
        window = tuple(range(i - b_out, i + 1))
        blocks.append((window, u))
    return IsometryStaircase(m, tuple(blocks), tuple(bonds), scale)


def simulate_staircase(stair: IsometryStaircase) -> Statevector:
    return circuits.simulate(stair.circuit())


def depth_estimate(m: int, k: int) -> int:
    """m * k * log2(k)^2 scaling with unit constant; reporting only."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return m * max(k, 1) * max(math.ceil(math.log2(max(k, 2))), 1) ** 2
