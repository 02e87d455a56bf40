"""Adiabatic sweeps, gap analysis, tower revivals and magnetization projection.

Sweeps and gap scans run in the sector where both boundary sites are empty.
H_X and H_P both conserve Z_1 and Z_N; only in this sector is the H_X ground
state unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from . import hamiltonians as ham
from . import refstates
from .errors import ConvergenceError
from .qsim import Statevector

DENSE_MAX_N = 10
KRYLOV_MAX_DIM = 30
KRYLOV_TOL = 1e-8
EIG_TOL = 1e-9


@dataclass(frozen=True)
class SweepConfig:
    N: int
    T: float
    n_s: int = 1000

    def __post_init__(self):
        if self.n_s < 1:
            raise ValueError("n_s must be >= 1")
        if self.T < 0:
            raise ValueError("T must be >= 0")
        if self.N < 4:
            raise ValueError("N must be >= 4")

    @property
    def ds(self) -> float:
        return self.T / self.n_s


@dataclass
class SweepResult:
    config: SweepConfig
    state: np.ndarray  # amplitudes on the boundary-zero sector
    fidelity: float
    curve: list[tuple[float, float]] = field(default_factory=list)  # (s/T, overlap)
    backend: str = "dense"

    def full_state(self) -> Statevector:
        N = self.config.N
        amps = np.zeros(1 << N, dtype=complex)
        amps[ham.boundary_zero_indices(N)] = self.state
        return Statevector(N, amps)


class _SectorHamiltonians:
    def __init__(self, N: int):
        self.N = N
        self.idx = ham.boundary_zero_indices(N)
        self.HX = ham.restrict(ham.build_HX(N), self.idx)
        self.HP = ham.restrict(ham.build_HP(N), self.idx)

    def at(self, u: float):
        return (1.0 - u) * self.HX + u * self.HP


def paramagnet_ground(N: int) -> np.ndarray:
    """|0> (x) |+ - + - ...> (x) |0> on the boundary-zero sector (sites 2..N-1)."""
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    minus = np.array([1.0, -1.0]) / math.sqrt(2)
    v = np.ones(1)
    for i in range(2, N):
        v = np.kron(v, plus if i % 2 == 0 else minus)
    return v.astype(complex)


def xi1_sector(N: int) -> np.ndarray:
    return np.asarray(refstates.xi_state(N, 1.0).amplitudes)[ham.boundary_zero_indices(N)]


def krylov_expm(H, v: np.ndarray, dt: float, tol: float = KRYLOV_TOL, max_dim: int = KRYLOV_MAX_DIM,
                step: int | None = None) -> np.ndarray:
    """exp(-i dt H) v for Hermitian H by Lanczos with full reorthogonalization."""
    beta0 = np.linalg.norm(v)
    if beta0 == 0.0 or dt == 0.0:
        return v.copy()
    n = v.shape[0]
    m_cap = min(max_dim, n)
    V = np.zeros((m_cap + 1, n), dtype=complex)
    alpha = np.zeros(m_cap)
    beta = np.zeros(m_cap)
    V[0] = v / beta0
    for j in range(m_cap):
        w = H @ V[j]
        alpha[j] = np.vdot(V[j], w).real
        w = w - V[: j + 1].T @ (V[: j + 1].conj() @ w)
        w = w - V[: j + 1].T @ (V[: j + 1].conj() @ w)
        beta[j] = np.linalg.norm(w)
        m = j + 1
        T = np.diag(alpha[:m]) + np.diag(beta[: m - 1], 1) + np.diag(beta[: m - 1], -1)
        e = sla.expm(-1j * dt * T)[:, 0]
        # error estimate: coupling to the next Krylov vector
        err = beta[j] * abs(e[-1]) * beta0
        if beta[j] < 1e-14 or err < tol or m == n:
            return beta0 * (V[:m].T @ e)
        V[j + 1] = w / beta[j]
    raise ConvergenceError(f"Krylov expm did not reach tolerance {tol} with {m_cap} vectors (err {err:.2e})", step)


def adiabatic_evolve(config: SweepConfig, backend: str = "auto", record: bool = False) -> SweepResult:
    """Apply exp(-i ds H(s)) at s = n ds, n = 0..n_s-1; report |<psi(T)|xi=1>|."""
    N = config.N
    if backend == "auto":
        backend = "dense" if N <= DENSE_MAX_N else "krylov"
    if backend not in ("dense", "krylov"):
        raise ValueError(f"unknown backend {backend!r}")
    hs = _SectorHamiltonians(N)
    target = xi1_sector(N)
    psi = paramagnet_ground(N)
    ds = config.ds
    curve = []
    if backend == "dense":
        HX, HP = hs.HX.toarray(), hs.HP.toarray()
    for n in range(config.n_s if ds > 0 else 0):
        u = n * ds / config.T
        if backend == "dense":
            w, U = np.linalg.eigh((1.0 - u) * HX + u * HP)
            psi = U @ (np.exp(-1j * ds * w) * (U.conj().T @ psi))
        else:
            psi = krylov_expm(hs.at(u), psi, ds, step=n)
        if record:
            curve.append(((n + 1) / config.n_s, abs(np.vdot(target, psi))))
    fid = abs(np.vdot(target, psi))
    return SweepResult(config, psi, float(fid), curve, backend)


def find_Tstar(N: int, target: float = 0.99, n_s: int = 1000, grid_step: float = 5.0,
               T_max: float = 100.0, resolution: float = 0.5, backend: str = "auto") -> float:
    """Smallest grid T reaching ``target`` fidelity, then bisection to within ``resolution``."""
    def fid(T):
        return adiabatic_evolve(SweepConfig(N, T, n_s), backend).fidelity

    if fid(0.0) >= target:
        return 0.0
    lo, hi = 0.0, None
    T = grid_step
    while T <= T_max + 1e-9:
        if fid(T) >= target:
            hi = T
            break
        lo = T
        T += grid_step
    if hi is None:
        raise ConvergenceError(f"fidelity {target} not reached for T <= {T_max}")
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if fid(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def lowest_two(H, dense_max: int = 1024) -> tuple[float, float]:
    dim = H.shape[0]
    if dim <= dense_max:
        w = np.linalg.eigvalsh(H.toarray())
        return float(w[0]), float(w[1])
    w = spla.eigsh(H.tocsc(), k=2, which="SA", tol=EIG_TOL, return_eigenvectors=False)
    w = np.sort(w.real)
    return float(w[0]), float(w[1])


@dataclass
class GapCurve:
    N: int
    s_over_T: np.ndarray
    gaps: np.ndarray

    @property
    def argmin(self) -> float:
        return float(self.s_over_T[int(np.argmin(self.gaps))])

    @property
    def minimum(self) -> float:
        return float(self.gaps.min())

    @property
    def degenerate(self) -> list[float]:
        """Sample points where the two lowest levels coincide (multiplicity > 1)."""
        return [float(s) for s, g in zip(self.s_over_T, self.gaps) if g < 10 * EIG_TOL]


def gap_scan(N: int, points: int = 21) -> GapCurve:
    if points < 2:
        raise ValueError("points must be >= 2")
    hs = _SectorHamiltonians(N)
    us = np.linspace(0.0, 1.0, points)
    gaps = []
    for u in us:
        e0, e1 = lowest_two(hs.at(u))
        gaps.append(e1 - e0)
    return GapCurve(N, us, np.array(gaps))


def final_gap(N: int) -> float:
    hs = _SectorHamiltonians(N)
    e0, e1 = lowest_two(hs.HP)
    return e1 - e0


def gap_extrapolate(Ns, degree: int = 2) -> tuple[float, dict[int, float]]:
    """Fit gap(s=T) against 1/N with a polynomial; returns (intercept, gaps)."""
    Ns = sorted(Ns)
    gaps = {N: final_gap(N) for N in Ns}
    x = np.array([1.0 / N for N in Ns])
    coef = np.polyfit(x, np.array([gaps[N] for N in Ns]), degree)
    return float(coef[-1]), gaps


def revival_amplitude(N: int, xi: complex, delta: float, J: float, t: float) -> complex:
    """<xi| exp(-i H0 t) |xi> from the tower weights |xi|^{2k} N(N,k) / Z."""
    Z = refstates.normalization_Z(N, xi)
    r2 = abs(xi) ** 2
    total = 0j
    for k in range(refstates.max_tower_k(N) + 1):
        w = r2**k * refstates.count_constrained(N, k) / Z
        total += w * np.exp(-1j * ham.scar_energy(N, k, delta, J) * t)
    return complex(total)


def revival_fidelity(N: int, xi: complex, delta: float, J: float, t: float) -> float:
    return abs(revival_amplitude(N, xi, delta, J, t))


def revival_period(delta: float, J: float) -> float:
    if delta + 2 * J == 0:
        raise ValueError("Delta + 2J = 0: the tower is degenerate, no finite period")
    return math.pi / abs(delta + 2 * J)


def project_magnetization(state: Statevector, k: int) -> tuple[Statevector, float]:
    """Project onto M_z = N - 2k (Hamming weight k) and renormalize."""
    if not 0 <= k <= state.n_qubits:
        raise ValueError(f"k={k} outside 0..{state.n_qubits}")
    vec, prob = refstates.weight_sector(state, k)
    if prob < 1e-14:
        raise ValueError(f"magnetization sector k={k} has zero probability")
    return vec.renormalized(), prob


def sector_probabilities(state: Statevector) -> dict[int, float]:
    idx = np.arange(state.dim, dtype=np.int64)
    w = refstates.popcount(idx)
    p = np.abs(np.asarray(state.amplitudes)) ** 2
    return {int(k): float(p[w == k].sum()) for k in np.unique(w) if p[w == k].sum() > 0}
