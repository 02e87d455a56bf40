"""Linear-depth |xi;m> circuits and the block-stitching postselection protocol."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import circuits, qsim, refstates
from .circuits import Circuit
from .qsim import Statevector


@dataclass(frozen=True)
class AngleSchedule:
    m: int
    xi: float
    tilde: bool
    theta: tuple[float, ...]  # theta_1..theta_m
    phi: tuple[float, ...]  # phi_1..phi_{m+1}


def angle_schedule(m: int, xi: float, tilde: bool = False) -> AngleSchedule:
    """Rotation angles for the controlled-R_Y chain, built from the last site back.

    phi_{m+1} = 1, t_j = x_j / phi_{j+1}, theta_j = 2 arg(1 + i t_j),
    phi_j = sqrt(1 + t_j^2), with x_j = (-1)^(j+1) xi, or x_j = xi when ``tilde``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if xi < 0:
        raise ValueError("circuit synthesis needs real xi >= 0")
    theta = [0.0] * (m + 1)
    phi = [0.0] * (m + 2)
    phi[m + 1] = 1.0
    for j in range(m, 0, -1):
        x = xi if tilde else (-1) ** (j + 1) * xi
        t = x / phi[j + 1]
        theta[j] = 2.0 * math.atan2(t, 1.0)
        phi[j] = math.sqrt(1.0 + t * t)
    return AngleSchedule(m, float(xi), tilde, tuple(theta[1:]), tuple(phi[1:]))


def closed_form_angles_xi1(m: int) -> tuple[float, ...]:
    """xi = 1 sign-free angles: theta_{m-i+1} = 2 arctan(sqrt(F_i / F_{i+1}))."""
    if m < 1:
        raise ValueError("m must be >= 1")
    theta = [0.0] * m
    for i in range(1, m + 1):
        theta[m - i] = 2.0 * math.atan(math.sqrt(refstates.fib(i) / refstates.fib(i + 1)))
    return tuple(theta)


def linear_gates(sched: AngleSchedule, offset: int = 0) -> list[circuits.Gate]:
    gates = [circuits.ry(offset, sched.theta[0])]
    for j in range(1, sched.m):
        gates.append(circuits.cry0(offset + j - 1, offset + j, sched.theta[j]))
    return gates


def build_linear_circuit(m: int, xi: float, tilde: bool = False) -> Circuit:
    sched = angle_schedule(m, xi, tilde)
    meta = {"name": "xi_linear", "m": m, "xi": float(xi), "tilde": tilde}
    return Circuit(m, tuple(linear_gates(sched)), meta)


@dataclass(frozen=True)
class StitchPlan:
    k_blocks: int
    m: int
    xi: float = 1.0

    def __post_init__(self):
        if self.k_blocks < 1 or self.m < 1:
            raise ValueError("k_blocks and m must be >= 1")
        if self.xi < 0:
            raise ValueError("xi must be >= 0")

    @property
    def n_primary(self) -> int:
        return self.k_blocks * self.m

    @property
    def n_ancillas(self) -> int:
        return self.k_blocks - 1

    @property
    def n_qubits(self) -> int:
        return self.n_primary + self.n_ancillas

    def junctions(self) -> list[tuple[int, int, int]]:
        """(last qubit of block j, first qubit of block j+1, ancilla) per junction."""
        m = self.m
        return [((j + 1) * m - 1, (j + 1) * m, self.n_primary + j) for j in range(self.n_ancillas)]


def build_stitch_circuit(plan: StitchPlan, tilde: bool = True) -> Circuit:
    """Independent blocks, one Toffoli per junction onto a fresh ancilla.

    Ancillas follow the primary register. The signed variant appends Z on the
    interior-register qubits that sit on odd sites.
    """
    sched = angle_schedule(plan.m, plan.xi, tilde=True)
    gates: list[circuits.Gate] = []
    for b in range(plan.k_blocks):
        gates.extend(linear_gates(sched, offset=b * plan.m))
    for left, right, anc in plan.junctions():
        gates.append(circuits.ccnot(left, right, anc))
    if not tilde:
        gates.extend(circuits.z(q) for q in range(1, plan.n_primary, 2))
    meta = {
        "name": "xi_stitch",
        "m": plan.m,
        "k_blocks": plan.k_blocks,
        "xi": plan.xi,
        "tilde": tilde,
        "junctions": [list(j) for j in plan.junctions()],
    }
    return Circuit(plan.n_qubits, tuple(gates), meta)


def postselect_ancillas(state: Statevector, ancillas: list[int]) -> qsim.Projection:
    """Project each ancilla onto |0>; the probability is the joint success probability."""
    prob = 1.0
    for a in ancillas:
        proj = qsim.project_qubit(state, a, 0)
        prob *= proj.probability
        if not proj.valid:
            return qsim.Projection(None, prob)
        state = proj.state
    return qsim.Projection(state, prob)


def primary_register(state: Statevector, n_primary: int) -> Statevector:
    """Drop trailing ancillas that are all |0>."""
    n_anc = state.n_qubits - n_primary
    if n_anc == 0:
        return state
    amps = np.asarray(state.amplitudes).reshape(1 << n_primary, 1 << n_anc)
    return Statevector(n_primary, amps[:, 0], normalized=state.normalized)


def run_stitch(plan: StitchPlan, tilde: bool = True) -> tuple[Statevector | None, float]:
    """Simulate the stitched circuit and postselect; returns (primary state, success probability)."""
    circ = build_stitch_circuit(plan, tilde)
    out = circuits.simulate(circ)
    proj = postselect_ancillas(out, [j[2] for j in plan.junctions()])
    if not proj.valid:
        return None, proj.probability
    return primary_register(proj.state, plan.n_primary), proj.probability


def success_probability_closed(m: int, k: int) -> Fraction:
    """xi = 1 success probability F_{km+2} / F_{m+2}^k."""
    if m < 1 or k < 1:
        raise ValueError("m and k must be >= 1")
    return Fraction(refstates.fib(k * m + 2), refstates.fib(m + 2) ** k)


def _weighted_count(n: int, r: float) -> float:
    """sum over no-adjacent-ones strings of length n of r^weight (transfer recursion)."""
    end0, end1 = 1.0, 0.0  # empty string
    for _ in range(n):
        end0, end1 = end0 + end1, end0 * r
    return end0 + end1


def success_probability_exact(m: int, k: int, xi: float = 1.0) -> float:
    """Squared norm of the Fibonacci-projected k-fold tensor power of |xi~;m>."""
    if m < 1 or k < 1:
        raise ValueError("m and k must be >= 1")
    if k * m <= 20:
        block = np.asarray(refstates.xi_inner_state(m, xi, tilde=True).amplitudes)
        full = block
        for _ in range(k - 1):
            full = np.kron(full, block)
        _, weight = refstates.apply_fib_projector(Statevector(k * m, full, normalized=False))
        return weight
    r = float(xi) ** 2
    return _weighted_count(k * m, r) / _weighted_count(m, r) ** k


def junction_ok(index: int, plan: StitchPlan) -> bool:
    """True when a primary-register bitstring has no 11 straddling a junction."""
    n = plan.n_primary
    for left, right, _ in plan.junctions():
        if (index >> (n - 1 - left)) & 1 and (index >> (n - 1 - right)) & 1:
            return False
    return True


def classical_postselect(counts: dict[int, int], plan: StitchPlan) -> dict[int, int]:
    """Ancilla-free variant: keep sampled primary bitstrings that satisfy every junction."""
    return {i: c for i, c in counts.items() if junction_ok(i, plan)}


def block_product_state(plan: StitchPlan) -> Statevector:
    """Unstitched primary register: k independent copies of the block circuit output."""
    block = np.asarray(circuits.simulate(build_linear_circuit(plan.m, plan.xi, tilde=True)).amplitudes)
    full = block
    for _ in range(plan.k_blocks - 1):
        full = np.kron(full, block)
    return Statevector(plan.n_primary, full)
