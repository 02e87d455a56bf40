"""Circuit IR: typed gates, simulation, gate-count accounting and JSON I/O.

Gate list order is application order: ``gates[0]`` acts first.

Kinds and qubit conventions
---------------------------
ry      [t]                 R_Y(angle) = exp(-i angle/2 Y), so R_Y(a)|0> = cos(a/2)|0> + sin(a/2)|1>
cry0    [c, t]              R_Y on t when c is |0>
cry1    [c, t]              R_Y on t when c is |1>
x, z    [t]
cnot    [c, t]
c0not   [c, t]              X on t when c is |0>
ccnot   [c1, c2, t]         Toffoli
cxy     [c, a, b]           pair rotation on (a, b) when c is |0>
dcxy    [c1, a, b, c2]      pair rotation on (a, b) when c1 and c2 are |0>; consecutive qubits
ublock  [q0, ..., q_{w-1}]  dense unitary, q0 is the most significant bit of the matrix index

The pair rotation maps |01> -> cos(a)|01> + sin(a)|10> and
|10> -> cos(a)|10> - sin(a)|01> and fixes |00>, |11>; the angle is the full
subspace rotation angle, not half of it.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from . import qsim
from .errors import CircuitParseError, GateError

ARITY = {
    "ry": 1,
    "x": 1,
    "z": 1,
    "cry0": 2,
    "cry1": 2,
    "cnot": 2,
    "c0not": 2,
    "ccnot": 3,
    "cxy": 3,
    "dcxy": 4,
}
ROTATIONS = {"ry", "cry0", "cry1", "cxy", "dcxy"}
KINDS = set(ARITY) | {"ublock"}
MAX_UBLOCK = 6
UNITARY_TOL = 1e-10

# CNOT-equivalent bookkeeping; ublock on q qubits is charged 4**q.
CNOT_COST = {
    "ry": 0,
    "x": 0,
    "z": 0,
    "cnot": 1,
    "c0not": 1,
    "cry0": 2,
    "cry1": 2,
    "cxy": 6,
    "ccnot": 10,
    "dcxy": 12,
}

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def pair_rotation_matrix(angle: float) -> np.ndarray:
    """4x4 rotation mixing |01> and |10> (basis order 00, 01, 10, 11)."""
    c, s = np.cos(angle), np.sin(angle)
    m = np.eye(4, dtype=complex)
    m[1, 1] = c
    m[2, 1] = s
    m[2, 2] = c
    m[1, 2] = -s
    return m


def controlled(base: np.ndarray, controls: Sequence[int]) -> np.ndarray:
    """Embed ``base`` behind control qubits; ``controls`` lists the trigger values.

    Control qubits come first in the index, followed by the target block.
    """
    nc = len(controls)
    dt = base.shape[0]
    out = np.eye(dt << nc, dtype=complex)
    trigger = int("".join(str(v) for v in controls), 2) if nc else 0
    lo = trigger * dt
    out[lo : lo + dt, lo : lo + dt] = base
    return out


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GateError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(set(qubits)) != len(qubits):
            raise GateError(f"{self.kind}: qubit indices collide: {list(qubits)}")
        if any(q < 0 for q in qubits):
            raise GateError(f"{self.kind}: negative qubit index")
        if self.kind == "ublock":
            if self.matrix is None:
                raise GateError("ublock requires a matrix")
            if not 1 <= len(qubits) <= MAX_UBLOCK:
                raise GateError(f"ublock acts on 1..{MAX_UBLOCK} qubits, got {len(qubits)}")
            mat = np.array(self.matrix, dtype=complex)
            dim = 1 << len(qubits)
            if mat.shape != (dim, dim):
                raise GateError(f"ublock matrix shape {mat.shape} does not match {len(qubits)} qubits")
            if not np.allclose(mat.conj().T @ mat, np.eye(dim), atol=UNITARY_TOL, rtol=0):
                raise GateError("ublock matrix is not unitary")
            mat.flags.writeable = False
            object.__setattr__(self, "matrix", mat)
            return
        if len(qubits) != ARITY[self.kind]:
            raise GateError(f"{self.kind} takes {ARITY[self.kind]} qubits, got {len(qubits)}")
        if self.matrix is not None:
            raise GateError(f"{self.kind} does not carry a matrix")
        if self.kind in ROTATIONS:
            if self.angle is None:
                raise GateError(f"{self.kind} requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise GateError(f"{self.kind} takes no angle")
        if self.kind == "dcxy" and list(qubits) != list(range(qubits[0], qubits[0] + 4)):
            raise GateError(f"dcxy must act on 4 consecutive ascending qubits, got {list(qubits)}")

    def unitary(self) -> np.ndarray:
        k = self.kind
        if k == "ublock":
            return np.array(self.matrix)
        if k == "ry":
            return ry_matrix(self.angle)
        if k == "x":
            return _X.copy()
        if k == "z":
            return _Z.copy()
        if k == "cry0":
            return controlled(ry_matrix(self.angle), [0])
        if k == "cry1":
            return controlled(ry_matrix(self.angle), [1])
        if k == "cnot":
            return controlled(_X, [1])
        if k == "c0not":
            return controlled(_X, [0])
        if k == "ccnot":
            return controlled(_X, [1, 1])
        if k == "cxy":
            return controlled(pair_rotation_matrix(self.angle), [0])
        if k == "dcxy":
            # index order (c1, a, b, c2): move c2 next to c1 for the block embedding
            m = controlled(pair_rotation_matrix(self.angle), [0, 0])  # order (c1, c2, a, b)
            perm = [0, 2, 3, 1]  # position in (c1, a, b, c2) -> axis in (c1, c2, a, b)
            t = m.reshape((2,) * 8)
            t = t.transpose(perm + [4 + p for p in perm])
            return t.reshape(16, 16)
        raise GateError(f"no matrix for {k}")  # pragma: no cover

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.qubits, self.angle) != (other.kind, other.qubits, other.angle):
            return False
        if self.matrix is None or other.matrix is None:
            return self.matrix is None and other.matrix is None
        return bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.kind, self.qubits, self.angle))

    def __repr__(self) -> str:
        extra = f", angle={self.angle!r}" if self.angle is not None else ""
        return f"Gate({self.kind!r}, {list(self.qubits)}{extra})"


def ry(q: int, angle: float) -> Gate:
    return Gate("ry", (q,), angle)


def cry0(c: int, t: int, angle: float) -> Gate:
    return Gate("cry0", (c, t), angle)


def cry1(c: int, t: int, angle: float) -> Gate:
    return Gate("cry1", (c, t), angle)


def x(q: int) -> Gate:
    return Gate("x", (q,))


def z(q: int) -> Gate:
    return Gate("z", (q,))


def cnot(c: int, t: int) -> Gate:
    return Gate("cnot", (c, t))


def c0not(c: int, t: int) -> Gate:
    return Gate("c0not", (c, t))


def ccnot(c1: int, c2: int, t: int) -> Gate:
    return Gate("ccnot", (c1, c2, t))


def cxy(c: int, a: int, b: int, angle: float) -> Gate:
    return Gate("cxy", (c, a, b), angle)


def dcxy(start: int, angle: float) -> Gate:
    return Gate("dcxy", tuple(range(start, start + 4)), angle)


def ublock(qubits: Sequence[int], matrix: np.ndarray) -> Gate:
    return Gate("ublock", tuple(qubits), matrix=np.asarray(matrix, dtype=complex))


@dataclass(frozen=True, eq=False)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_qubits < 1:
            raise GateError("circuit needs at least one qubit")
        for i, g in enumerate(self.gates):
            if max(g.qubits) >= self.n_qubits:
                raise GateError(f"gate {i} ({g.kind}) touches qubit {max(g.qubits)} >= {self.n_qubits}")

    def __len__(self) -> int:
        return len(self.gates)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.gates == other.gates
            and self.metadata == other.metadata
        )

    def extended(self, gates: Iterable[Gate], **metadata) -> "Circuit":
        meta = dict(self.metadata)
        meta.update(metadata)
        return Circuit(self.n_qubits, self.gates + tuple(gates), meta)


def simulate(circuit: Circuit, initial: qsim.Statevector | None = None) -> qsim.Statevector:
    if initial is None:
        initial = qsim.zero_state(circuit.n_qubits)
    if initial.n_qubits != circuit.n_qubits:
        raise GateError(f"circuit has {circuit.n_qubits} qubits, state has {initial.n_qubits}")
    n = circuit.n_qubits
    amps = np.array(initial.amplitudes)
    for g in circuit.gates:
        amps = qsim.apply_matrix_array(amps, n, g.unitary(), g.qubits)
    return qsim.Statevector(n, amps, normalized=initial.normalized)


def gate_counts(circuit: Circuit) -> dict[str, Any]:
    kinds = Counter(g.kind for g in circuit.gates)
    cnot_eq = 0
    for g in circuit.gates:
        cnot_eq += 4 ** len(g.qubits) if g.kind == "ublock" else CNOT_COST[g.kind]
    return {
        "by_kind": dict(sorted(kinds.items())),
        "total": len(circuit.gates),
        "two_qubit": sum(1 for g in circuit.gates if len(g.qubits) == 2),
        "multi_qubit": sum(1 for g in circuit.gates if len(g.qubits) >= 2),
        "cnot_equivalent": cnot_eq,
    }


def _gate_to_dict(g: Gate) -> dict[str, Any]:
    d: dict[str, Any] = {"kind": g.kind, "qubits": list(g.qubits)}
    if g.angle is not None:
        d["angle"] = g.angle
    if g.matrix is not None:
        d["matrix"] = [[[float(v.real), float(v.imag)] for v in row] for row in g.matrix]
    return d


def to_dict(circuit: Circuit) -> dict[str, Any]:
    return {
        "n_qubits": circuit.n_qubits,
        "gates": [_gate_to_dict(g) for g in circuit.gates],
        "metadata": circuit.metadata,
    }


def to_json(circuit: Circuit, indent: int | None = None) -> str:
    # json emits floats via repr(), which round-trips doubles exactly
    return json.dumps(to_dict(circuit), indent=indent)


def _gate_from_dict(i: int, d: Any) -> Gate:
    if not isinstance(d, dict):
        raise CircuitParseError("gate entry must be an object", i)
    kind = d.get("kind")
    if kind not in KINDS:
        raise CircuitParseError(f"unknown kind {kind!r}", i)
    qubits = d.get("qubits")
    if not isinstance(qubits, list) or not all(isinstance(q, int) and not isinstance(q, bool) for q in qubits):
        raise CircuitParseError("qubits must be a list of integers", i)
    angle = d.get("angle")
    if angle is not None and not isinstance(angle, (int, float)):
        raise CircuitParseError("angle must be a number", i)
    matrix = None
    if "matrix" in d:
        try:
            matrix = np.array([[complex(re, im) for re, im in row] for row in d["matrix"]], dtype=complex)
        except (TypeError, ValueError) as exc:
            raise CircuitParseError(f"malformed matrix: {exc}", i) from None
    unknown = set(d) - {"kind", "qubits", "angle", "matrix"}
    if unknown:
        raise CircuitParseError(f"unexpected fields {sorted(unknown)}", i)
    try:
        return Gate(kind, tuple(qubits), None if angle is None else float(angle), matrix)
    except GateError as exc:
        raise CircuitParseError(str(exc), i) from None


def from_dict(doc: Any) -> Circuit:
    if not isinstance(doc, dict):
        raise CircuitParseError("document must be a JSON object")
    n = doc.get("n_qubits")
    if not isinstance(n, int) or n < 1:
        raise CircuitParseError("n_qubits must be a positive integer")
    raw = doc.get("gates")
    if not isinstance(raw, list):
        raise CircuitParseError("gates must be a list")
    gates = [_gate_from_dict(i, g) for i, g in enumerate(raw)]
    for i, g in enumerate(gates):
        if max(g.qubits) >= n:
            raise CircuitParseError(f"qubit {max(g.qubits)} out of range for {n} qubits", i)
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise CircuitParseError("metadata must be an object")
    return Circuit(n, tuple(gates), meta)


def from_json(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitParseError(f"invalid JSON: {exc}") from None
    return from_dict(doc)


def save(circuit: Circuit, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_json(circuit, indent=1))
        fh.write("\n")


def load(path) -> Circuit:
    with open(path) as fh:
        return from_json(fh.read())
