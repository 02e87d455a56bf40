"""Fidelity and distribution distances, plus JSON/CSV helpers for reports."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

import numpy as np

from . import qsim
from .errors import DimensionError
from .qsim import Statevector

INF_SENTINEL = {"$float": "inf"}


@dataclass(frozen=True)
class Distribution:
    probs: Mapping[int, float]

    def __post_init__(self):
        if any(p < 0 for p in self.probs.values()):
            raise ValueError("probabilities must be nonnegative")

    @property
    def mass(self) -> float:
        return float(sum(self.probs.values()))

    def normalized(self) -> "Distribution":
        m = self.mass
        if m <= 0:
            raise ValueError("distribution has zero mass")
        return Distribution({k: v / m for k, v in self.probs.items()})


def distribution_from_counts(counts: Mapping[int, int], shots: int | None = None) -> Distribution:
    total = sum(counts.values())
    if shots is None:
        shots = total
    if total != shots:
        raise ValueError(f"counts sum to {total}, expected {shots} shots")
    if shots <= 0:
        raise ValueError("shots must be positive")
    return Distribution({int(k): c / shots for k, c in counts.items() if c})


def distribution_from_state(state: Statevector, cutoff: float = 1e-15) -> Distribution:
    return Distribution(qsim.probabilities(state, cutoff)).normalized()


def bhattacharyya(p: Distribution, q: Distribution) -> float:
    """-ln sum sqrt(p q); math.inf when the supports are disjoint."""
    keys = set(p.probs) & set(q.probs)
    bc = math.fsum(math.sqrt(p.probs[k] * q.probs[k]) for k in sorted(keys))
    if bc <= 0.0:
        return math.inf
    return max(0.0, -math.log(min(bc, 1.0)))


def fidelity(a: Statevector, b: Statevector) -> float:
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"{a.n_qubits} vs {b.n_qubits} qubits")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def jsonable(value: Any) -> Any:
    """Recursively convert to JSON-safe values; infinities become a tagged sentinel."""
    if isinstance(value, float) or isinstance(value, np.floating):
        v = float(value)
        if math.isinf(v):
            return dict(INF_SENTINEL) if v > 0 else {"$float": "-inf"}
        if math.isnan(v):
            return {"$float": "nan"}
        return v
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": jsonable(value.real), "im": jsonable(value.imag)}
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable[Any]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(header))
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
