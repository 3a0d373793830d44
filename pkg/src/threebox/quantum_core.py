"""Finite-dimensional pure-state quantum simulator for pre/post-selection protocols.

Kets are 1-d complex numpy arrays and unitaries/projectors are square complex
arrays. Measurements are projective with the Lüders update rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .distribution import OutcomeDistribution

TOL = 1e-9
# outcomes with probability below this are dropped from measure()
PROB_FLOOR = 1e-12


class DimensionMismatch(ValueError):
    pass


class NotUnitaryError(ValueError):
    pass


class UnknownMeasurement(KeyError):
    pass


def ket(*amplitudes) -> np.ndarray:
    """Build a normalized ket from raw (unnormalized) amplitudes."""
    v = np.asarray(amplitudes, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("the zero vector is not a state")
    return v / norm


def basis_ket(i: int, dim: int) -> np.ndarray:
    """``|i>`` with 1-based box index, as the boxes are labelled."""
    if not 1 <= i <= dim:
        raise ValueError(f"box {i} outside 1..{dim}")
    v = np.zeros(dim, dtype=complex)
    v[i - 1] = 1.0
    return v


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """A named projective measurement.

    ``outcomes`` is an ordered sequence of ``(label, projector)`` pairs. By
    convention the first outcome is the "found" outcome (ball seen, or
    Alice's post-selection succeeded) and the second its complement.
    """

    name: str
    outcomes: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "outcomes",
            tuple((str(q), np.asarray(p, dtype=complex)) for q, p in self.outcomes),
        )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(q for q, _ in self.outcomes)

    @property
    def dim(self) -> int:
        return self.outcomes[0][1].shape[0]

    def projector(self, label: str) -> np.ndarray:
        for q, p in self.outcomes:
            if q == label:
                return p
        raise KeyError(label)


def binary_measurement(name: str, found: str, missed: str, v: np.ndarray) -> ProjectiveMeasurement:
    """Two-outcome measurement: rank-1 projector onto ``v`` and its complement."""
    p = projector(v)
    return ProjectiveMeasurement(name, ((found, p), (missed, np.eye(len(v)) - p)))


@dataclass(frozen=True)
class QuantumScenario:
    initial: np.ndarray
    measurements: Mapping[str, ProjectiveMeasurement]
    do_nothing_label: str = "N"
    name: str = "quantum"
    preparations: Mapping[str, np.ndarray] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.initial)

    def measurement(self, label: str) -> ProjectiveMeasurement:
        try:
            return self.measurements[label]
        except KeyError:
            raise UnknownMeasurement(label) from None


def build_three_box_scenario() -> QuantumScenario:
    """The three-box protocol after Alice's shuffle, with ``U_F`` folded into ``MA``.

    Outcome labels: ``"1"``/``"~1"`` for M1, ``"2"``/``"~2"`` for M2 and
    ``"A"``/``"~A"`` for MA.
    """
    e1, e2, e3 = (basis_ket(i, 3) for i in (1, 2, 3))
    initial = apply_unitary(e3, shuffle_unitary())
    post = ket(1, 1, -1)
    measurements = {
        "M1": binary_measurement("M1", "1", "~1", e1),
        "M2": binary_measurement("M2", "2", "~2", e2),
        "MA": binary_measurement("MA", "A", "~A", post),
    }
    preparations = {
        "|1+2+3>": initial,
        "|1>": e1,
        "|2>": e2,
        "|3>": e3,
        "|1+3>": ket(1, 0, 1),
        "|2+3>": ket(0, 1, 1),
    }
    return QuantumScenario(initial, measurements, "N", "quantum", preparations)


def _unitary_taking(target: np.ndarray, source_index: int) -> np.ndarray:
    # Householder-free construction: complete `target` to an orthonormal basis
    # with QR and put it in column `source_index`.
    dim = len(target)
    cols = [target] + [basis_ket(i, dim) for i in range(1, dim + 1)]
    q, _ = np.linalg.qr(np.column_stack(cols))
    q = q[:, :dim]
    # QR fixes the first column only up to a phase
    q[:, 0] *= np.vdot(q[:, 0], target) / abs(np.vdot(q[:, 0], target))
    order = list(range(1, dim))
    order.insert(source_index, 0)
    return q[:, order]


def shuffle_unitary() -> np.ndarray:
    """A ``U_I`` with ``U_I|3> = (|1>+|2>+|3>)/sqrt(3)``."""
    return _unitary_taking(ket(1, 1, 1), 2)


def final_shuffle_unitary() -> np.ndarray:
    """A ``U_F`` with ``U_F (|1>+|2>-|3>)/sqrt(3) = |3>``."""
    return _unitary_taking(ket(1, 1, -1), 2).conj().T


def is_unitary(u: np.ndarray, tol: float = TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)


def apply_unitary(state: np.ndarray, u: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape != (len(state), len(state)):
        raise DimensionMismatch(f"unitary of shape {u.shape} on ket of dim {len(state)}")
    if not is_unitary(u):
        raise NotUnitaryError("matrix is not unitary within 1e-9")
    return u @ state


def measure(state: np.ndarray, m: ProjectiveMeasurement) -> list[tuple[str, float, np.ndarray]]:
    """Lüders measurement: ``[(label, probability, post-state), ...]``.

    Outcomes with probability below 1e-12 are omitted.
    """
    state = np.asarray(state, dtype=complex)
    if m.dim != len(state):
        raise DimensionMismatch(f"measurement {m.name} has dim {m.dim}, ket has {len(state)}")
    results = []
    for label, p in m.outcomes:
        projected = p @ state
        prob = float(np.real(np.vdot(projected, projected)))
        if prob < PROB_FLOOR:
            continue
        results.append((label, prob, projected / np.sqrt(prob)))
    return results


def sequence_distribution(
    s: QuantumScenario, seq: Sequence[str], state: np.ndarray | None = None
) -> OutcomeDistribution:
    """Joint distribution of outcome strings for measuring ``seq`` in order.

    ``state`` defaults to the scenario's initial ket. The do-nothing label
    contributes no outcome.
    """
    labels = [lab for lab in seq if lab != s.do_nothing_label]
    ms = [s.measurement(lab) for lab in labels]
    start = s.initial if state is None else np.asarray(state, dtype=complex)

    probs: dict[tuple[str, ...], float] = {}

    def walk(psi, depth, prefix, weight):
        if depth == len(ms):
            probs[prefix] = probs.get(prefix, 0.0) + weight
            return
        for label, p, post in measure(psi, ms[depth]):
            walk(post, depth + 1, prefix + (label,), weight * p)

    walk(start, 0, (), 1.0)
    return OutcomeDistribution(probs)


@dataclass
class ValidationReport:
    violations: list[tuple[str, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str, residual: float = 0.0):
        self.violations.append((message, float(residual)))

    def __str__(self):
        if self.ok:
            return "no violations"
        return "\n".join(f"{msg} (residual {res:.3g})" for msg, res in self.violations)


def validate_scenario(s: QuantumScenario, tol: float = TOL) -> ValidationReport:
    """Check normalization, projector idempotence/hermiticity and completeness."""
    report = ValidationReport()
    kets = {"initial": s.initial, **{f"preparation {k}": v for k, v in s.preparations.items()}}
    for name, v in kets.items():
        v = np.asarray(v, dtype=complex)
        if v.ndim != 1 or len(v) != s.dim:
            report.add(f"{name}: dimension {v.shape} != {s.dim}", np.inf)
            continue
        res = abs(np.linalg.norm(v) - 1.0)
        if res >= tol:
            report.add(f"{name}: not normalized", res)
    eye = np.eye(s.dim)
    for label, m in s.measurements.items():
        total = np.zeros((s.dim, s.dim), dtype=complex)
        for q, p in m.outcomes:
            if p.shape != (s.dim, s.dim):
                report.add(f"{label}/{q}: projector shape {p.shape} != {(s.dim, s.dim)}", np.inf)
                continue
            res = np.max(np.abs(p @ p - p))
            if res >= tol:
                report.add(f"{label}/{q}: not idempotent", res)
            res = np.max(np.abs(p - p.conj().T))
            if res >= tol:
                report.add(f"{label}/{q}: not hermitian", res)
            total = total + p
        res = np.max(np.abs(total - eye))
        if res >= tol:
            report.add(f"{label}: projectors do not sum to identity", res)
    return report
