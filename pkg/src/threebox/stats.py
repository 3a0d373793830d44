"""Operational statistics: the tables every classicality check consumes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Mapping, Sequence

import numpy as np

from . import ontic, quantum_core
from .distribution import OutcomeDistribution, rationalize


def outcome_labels(system, label: str) -> tuple[str, str]:
    """``(found, missed)`` labels of a two-outcome measurement."""
    m = system.measurement(label)
    labels = m.labels if isinstance(m, quantum_core.ProjectiveMeasurement) else m.outcomes
    if len(labels) != 2:
        raise ValueError(f"{label} has {len(labels)} outcomes, expected 2")
    return labels[0], labels[1]


def resolve_preparation(system, prep=None):
    """Accept a preparation object, a preparation name, or None (the default)."""
    if isinstance(prep, str):
        try:
            return system.preparations[prep]
        except KeyError:
            raise KeyError(f"unknown preparation {prep!r}") from None
    if prep is None:
        if isinstance(system, quantum_core.QuantumScenario):
            return system.initial
        raise ValueError("ontic models need an explicit preparation")
    return prep


def distribution(system, seq: Sequence[str], prep=None) -> OutcomeDistribution:
    """Run either engine on ``seq``. Quantum results are returned as floats."""
    prep = resolve_preparation(system, prep)
    if isinstance(system, quantum_core.QuantumScenario):
        return quantum_core.sequence_distribution(system, seq, np.asarray(prep, dtype=complex))
    return ontic.sequence_distribution(system, prep, seq)


@dataclass(frozen=True)
class OperationalStats:
    """Joint tables for the protocol ``(Mi, MA)`` for both boxes, plus ``(MA)`` alone.

    ``p_m1[(q, a)]`` is the probability Bob sees ``q`` with M1 and Alice then
    sees ``a``. ``found``/``missed`` hold each box measurement's outcome
    labels; ``post``/``post_fail`` are Alice's.
    """

    p_m1: Mapping[tuple[str, str], Real]
    p_m2: Mapping[tuple[str, str], Real]
    p_n: Mapping[str, Real]
    labels: tuple[str, str, str] = ("M1", "M2", "MA")
    found: tuple[str, str] = ("1", "2")
    missed: tuple[str, str] = ("~1", "~2")
    post: str = "A"
    post_fail: str = "~A"
    extra: Mapping[tuple[str, ...], OutcomeDistribution] = field(default_factory=dict)

    @property
    def p_n_a(self) -> Real:
        return self.p_n.get(self.post, 0)

    def table(self, i: int) -> Mapping[tuple[str, str], Real]:
        return (self.p_m1, self.p_m2)[i]

    def joint(self, i: int, q: str, a: str) -> Real:
        return self.table(i).get((q, a), 0)

    def found_and_post(self, i: int) -> Real:
        """``P_Mi(A, found_i)``."""
        return self.joint(i, self.found[i], self.post)

    def post_marginal(self, i: int, a: str | None = None) -> Real:
        a = self.post if a is None else a
        return sum((v for (_, b), v in self.table(i).items() if b == a), 0)

    @property
    def is_exact(self) -> bool:
        vals = [*self.p_m1.values(), *self.p_m2.values(), *self.p_n.values()]
        return all(isinstance(v, (Fraction, int)) for v in vals)

    def validate(self, tol: float = 1e-9) -> list[str]:
        problems = []
        for name, table in (("p_m1", self.p_m1), ("p_m2", self.p_m2), ("p_n", self.p_n)):
            total = sum(table.values(), 0)
            if abs(float(total) - 1.0) > (0 if self.is_exact else tol):
                problems.append(f"{name} sums to {total}")
            for k, v in table.items():
                if v < 0 or v > 1:
                    problems.append(f"{name}{k} = {v} outside [0, 1]")
        return problems


def _table2(dist: OutcomeDistribution, first: Sequence[str], second: Sequence[str]):
    return {(q, a): dist.prob(q, a) for q in first for a in second}


def collect_stats(
    system,
    prep=None,
    labels: Sequence[str] = ("M1", "M2", "MA"),
    extra_sequences: Sequence[Sequence[str]] = (),
    rationalize_quantum: bool = True,
) -> OperationalStats:
    """Generate :class:`OperationalStats` from either engine.

    Quantum probabilities are snapped to small-denominator rationals when
    within 1e-9 (otherwise left as floats).
    """
    m1, m2, final = labels
    f1, n1 = outcome_labels(system, m1)
    f2, n2 = outcome_labels(system, m2)
    a, na = outcome_labels(system, final)

    def run(seq):
        d = distribution(system, seq, prep)
        return d.rationalized() if rationalize_quantum and not d.is_exact else d

    p1 = _table2(run([m1, final]), (f1, n1), (a, na))
    p2 = _table2(run([m2, final]), (f2, n2), (a, na))
    dn = run([final])
    p_n = {a: dn.prob(a), na: dn.prob(na)}
    extra = {tuple(seq): run(seq) for seq in extra_sequences}
    return OperationalStats(p1, p2, p_n, (m1, m2, final), (f1, f2), (n1, n2), a, na, extra)


def stats_from_tables(
    p_m1: Mapping[tuple[str, str], Real],
    p_m2: Mapping[tuple[str, str], Real],
    p_n_a: Real,
    **kwargs,
) -> OperationalStats:
    """Build stats from hand-written tables; ``p_n`` is completed from ``P_N(A)``."""
    post = kwargs.get("post", "A")
    post_fail = kwargs.get("post_fail", "~A")
    return OperationalStats(p_m1, p_m2, {post: p_n_a, post_fail: 1 - p_n_a}, **kwargs)


def stats_equal(a: OperationalStats, b: OperationalStats, tol: float = 0.0) -> bool:
    """Compare the three core tables entrywise (missing entries count as zero)."""
    for ta, tb in ((a.p_m1, b.p_m1), (a.p_m2, b.p_m2), (a.p_n, b.p_n)):
        for k in set(ta) | set(tb):
            x, y = ta.get(k, 0), tb.get(k, 0)
            if (x != y) if tol == 0.0 else abs(float(x) - float(y)) >= tol:
                return False
    return True


__all__ = [
    "OperationalStats",
    "collect_stats",
    "distribution",
    "outcome_labels",
    "rationalize",
    "resolve_preparation",
    "stats_equal",
    "stats_from_tables",
]
