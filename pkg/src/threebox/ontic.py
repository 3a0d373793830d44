"""Finite ontic models with exact rational arithmetic.

A model is a finite list of ontic states plus measurements. Each measurement
has an outcome table ``xi[state][outcome]`` and a disturbance kernel
``gamma[(state, outcome)] -> {new_state: weight}``. Kernel rows that are not
given default to the identity (the state is left alone).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .distribution import OutcomeDistribution

State = str


class StateMismatch(ValueError):
    pass


class ImpossibleOutcome(ValueError):
    """Conditioning on an outcome that has probability zero."""


class UnknownMeasurement(KeyError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Preparation:
    """Probability distribution over ontic states. Zero weights are dropped."""

    weights: Mapping[State, Fraction]

    def __post_init__(self):
        w = {}
        for s, p in self.weights.items():
            p = _frac(p)
            if p < 0:
                raise ValueError(f"negative weight {p} on state {s!r}")
            if p:
                w[s] = p
        if sum(w.values(), Fraction(0)) != 1:
            raise ValueError(f"weights sum to {sum(w.values(), Fraction(0))}, not 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def point(cls, state: State) -> "Preparation":
        return cls({state: Fraction(1)})

    @classmethod
    def uniform(cls, states: Iterable[State]) -> "Preparation":
        states = list(states)
        return cls({s: Fraction(1, len(states)) for s in states})

    @classmethod
    def from_counts(cls, counts: Mapping[State, int]) -> "Preparation":
        """``{"l1": 2, "l2": 1}`` -> weights 2/3, 1/3."""
        total = sum(counts.values())
        return cls({s: Fraction(c, total) for s, c in counts.items()})

    def __getitem__(self, state: State) -> Fraction:
        return self.weights.get(state, Fraction(0))

    @property
    def support(self) -> frozenset[State]:
        return frozenset(self.weights)

    def __eq__(self, other):
        if not isinstance(other, Preparation):
            return NotImplemented
        return self.weights == other.weights

    def __hash__(self):
        return hash(frozenset(self.weights.items()))

    def __repr__(self):
        body = ", ".join(f"{s}: {p}" for s, p in self.weights.items())
        return f"Preparation({{{body}}})"


@dataclass(frozen=True)
class OnticMeasurement:
    """Outcome function plus disturbance kernel for one measurement.

    As in the quantum engine, ``outcomes[0]`` is the "found" outcome.
    """

    outcomes: tuple[str, ...]
    xi: Mapping[State, Mapping[str, Fraction]]
    gamma: Mapping[tuple[State, str], Mapping[State, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        object.__setattr__(
            self,
            "xi",
            {s: {q: _frac(p) for q, p in row.items()} for s, row in self.xi.items()},
        )
        object.__setattr__(
            self,
            "gamma",
            {tuple(k): {t: _frac(p) for t, p in row.items()} for k, row in self.gamma.items()},
        )

    def outcome_prob(self, state: State, q: str) -> Fraction:
        return self.xi.get(state, {}).get(q, Fraction(0))

    def kernel(self, state: State, q: str) -> Mapping[State, Fraction]:
        return self.gamma.get((state, q), {state: Fraction(1)})


def deterministic_measurement(
    outcomes: Sequence[str],
    answers: Mapping[State, str],
    updates: Mapping[State, State] | None = None,
) -> OnticMeasurement:
    """Measurement where each state gives one outcome with certainty.

    ``updates`` maps a state to the state it is sent to (for its outcome).
    """
    xi = {s: {q: Fraction(int(q == a)) for q in outcomes} for s, a in answers.items()}
    gamma = {}
    for s, t in (updates or {}).items():
        gamma[(s, answers[s])] = {t: Fraction(1)}
    return OnticMeasurement(tuple(outcomes), xi, gamma)


@dataclass(frozen=True)
class OnticModel:
    states: tuple[State, ...]
    measurements: Mapping[str, OnticMeasurement]
    do_nothing_label: str = "N"
    name: str = "ontic"
    preparations: Mapping[str, Preparation] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))

    def measurement(self, label: str) -> OnticMeasurement:
        try:
            return self.measurements[label]
        except KeyError:
            raise UnknownMeasurement(label) from None


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        return "\n".join(self.violations) if self.violations else "no violations"


def validate_model(m: OnticModel) -> ValidationReport:
    report = ValidationReport()
    v = report.violations
    declared = set(m.states)
    if len(declared) != len(m.states):
        v.append("duplicate state labels")
    for label, meas in m.measurements.items():
        for s, row in meas.xi.items():
            if s not in declared:
                v.append(f"{label}: outcome table references undeclared state {s!r}")
            for q, p in row.items():
                if q not in meas.outcomes:
                    v.append(f"{label}: unknown outcome {q!r} in row {s!r}")
                if p < 0:
                    v.append(f"{label}: negative outcome probability {p} at ({s!r}, {q!r})")
        for s in m.states:
            total = sum(meas.xi.get(s, {}).values(), Fraction(0))
            if total != 1:
                v.append(f"{label}: outcome row {s!r} sums to {total}")
        for (s, q), row in meas.gamma.items():
            if s not in declared:
                v.append(f"{label}: kernel source {s!r} undeclared")
            if q not in meas.outcomes:
                v.append(f"{label}: kernel outcome {q!r} unknown")
            for t, p in row.items():
                if t not in declared:
                    v.append(f"{label}: kernel ({s!r}, {q!r}) targets undeclared state {t!r}")
                if p < 0:
                    v.append(f"{label}: negative kernel weight {p} at ({s!r}, {q!r}) -> {t!r}")
            total = sum(row.values(), Fraction(0))
            if total != 1:
                v.append(f"{label}: kernel row ({s!r}, {q!r}) sums to {total}")
    for name, prep in m.preparations.items():
        for s in prep.support:
            if s not in declared:
                v.append(f"preparation {name!r} references undeclared state {s!r}")
    return report


def _check_states(prep: Preparation, m: OnticMeasurement):
    missing = [s for s in prep.support if s not in m.xi]
    if missing:
        raise StateMismatch(f"states {sorted(missing)} have no outcome row")


def outcome_probability(prep: Preparation, m: OnticMeasurement) -> dict[str, Fraction]:
    _check_states(prep, m)
    out = {q: Fraction(0) for q in m.outcomes}
    for s, w in prep.weights.items():
        for q in m.outcomes:
            out[q] += w * m.outcome_prob(s, q)
    return out


def _unnormalized_update(prep: Preparation, m: OnticMeasurement, q: str) -> dict[State, Fraction]:
    post: dict[State, Fraction] = {}
    for s, w in prep.weights.items():
        x = m.outcome_prob(s, q)
        if not x:
            continue
        for t, g in m.kernel(s, q).items():
            post[t] = post.get(t, Fraction(0)) + w * x * g
    return post


def evolve_preparation(prep: Preparation, m: OnticMeasurement, q: str) -> tuple[Fraction, Preparation]:
    """Probability of outcome ``q`` and the conditional post-measurement preparation."""
    _check_states(prep, m)
    post = _unnormalized_update(prep, m, q)
    p = sum(post.values(), Fraction(0))
    if p == 0:
        raise ImpossibleOutcome(f"outcome {q!r} has probability zero")
    return p, Preparation({t: w / p for t, w in post.items()})


def sequence_branches(
    model: OnticModel, prep: Preparation, seq: Sequence[str]
) -> dict[tuple[str, ...], tuple[Fraction, Preparation]]:
    """Every possible outcome string with its probability and conditional preparation."""
    ms = [model.measurement(lab) for lab in seq if lab != model.do_nothing_label]
    branches = {(): (Fraction(1), prep)}
    for m in ms:
        nxt = {}
        for prefix, (p, mu) in branches.items():
            for q, pq in outcome_probability(mu, m).items():
                if pq:
                    _, post = evolve_preparation(mu, m, q)
                    nxt[prefix + (q,)] = (p * pq, post)
        branches = nxt
    return branches


def sequence_distribution(model: OnticModel, prep: Preparation, seq: Sequence[str]) -> OutcomeDistribution:
    return OutcomeDistribution({k: p for k, (p, _) in sequence_branches(model, prep, seq).items()})


def mix_preparations(parts: Sequence[tuple[Fraction, Preparation]]) -> Preparation:
    weights = [_frac(w) for w, _ in parts]
    if any(w < 0 for w in weights) or sum(weights, Fraction(0)) != 1:
        raise ValueError(f"mixture weights {weights} are not a probability vector")
    out: dict[State, Fraction] = {}
    for w, (_, mu) in zip(weights, parts):
        for s, p in mu.weights.items():
            out[s] = out.get(s, Fraction(0)) + w * p
    return Preparation(out)


def is_nim(m: OnticMeasurement) -> bool:
    """True iff every consulted kernel row leaves the state where it is."""
    for s, row in m.xi.items():
        for q, x in row.items():
            if x and {t: g for t, g in m.kernel(s, q).items() if g} != {s: 1}:
                return False
    return True
