"""Joint distributions over outcome strings, shared by both engines."""

from __future__ import annotations

from fractions import Fraction
from numbers import Real
from typing import Iterable, Iterator, Mapping

Outcomes = tuple[str, ...]


def rationalize(x, max_denominator: int = 10**6, tol: float = 1e-9):
    """Snap a float to the nearest small-denominator Fraction when within ``tol``.

    Fractions and ints pass through unchanged; floats that do not snap are
    returned as floats.
    """
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    f = Fraction(float(x)).limit_denominator(max_denominator)
    return f if abs(float(f) - float(x)) < tol else float(x)


class OutcomeDistribution(Mapping[Outcomes, Real]):
    """Immutable map from outcome tuples to probabilities.

    Missing outcome strings have probability zero; use :meth:`prob` for a
    lenient lookup.
    """

    __slots__ = ("_probs",)

    def __init__(self, probs: Mapping[Iterable[str], Real] | None = None):
        self._probs = {tuple(k): v for k, v in (probs or {}).items()}

    def __getitem__(self, key) -> Real:
        return self._probs[tuple(key)]

    def __iter__(self) -> Iterator[Outcomes]:
        return iter(self._probs)

    def __len__(self) -> int:
        return len(self._probs)

    def __repr__(self):
        body = ", ".join(f"{','.join(k) or '()'}: {v}" for k, v in self._probs.items())
        return f"OutcomeDistribution({{{body}}})"

    def prob(self, *outcomes: str) -> Real:
        return self._probs.get(tuple(outcomes), 0)

    def total(self) -> Real:
        return sum(self._probs.values(), Fraction(0) if self.is_exact else 0.0)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, (Fraction, int)) for v in self._probs.values())

    def marginal(self, *positions: int) -> "OutcomeDistribution":
        out: dict[Outcomes, Real] = {}
        for k, v in self._probs.items():
            key = tuple(k[i] for i in positions)
            out[key] = out.get(key, 0) + v
        return OutcomeDistribution(out)

    def rationalized(self, max_denominator: int = 10**6, tol: float = 1e-9) -> "OutcomeDistribution":
        return OutcomeDistribution(
            {k: rationalize(v, max_denominator, tol) for k, v in self._probs.items()}
        )

    def support(self) -> "OutcomeDistribution":
        """Drop zero-probability entries."""
        return OutcomeDistribution({k: v for k, v in self._probs.items() if v != 0})

    def max_difference(self, other: Mapping[Outcomes, Real]) -> float:
        keys = set(self) | set(other)
        return max(
            (abs(float(self.prob(*k)) - float(other.get(k, 0))) for k in keys),
            default=0.0,
        )

    def equals(self, other: Mapping[Outcomes, Real], tol: float = 0.0) -> bool:
        """Equality treating missing keys as zero; exact when ``tol`` is 0."""
        keys = set(self) | set(other)
        if tol == 0.0:
            return all(self.prob(*k) == other.get(k, 0) for k in keys)
        return self.max_difference(other) < tol
