"""Monte Carlo version of Alice and Bob's betting game.

Each round Alice prepares the system, Bob makes his intervening
measurement(s) without Alice learning which, and Alice post-selects. A bet is
placed only when Alice's post-selection succeeds; she wins it if Bob found
the ball. When Bob opens two boxes in turn he settles the round at once:
he wins if he finds a ball twice (or, repeating one measurement, if the ball
moves), and loses otherwise.

Rounds are grouped in fixed blocks of ``BLOCK`` consecutive indices and each
block draws from its own generator derived from ``(seed, block index)``.
Workers receive whole blocks, so transcripts do not depend on how the work
is split.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from . import classicality, quantum_core
from .ontic import OnticModel
from .stats import outcome_labels
from .zoo import NamedModel

TRANSCRIPT_SCHEMA_VERSION = 1
BLOCK = 1024

Choice = tuple[str, ...]


class InsufficientRounds(ValueError):
    pass


@dataclass(frozen=True)
class BobStrategy:
    """Probability distribution over Bob's choices.

    A choice is a tuple of measurement labels: ``()`` (look nowhere, a
    calibration round for the umpire), one label, or two labels in order.
    Labels ``"box1"``/``"box2"`` stand for the model's box measurements.
    """

    name: str
    weights: Mapping[Choice, float]

    def __post_init__(self):
        w = {tuple(k): float(v) for k, v in self.weights.items()}
        if any(v < 0 or v > 1 for v in w.values()) or not math.isclose(sum(w.values()), 1.0):
            raise ValueError(f"strategy weights {w} are not a probability vector")
        object.__setattr__(self, "weights", w)

    @classmethod
    def random_box(cls, p: float = 0.5, p_none: float = 0.0) -> "BobStrategy":
        """Open box 1 with probability ``p`` (else box 2); skip the round with ``p_none``."""
        _check_prob(p, p_none)
        rest = 1.0 - p_none
        w = {("box1",): rest * p, ("box2",): rest * (1 - p)}
        if p_none:
            w[()] = p_none
        return cls(f"random_box({p:g})", w)

    @classmethod
    def fixed(cls, measurement: str | None) -> "BobStrategy":
        choice = () if measurement in (None, "", "N") else (measurement,)
        return cls(f"fixed({measurement or 'N'})", {choice: 1.0})

    @classmethod
    def cheat_check(cls, q: float = 1.0, p: float = 0.5) -> "BobStrategy":
        """With probability ``q`` open both boxes (order by a fair coin), else ``random_box(p)``."""
        _check_prob(q, p)
        w = {
            ("box1", "box2"): q / 2,
            ("box2", "box1"): q / 2,
            ("box1",): (1 - q) * p,
            ("box2",): (1 - q) * (1 - p),
        }
        return cls(f"cheat_check({q:g})", {k: v for k, v in w.items() if v})

    def resolve(self, boxes: Sequence[str]) -> list[tuple[Choice, float]]:
        alias = {"box1": boxes[0], "box2": boxes[1]}
        return [(tuple(alias.get(m, m) for m in c), p) for c, p in self.weights.items()]


def _check_prob(*ps):
    for p in ps:
        if not 0 <= p <= 1:
            raise ValueError(f"probability {p} outside [0, 1]")


@dataclass(frozen=True)
class Round:
    index: int
    bob_choice: Choice
    bob_outcomes: tuple[str, ...]
    alice_outcome: str
    bet_placed: bool
    alice_won: bool | None
    immediate_win: str | None  # "alice" or "bob"


@dataclass(frozen=True)
class GameTranscript:
    model: str
    strategy: str
    seed: int
    rounds: tuple[Round, ...]
    preparation: str = ""
    post: str = "A"

    CSV_FIELDS = ("index", "bob_choice", "bob_outcomes", "alice_outcome", "bet_placed", "alice_won", "immediate_win")

    def __len__(self):
        return len(self.rounds)

    def to_dict(self) -> dict:
        return {
            "schema_version": TRANSCRIPT_SCHEMA_VERSION,
            "model": self.model,
            "preparation": self.preparation,
            "strategy": self.strategy,
            "seed": self.seed,
            "post": self.post,
            "rounds": [
                {**asdict(r), "bob_choice": list(r.bob_choice), "bob_outcomes": list(r.bob_outcomes)}
                for r in self.rounds
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: Mapping) -> "GameTranscript":
        if d.get("schema_version") != TRANSCRIPT_SCHEMA_VERSION:
            raise ValueError(f"unsupported transcript schema {d.get('schema_version')!r}")
        rounds = tuple(
            Round(**{**r, "bob_choice": tuple(r["bob_choice"]), "bob_outcomes": tuple(r["bob_outcomes"])})
            for r in d["rounds"]
        )
        return cls(d["model"], d["strategy"], d["seed"], rounds, d.get("preparation", ""), d.get("post", "A"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_FIELDS)
        for r in self.rounds:
            writer.writerow([
                r.index,
                ",".join(r.bob_choice) or "N",
                ",".join(r.bob_outcomes),
                r.alice_outcome,
                int(r.bet_placed),
                "" if r.alice_won is None else int(r.alice_won),
                r.immediate_win or "",
            ])
        return buf.getvalue()


class _Sampler:
    """Step-by-step sampling through either engine, with per-branch caching."""

    def __init__(self, model: NamedModel, prep=None):
        self.system = model.model
        self.prep = model.preparation(prep) if prep is None or isinstance(prep, str) else prep
        self._cache: dict = {}

    def _rows(self, key, build):
        try:
            return self._cache[key]
        except KeyError:
            labels, probs, payload = build()
            cum = np.cumsum(np.asarray(probs, dtype=float))
            row = self._cache[key] = (labels, cum / cum[-1], payload)
            return row

    @staticmethod
    def _draw(row, rng):
        labels, cum, payload = row
        i = min(int(np.searchsorted(cum, rng.random(), side="right")), len(labels) - 1)
        return labels[i], (payload[i] if payload is not None else None)

    def sample(self, seq: Sequence[str], rng: np.random.Generator) -> tuple[str, ...]:
        if isinstance(self.system, quantum_core.QuantumScenario):
            return self._sample_quantum(seq, rng)
        return self._sample_ontic(seq, rng)

    def _sample_quantum(self, seq, rng):
        s = self.system
        psi = np.asarray(self.prep, dtype=complex)
        history: tuple = ()
        out = []
        for label in seq:
            if label == s.do_nothing_label:
                continue

            def build(psi=psi, label=label):
                res = quantum_core.measure(psi, s.measurement(label))
                return [q for q, _, _ in res], [p for _, p, _ in res], [post for _, _, post in res]

            history = history + (label,)
            q, psi = self._draw(self._rows(("q", history), build), rng)
            history = history + (q,)
            out.append(q)
        return tuple(out)

    def _sample_ontic(self, seq, rng):
        model: OnticModel = self.system
        states = sorted(self.prep.weights)
        lam, _ = self._draw(
            self._rows(("prep",), lambda: (states, [float(self.prep[x]) for x in states], None)), rng
        )
        out = []
        for label in seq:
            if label == model.do_nothing_label:
                continue
            m = model.measurement(label)

            def build_outcome(m=m, lam=lam):
                qs = [q for q in m.outcomes if m.outcome_prob(lam, q)]
                return qs, [float(m.outcome_prob(lam, q)) for q in qs], None

            q, _ = self._draw(self._rows(("xi", label, lam), build_outcome), rng)

            def build_kernel(m=m, lam=lam, q=q):
                row = {t: g for t, g in m.kernel(lam, q).items() if g}
                ts = sorted(row)
                return ts, [float(row[t]) for t in ts], None

            lam, _ = self._draw(self._rows(("gamma", label, lam, q), build_kernel), rng)
            out.append(q)
        return tuple(out)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _settle_round(model: NamedModel, index: int, choice: Choice, outcomes: Sequence[str]) -> Round:
    system = model.model
    bob, alice = tuple(outcomes[:-1]), outcomes[-1]
    post, _ = outcome_labels(system, model.final)
    if len(choice) == 0:
        return Round(index, choice, bob, alice, False, None, None)
    if len(choice) == 1:
        found, _ = outcome_labels(system, choice[0])
        bet = alice == post
        return Round(index, choice, bob, alice, bet, (bob[0] == found) if bet else None, None)
    if choice[0] != choice[1]:
        both = all(q == outcome_labels(system, m)[0] for m, q in zip(choice, bob))
        bob_wins = both
    else:
        bob_wins = len(set(bob)) > 1
    return Round(index, choice, bob, alice, False, None, "bob" if bob_wins else "alice")


def play_one_round(
    model: NamedModel, choice: Choice, seed: int, index: int, prep=None, sampler: _Sampler | None = None
) -> Round:
    """One round with Bob's choice already made; Alice never sees ``choice``."""
    sampler = sampler or _Sampler(model, prep)
    # own stream per interactive round, disjoint from the block streams
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, 1)))
    outcomes = sampler.sample([*choice, model.final], rng)
    return _settle_round(model, index, tuple(choice), outcomes)


def _play_blocks(model: NamedModel, strategy: BobStrategy, seed: int, n: int, blocks: range, prep=None) -> list[Round]:
    sampler = _Sampler(model, prep)
    choices = strategy.resolve(model.box_measurements)
    cum = np.cumsum([p for _, p in choices])
    rounds = []
    for b in blocks:
        rng = block_rng(seed, b)
        for i in range(b * BLOCK, min((b + 1) * BLOCK, n)):
            rounds.append(_sample_round(model, sampler, choices, cum, rng, i))
    return rounds


def _sample_round(model, sampler, choices, cum, rng, i) -> Round:
    k = min(int(np.searchsorted(cum, rng.random() * cum[-1], side="right")), len(choices) - 1)
    choice = choices[k][0]
    outcomes = sampler.sample([*choice, model.final], rng)
    return _settle_round(model, i, choice, outcomes)


def play_rounds(
    model: NamedModel,
    strategy: BobStrategy,
    n: int,
    seed: int = 0,
    prep: str | None = None,
    workers: int = 1,
) -> GameTranscript:
    """Play ``n`` independent rounds; identical arguments give identical transcripts."""
    if n < 1:
        raise ValueError("need at least one round")
    nblocks = -(-n // BLOCK)
    if workers <= 1 or nblocks == 1:
        rounds = _play_blocks(model, strategy, seed, n, range(nblocks), prep)
    else:
        bounds = np.linspace(0, nblocks, min(workers, nblocks) + 1).astype(int)
        with ProcessPoolExecutor(workers) as pool:
            futures = [
                pool.submit(_play_blocks, model, strategy, seed, n, range(a, b), prep)
                for a, b in zip(bounds[:-1], bounds[1:])
            ]
            rounds = [r for f in futures for r in f.result()]
    post = outcome_labels(model.model, model.final)[0]
    return GameTranscript(model.name, strategy.name, seed, tuple(rounds), prep or model.default_preparation, post)


def parse_choice(text: str, model: NamedModel) -> Choice:
    """``"M1"``, ``"M1,M2"`` or ``"N"``/empty for no measurement."""
    labels = tuple(t.strip() for t in text.replace(" ", ",").split(",") if t.strip())
    if labels in ((), ("N",)):
        return ()
    if len(labels) > 2 or any(m not in model.box_measurements for m in labels):
        raise ValueError(f"choose from {', '.join(model.box_measurements)}, N, or two of them")
    return labels


def play_interactive(
    model: NamedModel,
    n: int,
    seed: int = 0,
    prep: str | None = None,
    ask: Callable[[str], str] = input,
    tell: Callable[[str], None] = print,
) -> GameTranscript:
    """Let a human choose Bob's measurement every round."""
    sampler = _Sampler(model, prep)
    rounds = []
    options = "/".join((*model.box_measurements, "N"))
    i = 0
    while i < n:
        try:
            choice = parse_choice(ask(f"round {i + 1}: look in [{options}] or two, e.g. M1,M2: "), model)
        except ValueError as e:
            tell(str(e))
            continue
        r = play_one_round(model, choice, seed, i, prep, sampler)
        if r.immediate_win:
            tell(f"  you saw {','.join(r.bob_outcomes)}; {r.immediate_win} wins immediately")
        elif r.bet_placed:
            tell(f"  you saw {','.join(r.bob_outcomes)}; Alice bets and {'wins' if r.alice_won else 'loses'}")
        else:
            tell(f"  you saw {','.join(r.bob_outcomes) or 'nothing'}; Alice got {r.alice_outcome}, no bet")
        rounds.append(r)
        i += 1
    post = outcome_labels(model.model, model.final)[0]
    return GameTranscript(model.name, "interactive", seed, tuple(rounds), prep or model.default_preparation, post)


@dataclass(frozen=True)
class Ledger:
    """Settled stakes. Bob's stake is 1; Alice pays ``odds`` when she loses.

    Immediate wins from double-box rounds are settled at the same stakes.
    """

    bets_placed: int
    alice_wins: int
    bob_wins: int
    immediate_alice: int
    immediate_bob: int
    calibration_rounds: int
    odds: Fraction
    alice_net: Fraction

    @property
    def alice_win_rate(self) -> float | None:
        return self.alice_wins / self.bets_placed if self.bets_placed else None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["odds"], d["alice_net"] = str(self.odds), str(self.alice_net)
        d["alice_win_rate"] = self.alice_win_rate
        return d


def settle_bets(t: GameTranscript, odds=Fraction(3, 2)) -> Ledger:
    odds = Fraction(odds)
    if odds <= 1:
        raise ValueError("odds must exceed 1 (better than even for Bob)")
    placed = [r for r in t.rounds if r.bet_placed]
    a_wins = sum(1 for r in placed if r.alice_won)
    b_wins = len(placed) - a_wins
    imm_a = sum(1 for r in t.rounds if r.immediate_win == "alice")
    imm_b = sum(1 for r in t.rounds if r.immediate_win == "bob")
    calib = sum(1 for r in t.rounds if not r.bob_choice)
    net = Fraction(a_wins + imm_a) - odds * (b_wins + imm_b)
    return Ledger(len(placed), a_wins, b_wins, imm_a, imm_b, calib, odds, net)


@dataclass(frozen=True)
class Frequency:
    rounds: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.rounds

    @property
    def sigma(self) -> float:
        p = self.rate
        return math.sqrt(p * (1 - p) / self.rounds)


@dataclass(frozen=True)
class UmpireReport:
    frequencies: dict[Choice, Frequency]
    z: float
    flagged: bool
    worst_pair: tuple[Choice, Choice] | None = None
    worst_score: float = 0.0

    def radius(self, choice: Choice) -> float:
        return self.z * self.frequencies[choice].sigma


def umpire_frequencies(t: GameTranscript, z: float = 3.0, min_rounds: int = 30) -> UmpireReport:
    """Empirical P(A) for every single-box or no-box choice, and whether any two differ.

    Two choices are flagged when their rates differ by more than ``z``
    combined binomial standard errors.
    """
    counts: dict[Choice, list[int]] = {}
    for r in t.rounds:
        if len(r.bob_choice) > 1:
            continue
        c = counts.setdefault(r.bob_choice, [0, 0])
        c[0] += 1
        c[1] += r.alice_outcome == t.post
    if not counts:
        raise InsufficientRounds("no single-measurement or calibration rounds")
    short = {c: n for c, (n, _) in counts.items() if n < min_rounds}
    if short:
        raise InsufficientRounds(f"fewer than {min_rounds} rounds for {short}")
    freqs = {c: Frequency(n, k) for c, (n, k) in counts.items()}
    worst, worst_score = None, 0.0
    keys = list(freqs)
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            diff = abs(freqs[a].rate - freqs[b].rate)
            se = math.hypot(freqs[a].sigma, freqs[b].sigma)
            score = diff / se if se else (math.inf if diff else 0.0)
            if worst is None or score > worst_score:
                worst, worst_score = (a, b), score
    return UmpireReport(freqs, z, worst_score > z, worst, worst_score)


@dataclass(frozen=True)
class CheatCheck:
    exact: Fraction | float
    empirical: float
    rounds: int

    @property
    def sigma(self) -> float:
        p = float(self.exact)
        return math.sqrt(p * (1 - p) / self.rounds)

    def within(self, k: float = 3.0) -> bool:
        return abs(self.empirical - float(self.exact)) <= k * self.sigma


def cheat_check(model: NamedModel, n: int, seed: int = 0, prep: str | None = None) -> CheatCheck:
    """Bob opens both boxes every round; how often does he find two balls?"""
    t = play_rounds(model, BobStrategy.cheat_check(1.0), n, seed, prep)
    empirical = sum(1 for r in t.rounds if r.immediate_win == "bob") / n
    mu = model.preparation(prep)
    exact = classicality.double_occupancy(model.model, mu, model.box_measurements).value
    return CheatCheck(exact, empirical, n)
