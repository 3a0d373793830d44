"""Every concrete model of the three-box game, quantum and classical.

Each constructor returns a :class:`NamedModel` bundling the engine object,
its named preparations and the statistics it is known to produce.
Ontic states are labelled ``"l0"``, ``"l1"``, ... and outcome labels use a
``~`` prefix for the complementary outcome (``"1"``/``"~1"``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as F
from typing import Mapping, Sequence, Union

from . import quantum_core
from .ontic import OnticMeasurement, OnticModel, Preparation, deterministic_measurement
from .stats import OperationalStats, collect_stats, stats_from_tables

System = Union[quantum_core.QuantumScenario, OnticModel]


@dataclass(frozen=True)
class NamedModel:
    """A model plus the metadata the checks and the game need.

    ``box_measurements`` are the measurements Bob may open boxes with,
    ``final`` is Alice's post-selection. ``eigen_preparations`` name the
    definite-box preparations, one per box in ``box_measurements`` order
    followed (optionally) by the box no measurement looks in.
    """

    name: str
    kind: str
    model: System
    default_preparation: str
    expected_stats: OperationalStats
    box_measurements: tuple[str, str] = ("M1", "M2")
    final: str = "MA"
    eigen_preparations: tuple[str, ...] = ()
    description: str = ""
    metadata: Mapping[str, object] = field(default_factory=dict)

    @property
    def preparations(self):
        return self.model.preparations

    @property
    def labels(self) -> tuple[str, str, str]:
        return (*self.box_measurements, self.final)

    def preparation(self, name: str | None = None):
        return self.model.preparations[name or self.default_preparation]

    def stats(self, prep: str | None = None, extra_sequences: Sequence[Sequence[str]] = ()) -> OperationalStats:
        return collect_stats(self.model, self.preparation(prep), self.labels, extra_sequences)


def _three_box_table(found: str, p_found_a, p_found_nota, p_missed_nota, missed_a=F(0)):
    a, na = "A", "~A"
    return {(found, a): p_found_a, ("~" + found, a): missed_a,
            (found, na): p_found_nota, ("~" + found, na): p_missed_nota}


QUANTUM_TABLE = stats_from_tables(
    _three_box_table("1", F(1, 9), F(2, 9), F(2, 3)),
    _three_box_table("2", F(1, 9), F(2, 9), F(2, 3)),
    F(1, 9),
)


def quantum_three_box() -> NamedModel:
    return NamedModel(
        name="quantum",
        kind="quantum",
        model=quantum_core.build_three_box_scenario(),
        default_preparation="|1+2+3>",
        expected_stats=QUANTUM_TABLE,
        eigen_preparations=("|1>", "|2>", "|3>"),
        description="Quantum three-box protocol with U_F folded into MA.",
    )


def _states(n: int, start: int = 1) -> tuple[str, ...]:
    return tuple(f"l{i}" for i in range(start, start + n))


def cheating_model() -> NamedModel:
    """Four deterministic, non-invasive states; ``l4`` hides a ball in both boxes 1 and 2."""
    states = _states(4)
    rows = {  # (M1, M2, MA)
        "l1": ("1", "~2", "~A"),
        "l2": ("~1", "2", "~A"),
        "l3": ("~1", "~2", "~A"),
        "l4": ("1", "2", "A"),
    }
    measurements = {
        label: deterministic_measurement(outs, {s: r[i] for s, r in rows.items()})
        for i, (label, outs) in enumerate(
            (("M1", ("1", "~1")), ("M2", ("2", "~2")), ("MA", ("A", "~A")))
        )
    }
    preps = {"mu+": Preparation.from_counts({"l1": 2, "l2": 2, "l3": 4, "l4": 1})}
    model = OnticModel(states, measurements, name="cheating", preparations=preps)
    return NamedModel(
        name="cheating",
        kind="ontic",
        model=model,
        default_preparation="mu+",
        expected_stats=QUANTUM_TABLE,
        description="Alice's cheating NIM model (four states).",
    )


# Sixteen-state macrorealist model: l1-l4 in box 1, l5-l8 in box 2, l9-l16 in box 3.
_MR_STATES = _states(16)
_MR_A_STATES = {"l2", "l3", "l6", "l7", "l10", "l11", "l13", "l16"}
_MR_M1_UPDATES = {"l3": "l1", "l4": "l2", "l11": "l9", "l12": "l10", "l15": "l13", "l16": "l14"}
_MR_M2_UPDATES = {"l7": "l5", "l8": "l6", "l13": "l9", "l14": "l10", "l15": "l11", "l16": "l12"}


def _box_of(state: str) -> int:
    i = int(state[1:])
    return 1 if i <= 4 else 2 if i <= 8 else 3


def _macrorealist_ontic(name: str, preps: Mapping[str, Preparation]) -> OnticModel:
    m1 = deterministic_measurement(
        ("1", "~1"), {s: "1" if _box_of(s) == 1 else "~1" for s in _MR_STATES}, _MR_M1_UPDATES
    )
    m2 = deterministic_measurement(
        ("2", "~2"), {s: "2" if _box_of(s) == 2 else "~2" for s in _MR_STATES}, _MR_M2_UPDATES
    )
    ma = deterministic_measurement(
        ("A", "~A"), {s: "A" if s in _MR_A_STATES else "~A" for s in _MR_STATES}
    )
    return OnticModel(_MR_STATES, {"M1": m1, "M2": m2, "MA": ma}, name=name, preparations=preps)


def _superposition_preparations() -> dict[str, Preparation]:
    # |1+2+3> weights read as (2,1,2,1,2,1)/9; the printed formula drops a "+"
    return {
        "|1+3>": Preparation.from_counts({"l1": 2, "l4": 1, "l9": 2, "l12": 1}),
        "|2+3>": Preparation.from_counts({"l5": 2, "l8": 1, "l9": 2, "l14": 1}),
        "|1+2+3>": Preparation.from_counts({"l1": 2, "l4": 1, "l5": 2, "l8": 1, "l9": 2, "l16": 1}),
    }


def mr3_model() -> NamedModel:
    preps = {
        "|1>": Preparation.from_counts({"l1": 2, "l2": 1}),
        "|2>": Preparation.from_counts({"l5": 2, "l6": 1}),
        "|3>": Preparation.from_counts({"l9": 2, "l10": 1}),
        **_superposition_preparations(),
    }
    return NamedModel(
        name="mr3",
        kind="ontic",
        model=_macrorealist_ontic("mr3", preps),
        default_preparation="|1+2+3>",
        expected_stats=QUANTUM_TABLE,
        eigen_preparations=("|1>", "|2>", "|3>"),
        description="Sixteen-state macrorealist model; superpositions use novel states (MR3).",
    )


def mr2_model(a1=F(1, 100), a2=F(1, 100), a=F(1, 100), b=F(1, 100), c=F(1, 100)) -> NamedModel:
    """The sixteen-state model with preparation-contextual eigenstates (MR2).

    All five parameters must be positive, with ``a1``, ``a2`` and ``a+b+c``
    each below 1/3.
    """
    a1, a2, a, b, c = (F(x) for x in (a1, a2, a, b, c))
    if min(a1, a2, a, b, c) <= 0:
        raise ValueError("MR2 parameters must be positive")
    if a1 >= F(1, 3) or a2 >= F(1, 3) or a + b + c >= F(1, 3):
        raise ValueError("MR2 parameters need a1, a2, a+b+c < 1/3")
    s = a + b + c
    third = F(1, 3)
    preps = {
        "|1>": Preparation({"l1": 2 * third - a1, "l2": third - a1, "l3": a1, "l4": a1}),
        "|2>": Preparation({"l5": 2 * third - a2, "l6": third - a2, "l7": a2, "l8": a2}),
        "|3>": Preparation({
            "l9": 2 * third - s, "l10": third - s,
            "l11": a, "l12": a, "l13": b, "l14": b, "l15": c, "l16": c,
        }),
        **_superposition_preparations(),
    }
    return NamedModel(
        name="mr2",
        kind="ontic",
        model=_macrorealist_ontic("mr2", preps),
        default_preparation="|1+2+3>",
        expected_stats=QUANTUM_TABLE,
        eigen_preparations=("|1>", "|2>", "|3>"),
        description="Sixteen-state model with contextual eigenstate preparations (MR2).",
        metadata={"parameters": {"a1": a1, "a2": a2, "a": a, "b": b, "c": c}},
    )


def stochastic_measurement(
    outcomes: Sequence[str],
    rows: Mapping[str, Mapping[str, tuple]],
) -> OnticMeasurement:
    """Build a measurement from ``{state: {outcome: (prob, target)}}`` rows.

    ``target`` is a state label or a ``{state: weight}`` mapping; outcomes
    left out of a row have probability zero.
    """
    xi, gamma = {}, {}
    for s, row in rows.items():
        xi[s] = {q: F(0) for q in outcomes}
        for q, (p, target) in row.items():
            xi[s][q] = F(p)
            if target is not None:
                gamma[(s, q)] = {target: F(1)} if isinstance(target, str) else dict(target)
    return OnticMeasurement(tuple(outcomes), xi, gamma)


def _card_game(name: str, p_first, expected: OperationalStats, description: str) -> NamedModel:
    # Shared table of the two card games; only l0's branching probability differs.
    q = F(p_first)
    half = F(1, 2)
    m1 = stochastic_measurement(("1", "~1"), {
        "l0": {"1": (q, "l1"), "~1": (1 - q, "l3")},
        "l1": {"~1": (1, "l1")},
        "l2": {"1": (1, "l2")},
        "l3": {"1": (1, "l3")},
        "l4": {"1": (half, "l4"), "~1": (half, "l4")},
    })
    m2 = stochastic_measurement(("2", "~2"), {
        "l0": {"2": (q, "l2"), "~2": (1 - q, "l4")},
        "l1": {"2": (1, "l1")},
        "l2": {"~2": (1, "l2")},
        "l3": {"2": (half, "l3"), "~2": (half, "l3")},
        "l4": {"~2": (1, "l4")},
    })
    ma = stochastic_measurement(("A", "~A"), {
        "l0": {"~A": (1, None)},
        "l1": {"A": (half, None), "~A": (half, None)},
        "l2": {"A": (half, None), "~A": (half, None)},
        "l3": {"~A": (1, None)},
        "l4": {"~A": (1, None)},
    })
    preps = {"l0": Preparation.point("l0")}
    model = OnticModel(_states(5, 0), {"M1": m1, "M2": m2, "MA": ma}, name=name, preparations=preps)
    return NamedModel(name, "ontic", model, "l0", expected, description=description)


def kirkpatrick_model() -> NamedModel:
    expected = stats_from_tables(
        _three_box_table("1", F(1, 8), F(1, 8), F(3, 4)),
        _three_box_table("2", F(1, 8), F(1, 8), F(3, 4)),
        F(0),
    )
    return _card_game("kirkpatrick", F(1, 4), expected, "Kirkpatrick's two-pile card game.")


def ravon_vaidman_model() -> NamedModel:
    expected = stats_from_tables(
        _three_box_table("1", F(1, 6), F(1, 6), F(2, 3)),
        _three_box_table("2", F(1, 6), F(1, 6), F(2, 3)),
        F(0),
    )
    return _card_game("ravon_vaidman", F(1, 3), expected, "Ravon and Vaidman's reduced card game.")


def leifer_spekkens_model() -> NamedModel:
    """Ball in a square box: l1 bottom-left, l2 bottom-right, l3 top-left, l4 top-right.

    Shaking a compartment that holds the ball rattles and re-randomizes it
    within the shaken half; shaking an empty compartment leaves it alone.
    The top measurement finds the ball in l3/l4 (needed for the game's
    published statistics).
    """
    half = F(1, 2)
    left = {"l1": half, "l3": half}
    right = {"l2": half, "l4": half}
    top = {"l3": half, "l4": half}
    ml = stochastic_measurement(("L", "~L"), {
        "l1": {"L": (1, left)}, "l2": {"~L": (1, "l2")},
        "l3": {"L": (1, left)}, "l4": {"~L": (1, "l4")},
    })
    mr = stochastic_measurement(("R", "~R"), {
        "l1": {"~R": (1, "l1")}, "l2": {"R": (1, right)},
        "l3": {"~R": (1, "l3")}, "l4": {"R": (1, right)},
    })
    mt = stochastic_measurement(("T", "~T"), {
        "l1": {"~T": (1, "l1")}, "l2": {"~T": (1, "l2")},
        "l3": {"T": (1, top)}, "l4": {"T": (1, top)},
    })
    preps = {
        "bottom": Preparation({"l1": half, "l2": half}),
        "bottom-left": Preparation.point("l1"),
        "bottom-right": Preparation.point("l2"),
        "top": Preparation({"l3": half, "l4": half}),
    }
    model = OnticModel(_states(4), {"ML": ml, "MR": mr, "MT": mt}, name="leifer_spekkens", preparations=preps)
    labels = dict(labels=("ML", "MR", "MT"), found=("L", "R"), missed=("~L", "~R"), post="T", post_fail="~T")
    expected = stats_from_tables(
        {("L", "T"): F(1, 4), ("~L", "T"): F(0), ("L", "~T"): F(1, 4), ("~L", "~T"): F(1, 2)},
        {("R", "T"): F(1, 4), ("~R", "T"): F(0), ("R", "~T"): F(1, 4), ("~R", "~T"): F(1, 2)},
        F(0),
        **labels,
    )
    return NamedModel(
        name="leifer_spekkens",
        kind="ontic",
        model=model,
        default_preparation="bottom",
        expected_stats=expected,
        box_measurements=("ML", "MR"),
        final="MT",
        eigen_preparations=("bottom-left", "bottom-right"),
        description="Leifer and Spekkens' shaken-box ball game.",
    )


CONSTRUCTORS = {
    "quantum": quantum_three_box,
    "cheating": cheating_model,
    "mr3": mr3_model,
    "mr2": mr2_model,
    "kirkpatrick": kirkpatrick_model,
    "ravon_vaidman": ravon_vaidman_model,
    "leifer_spekkens": leifer_spekkens_model,
}


def all_models() -> dict[str, NamedModel]:
    return {name: build() for name, build in CONSTRUCTORS.items()}
