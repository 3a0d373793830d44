"""Classicality diagnostics for pre/post-selection games.

Operational checks (detectability, the PPS condition, the non-invasiveness
bound, the Leggett-Garg value, counterfactual consistency) take an
:class:`~threebox.stats.OperationalStats`. Structural checks (macrorealist
decomposition, MR class, NIM1/NIM2) need an :class:`~threebox.ontic.OnticModel`.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Mapping, Sequence

from . import quantum_core
from .distribution import rationalize
from .ontic import (
    ImpossibleOutcome,
    OnticModel,
    Preparation,
    evolve_preparation,
    mix_preparations,
)
from .stats import OperationalStats, collect_stats, distribution, outcome_labels, resolve_preparation

MR1, MR2, MR3 = "MR1", "MR2", "MR3"
NOT_MACROREALIST = "not-macrorealist"
UNDETERMINED = "undetermined"


class UndefinedConditional(ZeroDivisionError):
    """A post-selected conditional probability whose condition has probability zero."""


def _is_zero(x: Real, tol: float = 1e-9) -> bool:
    return x == 0 if isinstance(x, (Fraction, int)) else abs(x) < tol


def ndm_gap(stats: OperationalStats) -> dict[str, Real]:
    """Signed ``sum_j P_Mi(A, Q_ij) - P_N(A)`` per box measurement; zero means non-detectable."""
    return {stats.labels[i]: stats.post_marginal(i) - stats.p_n_a for i in (0, 1)}


def is_ndm(stats: OperationalStats) -> dict[str, bool]:
    return {m: _is_zero(g) for m, g in ndm_gap(stats).items()}


def _conditional(stats: OperationalStats, i: int, q: str, a: str) -> Real:
    denom = stats.post_marginal(i, a)
    if _is_zero(denom):
        raise UndefinedConditional(f"P_{stats.labels[i]}({a}) = 0")
    return stats.joint(i, q, a) / denom


def pps_score(stats: OperationalStats) -> Real:
    """``P_M1(1|A) + P_M2(2|A)``; above 1 is the paradoxical regime."""
    return sum(_conditional(stats, i, stats.found[i], stats.post) for i in (0, 1))


def is_true_pps(stats: OperationalStats) -> bool:
    """Score above 1 with both intervening measurements non-detectable."""
    try:
        score = pps_score(stats)
    except UndefinedConditional:
        return False
    return score > 1 and all(is_ndm(stats).values())


def nim_bound_check(stats: OperationalStats, include_double: bool = False) -> tuple[bool, Real]:
    """Slack of ``P_M1(A,1) + P_M2(A,2) <= P_N(A)``, which every non-invasive model obeys.

    Negative slack certifies that the measurements cannot both be
    non-invasive. With ``include_double`` the probability of finding the
    ball in both boxes and then A, ``P(1, 2, A)`` from the ``(M1, M2, MA)``
    sequence in ``stats.extra``, is added to the right-hand side; the bound
    then holds for non-invasive models even when they hide two balls.
    """
    slack = stats.p_n_a - stats.found_and_post(0) - stats.found_and_post(1)
    if include_double:
        seq = tuple(stats.labels)
        try:
            both = stats.extra[seq]
        except KeyError:
            raise KeyError(f"stats.extra lacks the {seq} table") from None
        slack += both.prob(stats.found[0], stats.found[1], stats.post)
    return slack >= 0 or _is_zero(slack), slack


def lgi_value(stats: OperationalStats, substitution: str = "nim1") -> Real:
    """The observable Leggett-Garg correlator ``<Q>``; the inequality reads ``-1 <= <Q> <= 3``.

    Values are +1 for the ball in box 1 or 2, -1 for box 3, and
    ``Q = Q1Q2 + Q2Q3 + Q1Q3``. The unobservable box-occupation
    probabilities are replaced by observed ones using either non-invasiveness
    assumption:

    * ``"nim1"``: ``4 (P_N(A) - P_M1(A,1) - P_M2(A,2)) - 1``
    * ``"nim2"``: ``4 (P_M1(A,~1) + P_M2(A,~2) - P_N(A)) - 1``

    The two agree whenever both measurements are non-detectable.
    """
    if substitution == "nim1":
        return 4 * (stats.p_n_a - stats.found_and_post(0) - stats.found_and_post(1)) - 1
    if substitution == "nim2":
        missed_a = stats.joint(0, stats.missed[0], stats.post) + stats.joint(1, stats.missed[1], stats.post)
        return 4 * (missed_a - stats.p_n_a) - 1
    raise ValueError(f"unknown substitution {substitution!r}")


def lgi_violated(value: Real) -> bool:
    return value < -1 or value > 3


def counterfactual_consistency(stats: OperationalStats, m: str) -> Real:
    """``|P_mixed(Q) - P_direct(Q)|`` for the found outcome ``Q`` of measurement ``m``.

    ``P_mixed`` combines Alice's post-selected inferences with the
    no-measurement statistics; ``P_direct`` is what Bob actually sees. A term
    whose no-measurement weight is zero contributes nothing even when its
    conditional is undefined.
    """
    i = stats.labels.index(m)
    q = stats.found[i]
    mixed = 0
    for a in (stats.post, stats.post_fail):
        weight = stats.p_n.get(a, 0)
        if _is_zero(weight):
            continue
        mixed += _conditional(stats, i, q, a) * weight
    direct = stats.joint(i, q, stats.post) + stats.joint(i, q, stats.post_fail)
    return abs(mixed - direct)


@dataclass(frozen=True)
class Decomposition:
    """``mu = sum_i p_i nu_i`` with each ``nu_i`` certain to be found in box ``i``.

    ``boxes`` names each box by the measurement that looks in it; the last
    entry, ``None``, is the box that none of them opens. ``components[i]`` is
    ``None`` when ``weights[i]`` is zero.
    """

    boxes: tuple[str | None, ...]
    weights: tuple[Fraction, ...]
    components: tuple[Preparation | None, ...]


def box_of_state(model: OnticModel, state: str, box_measurements: Sequence[str]) -> int | None:
    """Index of the box ``state`` is definitely in, or None if it is not box-definite.

    A state is in box ``i`` when measurement ``i`` finds the ball with
    certainty and every other box measurement certainly does not; it is in
    the unmeasured last box when none of them can find it.
    """
    found = []
    for label in box_measurements:
        m = model.measurement(label)
        p = m.outcome_prob(state, m.outcomes[0])
        if p not in (0, 1):
            return None
        found.append(p == 1)
    if sum(found) > 1:
        return None
    return found.index(True) if any(found) else len(box_measurements)


def macrorealist_decomposition(
    model: OnticModel, prep: Preparation, box_measurements: Sequence[str] = ("M1", "M2")
) -> Decomposition | None:
    nboxes = len(box_measurements) + 1
    parts: list[dict[str, Fraction]] = [{} for _ in range(nboxes)]
    for s, w in prep.weights.items():
        box = box_of_state(model, s, box_measurements)
        if box is None:
            return None
        parts[box][s] = w
    weights = tuple(sum(p.values(), Fraction(0)) for p in parts)
    comps = tuple(
        Preparation({s: w / total for s, w in p.items()}) if total else None
        for p, total in zip(parts, weights)
    )
    return Decomposition((*box_measurements, None), weights, comps)


def classify_mr(
    model: OnticModel,
    superposition_prep: Preparation,
    eigen_preps: Sequence[Preparation],
    box_measurements: Sequence[str] = ("M1", "M2"),
) -> str:
    """MR1/MR2/MR3 by comparing each box component with the matching eigenstate preparation.

    ``eigen_preps`` lists one preparation per box measurement, optionally
    followed by one for the unmeasured box. Boxes with zero weight, or with
    no eigen preparation supplied, are not compared.
    """
    dec = macrorealist_decomposition(model, superposition_prep, box_measurements)
    if dec is None:
        return NOT_MACROREALIST
    novel = differs = False
    for nu, mu in zip(dec.components, eigen_preps):
        if nu is None:
            continue
        if not nu.support <= mu.support:
            novel = True
        elif nu != mu:
            differs = True
    return MR3 if novel else MR2 if differs else MR1


@dataclass(frozen=True)
class NonInvasiveness:
    nim1: bool
    nim2: bool
    nim1_witness: tuple[str, str] | None = None
    nim2_witness: tuple[str, str] | None = None


def _first_difference(a: Preparation, b: Preparation) -> str:
    return sorted(a.support | b.support, key=lambda s: (a[s] == b[s], s))[0]


def nim1_nim2_check(model: OnticModel, prep: Preparation, decomposition: Decomposition) -> NonInvasiveness:
    """Do box measurements leave the box components alone?

    NIM1: seeing the ball in box ``i`` leaves exactly ``nu_i``.
    NIM2: not seeing it leaves exactly the renormalized mixture of the other
    components. Witnesses are ``(measurement, state)`` for the first
    mismatch found.
    """
    w1 = w2 = None
    for i, label in enumerate(decomposition.boxes):
        if label is None:
            continue
        m = model.measurement(label)
        found, missed = m.outcomes[0], m.outcomes[1]
        nu = decomposition.components[i]
        if w1 is None and nu is not None:
            _, post = evolve_preparation(prep, m, found)
            if post != nu:
                w1 = (label, _first_difference(post, nu))
        rest = [(w, c) for j, (w, c) in enumerate(zip(decomposition.weights, decomposition.components)) if j != i and w]
        if w2 is None and rest:
            total = sum(w for w, _ in rest)
            expected = mix_preparations([(w / total, c) for w, c in rest])
            try:
                _, post = evolve_preparation(prep, m, missed)
            except ImpossibleOutcome:
                continue
            if post != expected:
                w2 = (label, _first_difference(post, expected))
    return NonInvasiveness(w1 is None, w2 is None, w1, w2)


def check_eigenstate_ndm(
    system,
    eigen_preps: Mapping[str, object],
    measurements: Sequence[str] = ("M1", "M2"),
    final: str = "MA",
) -> dict[tuple[str, str], Real]:
    """``|sum_q P(q, A) - P_N(A)|`` for every (eigen preparation, measurement) pair.

    Works on ontic models and quantum scenarios alike; quantum values are
    floats.
    """
    post, _ = outcome_labels(system, final)
    gaps = {}
    for name, prep in eigen_preps.items():
        p_n = distribution(system, [final], prep).prob(post)
        for m in measurements:
            joint = distribution(system, [m, final], prep).marginal(1).prob(post)
            gaps[(name, m)] = abs(joint - p_n)
    return gaps


@dataclass(frozen=True)
class DoubleOccupancy:
    """Probability that Bob opens both boxes in turn and finds a ball each time."""

    forward: Real  # M1 then M2
    backward: Real  # M2 then M1

    @property
    def value(self) -> Real:
        """Average over the two orders, i.e. with the order picked by a fair coin."""
        total = self.forward + self.backward
        return total / 2 if isinstance(total, float) else Fraction(total) / 2

    @property
    def flagged(self) -> bool:
        return not (_is_zero(self.forward) and _is_zero(self.backward))


def double_occupancy(system, prep=None, box_measurements: Sequence[str] = ("M1", "M2")) -> DoubleOccupancy:
    m1, m2 = box_measurements
    f1, _ = outcome_labels(system, m1)
    f2, _ = outcome_labels(system, m2)
    fwd = distribution(system, [m1, m2], prep).prob(f1, f2)
    bwd = distribution(system, [m2, m1], prep).prob(f2, f1)
    if isinstance(system, quantum_core.QuantumScenario):
        fwd, bwd = rationalize(fwd), rationalize(bwd)
    return DoubleOccupancy(fwd, bwd)


def repeat_stability(system, prep=None, measurements: Sequence[str] = ("M1", "M2")) -> dict[str, Real]:
    """Probability that an immediately repeated measurement gives the same outcome.

    A diagnostic only: card-game models are known to fall short of 1 here.
    """
    out = {}
    for m in measurements:
        d = distribution(system, [m, m], prep)
        out[m] = sum((p for (q1, q2), p in d.items() if q1 == q2), 0)
    return out


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return str(x).lower()
    return str(x) if isinstance(x, (Fraction, int)) else f"{x:.6g}"


@dataclass
class ClassicalityReport:
    model: str
    preparation: str
    ndm_gaps: dict[str, Real]
    pps_score: Real | None
    true_pps: bool
    nim_bound_holds: bool
    nim_bound_slack: Real
    lgi_value: Real
    lgi_value_nim2: Real
    consistency_gap: dict[str, Real]
    double_occupancy: Real
    mr_class: str = UNDETERMINED
    nim1_holds: bool | None = None
    nim2_holds: bool | None = None
    nim1_witness: tuple[str, str] | None = None
    nim2_witness: tuple[str, str] | None = None
    eigen_ndm_gaps: dict[str, Real] = field(default_factory=dict)
    mr1_excludes_paradox: bool = False

    @property
    def lgi_verdict(self) -> str:
        """VIOLATED/SATISFIED when both substitutions agree, else AMBIGUOUS.

        The two substitutions can only disagree when an intervening
        measurement is detectable.
        """
        v1, v2 = lgi_violated(self.lgi_value), lgi_violated(self.lgi_value_nim2)
        if v1 and v2:
            return "VIOLATED"
        if not v1 and not v2:
            return "SATISFIED"
        return "AMBIGUOUS"

    @property
    def pps_verdict(self) -> str:
        return "true PPS paradox" if self.true_pps else "NOT a true PPS paradox"

    def to_dict(self) -> dict:
        def conv(x):
            if isinstance(x, Fraction):
                return str(x)
            if isinstance(x, dict):
                return {str(k) if not isinstance(k, tuple) else "|".join(k): conv(v) for k, v in x.items()}
            if isinstance(x, tuple):
                return list(x)
            return x

        d = {k: conv(v) for k, v in asdict(self).items()}
        d["lgi_verdict"] = self.lgi_verdict
        d["pps_verdict"] = self.pps_verdict
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def rows(self) -> list[tuple[str, str]]:
        rows = [("model", self.model), ("preparation", self.preparation)]
        rows += [(f"ndm gap {m}", _fmt(g)) for m, g in self.ndm_gaps.items()]
        rows += [
            ("pps score", _fmt(self.pps_score)),
            ("verdict", self.pps_verdict),
            ("nim bound slack", f"{_fmt(self.nim_bound_slack)} ({'holds' if self.nim_bound_holds else 'fails'})"),
            ("lgi value", _fmt(self.lgi_value)),
            ("lgi value (nim2 form)", _fmt(self.lgi_value_nim2)),
            ("lgi verdict", self.lgi_verdict),
        ]
        rows += [(f"consistency gap {m}", _fmt(g)) for m, g in self.consistency_gap.items()]
        rows += [
            ("double occupancy", _fmt(self.double_occupancy) + (" FLAGGED" if self.double_occupancy else "")),
            ("mr class", self.mr_class),
            ("nim1", _fmt(self.nim1_holds) + (f" (fails at {self.nim1_witness})" if self.nim1_witness else "")),
            ("nim2", _fmt(self.nim2_holds) + (f" (fails at {self.nim2_witness})" if self.nim2_witness else "")),
        ]
        rows += [(f"eigen ndm gap {k}", _fmt(g)) for k, g in self.eigen_ndm_gaps.items()]
        if self.mr1_excludes_paradox:
            rows.append(("mr1 exclusion", "MR1 with eigenstate NDM: no LGI violation possible"))
        return rows

    def render(self) -> str:
        rows = self.rows()
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def classicality_report(
    system,
    prep=None,
    *,
    box_measurements: Sequence[str] = ("M1", "M2"),
    final: str = "MA",
    eigen_preps: Sequence[str] = (),
    model_name: str | None = None,
) -> ClassicalityReport:
    """Run every applicable check on one system and preparation.

    ``prep`` and ``eigen_preps`` may be preparation names from the system.
    """
    prep_name = prep if isinstance(prep, str) else "custom" if prep is not None else "default"
    mu = resolve_preparation(system, prep)
    labels = (*box_measurements, final)
    stats = collect_stats(system, mu, labels)
    try:
        score = pps_score(stats)
    except UndefinedConditional:
        score = None
    consistency = {}
    for m in box_measurements:
        try:
            consistency[m] = counterfactual_consistency(stats, m)
        except UndefinedConditional:
            consistency[m] = None
    holds, slack = nim_bound_check(stats)
    report = ClassicalityReport(
        model=model_name or getattr(system, "name", "model"),
        preparation=prep_name,
        ndm_gaps=ndm_gap(stats),
        pps_score=score,
        true_pps=is_true_pps(stats),
        nim_bound_holds=holds,
        nim_bound_slack=slack,
        lgi_value=lgi_value(stats),
        lgi_value_nim2=lgi_value(stats, "nim2"),
        consistency_gap=consistency,
        double_occupancy=double_occupancy(system, mu, box_measurements).value,
    )
    eigen = {name: resolve_preparation(system, name) for name in eigen_preps}
    if eigen:
        gaps = check_eigenstate_ndm(system, eigen, box_measurements, final)
        report.eigen_ndm_gaps = {f"{p}/{m}": g for (p, m), g in gaps.items()}
    if isinstance(system, OnticModel):
        report.mr_class = classify_mr(system, mu, list(eigen.values()), box_measurements) if eigen else UNDETERMINED
        dec = macrorealist_decomposition(system, mu, box_measurements)
        if dec is None:
            report.mr_class = NOT_MACROREALIST
        else:
            nim = nim1_nim2_check(system, mu, dec)
            report.nim1_holds, report.nim2_holds = nim.nim1, nim.nim2
            report.nim1_witness, report.nim2_witness = nim.nim1_witness, nim.nim2_witness
        report.mr1_excludes_paradox = (
            report.mr_class == MR1
            and bool(report.eigen_ndm_gaps)
            and all(_is_zero(g) for g in report.eigen_ndm_gaps.values())
        )
    return report


__all__ = [
    "MR1", "MR2", "MR3", "NOT_MACROREALIST", "UNDETERMINED",
    "ClassicalityReport", "Decomposition", "DoubleOccupancy", "NonInvasiveness",
    "UndefinedConditional", "box_of_state", "check_eigenstate_ndm", "classicality_report",
    "classify_mr", "counterfactual_consistency", "double_occupancy", "is_ndm", "is_true_pps",
    "lgi_value", "lgi_violated", "macrorealist_decomposition", "ndm_gap", "nim1_nim2_check",
    "nim_bound_check", "pps_score", "repeat_stability",
]
