from fractions import Fraction as F

import pytest

from threebox import ontic
from threebox.ontic import OnticMeasurement, OnticModel, Preparation

from conftest import SEQUENCES, ontic_oracle


def test_preparation_validates_and_drops_zeros():
    p = Preparation({"a": F(1, 2), "b": F(1, 2), "c": 0})
    assert p.support == {"a", "b"}
    assert p["c"] == 0
    with pytest.raises(ValueError):
        Preparation({"a": F(1, 2)})
    with pytest.raises(ValueError):
        Preparation({"a": F(3, 2), "b": F(-1, 2)})


def test_preparation_constructors():
    assert Preparation.from_counts({"a": 2, "b": 1}) == Preparation({"a": F(2, 3), "b": F(1, 3)})
    assert Preparation.uniform("abc")["b"] == F(1, 3)
    assert Preparation.point("x").weights == {"x": 1}


def test_validate_mr3(mr3):
    assert ontic.validate_model(mr3.model).ok


def test_validate_flags_half_row():
    m = OnticMeasurement(("0", "1"), {"a": {"0": F(1, 4), "1": F(1, 4)}})
    report = ontic.validate_model(OnticModel(("a",), {"M": m}))
    assert len(report.violations) == 1


def test_validate_empty_model():
    assert ontic.validate_model(OnticModel((), {})).ok


def test_validate_flags_bad_kernel():
    m = OnticMeasurement(("0",), {"a": {"0": 1}}, {("a", "0"): {"a": F(1, 2)}})
    assert not ontic.validate_model(OnticModel(("a",), {"M": m})).ok


def test_outcome_probability_examples(mr3, cheating):
    p = ontic.outcome_probability(mr3.preparation("|1+2+3>"), mr3.model.measurement("MA"))
    assert p == {"A": F(1, 9), "~A": F(8, 9)}
    p = ontic.outcome_probability(Preparation.point("l4"), cheating.model.measurement("M1"))
    assert p["1"] == 1


def test_uniform_outcomes():
    m = OnticMeasurement(("x", "y"), {s: {"x": F(1, 2), "y": F(1, 2)} for s in "abc"})
    assert ontic.outcome_probability(Preparation.uniform("abc"), m) == {"x": F(1, 2), "y": F(1, 2)}


def test_outcome_probability_state_mismatch():
    m = OnticMeasurement(("x",), {"a": {"x": 1}})
    with pytest.raises(ontic.StateMismatch):
        ontic.outcome_probability(Preparation.point("zzz"), m)


def test_evolve_mr3_box1(mr3):
    p, post = ontic.evolve_preparation(mr3.preparation("|1+2+3>"), mr3.model.measurement("M1"), "1")
    assert p == F(1, 3)
    assert post == Preparation({"l1": F(2, 3), "l2": F(1, 3)})


def test_evolve_nim_point_mass():
    m = OnticMeasurement(("x", "y"), {"a": {"x": 1, "y": 0}})
    assert ontic.evolve_preparation(Preparation.point("a"), m, "x") == (1, Preparation.point("a"))


def test_evolve_kirkpatrick(kirkpatrick):
    p, post = ontic.evolve_preparation(Preparation.point("l0"), kirkpatrick.model.measurement("M1"), "1")
    assert p == F(1, 4)
    assert post == Preparation.point("l1")


def test_evolve_impossible_outcome(mr3):
    with pytest.raises(ontic.ImpossibleOutcome):
        ontic.evolve_preparation(Preparation.point("l1"), mr3.model.measurement("M1"), "~1")


def test_sequence_distribution_examples(mr3, cheating):
    d = ontic.sequence_distribution(mr3.model, mr3.preparation("|1+2+3>"), ["M1", "MA"])
    assert d.prob("1", "A") == F(1, 9) and d.prob("~1", "A") == 0
    assert d.prob("1", "~A") == F(2, 9) and d.prob("~1", "~A") == F(2, 3)
    d = ontic.sequence_distribution(cheating.model, cheating.preparation(), ["M2", "M1"])
    assert d.prob("2", "1") == F(1, 9)


def test_empty_sequence(models):
    for nm in models.values():
        d = ontic.sequence_distribution(nm.model, nm.preparation(), []) if nm.kind == "ontic" else None
        if d is not None:
            assert dict(d) == {(): 1}


def test_unknown_measurement(mr3):
    with pytest.raises(ontic.UnknownMeasurement):
        ontic.sequence_distribution(mr3.model, mr3.preparation(), ["M9"])


@pytest.mark.parametrize("name", ["cheating", "mr3", "mr2", "kirkpatrick", "ravon_vaidman"])
@pytest.mark.parametrize("seq", SEQUENCES)
def test_engine_matches_path_oracle(models, name, seq):
    nm = models[name]
    for prep in nm.preparations.values():
        d = ontic.sequence_distribution(nm.model, prep, list(seq))
        assert dict(d.support()) == ontic_oracle(nm.model, prep, seq)


def test_leifer_spekkens_matches_path_oracle(leifer_spekkens):
    m = leifer_spekkens.model
    for seq in [("MT",), ("ML", "MT"), ("MR", "MT"), ("ML", "MR", "MT"), ("MR", "ML", "MT")]:
        for prep in m.preparations.values():
            assert dict(ontic.sequence_distribution(m, prep, list(seq)).support()) == ontic_oracle(m, prep, seq)


def test_mix_preparations():
    mu = Preparation({"a": F(1, 4), "b": F(3, 4)})
    assert ontic.mix_preparations([(1, mu)]) == mu
    mixed = ontic.mix_preparations([(F(1, 3), Preparation.point("a")), (F(2, 3), Preparation.point("b"))])
    assert mixed == Preparation({"a": F(1, 3), "b": F(2, 3)})
    with pytest.raises(ValueError):
        ontic.mix_preparations([(F(1, 2), mu)])


def test_mix_reassembles_box_decomposition(mr3):
    from threebox.classicality import macrorealist_decomposition

    mu = mr3.preparation("|1+2+3>")
    dec = macrorealist_decomposition(mr3.model, mu)
    assert ontic.mix_preparations([(w, c) for w, c in zip(dec.weights, dec.components) if w]) == mu


def test_is_nim(cheating, mr3):
    assert ontic.is_nim(cheating.model.measurement("M1"))
    assert not ontic.is_nim(mr3.model.measurement("M1"))
    assert ontic.is_nim(OnticMeasurement(("x",), {"a": {"x": 1}}, {("a", "x"): {"a": 1}}))
