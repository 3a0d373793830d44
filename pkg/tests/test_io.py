import json
from fractions import Fraction as F

import pytest

from threebox import io, stats, zoo

from conftest import SEQUENCES

LS_SEQUENCES = [("MT",), ("ML", "MT"), ("MR", "MT"), ("ML", "MR", "MT"), ("MR", "ML", "MT")]


@pytest.mark.parametrize("name", list(zoo.CONSTRUCTORS))
def test_round_trip_preserves_semantics(models, tmp_path, name):
    nm = models[name]
    back = io.load_model(io.save_model(nm, tmp_path / f"{name}.json"))
    assert back.name == nm.name and back.kind == nm.kind
    assert back.box_measurements == nm.box_measurements and back.final == nm.final
    assert set(back.preparations) == set(nm.preparations)
    seqs = LS_SEQUENCES if name == "leifer_spekkens" else SEQUENCES
    for prep in nm.preparations:
        for seq in seqs:
            a = stats.distribution(nm.model, list(seq), nm.preparation(prep))
            b = stats.distribution(back.model, list(seq), back.preparation(prep))
            assert a.equals(b, tol=0 if a.is_exact else 1e-12)
    assert stats.stats_equal(back.expected_stats, nm.expected_stats)
    assert io.dumps(back) == io.dumps(nm)


@pytest.mark.parametrize("name", list(zoo.CONSTRUCTORS))
def test_bundled_fixtures_are_current(models, name):
    assert io.model_to_dict(io.load_model(io.PACKAGE_FIXTURES / f"{name}.json")) == io.model_to_dict(models[name])


def test_rationals_are_strings(mr3):
    d = io.model_to_dict(mr3)
    assert d["preparations"]["|1+2+3>"]["l1"] == "2/9"
    assert d["format_version"] == io.FORMAT_VERSION


def test_quantum_uses_complex_pairs(quantum):
    d = io.model_to_dict(quantum)
    assert len(d["initial"]) == 3 and len(d["initial"][0]) == 2


def test_validate_named_clean(models):
    for nm in models.values():
        assert io.validate_named(nm) == []


def test_validate_named_reports_bad_row(mr3):
    d = io.model_to_dict(mr3)
    d["measurements"]["M1"]["xi"]["l1"] = {"1": "1/2", "~1": "0"}
    problems = io.validate_named(io.model_from_dict(d))
    assert any("sums to 1/2" in p for p in problems)


def test_validate_named_reports_stat_mismatch(mr3):
    d = io.model_to_dict(mr3)
    d["expected_stats"]["p_n"] = [["A", "1/3"], ["~A", "2/3"]]
    assert io.validate_named(io.model_from_dict(d)) == ["generated statistics differ from expected_stats"]


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("kind"),
        lambda d: d.update(kind="classical"),
        lambda d: d.update(format_version=7),
        lambda d: d["preparations"]["|1>"].update(l1=0.5),
        lambda d: d["preparations"]["|1>"].update(l1="1/0"),
        lambda d: d["preparations"]["|1>"].update(l1="3/2"),
    ],
)
def test_malformed_inputs_raise(mr3, mutate):
    d = io.model_to_dict(mr3)
    mutate(d)
    with pytest.raises(io.ModelFileError):
        io.model_from_dict(d)


def test_load_errors(tmp_path):
    with pytest.raises(io.ModelFileError):
        io.load_model(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(io.ModelFileError):
        io.load_model(tmp_path / "bad.json")
    (tmp_path / "list.json").write_text("[]")
    with pytest.raises(io.ModelFileError):
        io.load_model(tmp_path / "list.json")


def test_fixture_lookup_uses_env(tmp_path, monkeypatch, mr3):
    io.save_model(mr3, tmp_path / "custom.json")
    monkeypatch.setenv(io.FIXTURE_ENV, str(tmp_path))
    assert io.resolve_model_path("custom") == tmp_path / "custom.json"
    monkeypatch.delenv(io.FIXTURE_ENV)
    assert io.resolve_model_path("mr3") == io.PACKAGE_FIXTURES / "mr3.json"


def test_mr2_parameters_survive(models):
    back = io.model_from_dict(json.loads(io.dumps(models["mr2"])))
    assert F(back.metadata["parameters"]["a"]) == F(1, 100)
