"""JSON model-description files.

One format covers both model kinds, told apart by ``"kind"``. Rationals are
written as ``"num/den"`` strings and complex numbers as ``[re, im]`` pairs.
See ``docs/model_format.md`` for the full layout.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import quantum_core
from .ontic import OnticMeasurement, OnticModel, Preparation, validate_model
from .stats import OperationalStats, collect_stats, stats_equal
from .zoo import NamedModel

FORMAT_VERSION = 1
FIXTURE_ENV = "THREEBOX_FIXTURES"
PACKAGE_FIXTURES = Path(__file__).parent / "fixtures"


class ModelFileError(ValueError):
    """The file could not be parsed into a model."""


def _rat(x: Fraction) -> str:
    return str(Fraction(x))


def _parse_rat(x) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ModelFileError(f"expected a rational string like '1/9', got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as e:
        raise ModelFileError(f"bad rational {x!r}") from e


def _cplx_vec(v) -> list:
    # adding 0.0 turns -0.0 into 0.0 so files are byte-stable across round trips
    return [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in np.asarray(v, dtype=complex)]


def _cplx_mat(m) -> list:
    return [_cplx_vec(row) for row in np.asarray(m, dtype=complex)]


def _parse_cplx(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.shape[-1] != 2:
        raise ModelFileError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def _stats_to_json(s: OperationalStats) -> dict:
    return {
        "labels": list(s.labels),
        "found": list(s.found),
        "missed": list(s.missed),
        "post": s.post,
        "post_fail": s.post_fail,
        "p_m1": [[q, a, _rat(p)] for (q, a), p in s.p_m1.items()],
        "p_m2": [[q, a, _rat(p)] for (q, a), p in s.p_m2.items()],
        "p_n": [[a, _rat(p)] for a, p in s.p_n.items()],
    }


def _stats_from_json(d: Mapping) -> OperationalStats:
    return OperationalStats(
        p_m1={(q, a): _parse_rat(p) for q, a, p in d["p_m1"]},
        p_m2={(q, a): _parse_rat(p) for q, a, p in d["p_m2"]},
        p_n={a: _parse_rat(p) for a, p in d["p_n"]},
        labels=tuple(d["labels"]),
        found=tuple(d["found"]),
        missed=tuple(d["missed"]),
        post=d["post"],
        post_fail=d["post_fail"],
    )


def _jsonable(x):
    if isinstance(x, Fraction):
        return _rat(x)
    if isinstance(x, Mapping):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def model_to_dict(nm: NamedModel) -> dict[str, Any]:
    d: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "kind": nm.kind,
        "name": nm.name,
        "description": nm.description,
        "default_preparation": nm.default_preparation,
        "box_measurements": list(nm.box_measurements),
        "final": nm.final,
        "eigen_preparations": list(nm.eigen_preparations),
        "do_nothing_label": nm.model.do_nothing_label,
        "metadata": _jsonable(dict(nm.metadata)),
    }
    m = nm.model
    if nm.kind == "quantum":
        d["dim"] = m.dim
        d["initial"] = _cplx_vec(m.initial)
        d["measurements"] = {
            label: {"outcomes": [{"label": q, "projector": _cplx_mat(p)} for q, p in meas.outcomes]}
            for label, meas in m.measurements.items()
        }
        d["preparations"] = {name: _cplx_vec(v) for name, v in m.preparations.items()}
    else:
        d["states"] = list(m.states)
        d["measurements"] = {
            label: {
                "outcomes": list(meas.outcomes),
                "xi": {s: {q: _rat(p) for q, p in row.items()} for s, row in meas.xi.items()},
                "gamma": [
                    {"source": s, "outcome": q, "targets": [[t, _rat(w)] for t, w in row.items()]}
                    for (s, q), row in meas.gamma.items()
                ],
            }
            for label, meas in m.measurements.items()
        }
        d["preparations"] = {
            name: {s: _rat(w) for s, w in prep.weights.items()} for name, prep in m.preparations.items()
        }
    d["expected_stats"] = _stats_to_json(nm.expected_stats) if nm.expected_stats is not None else None
    return d


def model_from_dict(d: Mapping[str, Any]) -> NamedModel:
    try:
        if d.get("format_version") != FORMAT_VERSION:
            raise ModelFileError(f"unsupported format_version {d.get('format_version')!r}")
        kind = d["kind"]
        name = d["name"]
        nothing = d.get("do_nothing_label", "N")
        if kind == "quantum":
            measurements = {
                label: quantum_core.ProjectiveMeasurement(
                    label, tuple((o["label"], _parse_cplx(o["projector"])) for o in meas["outcomes"])
                )
                for label, meas in d["measurements"].items()
            }
            preps = {k: _parse_cplx(v) for k, v in d.get("preparations", {}).items()}
            initial = _parse_cplx(d["initial"])
            if initial.shape != (d["dim"],):
                raise ModelFileError(f"initial ket has shape {initial.shape}, dim is {d['dim']}")
            model = quantum_core.QuantumScenario(initial, measurements, nothing, name, preps)
        elif kind == "ontic":
            measurements = {}
            for label, meas in d["measurements"].items():
                xi = {s: {q: _parse_rat(p) for q, p in row.items()} for s, row in meas["xi"].items()}
                gamma = {
                    (g["source"], g["outcome"]): {t: _parse_rat(w) for t, w in g["targets"]}
                    for g in meas.get("gamma", [])
                }
                measurements[label] = OnticMeasurement(tuple(meas["outcomes"]), xi, gamma)
            preps = {
                k: Preparation({s: _parse_rat(w) for s, w in v.items()})
                for k, v in d.get("preparations", {}).items()
            }
            model = OnticModel(tuple(d["states"]), measurements, nothing, name, preps)
        else:
            raise ModelFileError(f"unknown kind {kind!r}")
        expected = d.get("expected_stats")
        return NamedModel(
            name=name,
            kind=kind,
            model=model,
            default_preparation=d["default_preparation"],
            expected_stats=_stats_from_json(expected) if expected else None,
            box_measurements=tuple(d.get("box_measurements", ("M1", "M2"))),
            final=d.get("final", "MA"),
            eigen_preparations=tuple(d.get("eigen_preparations", ())),
            description=d.get("description", ""),
            metadata=d.get("metadata", {}),
        )
    except ModelFileError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError, IndexError) as e:
        raise ModelFileError(f"malformed model file: {type(e).__name__}: {e}") from e


def dumps(nm: NamedModel) -> str:
    return json.dumps(model_to_dict(nm), indent=1)


def save_model(nm: NamedModel, path) -> Path:
    path = Path(path)
    path.write_text(dumps(nm) + "\n")
    return path


def load_model(path) -> NamedModel:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ModelFileError(f"cannot read {path}: {e}") from e
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(d, dict):
        raise ModelFileError(f"{path}: top level must be an object")
    return model_from_dict(d)


def fixture_dir() -> Path:
    return Path(os.environ.get(FIXTURE_ENV) or PACKAGE_FIXTURES)


def resolve_model_path(ref: str) -> Path:
    """A path as given, or a bare fixture name looked up in the fixture directory."""
    p = Path(ref)
    if p.exists() or os.sep in ref:
        return p
    for candidate in (fixture_dir() / ref, fixture_dir() / f"{ref}.json"):
        if candidate.exists():
            return candidate
    return p


def validate_named(nm: NamedModel) -> list[str]:
    """Every invariant violation of a loaded model, including a mismatch with its expected stats."""
    if nm.kind == "quantum":
        problems = [f"{m} (residual {r:.3g})" for m, r in quantum_core.validate_scenario(nm.model).violations]
    else:
        problems = list(validate_model(nm.model).violations)
    preps = nm.model.preparations
    for name in (nm.default_preparation, *nm.eigen_preparations):
        if name not in preps:
            problems.append(f"preparation {name!r} is referenced but not defined")
    for label in nm.labels:
        if label not in nm.model.measurements:
            problems.append(f"measurement {label!r} is referenced but not defined")
    if problems or nm.expected_stats is None:
        return problems
    problems += [f"expected_stats: {p}" for p in nm.expected_stats.validate()]
    try:
        actual = collect_stats(nm.model, nm.preparation(), nm.labels)
    except (ValueError, KeyError) as e:
        return problems + [f"cannot generate statistics: {e}"]
    if not stats_equal(actual, nm.expected_stats, 0.0 if actual.is_exact else 1e-9):
        problems.append("generated statistics differ from expected_stats")
    return problems
