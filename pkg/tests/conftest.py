"""Shared fixtures and independent oracles.

The oracles deliberately avoid the library's engines: the quantum one
multiplies hand-written projectors into the amplitude, the ontic one walks
every path of ontic states one step at a time.
"""

from __future__ import annotations

import itertools
from fractions import Fraction as F

import numpy as np
import pytest

from threebox import zoo

SEQUENCES = [
    ("MA",),
    ("M1", "MA"),
    ("M2", "MA"),
    ("M1", "M2", "MA"),
    ("M2", "M1", "MA"),
    ("M1", "M1", "MA"),
    ("M2", "M2", "MA"),
]

_S3 = 1 / np.sqrt(3)
_PSI_F = np.array([_S3, _S3, -_S3])
_P = {
    "1": np.diag([1.0, 0, 0]),
    "~1": np.diag([0, 1.0, 1.0]),
    "2": np.diag([0, 1.0, 0]),
    "~2": np.diag([1.0, 0, 1.0]),
    "A": np.outer(_PSI_F, _PSI_F),
    "~A": np.eye(3) - np.outer(_PSI_F, _PSI_F),
}
_OUTCOMES = {"M1": ("1", "~1"), "M2": ("2", "~2"), "MA": ("A", "~A")}
ORACLE_KETS = {
    "|1+2+3>": np.array([1.0, 1, 1]) * _S3,
    "|1>": np.array([1.0, 0, 0]),
    "|2>": np.array([0, 1.0, 0]),
    "|3>": np.array([0, 0, 1.0]),
    "|1+3>": np.array([1.0, 0, 1]) / np.sqrt(2),
    "|2+3>": np.array([0, 1.0, 1]) / np.sqrt(2),
}


def quantum_oracle(seq, ket="|1+2+3>") -> dict[tuple[str, ...], float]:
    """P(q1..qn) = || P_qn ... P_q1 psi ||^2 for every outcome string."""
    psi = ORACLE_KETS[ket]
    out = {}
    for qs in itertools.product(*(_OUTCOMES[m] for m in seq)):
        v = psi
        for q in qs:
            v = _P[q] @ v
        out[qs] = float(v @ v)
    return out


def ontic_oracle(model, prep, seq) -> dict[tuple[str, ...], F]:
    """Sum over every path (l0, q1, l1, ..., qn, ln) of its weight."""
    out: dict[tuple[str, ...], F] = {}

    def walk(state, depth, outcomes, weight):
        if depth == len(seq):
            out[outcomes] = out.get(outcomes, F(0)) + weight
            return
        m = model.measurements[seq[depth]]
        for q in m.outcomes:
            p = m.xi.get(state, {}).get(q, F(0))
            if not p:
                continue
            targets = m.gamma.get((state, q), {state: F(1)})
            for t, g in targets.items():
                if g:
                    walk(t, depth + 1, outcomes + (q,), weight * p * g)

    for s, w in prep.weights.items():
        walk(s, 0, (), w)
    return {k: v for k, v in out.items() if v}


@pytest.fixture(scope="session")
def models():
    return zoo.all_models()


@pytest.fixture(scope="session")
def quantum(models):
    return models["quantum"]


@pytest.fixture(scope="session")
def cheating(models):
    return models["cheating"]


@pytest.fixture(scope="session")
def mr3(models):
    return models["mr3"]


@pytest.fixture(scope="session")
def mr2(models):
    return models["mr2"]


@pytest.fixture(scope="session")
def kirkpatrick(models):
    return models["kirkpatrick"]


@pytest.fixture(scope="session")
def ravon_vaidman(models):
    return models["ravon_vaidman"]


@pytest.fixture(scope="session")
def leifer_spekkens(models):
    return models["leifer_spekkens"]


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
