"""Property-based checks over randomly generated ontic models."""

from fractions import Fraction as F

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from threebox import classicality as cl
from threebox import ontic
from threebox.distribution import rationalize
from threebox.ontic import OnticMeasurement, OnticModel, Preparation
from threebox.stats import collect_stats

DENOM = 6
probs = st.integers(0, DENOM).map(lambda k: F(k, DENOM))
weights = st.integers(1, 5)
sequences = st.lists(st.sampled_from(["M1", "M2", "MA"]), max_size=4)


def _binary(outcomes, p_first):
    return {outcomes[0]: p_first, outcomes[1]: 1 - p_first}


@st.composite
def nim_models(draw):
    """Random all-NIM model in which no state can show a ball in both boxes."""
    n = draw(st.integers(1, 5))
    states = tuple(f"s{i}" for i in range(n))
    xi1, xi2, xia = {}, {}, {}
    for s in states:
        p1 = draw(probs)
        p2 = F(0) if p1 else draw(probs)
        xi1[s], xi2[s] = _binary(("1", "~1"), p1), _binary(("2", "~2"), p2)
        xia[s] = _binary(("A", "~A"), draw(probs))
    meas = {
        "M1": OnticMeasurement(("1", "~1"), xi1),
        "M2": OnticMeasurement(("2", "~2"), xi2),
        "MA": OnticMeasurement(("A", "~A"), xia),
    }
    prep = Preparation.from_counts({s: draw(weights) for s in states})
    return OnticModel(states, meas), prep


@st.composite
def mr1_models(draw):
    """Box-definite states in twin pairs sharing every outcome row.

    Box measurements may shuffle a state with its twin, so they disturb the
    ontic state without ever being detectable on an eigenstate preparation.
    """
    states, xi1, xi2, xia, gamma1, gamma2 = [], {}, {}, {}, {}, {}
    eigen = []
    for box in (1, 2, 3):
        members = {}
        for k in range(draw(st.integers(1, 2))):
            pa = draw(probs)
            twins = (f"b{box}_{k}", f"b{box}_{k}'")
            for s in twins:
                states.append(s)
                xi1[s] = _binary(("1", "~1"), F(int(box == 1)))
                xi2[s] = _binary(("2", "~2"), F(int(box == 2)))
                xia[s] = _binary(("A", "~A"), pa)
                members[s] = draw(weights)
            for s in twins:
                stay = draw(probs)
                other = twins[1] if s == twins[0] else twins[0]
                q1 = "1" if box == 1 else "~1"
                q2 = "2" if box == 2 else "~2"
                gamma1[(s, q1)] = {s: stay, other: 1 - stay}
                gamma2[(s, q2)] = {s: 1 - stay, other: stay}
        eigen.append(Preparation.from_counts(members))
    meas = {
        "M1": OnticMeasurement(("1", "~1"), xi1, gamma1),
        "M2": OnticMeasurement(("2", "~2"), xi2, gamma2),
        "MA": OnticMeasurement(("A", "~A"), xia),
    }
    p = [draw(weights) for _ in range(3)]
    mu = ontic.mix_preparations([(F(w, sum(p)), e) for w, e in zip(p, eigen)])
    return OnticModel(tuple(states), meas), mu, eigen


@settings(max_examples=250, deadline=None)
@given(nim_models())
def test_nim_models_obey_bound_and_lgi(data):
    model, prep = data
    assert all(ontic.is_nim(m) for m in model.measurements.values())
    assert cl.double_occupancy(model, prep).value == 0
    s = collect_stats(model, prep)
    holds, slack = cl.nim_bound_check(s)
    assert holds and slack >= 0
    assert cl.lgi_value(s) >= -1
    assert cl.lgi_value(s, "nim2") >= -1
    assert not cl.is_true_pps(s)


@settings(max_examples=200, deadline=None)
@given(nim_models())
def test_nim_implies_ndm(data):
    model, prep = data
    s = collect_stats(model, prep)
    assert all(cl.is_ndm(s).values())


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(mr1_models())
def test_mr1_with_eigenstate_ndm_excludes_violation(data):
    model, mu, eigen = data
    assert ontic.validate_model(model).ok
    assert cl.classify_mr(model, mu, eigen) == cl.MR1
    gaps = cl.check_eigenstate_ndm(model, dict(zip("123", eigen)))
    assert set(gaps.values()) == {0}
    s = collect_stats(model, mu)
    assert cl.nim_bound_check(s)[0]
    assert cl.lgi_value(s) >= -1


@settings(max_examples=200, deadline=None)
@given(nim_models(), st.integers(0, 10), sequences, st.data())
def test_distribution_is_affine_in_preparation(data, t, seq, extra):
    model, mu = data
    nu = Preparation.from_counts({s: extra.draw(st.integers(0, 3)) + (s == model.states[0]) for s in model.states})
    w = F(t, 10)
    mixed = ontic.mix_preparations([(w, mu), (1 - w, nu)]) if 0 < w < 1 else (mu if w == 1 else nu)
    d_mix = ontic.sequence_distribution(model, mixed, seq)
    d_mu = ontic.sequence_distribution(model, mu, seq)
    d_nu = ontic.sequence_distribution(model, nu, seq)
    for k in set(d_mix) | set(d_mu) | set(d_nu):
        assert d_mix.prob(*k) == w * d_mu.prob(*k) + (1 - w) * d_nu.prob(*k)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["|1>", "|2>", "|3>", "|1+3>", "|2+3>", "|1+2+3>"]), st.integers(0, 4), sequences)
def test_mr3_affine_over_named_preparations(prep_name, k, seq):
    from threebox.zoo import mr3_model

    nm = mr3_model()
    mu, nu = nm.preparation(prep_name), nm.preparation("|3>")
    w = F(k, 4)
    parts = [(x, p) for x, p in ((w, mu), (1 - w, nu)) if x]
    mixed = ontic.mix_preparations(parts)
    d = ontic.sequence_distribution(nm.model, mixed, seq)
    expect = {}
    for x, p in parts:
        for key, v in ontic.sequence_distribution(nm.model, p, seq).items():
            expect[key] = expect.get(key, 0) + x * v
    assert dict(d.support()) == {k2: v for k2, v in expect.items() if v}


@settings(max_examples=200, deadline=None)
@given(nim_models(), st.sampled_from(["M1", "M2", "MA"]))
def test_nim_updates_average_back_to_preparation(data, label):
    model, mu = data
    m = model.measurement(label)
    parts = []
    for q, p in ontic.outcome_probability(mu, m).items():
        if p:
            p2, post = ontic.evolve_preparation(mu, m, q)
            assert p2 == p
            parts.append((p, post))
    assert ontic.mix_preparations(parts) == mu


@settings(max_examples=200, deadline=None)
@given(nim_models(), st.sampled_from(["M1", "M2", "MA"]))
def test_sequence_totals_and_marginals(data, label):
    model, mu = data
    d = ontic.sequence_distribution(model, mu, [label, "MA"])
    assert d.total() == 1
    assert dict(d.marginal(0).support()) == {(q,): p for q, p in ontic.outcome_probability(mu, model.measurement(label)).items() if p}


@given(st.fractions(min_value=0, max_value=1, max_denominator=1000))
def test_rationalize_idempotent(x):
    assert rationalize(float(x)) == x
    assert rationalize(rationalize(float(x))) == rationalize(float(x))


@settings(max_examples=100, deadline=None)
@given(nim_models())
def test_mix_with_itself_is_idempotent(data):
    _, mu = data
    assert ontic.mix_preparations([(F(1, 3), mu), (F(2, 3), mu)]) == mu
