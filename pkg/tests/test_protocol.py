import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloneshare.cloning import CloningParams, NamedPair, coefficient_set, reduced_state
from cloneshare.protocol import (
    BLOCK_SIZE,
    BobVerdict,
    ProtocolOutcome,
    alice_measure,
    conditional_branches,
    decode,
    discrimination_operators,
    expected_conditional,
    play_round,
    run_trials,
    shared_state,
    shared_state_brute_force,
    success_probability,
    success_probability_traces,
    unconditioned_marginals,
)
from cloneshare.states import SchmidtSpectrum
from cloneshare.verification import WERNER_POINT

c2_values = st.floats(0.01, 1.0)
UQCM = CloningParams.universal()


def test_shared_state_examples():
    assert np.allclose(shared_state(0, UQCM).rho, WERNER_POINT, atol=1e-15)
    minus = WERNER_POINT.copy()
    minus[0, 3] = minus[3, 0] = -4 / 18
    assert np.allclose(shared_state(1, UQCM).rho, minus, atol=1e-15)
    assert np.allclose(shared_state(1, UQCM).rho, shared_state_brute_force(1, UQCM), atol=1e-12)
    assert np.allclose(shared_state(0, CloningParams.wootters_zurek()).rho, np.diag([0.5, 0, 0, 0.5]))


def test_shared_state_rejects_qutrits():
    with pytest.raises(ValueError):
        shared_state(0, CloningParams.from_c_squared(0.5, 3))


@settings(max_examples=40)
@given(c2_values)
def test_shared_state_matches_cloning_module(c2):
    p = CloningParams.from_c_squared(c2)
    closed_plus = reduced_state(SchmidtSpectrum((0.5, 0.5)), p, NamedPair.NONLOCAL_14)
    assert np.allclose(shared_state(0, p).rho, closed_plus, atol=1e-14)
    for bit in (0, 1):
        for pair in (NamedPair.NONLOCAL_14, NamedPair.NONLOCAL_23):
            assert np.max(np.abs(shared_state(bit, p).rho - shared_state_brute_force(bit, p, pair))) <= 1e-12


def test_alice_measure_conditionals():
    Q = coefficient_set(UQCM).Q
    _, plus0 = alice_measure(shared_state(0, UQCM), outcome=0)
    _, minus0 = alice_measure(shared_state(1, UQCM), outcome=0)
    assert np.allclose(plus0.rho, expected_conditional(Q, +1), atol=1e-15)
    assert np.allclose(minus0.rho, expected_conditional(Q, -1), atol=1e-15)
    assert plus0.label == "+0" and minus0.label == "-0"
    _, endpoint = alice_measure(shared_state(0, CloningParams.wootters_zurek()), outcome=1)
    assert np.allclose(endpoint.rho, np.eye(2) / 2)


def test_alice_measure_requires_rng_or_outcome():
    with pytest.raises(ValueError):
        alice_measure(shared_state(0, UQCM))
    bit, cond = alice_measure(shared_state(0, UQCM), rng=np.random.default_rng(0))
    assert bit in (0, 1) and cond.alice_bit == bit


@given(c2_values)
def test_conditionals_collapse_to_two_matrices(c2):
    p = CloningParams.from_c_squared(c2)
    (pa, plus0), (pb, plus1) = conditional_branches(shared_state(0, p))
    (pc, minus0), (pd, minus1) = conditional_branches(shared_state(1, p))
    for prob in (pa, pb, pc, pd):
        assert prob == pytest.approx(0.5, abs=1e-14)
    assert np.allclose(plus0.rho, minus1.rho, atol=1e-14)
    assert np.allclose(plus1.rho, minus0.rho, atol=1e-14)
    for cond in (plus0, plus1, minus0, minus1):
        assert np.trace(cond.rho).real == pytest.approx(1, abs=1e-14)


@given(c2_values)
def test_unreadability(c2):
    p = CloningParams.from_c_squared(c2)
    for bit in (0, 1):
        alice, bob = unconditioned_marginals(shared_state(bit, p))
        assert np.max(np.abs(alice - np.eye(2) / 2)) <= 1e-12
        assert np.max(np.abs(bob - np.eye(2) / 2)) <= 1e-12
        branches = conditional_branches(shared_state(bit, p))
        mixture = sum(prob * c.rho for prob, c in branches)
        assert np.max(np.abs(mixture - np.eye(2) / 2)) <= 1e-12


@pytest.mark.parametrize("hermitized", [False, True])
def test_trace_table(hermitized):
    Q = coefficient_set(UQCM).Q
    ops = discrimination_operators(Q, hermitized)
    plus0, minus0 = expected_conditional(Q, +1), expected_conditional(Q, -1)
    assert np.trace(ops.E1 @ plus0).real == pytest.approx(Q, abs=1e-15)
    assert np.trace(ops.E1 @ minus0).real == pytest.approx(0, abs=1e-15)
    assert np.trace(ops.E2 @ plus0).real == pytest.approx(0, abs=1e-15)
    assert np.trace(ops.E2 @ minus0).real == pytest.approx(Q, abs=1e-15)
    assert np.allclose(ops.E1 + ops.E2 + ops.completion_operator, np.eye(2))


def test_literal_operators_shape():
    ops = discrimination_operators(0.3)
    assert np.allclose(ops.E1, [[0.15, 1], [0, 0.15]])
    assert np.allclose(ops.E2, [[0.15, -1], [0, 0.15]])
    assert not ops.positivity()["E1"].hermitian


def test_zero_q_operators():
    ops = discrimination_operators(0.0)
    assert np.allclose(np.diag(ops.E1), 0) and ops.E1[0, 1] == 1 and ops.E2[0, 1] == -1
    state = expected_conditional(0.0, +1)
    assert np.allclose(ops.weights(state)[:2], 0)


def test_hermitized_positivity_diagnostic():
    ops = discrimination_operators(4 / 9, hermitized=True)
    report = ops.positivity()
    assert report["E1"].eigenvalues == pytest.approx((-5 / 18, 13 / 18), abs=1e-14)
    assert not report["E1"].positive and not report["E2"].positive
    assert report["completion_operator"].positive


@given(st.floats(0.0, 0.5))
def test_positivity_fails_below_one(Q):
    for hermitized in (False, True):
        report = discrimination_operators(Q, hermitized).positivity()
        for name in ("E1", "E2"):
            assert not report[name].positive
            assert report[name].eigenvalues == pytest.approx(((Q - 1) / 2, (Q + 1) / 2), abs=1e-14)


def test_q_range_validation():
    with pytest.raises(ValueError):
        discrimination_operators(0.6)
    with pytest.raises(ValueError):
        discrimination_operators(-0.1)


def test_success_probability_examples():
    assert success_probability(UQCM) == pytest.approx(4 / 9, abs=1e-15)
    assert round(success_probability(UQCM), 2) in (0.44, 0.45)
    assert success_probability(CloningParams.wootters_zurek()) == 0
    assert success_probability(CloningParams.from_c_squared(0.5)) == pytest.approx(0.5, abs=1e-15)


def test_success_probability_maximum_at_half():
    # brute-force maximization of 4 c^2 d^2 subject to c^2 + 2 d^2 = 1
    grid = np.linspace(0.001, 1, 1000)
    vals = [success_probability(CloningParams.from_c_squared(c2)) for c2 in grid]
    assert grid[int(np.argmax(vals))] == pytest.approx(0.5, abs=1e-3)
    assert max(vals) <= 0.5 + 1e-15


@given(c2_values, st.booleans())
def test_success_probability_matches_traces(c2, hermitized):
    p = CloningParams.from_c_squared(c2)
    assert abs(success_probability(p) - success_probability_traces(p, hermitized)) <= 1e-12


def test_decode_mapping():
    assert decode(0, 0) is BobVerdict.PLUS
    assert decode(0, 1) is BobVerdict.MINUS
    assert decode(1, 0) is BobVerdict.MINUS
    assert decode(1, 1) is BobVerdict.PLUS
    assert decode(1, 2) is BobVerdict.INCONCLUSIVE


def test_outcome_success_flag():
    assert ProtocolOutcome(0, 1, BobVerdict.PLUS).success
    assert not ProtocolOutcome(1, 0, BobVerdict.PLUS).success
    assert ProtocolOutcome(1, 0, BobVerdict.PLUS).conclusive_wrong
    assert not ProtocolOutcome(1, 0, BobVerdict.INCONCLUSIVE).success


def test_play_round_never_decodes_wrong():
    rng = np.random.default_rng(9)
    outcomes = [play_round(UQCM, rng) for _ in range(2000)]
    assert not any(o.conclusive_wrong for o in outcomes)
    rate = np.mean([o.success for o in outcomes])
    assert abs(rate - 4 / 9) <= 4 * np.sqrt(4 / 9 * 5 / 9 / 2000)


def test_run_trials_half():
    p = CloningParams.from_c_squared(0.5)
    stats = run_trials(p, 100_000, seed=4)
    assert abs(stats.rate - 0.5) <= 3 * stats.standard_error(0.5)
    assert stats.conclusive_wrong == 0


def test_run_trials_wootters_zurek():
    stats = run_trials(CloningParams.wootters_zurek(), 5000, seed=1)
    assert stats.successes == 0
    assert stats.verdicts["inconclusive"] == 5000


def test_run_trials_deterministic_and_worker_independent():
    a = run_trials(UQCM, 3 * BLOCK_SIZE + 17, seed=5, keep_outcomes=True)
    b = run_trials(UQCM, 3 * BLOCK_SIZE + 17, seed=5, workers=4, keep_outcomes=True)
    assert np.array_equal(a.outcomes, b.outcomes)
    assert a.verdicts == b.verdicts and a.per_step == b.per_step
    c = run_trials(UQCM, 3 * BLOCK_SIZE + 17, seed=6)
    assert c.successes != a.successes


def test_run_trials_records():
    stats = run_trials(UQCM, 100, seed=2, keep_outcomes=True)
    records = list(stats.records())
    assert len(records) == 100
    assert sum(r.success for r in records) == stats.successes


def test_run_trials_rejects_zero():
    with pytest.raises(ValueError):
        run_trials(UQCM, 0)


@pytest.mark.parametrize("c2", np.linspace(0.1, 0.9, 9))
def test_monte_carlo_grid(c2):
    p = CloningParams.from_c_squared(c2)
    stats = run_trials(p, 100_000, seed=int(c2 * 1000))
    target = success_probability(p)
    assert abs(stats.rate - target) <= 4 * stats.standard_error(target)
    assert stats.conclusive_wrong == 0
