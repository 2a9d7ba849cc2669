import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infocascade.belief import (
    Action,
    ChoiceMode,
    JointBelief,
    ModelParams,
    ObserverModel,
    Signal,
    acting_agent_posterior,
    make_prior,
    public_belief,
)
from infocascade.choice import (
    DecisionWeights,
    decide,
    decide_from_uniform,
    decision_is_signal_independent,
    decision_weights,
    deterministic_choice,
    signal_branch_actions,
)
from infocascade.rng import SplitMix64

DET, RAND = ChoiceMode.DETERMINISTIC, ChoiceMode.WEIGHTED_RANDOM


def within_3_sigma(hits, n, p):
    return abs(hits / n - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_point_mass_above():
    cells = np.zeros((2, 5))
    cells[1, 4] = 1.0
    w = decision_weights(JointBelief(2, 2, cells), 2, ModelParams(0.7, 2))
    assert (w.p1, w.p2, w.p3) == (1.0, 0.0, 0.0)
    assert w.threshold == 2


def test_uniform_odd_threshold_has_no_tie_mass():
    cells = np.full((2, 4), 1 / 8)
    w = decision_weights(JointBelief(1, 2, cells), 2, ModelParams(0.7, 1))
    assert w.p3 == 0.0
    assert w.threshold == Fraction(3, 2)
    assert w.p1 == w.p2 == 0.5


def test_weights_first_agent_high():
    params = ModelParams(0.8, 1)
    post = acting_agent_posterior(make_prior(params), Signal.HIGH, params)
    w = decision_weights(post, 1, params)
    assert w.p1 == pytest.approx(0.68, abs=1e-15)
    assert w.p2 == 0.0
    assert w.p3 == pytest.approx(0.32, abs=1e-15)


def test_weights_dimension_mismatch():
    params = ModelParams(0.8, 1)
    with pytest.raises(ValueError):
        decision_weights(make_prior(params), 1, params)


@pytest.mark.parametrize("mode", list(ChoiceMode))
def test_point_mass_always_adopts(mode):
    w = DecisionWeights(1.0, 0.0, 0.0, Fraction(1))
    rng = SplitMix64(1)
    assert all(decide(w, mode, rng) is Action.ADOPT for _ in range(1000))


def test_tie_is_fair_coin():
    w = DecisionWeights(0.45, 0.45, 0.10, Fraction(1))
    rng = SplitMix64(7)
    hits = sum(decide(w, DET, rng) is Action.ADOPT for _ in range(10_000))
    assert within_3_sigma(hits, 10_000, 0.5)


def test_weighted_frequency():
    w = DecisionWeights(0.6, 0.3, 0.1, Fraction(1))
    rng = SplitMix64(11)
    hits = sum(decide(w, RAND, rng) is Action.ADOPT for _ in range(10_000))
    assert within_3_sigma(hits, 10_000, 0.65)


def test_decide_accepts_mode_string():
    w = DecisionWeights(0.2, 0.7, 0.1, Fraction(1))
    assert decide(w, "det", SplitMix64(0)) is Action.REJECT


def test_decide_from_uniform_boundaries():
    w = DecisionWeights(0.6, 0.3, 0.1, Fraction(1))
    assert decide_from_uniform(w, RAND, 0.0) is Action.ADOPT
    assert decide_from_uniform(w, RAND, 0.6499) is Action.ADOPT
    assert decide_from_uniform(w, RAND, 0.6501) is Action.REJECT
    # the deterministic rule ignores the draw away from ties
    assert decide_from_uniform(w, DET, 0.99) is Action.ADOPT


def test_half_accuracy_first_agent_weights():
    for k in range(6):
        params = ModelParams(0.5, k, RAND)
        adopt = 0.0
        for own in Signal:
            post = acting_agent_posterior(make_prior(params), own, params)
            adopt += 0.5 * decision_weights(post, 1, params).adopt_weight  # a fair signal
        assert abs(adopt - 0.5) <= 1e-12


def test_predicate_first_agent_is_signal_dependent():
    for p in (0.55, 0.7, 0.8, 1.0):
        params = ModelParams(p, 1)
        assert not decision_is_signal_independent(make_prior(params), 1, params)


def test_predicate_point_mass():
    params = ModelParams(0.8, 1)
    cells = np.zeros((2, 4))
    cells[1, 3] = 1.0  # c = k + i - 1 with i = 3
    assert decision_is_signal_independent(JointBelief(1, 2, cells), 3, params)


def test_predicate_after_two_adopts():
    params = ModelParams(0.8, 1)
    b = public_belief(params, [Action.ADOPT, Action.ADOPT])
    np.testing.assert_allclose(b.cells, [[0, 0, 0.4, 0.1], [0, 0, 0.1, 0.4]], atol=1e-15)
    assert signal_branch_actions(b, 3, params) == (Action.ADOPT, Action.ADOPT)
    assert decision_is_signal_independent(b, 3, params)


def test_predicate_after_two_adopts_public_marginal_observer():
    # exact split for a Low signal: P(C_3 > 2) = 16/75 < P(C_3 < 2) = 17/75
    params = ModelParams(0.8, 1, DET, ObserverModel.PUBLIC_MARGINAL)
    b = public_belief(params, [Action.ADOPT, Action.ADOPT])
    post = acting_agent_posterior(b, Signal.LOW, params)
    w = decision_weights(post, 3, params)
    assert w.p1 == pytest.approx(16 / 75, abs=1e-15)
    assert w.p2 == pytest.approx(17 / 75, abs=1e-15)
    assert not decision_is_signal_independent(b, 3, params)


def test_predicate_needs_matching_step():
    params = ModelParams(0.8, 1)
    with pytest.raises(ValueError):
        decision_is_signal_independent(make_prior(params), 2, params)


@settings(max_examples=200, deadline=None)
@given(
    p=st.sampled_from([0.5, 0.6, 0.7, 0.8, 0.9, 1.0]),
    k=st.integers(0, 10),
    actions=st.lists(st.sampled_from(list(Action)), max_size=15),
    own=st.sampled_from(list(Signal)),
)
def test_argmax_mirror(p, k, actions, own):
    params = ModelParams(p, k)
    b = public_belief(params, actions, on_impossible="prior")
    i = len(actions) + 1
    d = deterministic_choice(decision_weights(acting_agent_posterior(b, own, params), i, params))
    dm = deterministic_choice(
        decision_weights(acting_agent_posterior(b.mirrored(), own.mirror, params), i, params)
    )
    if d is None:
        assert dm is None
    else:
        assert dm is d.mirror
