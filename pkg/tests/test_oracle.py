import itertools

import numpy as np
import pytest

from infocascade.belief import Action, ChoiceMode, ImpossibleObservationError, ModelParams, ObserverModel, make_prior, public_belief
from infocascade.oracle import (
    EnumerationTooLargeError,
    choice_rule_agreement,
    dense_posterior,
    enumeration_posterior,
    max_cell_difference,
)

ALL = [
    ModelParams(p, k, mode, obs)
    for p in (0.5, 0.6, 0.8, 1.0)
    for k in (0, 1, 2)
    for mode in ChoiceMode
    for obs in ObserverModel
]


@pytest.mark.parametrize("fn", [dense_posterior, enumeration_posterior])
def test_empty_sequence_is_prior(fn):
    params = ModelParams(0.7, 3)
    np.testing.assert_allclose(fn(params, []).cells, make_prior(params).cells, atol=1e-15)


def test_single_adopt_value_posterior():
    params = ModelParams(0.8, 1)
    assert enumeration_posterior(params, [Action.ADOPT]).value_marginal()[1] == pytest.approx(0.8, abs=1e-12)
    # the recursion mixes with a V-independent weight, so it keeps V uninformed
    assert dense_posterior(params, [Action.ADOPT]).value_marginal()[1] == pytest.approx(0.5, abs=1e-12)


def test_two_adopt_divergence_is_measurable():
    params = ModelParams(0.8, 1, ChoiceMode.WEIGHTED_RANDOM)
    d = max_cell_difference(dense_posterior(params, [0, 0]), enumeration_posterior(params, [0, 0]))
    assert 0.0 < d < 1.0


def test_enumeration_size_refusal():
    with pytest.raises(EnumerationTooLargeError):
        enumeration_posterior(ModelParams(0.7, 7), [])
    with pytest.raises(EnumerationTooLargeError):
        enumeration_posterior(ModelParams(0.7, 1), [0] * 11)


@pytest.mark.parametrize("params", ALL, ids=str)
def test_dense_matches_library(params):
    for n in range(6):
        for seq in itertools.product((0, 1), repeat=n):
            try:
                lib = public_belief(params, seq)
            except ImpossibleObservationError:
                with pytest.raises(ImpossibleObservationError):
                    dense_posterior(params, seq)
                continue
            assert max_cell_difference(lib, dense_posterior(params, seq)) <= 1e-10


@pytest.mark.parametrize("params", ALL, ids=str)
def test_enumeration_normalised(params):
    for seq in itertools.product((0, 1), repeat=4):
        try:
            b = enumeration_posterior(params, seq, on_impossible="prior")
        except ImpossibleObservationError:
            continue
        assert abs(b.total() - 1.0) <= 1e-12


@pytest.mark.parametrize("k", [0, 2, 4])
def test_enumeration_half_accuracy_uniform(k):
    params = ModelParams(0.5, k, ChoiceMode.WEIGHTED_RANDOM)
    for seq in itertools.product((0, 1), repeat=5):
        pv0, pv1 = enumeration_posterior(params, seq).value_marginal()
        assert abs(pv1 - 0.5) <= 1e-12


def test_agreement_report_shape():
    rep = choice_rule_agreement(ModelParams(0.8, 20), n_agents=20, trials=20, master_seed=0, max_logged=3)
    assert 0.0 <= rep.rate <= 1.0
    assert rep.compared == 400
    assert len(rep.disagreements) <= 3


def test_agreement_perfect_signals():
    # p = 1: both rules are saturated along an all-adopt chain
    rep = choice_rule_agreement(ModelParams(1.0, 1), n_agents=20, trials=5, master_seed=0)
    assert rep.rate == 1.0
