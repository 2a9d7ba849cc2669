import math

import numpy as np
import pytest

from infocascade import rng
from infocascade.belief import Action, ChoiceMode, ModelParams, ObserverModel, Signal, TrueValue, public_belief
from infocascade.oracle import dense_posterior
from infocascade.sim import (
    CascadeKind,
    RunRecord,
    detect_cascade,
    predicate_onset,
    replay_independence,
    run_chain,
    run_once,
    sample_signal,
    terminal_window,
)

DET, RAND = ChoiceMode.DETERMINISTIC, ChoiceMode.WEIGHTED_RANDOM


def high_fraction(v, p, n=10_000, seed=5):
    g = rng.SplitMix64(seed)
    return sum(sample_signal(v, p, g) is Signal.HIGH for _ in range(n)) / n


@pytest.mark.parametrize("v,expected", [(TrueValue.V1, 0.8), (TrueValue.V0, 0.2)])
def test_signal_frequencies(v, expected):
    sigma = math.sqrt(expected * (1 - expected) / 10_000)
    assert abs(high_fraction(v, 0.8) - expected) <= 3 * sigma


def test_half_accuracy_signal_is_fair():
    assert abs(high_fraction(TrueValue.V1, 0.5) - 0.5) <= 3 * 0.005


@pytest.mark.parametrize("k", [0, 1, 2, 20, 40])
def test_perfect_signals_all_adopt(k):
    for seed in range(10):
        rec = run_once(ModelParams(1.0, k), TrueValue.V1, 100, seed=seed)
        assert (rec.signals == Signal.HIGH).all()
        assert (rec.actions == Action.ADOPT).all()


def test_determinism():
    params = ModelParams(0.7, 20, RAND)
    a = run_once(params, TrueValue.V1, 100, seed=42)
    b = run_once(params, TrueValue.V1, 100, seed=42)
    for x, y in [(a.signals, b.signals), (a.actions, b.actions), (a.independent, b.independent)]:
        np.testing.assert_array_equal(x, y)


def test_modes_share_signal_stream():
    a = run_once(ModelParams(0.7, 1, DET), TrueValue.V1, 100, seed=3)
    b = run_once(ModelParams(0.7, 1, RAND), TrueValue.V1, 100, seed=3)
    np.testing.assert_array_equal(a.signals, b.signals)


def test_count_conservation():
    rec = run_once(ModelParams(0.6, 1, RAND), TrueValue.V0, 100, seed=1)
    idx = np.arange(1, 101)
    np.testing.assert_array_equal(rec.cum_adopt + rec.cum_reject, idx)
    assert (np.diff(rec.cum_adopt) >= 0).all() and (np.diff(rec.cum_reject) >= 0).all()
    entries = list(rec.entries())
    assert entries[0][0] == 1 and entries[-1][0] == 100


@pytest.mark.parametrize("mode", list(ChoiceMode))
@pytest.mark.parametrize("observer", list(ObserverModel))
@pytest.mark.parametrize("p,k", [(0.6, 1), (0.8, 1), (0.8, 20), (0.9, 40)])
def test_mirror_property(mode, observer, p, k):
    params = ModelParams(p, k, mode, observer)
    for run in range(5):
        draws = rng.agent_draws(rng.derive_seed(11, run), 100)
        mirrored = np.column_stack([draws[:, 0], 1.0 - draws[:, 1]])
        s1, a1, i1, _ = run_chain(params, TrueValue.V1, draws)
        s0, a0, i0, _ = run_chain(params, TrueValue.V0, mirrored)
        np.testing.assert_array_equal(s0, 1 - s1)
        np.testing.assert_array_equal(a0, 1 - a1)
        np.testing.assert_array_equal(i0, i1)


@pytest.mark.parametrize("mode", list(ChoiceMode))
def test_public_belief_equivalence(mode):
    params = ModelParams(0.8, 3, mode)
    rec = run_once(params, TrueValue.V1, 60, seed=77)
    gen = np.random.default_rng(0)
    for n in sorted(gen.choice(61, 8, replace=False)):
        inc = public_belief(params, rec.actions[:n], on_impossible="prior")
        dense = dense_posterior(params, rec.actions[:n], on_impossible="prior")
        assert np.max(np.abs(inc.cells - dense.cells)) <= 1e-10


def test_stored_flags_match_replay():
    params = ModelParams(0.8, 20)
    rec = run_once(params, TrueValue.V1, 100, seed=5)
    np.testing.assert_array_equal(rec.independent, replay_independence(params, rec.actions))


def _record(actions, v=TrueValue.V1, mode=DET):
    actions = np.asarray(actions, dtype=np.uint8)
    n = len(actions)
    return RunRecord(ModelParams(0.8, 1, mode), v, n, 0, np.zeros(n, np.uint8), actions)


def test_detect_all_adopt():
    st = detect_cascade(_record([0] * 100), 20)
    assert st.kind is CascadeKind.CORRECT and st.onset_window == 1
    assert st.onset_predicate == 3  # agent 2 still ties on a Low signal


def test_detect_alternating():
    st = detect_cascade(_record([0, 1] * 50), 20)
    assert st.kind is CascadeKind.NONE and st.onset_window is None


def test_detect_incorrect_and_v0():
    assert detect_cascade(_record([1] * 30, TrueValue.V1), 20).kind is CascadeKind.INCORRECT
    assert detect_cascade(_record([1] * 30, TrueValue.V0), 20).kind is CascadeKind.CORRECT


def test_detect_weighted_has_no_predicate():
    st = detect_cascade(_record([0] * 30, mode=RAND), 20)
    assert st.onset_predicate is None and st.kind is CascadeKind.CORRECT


def test_detect_window_validated():
    with pytest.raises(ValueError):
        detect_cascade(_record([0] * 10), 11)


def test_window_helpers():
    assert terminal_window([1, 0, 0, 0], 3) == (2, Action.ADOPT)
    assert terminal_window([1, 0, 0, 0], 4) == (None, None)
    assert predicate_onset([1, 0, 1, 1]) == 3
    assert predicate_onset([1, 1, 0]) is None
    assert predicate_onset([]) is None


def test_invalid_agent_count():
    with pytest.raises(ValueError):
        run_once(ModelParams(0.8, 1), TrueValue.V1, 0, seed=1)


@pytest.mark.slow
def test_prior_agents_delay_onset():
    def mean_onset(k):
        onsets = []
        for r in range(1000):
            rec = run_once(ModelParams(0.8, k), TrueValue.V1, 100, rng.derive_seed(0, r))
            o = detect_cascade(rec, 20).onset_predicate
            onsets.append(o if o is not None else 101)
        return np.mean(onsets)

    assert mean_onset(40) > mean_onset(1)
