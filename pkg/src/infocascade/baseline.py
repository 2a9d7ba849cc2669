"""Counting model of Bikhchandani et al.: each agent tallies earlier actions plus its own signal.

Runs are vectorised across the run axis; every run consumes the same
``(signal, choice)`` draw pairs as :func:`infocascade.sim.run_once` with the
same seed, so the two models can be compared on identical signal streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .belief import Action, Signal, TrueValue
from .sim import DEFAULT_WINDOW, CascadeKind, CascadeStats, classify, predicate_onset, terminal_window


@dataclass(frozen=True)
class BaselineRunRecord:
    p: float
    v_true: TrueValue
    n_agents: int
    seed: int
    signals: np.ndarray
    actions: np.ndarray
    cascade: CascadeStats


def simulate_basic(p: float, v_true: TrueValue, draws: np.ndarray):
    """Counting-model chains for a batch of draw arrays of shape ``(runs, n_agents, 2)``.

    Returns ``(signals, actions, independent)`` uint8 arrays of shape ``(runs, n_agents)``.
    An agent is signal-independent once the adopt/reject tally differs by two.
    """
    draws = np.asarray(draws, dtype=np.float64)
    runs, n_agents, _ = draws.shape
    correct = draws[:, :, 0] < p
    high = correct if TrueValue(v_true) is TrueValue.V1 else ~correct
    signals = np.where(high, Signal.HIGH, Signal.LOW).astype(np.uint8)
    actions = np.empty((runs, n_agents), dtype=np.uint8)
    independent = np.empty((runs, n_agents), dtype=np.uint8)
    lead = np.zeros(runs, dtype=np.int64)  # adopts minus rejects so far
    for i in range(n_agents):
        evidence = lead + np.where(high[:, i], 1, -1)
        coin = draws[:, i, 1] < 0.5
        adopt = (evidence > 0) | ((evidence == 0) & coin)
        actions[:, i] = np.where(adopt, Action.ADOPT, Action.REJECT)
        independent[:, i] = np.abs(lead) >= 2
        lead += np.where(adopt, 1, -1)
    return signals, actions, independent


def run_basic_once(p: float, v_true: TrueValue, n_agents: int, seed: int, window: int = DEFAULT_WINDOW) -> BaselineRunRecord:
    if n_agents < 1:
        raise ValueError("n_agents must be at least 1")
    v_true = TrueValue(v_true)
    draws = rng.agent_draws(seed, n_agents)[None]
    s, a, ind = simulate_basic(p, v_true, draws)
    onset_window, action = terminal_window(a[0], min(window, n_agents))
    stats = CascadeStats(classify(action, v_true), predicate_onset(ind[0]), onset_window)
    return BaselineRunRecord(p, v_true, n_agents, int(seed), s[0], a[0], stats)


def _classify_batch(actions: np.ndarray, window: int, v_true: TrueValue) -> np.ndarray:
    tail = actions[:, -window:]
    uniform = (tail == tail[:, :1]).all(axis=1)
    aligned = Action.ADOPT if v_true is TrueValue.V1 else Action.REJECT
    kinds = np.full(actions.shape[0], CascadeKind.NONE.value, dtype=object)
    kinds[uniform & (tail[:, 0] == aligned)] = CascadeKind.CORRECT.value
    kinds[uniform & (tail[:, 0] != aligned)] = CascadeKind.INCORRECT.value
    return kinds


def estimate_cascade_probabilities(
    p: float,
    n_agents: int,
    runs: int,
    master_seed: int,
    window: int = DEFAULT_WINDOW,
    v_true: TrueValue = TrueValue.V1,
    chunk: int = 2000,
) -> tuple[float, float, float]:
    """Monte Carlo ``(pCorrect, pIncorrect, pNone)`` classified by the terminal window."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    window = min(window, n_agents)
    v_true = TrueValue(v_true)
    counts = {kind.value: 0 for kind in CascadeKind}
    for start in range(0, runs, chunk):
        idx = np.arange(start, min(start + chunk, runs))
        seeds = rng.derive_seeds(master_seed, idx)
        draws = rng.uniforms(seeds, 2 * n_agents).reshape(len(idx), n_agents, 2)
        _, actions, _ = simulate_basic(p, v_true, draws)
        kinds = _classify_batch(actions, window, v_true)
        for kind in counts:
            counts[kind] += int((kinds == kind).sum())
    return (
        counts[CascadeKind.CORRECT.value] / runs,
        counts[CascadeKind.INCORRECT.value] / runs,
        counts[CascadeKind.NONE.value] / runs,
    )
