"""Generative environment and single-run simulation loop."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend, rng
from .belief import (
    Action,
    ChoiceMode,
    ModelParams,
    ObserverModel,
    Signal,
    TrueValue,
    make_prior,
    observe,
)
from .choice import decision_is_signal_independent

DEFAULT_WINDOW = 20


class CascadeKind(enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    NONE = "none"


@dataclass(frozen=True)
class RunRecord:
    """One simulated chain.

    ``signals`` and ``actions`` are uint8 arrays using the enum values of
    :class:`Signal` and :class:`Action`. ``independent[i]`` flags agents whose
    deterministic decision would not have depended on their signal; it is
    ``None`` for records rebuilt from files. ``surprised[i]`` flags agents
    whose action the observer tables ruled out, so the public update treated
    it as uninformative.
    """

    params: ModelParams
    v_true: TrueValue
    n_agents: int
    seed: int
    signals: np.ndarray
    actions: np.ndarray
    independent: Optional[np.ndarray] = None
    surprised: Optional[np.ndarray] = None

    @property
    def cum_adopt(self) -> np.ndarray:
        return np.cumsum(self.actions == Action.ADOPT)

    @property
    def cum_reject(self) -> np.ndarray:
        return np.cumsum(self.actions == Action.REJECT)

    def entries(self):
        """Yield ``(agent_index, signal, action, cum_adopt, cum_reject)``, agents numbered from 1."""
        ca, cr = self.cum_adopt, self.cum_reject
        for i in range(self.n_agents):
            yield i + 1, Signal(self.signals[i]), Action(self.actions[i]), int(ca[i]), int(cr[i])


@dataclass(frozen=True)
class CascadeStats:
    kind: CascadeKind
    onset_predicate: Optional[int]
    onset_window: Optional[int]


def sample_signal(v: TrueValue, p: float, rng_) -> Signal:
    """High with probability ``p`` under V1 and ``1 - p`` under V0."""
    return signal_from_uniform(v, p, rng_.random())


def signal_from_uniform(v: TrueValue, p: float, u: float) -> Signal:
    correct = u < p
    if TrueValue(v) is TrueValue.V1:
        return Signal.HIGH if correct else Signal.LOW
    return Signal.LOW if correct else Signal.HIGH


def run_chain(params: ModelParams, v_true: TrueValue, draws: np.ndarray, kernel=None):
    """Run the kernel on explicit ``(n_agents, 2)`` draws.

    Returns uint8 arrays ``(signals, actions, independent, surprised)``.
    """
    kernel = kernel or _backend.simulate_chain
    prior = make_prior(params).cells
    weighted = params.mode is ChoiceMode.WEIGHTED_RANDOM
    public = params.observer is ObserverModel.PUBLIC_MARGINAL
    out = kernel(prior, params.p, params.k, weighted, int(v_true), draws, public)
    return tuple(np.asarray(x, dtype=np.uint8) for x in out)


def run_once(params: ModelParams, v_true: TrueValue, n_agents: int, seed: int, kernel=None) -> RunRecord:
    """Simulate ``n_agents`` agents acting in sequence; a pure function of its arguments."""
    if n_agents < 1:
        raise ValueError("n_agents must be at least 1")
    v_true = TrueValue(v_true)
    draws = rng.agent_draws(seed, n_agents)
    s, a, ind, sur = run_chain(params, v_true, draws, kernel)
    return RunRecord(params, v_true, n_agents, int(seed), s, a, ind, sur)


def replay_independence(params: ModelParams, actions) -> np.ndarray:
    """Signal-independence flags recomputed from an action sequence with the belief library."""
    belief = make_prior(params)
    flags = np.zeros(len(actions), dtype=np.uint8)
    for idx, a in enumerate(actions):
        flags[idx] = decision_is_signal_independent(belief, idx + 1, params)
        belief = observe(belief, Action(int(a)), params, on_impossible="prior")
    return flags


def terminal_window(actions, window: int) -> tuple[Optional[int], Optional[Action]]:
    """Start (1-based) and action of the final identical run if it spans at least ``window`` agents."""
    n = len(actions)
    if n == 0:
        return None, None
    last = int(actions[-1])
    start = n - 1
    while start > 0 and int(actions[start - 1]) == last:
        start -= 1
    if n - start < window:
        return None, None
    return start + 1, Action(last)


def predicate_onset(flags) -> Optional[int]:
    """First agent from which every later agent is signal-independent."""
    n = len(flags)
    if n == 0 or not flags[-1]:
        return None
    start = n - 1
    while start > 0 and flags[start - 1]:
        start -= 1
    return start + 1


def classify(action: Optional[Action], v_true: TrueValue) -> CascadeKind:
    if action is None:
        return CascadeKind.NONE
    aligned = Action.ADOPT if TrueValue(v_true) is TrueValue.V1 else Action.REJECT
    return CascadeKind.CORRECT if action is aligned else CascadeKind.INCORRECT


def detect_cascade(record: RunRecord, W: int = DEFAULT_WINDOW, params: Optional[ModelParams] = None) -> CascadeStats:
    """Classify a run and locate both cascade onsets.

    The predicate onset is only defined for deterministic runs; it uses the
    record's stored flags or replays the action prefix when they are absent.
    """
    if not 1 <= W <= record.n_agents:
        raise ValueError(f"window must lie in [1, {record.n_agents}], got {W}")
    params = params or record.params
    onset_window, action = terminal_window(record.actions, W)
    onset_pred = None
    if params.mode is ChoiceMode.DETERMINISTIC:
        flags = record.independent
        if flags is None:
            flags = replay_independence(params, record.actions)
        onset_pred = predicate_onset(flags)
    return CascadeStats(classify(action, record.v_true), onset_pred, onset_window)
