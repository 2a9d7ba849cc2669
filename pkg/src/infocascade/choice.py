"""Decision rule of the acting agent and the cascade predicate."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .belief import (
    Action,
    ChoiceMode,
    JointBelief,
    ModelParams,
    Signal,
    acting_agent_posterior,
    tail_masses,
)


@dataclass(frozen=True)
class DecisionWeights:
    """Mass of the count above (``p1``), below (``p2``) and at (``p3``) the threshold."""

    p1: float
    p2: float
    p3: float
    threshold: Fraction

    @property
    def adopt_weight(self) -> float:
        return self.p1 + 0.5 * self.p3

    @property
    def reject_weight(self) -> float:
        return self.p2 + 0.5 * self.p3


def decision_weights(posterior: JointBelief, i: int, params: ModelParams) -> DecisionWeights:
    """Split the acting agent's count marginal around ``(k + i) / 2``."""
    if posterior.j != i:
        raise ValueError(f"posterior covers {posterior.j} agents, expected {i}")
    twice_t = params.k + i
    p1, p2, p3 = tail_masses(posterior.count_marginal(), twice_t)
    return DecisionWeights(p1, p2, p3, Fraction(twice_t, 2))


def deterministic_choice(w: DecisionWeights) -> Action | None:
    """Argmax action, or ``None`` on an exact tie."""
    if w.p1 > w.p2:
        return Action.ADOPT
    if w.p2 > w.p1:
        return Action.REJECT
    return None


def decide_from_uniform(w: DecisionWeights, mode: ChoiceMode, u: float) -> Action:
    """Decision given one uniform draw in ``[0, 1)``.

    Deterministic ties and weighted choices both adopt when ``u`` falls below
    the adopt probability (0.5 for a tie).
    """
    if mode is ChoiceMode.DETERMINISTIC:
        action = deterministic_choice(w)
        if action is not None:
            return action
        return Action.ADOPT if u < 0.5 else Action.REJECT
    return Action.ADOPT if u < w.adopt_weight else Action.REJECT


def decide(w: DecisionWeights, mode: ChoiceMode, rng) -> Action:
    """Draw a decision. ``rng`` needs a ``random()`` method returning a float in ``[0, 1)``.

    One draw is always consumed, even when the deterministic rule needs none.
    """
    return decide_from_uniform(w, ChoiceMode(mode), rng.random())


def signal_branch_actions(
    public: JointBelief, i: int, params: ModelParams
) -> tuple[Action | None, Action | None]:
    """Deterministic decisions of agent ``i`` for a High and for a Low signal."""
    if public.j != i - 1:
        raise ValueError(f"public belief covers {public.j} agents, agent {i} needs {i - 1}")
    out = []
    for own in (Signal.HIGH, Signal.LOW):
        post = acting_agent_posterior(public, own, params)
        out.append(deterministic_choice(decision_weights(post, i, params)))
    return out[0], out[1]


def decision_is_signal_independent(public: JointBelief, i: int, params: ModelParams) -> bool:
    """True when agent ``i`` would take the same action whatever its private signal.

    Uses the deterministic rule; a tie on either branch counts as signal-dependent.
    """
    high, low = signal_branch_actions(public, i, params)
    return high is not None and high is low
