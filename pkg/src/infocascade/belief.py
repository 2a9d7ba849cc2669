"""Exact discrete belief machinery over the true value V and the high-signal count C.

A :class:`JointBelief` holds ``P(V=v, C=c | actions so far)`` as a ``(2, k+j+1)``
float64 table. Row 0 is ``V=0``, row 1 is ``V=1``; column ``c`` is the number of
High signals among the ``k`` unobserved prior agents and the ``j`` observed ones.

Every reduction over cells goes through :func:`mirror_sum`, which pairs entries
from both ends of the count axis. Because IEEE addition is commutative, that
order makes all operations here exactly equivariant under the relabeling
V0<->V1, High<->Low, Adopt<->Reject, c<->top-c, so ties created by symmetric
beliefs compare equal in floating point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class ImpossibleObservationError(ValueError):
    """An observed action has zero probability under the observer model."""


class InconsistentEvidenceError(ValueError):
    """A private signal contradicts a belief that rules it out (only possible at p = 1)."""


class Signal(enum.IntEnum):
    # High < Low fixes iteration order.
    HIGH = 0
    LOW = 1

    @property
    def mirror(self) -> Signal:
        return Signal.LOW if self is Signal.HIGH else Signal.HIGH


class Action(enum.IntEnum):
    ADOPT = 0
    REJECT = 1

    @property
    def mirror(self) -> Action:
        return Action.REJECT if self is Action.ADOPT else Action.ADOPT


class TrueValue(enum.IntEnum):
    V0 = 0
    V1 = 1

    @property
    def mirror(self) -> TrueValue:
        return TrueValue.V0 if self is TrueValue.V1 else TrueValue.V1


class ChoiceMode(enum.Enum):
    DETERMINISTIC = "det"
    WEIGHTED_RANDOM = "rand"


class ObserverModel(enum.Enum):
    """Which count distribution the observer feeds into the action tables.

    ``ACTOR`` uses the acting agent's posterior given the hypothesised signal,
    so the observer predicts exactly the rule agents follow. ``PUBLIC_MARGINAL``
    uses the public count marginal without conditioning on the signal; under
    deterministic choice it can rule out actions that agents actually take.
    """

    ACTOR = "actor"
    PUBLIC_MARGINAL = "public"


@dataclass(frozen=True)
class ModelParams:
    """Signal accuracy ``p``, unobserved prior agent count ``k``, choice rule and observer model."""

    p: float
    k: int
    mode: ChoiceMode = ChoiceMode.DETERMINISTIC
    observer: ObserverModel = ObserverModel.ACTOR

    def __post_init__(self):
        p = float(self.p)
        if not 0.5 <= p <= 1.0:
            raise ValueError(f"signal accuracy p must lie in [0.5, 1], got {self.p!r}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"prior agent count k must be a non-negative integer, got {self.k!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "mode", ChoiceMode(self.mode))
        object.__setattr__(self, "observer", ObserverModel(self.observer))


@dataclass(frozen=True)
class JointBelief:
    k: int
    j: int
    cells: np.ndarray = field(repr=False)

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.float64)
        if cells.shape != (2, self.k + self.j + 1):
            raise ValueError(
                f"cells must have shape (2, {self.k + self.j + 1}) for k={self.k}, j={self.j}; "
                f"got {cells.shape}"
            )
        if (cells < 0).any():
            raise ValueError("belief cells must be non-negative")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    @property
    def top(self) -> int:
        """Largest representable count, ``k + j``."""
        return self.k + self.j

    def total(self) -> float:
        return mirror_sum(count_marginal(self.cells))

    def value_marginal(self) -> tuple[float, float]:
        """``(P(V=0), P(V=1))``."""
        return mirror_sum(self.cells[0]), mirror_sum(self.cells[1])

    def count_marginal(self) -> np.ndarray:
        return count_marginal(self.cells)

    def mirrored(self) -> JointBelief:
        return JointBelief(self.k, self.j, self.cells[::-1, ::-1])


@dataclass(frozen=True)
class SignalPosterior:
    """Observer's posterior over the acting agent's private signal."""

    pH: float
    pL: float

    def mirrored(self) -> SignalPosterior:
        return SignalPosterior(self.pL, self.pH)


def mirror_sum(values) -> float:
    """Sum ``values`` pairing index ``m`` with ``n-1-m``, outermost pair first.

    Reversing the input gives a bit-identical result.
    """
    vals = values.tolist() if isinstance(values, np.ndarray) else list(values)
    n = len(vals)
    s = 0.0
    lo, hi = 0, n - 1
    while lo < hi:
        s += vals[lo] + vals[hi]
        lo += 1
        hi -= 1
    if lo == hi:
        s += vals[lo]
    return s


def count_marginal(cells: np.ndarray) -> np.ndarray:
    return cells[0] + cells[1]


def tail_masses(marginal, twice_threshold: int, offset: int = 0) -> tuple[float, float, float]:
    """Masses of ``E > t``, ``E < t`` and ``E == t`` where ``E = c + offset``.

    ``t`` is passed doubled so the comparison ``2E`` vs ``2t`` stays in integers.
    The upper tail accumulates from the top of the count axis downward and the
    lower tail from the bottom upward, which keeps the pair mirror-exact.
    """
    vals = marginal.tolist() if isinstance(marginal, np.ndarray) else list(marginal)
    n = len(vals)
    above = 0.0
    for c in range(n - 1, -1, -1):
        if 2 * (c + offset) > twice_threshold:
            above += vals[c]
        else:
            break
    below = 0.0
    for c in range(n):
        if 2 * (c + offset) < twice_threshold:
            below += vals[c]
        else:
            break
    equal = 0.0
    if twice_threshold % 2 == 0:
        c = twice_threshold // 2 - offset
        if 0 <= c < n:
            equal = vals[c]
    return above, below, equal


def signal_likelihood(v: int, signal: Signal, p: float) -> float:
    """``P(X = signal | V = v)``."""
    matched = (v == 1 and signal is Signal.HIGH) or (v == 0 and signal is Signal.LOW)
    return p if matched else 1.0 - p


def make_prior(params: ModelParams) -> JointBelief:
    """Uniform prior on V and a binomial count of High signals among the k prior agents."""
    p, k = params.p, params.k
    q = 1.0 - p
    cells = np.empty((2, k + 1))
    for c in range(k + 1):
        w = 0.5 * math.comb(k, c)
        cells[1, c] = w * (p**c * q ** (k - c))
        cells[0, c] = w * (q**c * p ** (k - c))
    return JointBelief(k, 0, cells)


def _check_step(belief: JointBelief, j: int) -> None:
    if belief.j != j - 1:
        raise ValueError(
            f"belief incorporates {belief.j} actions; observing action {j} needs {j - 1}"
        )


def observer_action_likelihood(
    belief: JointBelief, signal: Signal, j: int, params: ModelParams
) -> tuple[float, float]:
    """``(P(A_j = Adopt | X_j = signal), P(A_j = Reject | X_j = signal))``.

    The count ``E`` (``C_{j-1}`` plus one for High) is compared with
    ``(k + j) / 2`` under the distribution selected by ``params.observer``.
    """
    _check_step(belief, j)
    if params.observer is ObserverModel.ACTOR:
        post = acting_agent_posterior(belief, signal, params)
        above, below, equal = tail_masses(post.count_marginal(), params.k + j)
    else:
        offset = 1 if signal is Signal.HIGH else 0
        above, below, equal = tail_masses(belief.count_marginal(), params.k + j, offset)
    if params.mode is ChoiceMode.DETERMINISTIC:
        if above > below:
            return 1.0, 0.0
        if below > above:
            return 0.0, 1.0
        return 0.5, 0.5
    return above + 0.5 * equal, below + 0.5 * equal


def infer_signal_posterior(
    belief: JointBelief, observed: Action, j: int, params: ModelParams, on_impossible: str = "raise"
) -> SignalPosterior:
    """Posterior over the private signal of agent ``j`` after seeing its action.

    In deterministic mode the acting agent conditions its count estimate on its
    own signal while the observer tables do not, so a simulated agent can take
    an action the observer assigns zero probability. ``on_impossible="raise"``
    signals that with :class:`ImpossibleObservationError`; ``"prior"`` treats
    the action as uninformative and returns the signal prior instead.
    """
    if on_impossible not in ("raise", "prior"):
        raise ValueError(f"on_impossible must be 'raise' or 'prior', got {on_impossible!r}")
    _check_step(belief, j)
    p, q = params.p, 1.0 - params.p
    pv0, pv1 = belief.value_marginal()
    prior_h = pv1 * p + pv0 * q
    prior_l = pv1 * q + pv0 * p
    lik_h = observer_action_likelihood(belief, Signal.HIGH, j, params)[observed]
    lik_l = observer_action_likelihood(belief, Signal.LOW, j, params)[observed]
    num_h = prior_h * lik_h
    num_l = prior_l * lik_l
    z = num_h + num_l
    if not z > 0.0:
        if on_impossible == "prior":
            z = prior_h + prior_l
            return SignalPosterior(prior_h / z, prior_l / z)
        raise ImpossibleObservationError(
            f"action {observed.name} of agent {j} has zero probability under the observer model"
        )
    return SignalPosterior(num_h / z, num_l / z)


def update_public_belief(belief: JointBelief, sp: SignalPosterior) -> JointBelief:
    """Fold one observed agent into the public belief, growing the count axis by one."""
    old = belief.cells
    n = old.shape[1]
    new = np.zeros((2, n + 1))
    new[:, :n] = old * sp.pL
    new[:, 1:] += old * sp.pH
    z = mirror_sum(count_marginal(new))
    return JointBelief(belief.k, belief.j + 1, new / z)


def acting_agent_posterior(belief: JointBelief, own: Signal, params: ModelParams) -> JointBelief:
    """The acting agent's belief over ``(V, C_i)`` after adding its own signal.

    The result incorporates one more agent than ``belief``: its ``j`` is
    ``belief.j + 1`` and a High signal shifts the count axis up by one.
    """
    weights = np.array(
        [[signal_likelihood(0, own, params.p)], [signal_likelihood(1, own, params.p)]]
    )
    reweighted = belief.cells * weights
    z = mirror_sum(count_marginal(reweighted))
    if not z > 0.0:
        raise InconsistentEvidenceError(
            f"signal {own.name} is impossible under the current belief at p={params.p}"
        )
    reweighted = reweighted / z
    n = reweighted.shape[1]
    out = np.zeros((2, n + 1))
    if own is Signal.HIGH:
        out[:, 1:] = reweighted
    else:
        out[:, :n] = reweighted
    return JointBelief(belief.k, belief.j + 1, out)


def observe(
    belief: JointBelief, action: Action, params: ModelParams, on_impossible: str = "raise"
) -> JointBelief:
    """Infer the signal behind ``action`` and fold it into the public belief."""
    sp = infer_signal_posterior(belief, Action(int(action)), belief.j + 1, params, on_impossible)
    return update_public_belief(belief, sp)


def public_belief(params: ModelParams, actions, on_impossible: str = "raise") -> JointBelief:
    """Public belief after an action prefix, built incrementally from the prior."""
    belief = make_prior(params)
    for a in actions:
        belief = observe(belief, Action(int(a)), params, on_impossible)
    return belief
