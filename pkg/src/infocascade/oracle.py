"""Independent reference implementations used to validate the belief library.

Nothing here reuses the arithmetic helpers of :mod:`infocascade.belief`: tables
are preallocated at their final size, tail masses come from boolean masks and
``numpy.sum``, and the acting-agent posterior is recomputed from scratch. Only
the value types and exception classes are shared.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import rng
from .belief import (
    Action,
    ChoiceMode,
    ImpossibleObservationError,
    JointBelief,
    ModelParams,
    ObserverModel,
    TrueValue,
)

log = logging.getLogger(__name__)

ENUMERATION_MAX_K = 6
ENUMERATION_MAX_LEN = 10


class EnumerationTooLargeError(ValueError):
    pass


def _prior_table(p: float, k: int, width: int) -> np.ndarray:
    t = np.zeros((2, width))
    for c in range(k + 1):
        t[1, c] = 0.5 * comb(k, c) * p**c * (1 - p) ** (k - c)
        t[0, c] = 0.5 * comb(k, c) * (1 - p) ** c * p ** (k - c)
    return t


def _split(dist: np.ndarray, twice_t: int) -> tuple[float, float, float]:
    """Masses of counts above, below and at ``twice_t / 2`` for a distribution over counts 0..n-1."""
    twice_c = 2 * np.arange(dist.size)
    return (
        float(dist[twice_c > twice_t].sum()),
        float(dist[twice_c < twice_t].sum()),
        float(dist[twice_c == twice_t].sum()),
    )


def _action_probs(above: float, below: float, equal: float, mode: ChoiceMode) -> np.ndarray:
    """``[P(Adopt), P(Reject)]`` for the given split."""
    if mode is ChoiceMode.WEIGHTED_RANDOM:
        return np.array([above + equal / 2, below + equal / 2])
    if above > below:
        return np.array([1.0, 0.0])
    if above < below:
        return np.array([0.0, 1.0])
    return np.array([0.5, 0.5])


def _observer_table(table: np.ndarray, used: int, j: int, params: ModelParams) -> np.ndarray:
    """``lik[x, a] = P(A_j = a | X_j = x)`` with x = 0 for High and 1 for Low.

    ``table`` holds the public belief over counts ``0..used-1``.
    """
    p, k = params.p, params.k
    lik = np.empty((2, 2))
    for x in (0, 1):
        count = np.zeros(used + 1)
        if params.observer is ObserverModel.ACTOR:
            # agent j's own posterior given signal x, then its count C_j
            p_x_v0 = (1 - p) if x == 0 else p
            p_x_v1 = p if x == 0 else (1 - p)
            joint = np.vstack([table[0, :used] * p_x_v0, table[1, :used] * p_x_v1])
            joint /= joint.sum()
            marginal = joint.sum(axis=0)
        else:
            marginal = table[:, :used].sum(axis=0)
        if x == 0:
            count[1:] = marginal
        else:
            count[:used] = marginal
        lik[x] = _action_probs(*_split(count, k + j), params.mode)
    return lik


def _walk(params: ModelParams, actions, on_impossible: str):
    """Yield ``(j, table, used, lik)`` along the public path, finishing with the final table."""
    k = params.k
    width = k + len(actions) + 1
    table = _prior_table(params.p, k, width)
    used = k + 1
    for j, a in enumerate(actions, start=1):
        a = int(Action(int(a)))
        lik = _observer_table(table, used, j, params)
        pv1 = table[1].sum()
        pv0 = table[0].sum()
        prior_x = np.array(
            [pv1 * params.p + pv0 * (1 - params.p), pv1 * (1 - params.p) + pv0 * params.p]
        )
        post = prior_x * lik[:, a]
        if post.sum() <= 0.0:
            if on_impossible != "prior":
                raise ImpossibleObservationError(
                    f"action {Action(a).name} at step {j} has zero probability (oracle)"
                )
            post = prior_x
        post = post / post.sum()
        yield j, table, used, lik
        new = np.zeros_like(table)
        new[:, :used] += table[:, :used] * post[1]
        new[:, 1 : used + 1] += table[:, :used] * post[0]
        table = new / new.sum()
        used += 1
    yield None, table, used, None


def dense_posterior(params: ModelParams, actions, on_impossible: str = "raise") -> JointBelief:
    """Public belief after ``actions``, recomputed in one pass over a full-width table."""
    *_, (_, table, used, _) = _walk(params, list(actions), on_impossible)
    return JointBelief(params.k, len(actions), table[:, :used])


def enumeration_posterior(params: ModelParams, actions, on_impossible: str = "raise") -> JointBelief:
    """Full-history posterior over ``(V, C_j)`` by enumerating V, C_0 and every signal history.

    Action likelihoods at each step are the observer tables evaluated along the
    realized public path; unlike the recursion, the weight of each signal
    history depends on V.
    """
    actions = [int(Action(int(a))) for a in actions]
    k, n = params.k, len(actions)
    if k > ENUMERATION_MAX_K or n > ENUMERATION_MAX_LEN:
        raise EnumerationTooLargeError(
            f"enumeration limited to k <= {ENUMERATION_MAX_K} and length <= {ENUMERATION_MAX_LEN}; "
            f"got k={k}, length={n}"
        )
    liks = [lik for j, _, _, lik in _walk(params, actions, on_impossible) if j is not None]
    p = params.p
    out = np.zeros((2, k + n + 1))
    for v in (0, 1):
        p_high = p if v == 1 else 1 - p
        for c0 in range(k + 1):
            w0 = 0.5 * comb(k, c0) * p_high**c0 * (1 - p_high) ** (k - c0)
            for history in itertools.product((0, 1), repeat=n):
                w = w0
                for x, a, lik in zip(history, actions, liks):
                    w *= (p_high if x == 0 else 1 - p_high) * lik[x, a]
                out[v, c0 + history.count(0)] += w
    total = out.sum()
    if total <= 0.0:
        raise ImpossibleObservationError("action sequence has zero probability (enumeration)")
    return JointBelief(k, n, out / total)


def max_cell_difference(a: JointBelief, b: JointBelief) -> float:
    return float(np.max(np.abs(a.cells - b.cells)))


@dataclass
class AgreementReport:
    rate: float
    compared: int
    disagreements: list = field(default_factory=list)


def _c_rule(post: np.ndarray, twice_t: int) -> int:
    above, below, _ = _split(post.sum(axis=0), twice_t)
    return 0 if above > below else (1 if below > above else -1)


def _v_rule(post: np.ndarray) -> int:
    pv1 = post[1].sum()
    pv0 = post[0].sum()
    return 0 if pv1 > pv0 else (1 if pv0 > pv1 else -1)


def choice_rule_agreement(
    params: ModelParams, n_agents: int, trials: int, master_seed: int, max_logged: int = 20
) -> AgreementReport:
    """Fraction of acting-agent decisions where the count-threshold rule and the
    ``P(V=1 | X_i, actions) > 0.5`` rule give the same classification (Adopt, Reject or tie).

    Chains are simulated with the library and replayed here along their actions.
    """
    from .sim import run_once

    agree = total = 0
    disagreements = []
    for t in range(trials):
        seed = rng.derive_seed(master_seed, t)
        record = run_once(params, TrueValue.V1, n_agents, seed)
        for j, table, used, _ in _walk(params, record.actions, "prior"):
            if j is None:
                break
            x = int(record.signals[j - 1])
            p_x_v0 = (1 - params.p) if x == 0 else params.p
            p_x_v1 = params.p if x == 0 else (1 - params.p)
            post = np.zeros((2, used + 1))
            lo = 1 if x == 0 else 0
            post[0, lo : lo + used] = table[0, :used] * p_x_v0
            post[1, lo : lo + used] = table[1, :used] * p_x_v1
            post /= post.sum()
            c_dec, v_dec = _c_rule(post, params.k + j), _v_rule(post)
            total += 1
            if c_dec == v_dec:
                agree += 1
            elif len(disagreements) < max_logged:
                disagreements.append((t, j, x, c_dec, v_dec))
                log.debug("rule disagreement run=%d agent=%d signal=%d c=%d v=%d", t, j, x, c_dec, v_dec)
    return AgreementReport(agree / total if total else 1.0, total, disagreements)
