"""Pure-Python agent-chain kernel, used when the compiled ``_chain`` extension is missing.

Line-for-line twin of ``_chain.pyx``: same operations in the same order, so both
produce bit-identical records. It also matches composing the functions in
:mod:`infocascade.belief`, which the test-suite checks.
"""

from __future__ import annotations

from .belief import ImpossibleObservationError

HIGH, LOW = 0, 1
ADOPT, REJECT = 0, 1


def _mirror_sum(vals, n):
    s = 0.0
    lo, hi = 0, n - 1
    while lo < hi:
        s += vals[lo] + vals[hi]
        lo += 1
        hi -= 1
    if lo == hi:
        s += vals[lo]
    return s


def _tails(marg, n, twice_t, offset):
    above = 0.0
    c = n - 1
    while c >= 0 and 2 * (c + offset) > twice_t:
        above += marg[c]
        c -= 1
    below = 0.0
    c = 0
    while c < n and 2 * (c + offset) < twice_t:
        below += marg[c]
        c += 1
    equal = 0.0
    if twice_t % 2 == 0:
        c = twice_t // 2 - offset
        if 0 <= c < n:
            equal = marg[c]
    return above, below, equal


def _branch_weights(b0, b1, n, w0, w1, shift, twice_t):
    r0 = [x * w0 for x in b0[:n]]
    r1 = [x * w1 for x in b1[:n]]
    z = _mirror_sum([r0[c] + r1[c] for c in range(n)], n)
    if not z > 0.0:
        raise ImpossibleObservationError("acting-agent signal has zero probability")
    marg = [r0[c] / z + r1[c] / z for c in range(n)]
    return _tails(marg, n, twice_t, shift)


def _argmax(p1, p2):
    if p1 > p2:
        return ADOPT
    if p2 > p1:
        return REJECT
    return -1


def simulate_chain(prior, p, k, weighted, v_true, draws, public_observer=False):
    """Run one chain of ``len(draws)`` agents.

    ``prior`` is the ``(2, k+1)`` starting belief and ``draws`` holds the
    per-agent ``(signal, choice)`` uniforms. ``public_observer`` selects the
    observer that reads the unconditioned public count marginal instead of
    replaying the acting agent's rule. Returns lists ``signals``,
    ``actions`` and ``independent`` (1 where the deterministic decision would
    not depend on the private signal).
    """
    n_agents = len(draws)
    q = 1.0 - p
    b0 = [float(x) for x in prior[0]]
    b1 = [float(x) for x in prior[1]]
    signals = [0] * n_agents
    actions = [0] * n_agents
    independent = [0] * n_agents
    surprised = [0] * n_agents
    for idx in range(n_agents):
        i = idx + 1
        n = k + i
        twice_t = k + i
        u_signal = float(draws[idx][0])
        u_choice = float(draws[idx][1])

        correct = u_signal < p
        if v_true == 1:
            own = HIGH if correct else LOW
        else:
            own = LOW if correct else HIGH

        h1, h2, h3 = _branch_weights(b0, b1, n, q, p, 1, twice_t)
        l1, l2, l3 = _branch_weights(b0, b1, n, p, q, 0, twice_t)
        det_h = _argmax(h1, h2)
        det_l = _argmax(l1, l2)
        independent[idx] = 1 if (det_h != -1 and det_h == det_l) else 0

        if own == HIGH:
            p1, _p2, p3, det = h1, h2, h3, det_h
        else:
            p1, _p2, p3, det = l1, l2, l3, det_l
        if weighted:
            action = ADOPT if u_choice < p1 + 0.5 * p3 else REJECT
        elif det == -1:
            action = ADOPT if u_choice < 0.5 else REJECT
        else:
            action = det
        signals[idx] = own
        actions[idx] = action

        # observer update of the shared public belief
        if public_observer:
            marg = [b0[c] + b1[c] for c in range(n)]
            ah, bh, eh = _tails(marg, n, twice_t, 1)
            al, bl, el = _tails(marg, n, twice_t, 0)
        else:
            ah, bh, eh = h1, h2, h3
            al, bl, el = l1, l2, l3
        if weighted:
            lik_h = ah + 0.5 * eh if action == ADOPT else bh + 0.5 * eh
            lik_l = al + 0.5 * el if action == ADOPT else bl + 0.5 * el
        else:
            lik_h = _det_lik(ah, bh, action)
            lik_l = _det_lik(al, bl, action)
        pv0 = _mirror_sum(b0, n)
        pv1 = _mirror_sum(b1, n)
        prior_h = pv1 * p + pv0 * q
        prior_l = pv1 * q + pv0 * p
        num_h = prior_h * lik_h
        num_l = prior_l * lik_l
        z = num_h + num_l
        if z > 0.0:
            ph = num_h / z
            pl = num_l / z
        else:
            # action ruled out by the observer tables: treat it as uninformative
            surprised[idx] = 1
            z = prior_h + prior_l
            ph = prior_h / z
            pl = prior_l / z
        n0 = [0.0] * (n + 1)
        n1 = [0.0] * (n + 1)
        for c in range(n):
            n0[c] = b0[c] * pl
            n1[c] = b1[c] * pl
        for c in range(n):
            n0[c + 1] += b0[c] * ph
            n1[c + 1] += b1[c] * ph
        z = _mirror_sum([n0[c] + n1[c] for c in range(n + 1)], n + 1)
        b0 = [x / z for x in n0]
        b1 = [x / z for x in n1]
    return signals, actions, independent, surprised


def _det_lik(above, below, action):
    if above > below:
        return 1.0 if action == ADOPT else 0.0
    if below > above:
        return 0.0 if action == ADOPT else 1.0
    return 0.5
