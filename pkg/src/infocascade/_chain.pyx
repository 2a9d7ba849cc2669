# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled agent-chain kernel. Mirrors ``_chain_py.simulate_chain`` operation for operation."""

import numpy as np
cimport numpy as cnp

from libc.stdlib cimport malloc, free

from .belief import ImpossibleObservationError

cnp.import_array()

DEF ADOPT = 0
DEF REJECT = 1
DEF HIGH = 0
DEF LOW = 1


cdef inline double _mirror_sum(double* vals, Py_ssize_t n) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t lo = 0, hi = n - 1
    while lo < hi:
        s += vals[lo] + vals[hi]
        lo += 1
        hi -= 1
    if lo == hi:
        s += vals[lo]
    return s


cdef inline void _tails(double* marg, Py_ssize_t n, long twice_t, long offset,
                        double* above, double* below, double* equal) noexcept nogil:
    cdef double a = 0.0, b = 0.0, e = 0.0
    cdef Py_ssize_t c = n - 1
    while c >= 0 and 2 * (c + offset) > twice_t:
        a += marg[c]
        c -= 1
    c = 0
    while c < n and 2 * (c + offset) < twice_t:
        b += marg[c]
        c += 1
    if twice_t % 2 == 0:
        c = twice_t // 2 - offset
        if 0 <= c < n:
            e = marg[c]
    above[0] = a
    below[0] = b
    equal[0] = e


cdef inline int _branch_weights(double* b0, double* b1, Py_ssize_t n, double w0, double w1,
                                long shift, long twice_t, double* r0, double* r1, double* tmp,
                                double* p1, double* p2, double* p3) noexcept nogil:
    cdef Py_ssize_t c
    cdef double z
    for c in range(n):
        r0[c] = b0[c] * w0
        r1[c] = b1[c] * w1
        tmp[c] = r0[c] + r1[c]
    z = _mirror_sum(tmp, n)
    if not z > 0.0:
        return -1
    for c in range(n):
        tmp[c] = r0[c] / z + r1[c] / z
    _tails(tmp, n, twice_t, shift, p1, p2, p3)
    return 0


cdef inline int _argmax(double p1, double p2) noexcept nogil:
    if p1 > p2:
        return ADOPT
    if p2 > p1:
        return REJECT
    return -1


cdef inline double _det_lik(double above, double below, int action) noexcept nogil:
    if above > below:
        return 1.0 if action == ADOPT else 0.0
    if below > above:
        return 0.0 if action == ADOPT else 1.0
    return 0.5


cdef int _run(double* b0, double* b1, double* n0, double* n1, double* r0, double* r1,
              double* tmp, double p, long k, bint weighted, bint public_observer, int v_true,
              const double[:, ::1] draws, unsigned char[::1] signals,
              unsigned char[::1] actions, unsigned char[::1] independent,
              unsigned char[::1] surprised) noexcept nogil:
    cdef Py_ssize_t n_agents = draws.shape[0]
    cdef Py_ssize_t idx, c, n
    cdef long i, twice_t
    cdef double q = 1.0 - p
    cdef double u_signal, u_choice
    cdef double h1, h2, h3, l1, l2, l3, p1, p2, p3
    cdef double ah, bh, eh, al, bl, el, lik_h, lik_l, pv0, pv1, num_h, num_l, z, ph, pl
    cdef double prior_h, prior_l
    cdef int own, det_h, det_l, det, action
    cdef bint correct
    cdef double* swap

    for idx in range(n_agents):
        i = idx + 1
        n = k + i
        twice_t = k + i
        u_signal = draws[idx, 0]
        u_choice = draws[idx, 1]

        correct = u_signal < p
        if v_true == 1:
            own = HIGH if correct else LOW
        else:
            own = LOW if correct else HIGH

        if _branch_weights(b0, b1, n, q, p, 1, twice_t, r0, r1, tmp, &h1, &h2, &h3) < 0:
            return -(idx + 1)
        if _branch_weights(b0, b1, n, p, q, 0, twice_t, r0, r1, tmp, &l1, &l2, &l3) < 0:
            return -(idx + 1)
        det_h = _argmax(h1, h2)
        det_l = _argmax(l1, l2)
        independent[idx] = 1 if (det_h != -1 and det_h == det_l) else 0

        if own == HIGH:
            p1 = h1; p2 = h2; p3 = h3; det = det_h
        else:
            p1 = l1; p2 = l2; p3 = l3; det = det_l
        if weighted:
            action = ADOPT if u_choice < p1 + 0.5 * p3 else REJECT
        elif det == -1:
            action = ADOPT if u_choice < 0.5 else REJECT
        else:
            action = det
        signals[idx] = own
        actions[idx] = action

        if public_observer:
            for c in range(n):
                tmp[c] = b0[c] + b1[c]
            _tails(tmp, n, twice_t, 1, &ah, &bh, &eh)
            _tails(tmp, n, twice_t, 0, &al, &bl, &el)
        else:
            ah = h1; bh = h2; eh = h3
            al = l1; bl = l2; el = l3
        if weighted:
            if action == ADOPT:
                lik_h = ah + 0.5 * eh
                lik_l = al + 0.5 * el
            else:
                lik_h = bh + 0.5 * eh
                lik_l = bl + 0.5 * el
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
            surprised[idx] = 1
            z = prior_h + prior_l
            ph = prior_h / z
            pl = prior_l / z
        for c in range(n + 1):
            n0[c] = 0.0
            n1[c] = 0.0
        for c in range(n):
            n0[c] = b0[c] * pl
            n1[c] = b1[c] * pl
        for c in range(n):
            n0[c + 1] += b0[c] * ph
            n1[c + 1] += b1[c] * ph
        for c in range(n + 1):
            tmp[c] = n0[c] + n1[c]
        z = _mirror_sum(tmp, n + 1)
        for c in range(n + 1):
            n0[c] = n0[c] / z
            n1[c] = n1[c] / z
        swap = b0; b0 = n0; n0 = swap
        swap = b1; b1 = n1; n1 = swap
    return 0


def simulate_chain(prior, double p, long k, bint weighted, int v_true, draws,
                   bint public_observer=False):
    """See ``_chain_py.simulate_chain``; returns uint8 arrays instead of lists."""
    cdef const double[:, ::1] prior_v = np.ascontiguousarray(prior, dtype=np.float64)
    cdef const double[:, ::1] draws_v = np.ascontiguousarray(draws, dtype=np.float64)
    cdef Py_ssize_t n_agents = draws_v.shape[0]
    cdef Py_ssize_t cap = k + n_agents + 2
    cdef Py_ssize_t c
    cdef int status
    if prior_v.shape[0] != 2 or prior_v.shape[1] != k + 1:
        raise ValueError("prior must have shape (2, k+1)")
    if draws_v.shape[1] != 2:
        raise ValueError("draws must have shape (n_agents, 2)")

    signals = np.zeros(n_agents, dtype=np.uint8)
    actions = np.zeros(n_agents, dtype=np.uint8)
    independent = np.zeros(n_agents, dtype=np.uint8)
    surprised = np.zeros(n_agents, dtype=np.uint8)
    cdef unsigned char[::1] s_v = signals
    cdef unsigned char[::1] x_v = surprised
    cdef unsigned char[::1] a_v = actions
    cdef unsigned char[::1] i_v = independent

    cdef double* buf = <double*> malloc(7 * cap * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* b0 = buf
    cdef double* b1 = buf + cap
    cdef double* n0 = buf + 2 * cap
    cdef double* n1 = buf + 3 * cap
    cdef double* r0 = buf + 4 * cap
    cdef double* r1 = buf + 5 * cap
    cdef double* tmp = buf + 6 * cap
    try:
        for c in range(k + 1):
            b0[c] = prior_v[0, c]
            b1[c] = prior_v[1, c]
        with nogil:
            status = _run(b0, b1, n0, n1, r0, r1, tmp, p, k, weighted, public_observer, v_true,
                          draws_v, s_v, a_v, i_v, x_v)
    finally:
        free(buf)
    if status < 0:
        raise ImpossibleObservationError("acting-agent signal has zero probability")
    return signals, actions, independent, surprised
