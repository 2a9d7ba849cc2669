"""SplitMix64 streams: per-run seed derivation and uniform draws.

A run's seed is output number ``run_index`` of a SplitMix64 generator started
at ``master_seed``, so any run can be regenerated without touching the others
and serial and parallel sweeps see the same numbers. Each run then owns a
SplitMix64 stream seeded with that value. Uniforms take the top 53 bits.

The vectorised functions rely on numpy's wrapping uint64 arithmetic.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, run_index: int) -> int:
    """Seed of run ``run_index`` (0-based) under ``master_seed``."""
    return mix64(master_seed + (run_index + 1) * GOLDEN)


class SplitMix64:
    """Minimal scalar generator with a ``random()`` method, used where a single draw is needed."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def derive_seeds(master_seed: int, run_indices) -> np.ndarray:
    idx = np.asarray(run_indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = np.uint64(master_seed & MASK64) + (idx + np.uint64(1)) * np.uint64(GOLDEN)
        return _mix64_array(base)


def uniforms(seeds, count: int) -> np.ndarray:
    """First ``count`` uniforms of each seed's stream, shape ``(len(seeds), count)``."""
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    steps = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        states = seeds[:, None] + steps[None, :] * np.uint64(GOLDEN)
        bits = _mix64_array(states)
    return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53


def agent_draws(seed: int, n_agents: int) -> np.ndarray:
    """Per-agent ``(signal_draw, choice_draw)`` pairs for one run, shape ``(n_agents, 2)``."""
    return uniforms([seed], 2 * n_agents)[0].reshape(n_agents, 2)
