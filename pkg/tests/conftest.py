import numpy as np
import pytest

from infocascade.belief import (
    ModelParams,
    acting_agent_posterior,
    make_prior,
    observe,
)
from infocascade.choice import decide_from_uniform, decision_is_signal_independent, decision_weights
from infocascade.sim import signal_from_uniform


def compose_chain(params, v_true, draws):
    """Agent chain assembled from the public library functions, no kernel involved."""
    belief = make_prior(params)
    signals, actions, independent = [], [], []
    for idx, (u_signal, u_choice) in enumerate(draws):
        i = idx + 1
        own = signal_from_uniform(v_true, params.p, u_signal)
        w = decision_weights(acting_agent_posterior(belief, own, params), i, params)
        action = decide_from_uniform(w, params.mode, u_choice)
        independent.append(int(decision_is_signal_independent(belief, i, params)))
        signals.append(int(own))
        actions.append(int(action))
        belief = observe(belief, action, params, on_impossible="prior")
    return np.array(signals), np.array(actions), np.array(independent), belief


@pytest.fixture
def p08k1():
    return ModelParams(0.8, 1)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
