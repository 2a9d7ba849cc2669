"""Picks the chain kernel at import: compiled when available, pure Python otherwise.

Set ``INFOCASCADE_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _chain_py

python_simulate_chain = _chain_py.simulate_chain
compiled_simulate_chain = None

if os.environ.get("INFOCASCADE_PURE_PYTHON") != "1":
    try:
        from ._chain import simulate_chain as compiled_simulate_chain
    except ImportError:
        compiled_simulate_chain = None

if compiled_simulate_chain is not None:
    simulate_chain = compiled_simulate_chain
    BACKEND = "compiled"
else:
    simulate_chain = python_simulate_chain
    BACKEND = "python"
