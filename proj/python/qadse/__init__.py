"""Quantization-aware DNN accelerator design-space exploration.

Thin wrapper over the compiled extension. The heavy lifting (cost oracle,
polynomial surrogates, Pareto extraction, architecture sampling) lives in
the C++ core; see the ``qadse`` command-line tool for batch runs.
"""

from qadse._core import *  # noqa: F401,F403
from qadse._core import __version__  # noqa: F401
