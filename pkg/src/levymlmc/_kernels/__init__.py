"""Recursion kernels with backend selection at import time.

The compiled extension is used when it imported cleanly and the coefficient
is a catalogue kind; Custom coefficients and the LEVYMLMC_BACKEND=python
override run on the numpy reference backend.  Both backends implement
identical contracts (see _ref.py docstrings); the benchmark suite asserts
their numerical agreement.
"""

import importlib
import os

from . import _ref

_core = None
if os.environ.get("LEVYMLMC_BACKEND", "").lower() not in ("python", "numpy"):
    try:
        _core = importlib.import_module("._core", __name__)
    except ImportError:
        _core = None

BACKEND = "c" if _core is not None else "python"


def _use_core(coeff) -> bool:
    return _core is not None and coeff.kernel_eligible


def euler_path_batch(coeff, x0, dy):
    import numpy as np

    dy = np.ascontiguousarray(dy, dtype=float)
    if _use_core(coeff):
        return _core.euler_path_batch(coeff.kind, *coeff.params, float(x0), dy)
    return _ref.euler_path_batch(coeff, x0, dy)


def coupled_nodes_batch(coeff, x0, dy, m):
    import numpy as np

    dy = np.ascontiguousarray(dy, dtype=float)
    if _use_core(coeff):
        return _core.coupled_nodes_batch(coeff.kind, *coeff.params, float(x0), dy, int(m))
    return _ref.coupled_nodes_batch(coeff, x0, dy, m)


def coupled_terminal_batch(coeff, x0, dy, m):
    import numpy as np

    dy = np.ascontiguousarray(dy, dtype=float)
    if _use_core(coeff):
        return _core.coupled_terminal_batch(coeff.kind, *coeff.params, float(x0), dy, int(m))
    return _ref.coupled_terminal_batch(coeff, x0, dy, m)


def linear_error_recursion(a, b):
    import numpy as np

    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if _core is not None:
        return _core.linear_error_recursion(a, b)
    return _ref.linear_error_recursion(a, b)
