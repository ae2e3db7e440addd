"""Hot-loop kernels, compiled when available.

The Cython module ``_core`` is used unless it failed to build or the
environment variable ``OFFENSEVAL_PURE_PYTHON=1`` is set, in which case the
numpy implementations in ``_pycore`` are used. ``BACKEND`` names the choice.
"""

import os

from . import _pycore

BACKEND = "python"
_impl = _pycore
if os.environ.get("OFFENSEVAL_PURE_PYTHON", "") != "1":
    try:
        from . import _core
    except ImportError:
        pass
    else:
        _impl = _core
        BACKEND = "cython"

lstm_forward_steps = _impl.lstm_forward_steps
lstm_backward_steps = _impl.lstm_backward_steps
hinge_sgd_epoch = _impl.hinge_sgd_epoch


def available_backends():
    """Map backend name to module, for cross-checking and benchmarks."""
    out = {"python": _pycore}
    try:
        from . import _core
    except ImportError:
        pass
    else:
        out["cython"] = _core
    return out
