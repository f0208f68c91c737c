"""Backend selection for the numerical kernels.

The compiled extension is preferred. Setting the environment variable
``ROUGHHJ_PURE_PYTHON=1`` forces the numpy fallback, which is also used
automatically when the extension was not built.
"""

import os

from . import _pykernels

TAG_ABS = _pykernels.TAG_ABS
TAG_QUADRATIC = _pykernels.TAG_QUADRATIC
TAG_POWER = _pykernels.TAG_POWER
TAG_SATURATED = _pykernels.TAG_SATURATED
TAG_ZERO = _pykernels.TAG_ZERO


def _load():
    if os.environ.get("ROUGHHJ_PURE_PYTHON", "") not in ("", "0"):
        return _pykernels, "python"
    try:
        from . import _ckernels
    except ImportError:
        return _pykernels, "python"
    return _ckernels, "compiled"


_impl, BACKEND = _load()

window_max = _impl.window_max
lower_hull = _impl.lower_hull
lf_run_1d = _impl.lf_run_1d
lf_run_2d = _impl.lf_run_2d
eval_tagged = _pykernels.eval_tagged
