"""Select the window-moment implementation at import time.

Set ``SSIMLAB_PURE_PYTHON=1`` to force the numpy path.
"""

import os

from . import _fallback

python_window_moments = _fallback.window_moments

if os.environ.get("SSIMLAB_PURE_PYTHON"):
    compiled_window_moments = None
else:
    try:
        from ._window import window_moments as compiled_window_moments
    except ImportError:
        compiled_window_moments = None

if compiled_window_moments is not None:
    window_moments = compiled_window_moments
    BACKEND = "cython"
else:
    window_moments = python_window_moments
    BACKEND = "python"
