"""Kernel backend selection.

The hot density kernels run jitted through numba by default; setting
``SHUFDETECT_DISABLE_NUMBA=1`` (or numba being unimportable) selects the
pure-numpy fallback.  Both backends export the same function names, and the
test suite pins their agreement.
"""

from __future__ import annotations

import os

_flag = os.environ.get("SHUFDETECT_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in {"1", "true", "yes", "on"}

if NUMBA_DISABLED:
    from . import _kernels_numpy as kernels
    USING_NUMBA = False
else:
    try:
        from . import _kernels_numba as kernels  # noqa: F401
        USING_NUMBA = True
    except ImportError:
        from . import _kernels_numpy as kernels  # noqa: F401
        USING_NUMBA = False
