"""Select the compiled inner loops when available.

Set ``REALLIFE_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _fallback

COMPILED = False
if os.environ.get("REALLIFE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl

        COMPILED = True
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

gather_correlate = _impl.gather_correlate
directed_hausdorff_sq = _impl.directed_hausdorff_sq
