"""Selects the split-scan backend at import time.

The compiled extension (blockfit._scan) is preferred; the numpy fallback
(blockfit._scan_py) implements the identical contract. Set BLOCKFIT_NO_EXT=1
to force the fallback, e.g. for benchmarking or debugging.
"""

import os

if os.environ.get("BLOCKFIT_NO_EXT"):
    from . import _scan_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _scan as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _scan_py as _impl

        BACKEND = "python"

fit_feature_partition = _impl.fit_feature_partition
