"""Hull and grid-sweep kernels with backend selection at import time.

The compiled Cython extension is preferred; the pure NumPy/Python
implementation is used when the extension is unavailable or when the
environment variable PLANARELAX_PURE=1 is set.  Both backends expose

    hull_indices(x, y)   -> int64 indices of the lower convex hull
    hull_values(x, y)    -> hull evaluated at every x
    sweep_grid(v, x, y)  -> one in-place row+column convexification sweep

`BACKEND` names the active implementation ("compiled" or "pure").
"""

import os

from . import _pure

if os.environ.get("PLANARELAX_PURE") == "1":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _hull as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

hull_indices = _impl.hull_indices
hull_values = _impl.hull_values
sweep_grid = _impl.sweep_grid

__all__ = ["BACKEND", "hull_indices", "hull_values", "sweep_grid", "_pure"]
