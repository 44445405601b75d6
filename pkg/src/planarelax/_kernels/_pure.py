"""Pure Python/NumPy backend for the hull and grid-sweep kernels.

Mirrors the API of the compiled extension `_hull`; used when the
extension is not built or when PLANARELAX_PURE=1 is set.
"""

import numpy as np


def hull_indices(x, y):
    """Indices of the lower convex hull of points (x, y), x strictly increasing.

    Interior collinear points are dropped.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    stack = []
    for i in range(n):
        xi = x[i]
        yi = y[i]
        while len(stack) >= 2:
            i0 = stack[-2]
            i1 = stack[-1]
            # pop while the middle point is on or above the chord i0 -> i
            if (x[i1] - x[i0]) * (yi - y[i0]) - (xi - x[i0]) * (y[i1] - y[i0]) <= 0.0:
                stack.pop()
            else:
                break
        stack.append(i)
    return np.array(stack, dtype=np.int64)


def hull_values(x, y):
    """Lower convex hull of points (x, y) evaluated at every x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    idx = hull_indices(x, y)
    out = np.interp(x, x[idx], y[idx])
    # the hull never exceeds the data; guard against interpolation round-off
    np.minimum(out, y, out=out)
    return out


def sweep_grid(values, x, y):
    """One in-place convexification sweep: all rows along y, then all columns along x.

    Returns the largest per-node change normalized by 1 + |value|.
    """
    values = np.asarray(values)
    nx, ny = values.shape
    resid = 0.0
    for i in range(nx):
        row = values[i, :]
        new = hull_values(y, row)
        resid = max(resid, float(np.max((row - new) / (1.0 + np.abs(new)))))
        values[i, :] = new
    for j in range(ny):
        col = values[:, j]
        new = hull_values(x, col)
        resid = max(resid, float(np.max((col - new) / (1.0 + np.abs(new)))))
        values[:, j] = new
    return resid
