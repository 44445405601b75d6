"""Quasiconvexity classification of conformally invariant energies.

For this energy class the generalized convexity notions (rank-one,
quasi-, poly-) coincide and reduce to: the ratio form h is convex and
non-decreasing on [1, inf).  The checks here are grid-based
semi-decisions: a failure comes with witnesses and is conclusive up to
evaluation error, while a pass means no violation was found on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import EvaluationError

__all__ = [
    "GridSpec",
    "Grid2DSpec",
    "ConvexityVerdict",
    "CriterionResult",
    "classify_h",
    "criterion_vii",
    "separately_convex_g",
]

CONVEXITY_TOL = 1e-9  # on divided differences, times a local value scale
VII_TOL = 1e-7  # on the distortion-form criterion, times a cancellation scale


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced ratio samples on [1, t_max]."""

    n: int = 512
    t_max: float = 1e4

    def points(self) -> np.ndarray:
        return np.exp(np.linspace(0.0, math.log(self.t_max), self.n))


@dataclass(frozen=True)
class Grid2DSpec:
    """Log-spaced rectangular grid on (0, inf)^2 for the g-form check."""

    n: int = 64
    lo: float = 0.1
    hi: float = 10.0

    def axis(self) -> np.ndarray:
        return np.exp(np.linspace(math.log(self.lo), math.log(self.hi), self.n))


@dataclass
class CriterionResult:
    ok: bool
    witnesses: list = field(default_factory=list)
    min_value: float = math.nan
    argmin: float = math.nan
    indeterminate: bool = False


@dataclass
class ConvexityVerdict:
    h_convex: bool
    h_nondecreasing_on_1inf: bool
    overall: bool
    witnesses: dict = field(default_factory=dict)
    g_separately_convex: bool | None = None
    psi_criterion_vii: bool | None = None
    inconsistencies: list = field(default_factory=list)
    grid: GridSpec | None = None


def _check_finite(values, points, what):
    bad = ~np.isfinite(values)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise EvaluationError(f"{what} is not finite at sample {points[i]!r}")


def _second_divided_differences(x, y):
    d1 = np.diff(y) / np.diff(x)
    return (d1[1:] - d1[:-1]) / (x[2:] - x[:-2])


def _line_witnesses(x, y, tol):
    """Convexity and monotonicity violations along one sampled line."""
    scale = (np.abs(y[:-2]) + np.abs(y[1:-1]) + np.abs(y[2:])) / 3.0 + 1e-300
    dd2 = _second_divided_differences(x, y)
    conv_bad = dd2 < -tol * np.maximum(scale, 1e-12)
    mono_scale = np.maximum((np.abs(y[:-1]) + np.abs(y[1:])) / 2.0, 1e-12)
    mono_bad = np.diff(y) < -tol * mono_scale
    conv_w = [(float(x[i + 1]), float(dd2[i])) for i in np.nonzero(conv_bad)[0][:10]]
    mono_w = [(float(x[i]), float(y[i + 1] - y[i])) for i in np.nonzero(mono_bad)[0][:10]]
    return conv_w, mono_w


def classify_h(energy, grid: GridSpec = GridSpec(), *,
               check_g: bool = False, check_vii: bool = False,
               tol: float = CONVEXITY_TOL) -> ConvexityVerdict:
    """Judge convexity and monotonicity of h on log-spaced samples.

    Convexity uses second divided differences, monotonicity first
    differences, both with tolerance -tol times a local value scale.
    Optional cross-checks against the g form and the distortion-form
    criterion are recorded; disagreements are reported, never reconciled.
    """
    if grid.n < 100:
        raise ValueError("classify_h needs at least 100 samples")
    t = grid.points()
    y = np.asarray(energy.h(t), dtype=float)
    _check_finite(y, t, "h")
    conv_w, mono_w = _line_witnesses(t, y, tol)
    verdict = ConvexityVerdict(
        h_convex=not conv_w,
        h_nondecreasing_on_1inf=not mono_w,
        overall=not conv_w and not mono_w,
        witnesses={"convexity": conv_w, "monotonicity": mono_w},
        grid=grid,
    )
    if check_g:
        res = separately_convex_g(energy, tol=tol)
        verdict.g_separately_convex = res.ok
        verdict.witnesses["g_rows_cols"] = res.witnesses
        if res.ok != verdict.overall:
            verdict.inconsistencies.append(
                f"g-form separate convexity ({res.ok}) disagrees with h verdict ({verdict.overall})"
            )
    if check_vii:
        res = criterion_vii(energy, grid)
        verdict.psi_criterion_vii = res.ok
        verdict.witnesses["psi_criterion"] = res.witnesses
        if res.ok != verdict.overall and not res.indeterminate:
            verdict.inconsistencies.append(
                f"distortion-form criterion ({res.ok}) disagrees with h verdict ({verdict.overall})"
            )
    return verdict


def criterion_vii(energy, grid: GridSpec = GridSpec(), *, tol: float = VII_TOL) -> CriterionResult:
    """Distortion-form convexity criterion on samples in (1, x_max].

    Evaluates E(x) = (x^2-1) (x + sqrt(x^2-1)) psi''(x) + psi'(x) and
    requires E >= -tol * scale, where the scale is the sum of the two
    addends' magnitudes (a cancellation measure).  x = 1 is excluded
    because the first factor vanishes there and psi'' may be unbounded.
    Verdicts whose extreme value lies within +/- tol * scale of zero are
    flagged indeterminate.
    """
    x_max = 0.5 * (grid.t_max + 1.0 / grid.t_max)
    # log-space x - 1 so the near-1 region is well resolved
    x = 1.0 + np.exp(np.linspace(math.log(1e-6), math.log(x_max - 1.0), grid.n))
    vals = np.empty_like(x)
    scales = np.empty_like(x)
    for i, xi in enumerate(x):
        try:
            p1 = energy.psi_prime(xi)
            p2 = energy.psi_second(xi)
        except Exception as exc:  # noqa: BLE001 - report which sample failed
            raise EvaluationError(f"psi derivative failed at x={xi}: {exc}") from exc
        a = (xi * xi - 1.0) * (xi + math.sqrt(xi * xi - 1.0)) * p2
        vals[i] = a + p1
        scales[i] = abs(a) + abs(p1) + 1e-300
    _check_finite(vals, x, "criterion expression")
    normalized = vals / scales
    i_min = int(np.argmin(normalized))
    bad = normalized < -tol
    witnesses = [(float(x[i]), float(vals[i])) for i in np.nonzero(bad)[0][:10]]
    return CriterionResult(
        ok=not witnesses,
        witnesses=witnesses,
        min_value=float(vals[i_min]),
        argmin=float(x[i_min]),
        indeterminate=bool(abs(normalized[i_min]) <= tol),
    )


def separately_convex_g(energy, grid: Grid2DSpec = Grid2DSpec(), *,
                        tol: float = CONVEXITY_TOL) -> CriterionResult:
    """Check convexity of g along every grid row and column."""
    axis = grid.axis()
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    vals = np.asarray(energy.g(X, Y), dtype=float)
    _check_finite(vals.ravel(), list(zip(X.ravel(), Y.ravel())), "g")
    witnesses = []
    for i in range(len(axis)):
        conv_w, _ = _line_witnesses(axis, vals[i, :], tol)
        witnesses += [(float(axis[i]), w[0], w[1]) for w in conv_w]
        conv_w, _ = _line_witnesses(axis, vals[:, i], tol)
        witnesses += [(w[0], float(axis[i]), w[1]) for w in conv_w]
    return CriterionResult(ok=not witnesses, witnesses=witnesses[:20])
