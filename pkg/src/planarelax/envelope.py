"""Monotone-convex envelopes of ratio-form energies.

The largest non-decreasing convex minorant of h on [1, inf) is computed
by two mutually checking discrete routes (flatten to a monotone function
and take the lower hull; reflect the graph about t = 1 and take the
plain hull), followed by an optional Newton refinement of the chord
breakpoints (double-tangent construction).  For this energy class that
minorant, composed with the singular value ratio, is exactly the
quasiconvex (= rank-one convex = polyconvex) envelope of the energy.

A companion routine handles the radial family W(F) = g(dist(F, scaled
rotations)), whose envelope is the plain convex envelope of the even
extension of g, and the constant classical convex envelope is provided
for reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .energies import ConformalEnergy, RadialDistanceEnergy, energy_from_spec
from .exceptions import DomainError, EnvelopeUndefined, EvaluationError, NothingToRefine

__all__ = [
    "EnvelopeConfig",
    "Segment",
    "PiecewiseEnvelope",
    "FlattenResult",
    "MaxwellResult",
    "RadialEnvelope",
    "lower_convex_hull_1d",
    "flatten_to_monotone",
    "monotone_convex_envelope",
    "reflection_extension_envelope",
    "maxwell_double_tangent",
    "dacorogna_radial_envelope",
    "constant_convex_envelope",
]

FOLLOW_H = "follow_h"
AFFINE = "affine"
CONSTANT = "constant"


@dataclass(frozen=True)
class EnvelopeConfig:
    """Sampling and refinement parameters for envelope construction.

    t_max is the domain truncation.  The default is deliberately huge:
    envelopes of slowly growing energies converge to their true (often
    constant) value only as the truncation grows, and log-spaced
    sampling makes the wide range cheap.
    """

    t_max: float = 1e16
    n_samples: int = 4096
    refine_maxwell: bool = True
    newton_tol: float = 1e-12
    newton_max_iter: int = 60

    def __post_init__(self):
        if not self.t_max > 1.0:
            raise ValueError("t_max must exceed 1")
        if self.n_samples < 256:
            raise ValueError("need at least 256 samples")

    def points(self) -> np.ndarray:
        return np.exp(np.linspace(0.0, math.log(self.t_max), self.n_samples))


@dataclass(frozen=True)
class Segment:
    """One piece of the envelope on [lo, hi); params depend on the kind."""

    lo: float
    hi: float
    kind: str
    intercept: float = 0.0
    slope: float = 0.0
    value: float = 0.0

    def params(self) -> dict:
        if self.kind == AFFINE:
            return {"intercept": self.intercept, "slope": self.slope}
        if self.kind == CONSTANT:
            return {"value": self.value}
        return {}


@dataclass
class PiecewiseEnvelope:
    """The computed envelope: ordered segments partitioning [1, inf).

    The last segment extends to infinity; its kind is the tail rule.
    FollowH segments evaluate the source energy exactly.
    """

    segments: list
    energy: ConformalEnergy
    config: EnvelopeConfig
    min_value: float
    min_arg: float
    refined: bool = False
    truncation_sensitive: bool = False
    notes: list = field(default_factory=list)

    @property
    def tail_kind(self) -> str:
        return self.segments[-1].kind

    @property
    def breakpoints(self) -> np.ndarray:
        return np.array([s.lo for s in self.segments[1:]])

    def affine_segments(self) -> list:
        return [s for s in self.segments if s.kind == AFFINE]

    def segment_at(self, t: float) -> Segment:
        i = int(np.searchsorted(self.breakpoints, t, side="right"))
        return self.segments[i]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 1.0):
            raise DomainError("envelope is defined on [1, inf)")
        idx = np.searchsorted(self.breakpoints, t, side="right")
        out = np.empty(t.shape)
        for i, seg in enumerate(self.segments):
            sel = idx == i
            if not np.any(sel):
                continue
            if seg.kind == FOLLOW_H:
                out[sel] = self.energy.h(t[sel])
            elif seg.kind == AFFINE:
                out[sel] = seg.intercept + seg.slope * t[sel]
            else:
                out[sel] = seg.value
        return float(out) if out.ndim == 0 else out

    # --- serialization ------------------------------------------------------
    def to_record(self) -> dict:
        if self.energy.spec is None:
            raise ValueError("envelope of a non-serializable energy")
        return {
            "energy": self.energy.spec,
            "segments": [
                {
                    "t_lo": s.lo,
                    "t_hi": "inf" if math.isinf(s.hi) else s.hi,
                    "kind": s.kind,
                    "params": s.params(),
                }
                for s in self.segments
            ],
            "config": {
                "t_max": self.config.t_max,
                "n_samples": self.config.n_samples,
                "refine_maxwell": self.config.refine_maxwell,
                "newton_tol": self.config.newton_tol,
                "newton_max_iter": self.config.newton_max_iter,
            },
            "min_value": self.min_value,
            "min_arg": self.min_arg,
            "refined": self.refined,
            "truncation_sensitive": self.truncation_sensitive,
            "notes": list(self.notes),
        }

    @classmethod
    def from_record(cls, record: dict, energy=None) -> "PiecewiseEnvelope":
        energy = energy if energy is not None else energy_from_spec(record["energy"])
        segments = [
            Segment(
                lo=s["t_lo"],
                hi=math.inf if s["t_hi"] == "inf" else float(s["t_hi"]),
                kind=s["kind"],
                intercept=s["params"].get("intercept", 0.0),
                slope=s["params"].get("slope", 0.0),
                value=s["params"].get("value", 0.0),
            )
            for s in record["segments"]
        ]
        return cls(
            segments=segments,
            energy=energy,
            config=EnvelopeConfig(**record["config"]),
            min_value=record["min_value"],
            min_arg=record["min_arg"],
            refined=record.get("refined", False),
            truncation_sensitive=record.get("truncation_sensitive", False),
            notes=list(record.get("notes", [])),
        )


# ---------------------------------------------------------------------------
# hull primitive
# ---------------------------------------------------------------------------


def lower_convex_hull_1d(points):
    """Lower convex hull of 2-D points with strictly increasing x.

    Returns the subset of input points forming the hull chain; interior
    collinear points are dropped.  Linear interpolation through the
    returned points is the convex envelope of the input set.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("need at least two (x, y) points")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    x = np.ascontiguousarray(pts[:, 0])
    if np.any(np.diff(x) <= 0.0):
        raise ValueError("x must be strictly increasing (no duplicates)")
    idx = _kernels.hull_indices(x, np.ascontiguousarray(pts[:, 1]))
    return pts[idx]


# ---------------------------------------------------------------------------
# robust hull for mirrored point sets
# ---------------------------------------------------------------------------


def _robust_hull_values(x, y):
    """Lower hull values with an adaptive exact orientation predicate.

    Mirrored point sets mix abscissae of order t_max with structure of
    width ~1e-2 near t = 1; the plain float cross product loses that
    structure to cancellation.  Borderline predicates are re-evaluated
    in exact rational arithmetic.
    """
    from fractions import Fraction

    n = len(x)
    stack = []

    def below(i0, i1, i2):
        a = x[i1] - x[i0]
        b = y[i2] - y[i0]
        c = x[i2] - x[i0]
        d = y[i1] - y[i0]
        cross = a * b - c * d
        err = 8.0 * np.finfo(float).eps * (abs(a * b) + abs(c * d))
        if abs(cross) > err:
            return cross <= 0.0
        exact = (Fraction(x[i1]) - Fraction(x[i0])) * (Fraction(y[i2]) - Fraction(y[i0])) - (
            Fraction(x[i2]) - Fraction(x[i0])
        ) * (Fraction(y[i1]) - Fraction(y[i0]))
        return exact <= 0

    for i in range(n):
        while len(stack) >= 2 and below(stack[-2], stack[-1], i):
            stack.pop()
        stack.append(i)
    out = np.interp(x, x[stack], y[stack])
    np.minimum(out, y, out=out)
    return out


# ---------------------------------------------------------------------------
# sampling, boundedness, flattening
# ---------------------------------------------------------------------------


def _effective_cfg(energy, cfg: EnvelopeConfig):
    """Clamp t_max where h would overflow double precision."""
    limit = getattr(energy, "finite_ratio_limit", lambda: None)()
    if limit is not None and cfg.t_max > limit:
        return replace(cfg, t_max=limit), [f"t_max clamped to {limit:g} to keep h finite"]
    return cfg, []


def _sample(energy, cfg: EnvelopeConfig):
    t = cfg.points()
    y = np.asarray(energy.h(t), dtype=float)
    if not np.all(np.isfinite(y)):
        i = int(np.argmax(~np.isfinite(y)))
        raise EvaluationError(f"h is not finite at t = {t[i]!r}")
    return t, y


def _check_bounded_below(t, y):
    """Reject sampled h that trends to -inf at the right end.

    Heuristic: strictly decreasing over the last decade with decade
    drops that are not decelerating, ending below the value at 1.
    """
    n = len(t)
    i2 = n - 1
    i1 = int(np.searchsorted(t, t[-1] / 10.0))
    i0 = int(np.searchsorted(t, t[-1] / 100.0))
    if i0 >= i1 or i1 >= i2:
        return
    d_old = y[i0] - y[i1]
    d_new = y[i1] - y[i2]
    tail_decreasing = bool(np.all(np.diff(y[i1:]) <= 0.0))
    if tail_decreasing and d_new > 0.0 and d_new >= d_old > 0.0 and y[-1] < y[0]:
        raise EnvelopeUndefined(
            "h appears unbounded below (still decreasing at t_max); the envelope is not defined"
        )


@dataclass
class FlattenResult:
    """Sampled monotone replacement of h: constant up to the first minimizer."""

    t: np.ndarray
    values: np.ndarray
    h_values: np.ndarray
    i_min: int
    min_value: float


def flatten_to_monotone(energy, cfg: EnvelopeConfig = EnvelopeConfig()) -> FlattenResult:
    """Replace h by min(h) left of its first sampled minimizer."""
    cfg, _ = _effective_cfg(energy, cfg)
    t, y = _sample(energy, cfg)
    _check_bounded_below(t, y)
    i_min = int(np.argmin(y))
    values = y.copy()
    values[: i_min + 1] = y[i_min]
    return FlattenResult(t=t, values=values, h_values=y, i_min=i_min, min_value=float(y[i_min]))


# ---------------------------------------------------------------------------
# Newton refinements
# ---------------------------------------------------------------------------


def _newton_minimum(energy, t0, lo, hi, tol, max_iter):
    """Local solve of h'(t) = 0; returns (t, ok)."""
    t = float(t0)
    for _ in range(max_iter):
        d1 = energy.h_prime(t)
        d2 = energy.h_second(t)
        if not (np.isfinite(d1) and np.isfinite(d2)) or d2 <= 0.0:
            return t, False
        t_new = min(max(t - d1 / d2, lo), hi)
        if abs(t_new - t) <= tol * (1.0 + abs(t)):
            return t_new, True
        t = t_new
    return t, False


def _newton_tangent_from_point(energy, ta, ya, t0, lo, hi, tol, max_iter):
    """Solve h'(tau)(tau - ta) = h(tau) - ya for the tangency point tau."""
    tau = float(t0)
    for _ in range(max_iter):
        f = energy.h_prime(tau) * (tau - ta) - (float(energy.h(tau)) - ya)
        fp = energy.h_second(tau) * (tau - ta)
        if not (np.isfinite(f) and np.isfinite(fp)) or fp == 0.0:
            return tau, False
        tau_new = min(max(tau - f / fp, lo), hi)
        if abs(tau_new - tau) <= tol * (1.0 + abs(tau)):
            return tau_new, True
        tau = tau_new
    return tau, False


def _newton_double_tangent(energy, t1, t2, lo, hi, tol, max_iter):
    """Solve h'(t1) = h'(t2) = chord slope; returns (t1, t2, ok, residual)."""
    t1, t2 = float(t1), float(t2)
    resid = math.inf
    for _ in range(max_iter):
        d = t2 - t1
        if d <= 0.0 or not (lo <= t1 <= hi) or not (lo <= t2 <= hi):
            return t1, t2, False, resid
        h1, h2 = float(energy.h(t1)), float(energy.h(t2))
        p1, p2 = energy.h_prime(t1), energy.h_prime(t2)
        f1 = p1 * d - (h2 - h1)
        f2 = p2 * d - (h2 - h1)
        resid = max(abs(f1), abs(f2)) / (abs(h1) + abs(h2) + 1.0)
        if resid <= tol:
            return t1, t2, True, resid
        j11 = energy.h_second(t1) * d
        j22 = energy.h_second(t2) * d
        j12 = p1 - p2
        det = j11 * j22 - j12 * j12
        if not np.isfinite(det) or det == 0.0:
            return t1, t2, False, resid
        t1 = t1 - (j22 * f1 - j12 * f2) / det
        t2 = t2 - (-j12 * f1 + j11 * f2) / det
    return t1, t2, False, resid


@dataclass(frozen=True)
class MaxwellResult:
    t1: float
    t2: float
    intercept: float
    slope: float
    refined: bool
    residual: float


def maxwell_double_tangent(energy, seed_interval=None, *, envelope=None,
                           newton_tol: float = 1e-12,
                           newton_max_iter: int = 60) -> MaxwellResult:
    """Refine a chord of the discrete hull to a double tangent of h.

    The seed is either an explicit (t1, t2) interval or the first affine
    segment of a previously computed envelope.  On Newton failure the
    discrete chord is returned with ``refined=False``.

    Raises
    ------
    NothingToRefine
        If no seed interval is available (h convex on its domain).
    """
    if seed_interval is None:
        if envelope is not None:
            aff = envelope.affine_segments()
            if aff:
                seed_interval = (aff[0].lo, min(aff[0].hi, envelope.config.t_max))
        if seed_interval is None:
            raise NothingToRefine("nothing to refine: no affine segment in seed")
    ta, tb = float(seed_interval[0]), float(seed_interval[1])
    if not tb > ta:
        raise ValueError("seed interval must satisfy t1 < t2")
    t1, t2, ok, resid = _newton_double_tangent(
        energy, ta, tb, 1.0, math.inf, newton_tol, newton_max_iter
    )
    if not ok or not _chord_below(energy, t1, t2):
        h_a, h_b = float(energy.h(ta)), float(energy.h(tb))
        slope = (h_b - h_a) / (tb - ta)
        return MaxwellResult(ta, tb, h_a - slope * ta, slope, False, resid)
    h1, h2 = float(energy.h(t1)), float(energy.h(t2))
    slope = (h2 - h1) / (t2 - t1)
    return MaxwellResult(t1, t2, h1 - slope * t1, slope, True, resid)


def _chord_below(energy, t1, t2, n=64, tol=1e-9):
    """Whether the chord through the graph at t1 < t2 stays below h between them."""
    if not t2 > t1 or t1 < 1.0:
        return False
    h1, h2 = float(energy.h(t1)), float(energy.h(t2))
    slope = (h2 - h1) / (t2 - t1)
    ts = np.exp(np.linspace(math.log(t1), math.log(t2), n))
    hv = np.asarray(energy.h(ts), dtype=float)
    chord = h1 + slope * (ts - t1)
    scale = np.maximum(1.0, np.abs(hv))
    return bool(np.all(chord <= hv + tol * scale))


# ---------------------------------------------------------------------------
# hull -> segments
# ---------------------------------------------------------------------------


def _discrete_chord(t, yh, va, vb):
    ta, tb = float(t[va]), float(t[vb])
    ha, hb = float(yh[va]), float(yh[vb])
    slope = (hb - ha) / (tb - ta)
    return Segment(ta, tb, AFFINE, intercept=ha - slope * ta, slope=slope)


def _refine_bridge(energy, t, yh, va, vb, left_anchor, n, cfg):
    """Refined affine segment for the hull chord between vertices va < vb.

    Returns (segment, refined).  Whether tangency holds at an endpoint
    depends on what pins it: the domain start, the truncation edge, or
    the constant level left by flattening.
    """
    seg = _discrete_chord(t, yh, va, vb)
    if not cfg.refine_maxwell:
        return seg, True
    nt, ni = cfg.newton_tol, cfg.newton_max_iter
    t_last = float(t[-1])

    if left_anchor is not None:
        # envelope leaves the constant level: tangent line from (t_a, m)
        t_a, m = left_anchor
        tau, ok = _newton_tangent_from_point(energy, t_a, m, seg.hi, t_a, t_last, nt, ni)
        if ok and tau > t_a and _chord_segment_below(energy, t_a, m, tau):
            sl = (float(energy.h(tau)) - m) / (tau - t_a)
            return Segment(t_a, tau, AFFINE, intercept=m - sl * t_a, slope=sl), True
        return seg, False

    pinned_left = va == 0
    pinned_right = vb == n - 1
    if pinned_left and pinned_right:
        return seg, False  # truncation chord: no tangency exists at either end
    if pinned_left:
        ya = float(yh[0])
        tau, ok = _newton_tangent_from_point(energy, 1.0, ya, seg.hi, 1.0, t_last, nt, ni)
        if ok and tau > 1.0 and _chord_segment_below(energy, 1.0, ya, tau):
            sl = (float(energy.h(tau)) - ya) / (tau - 1.0)
            return Segment(1.0, tau, AFFINE, intercept=ya - sl, slope=sl), True
        return seg, False
    if pinned_right:
        yb = float(yh[n - 1])
        tau, ok = _newton_tangent_from_point(energy, t_last, yb, seg.lo, 1.0, t_last, nt, ni)
        if ok and tau < t_last and _chord_segment_below(energy, t_last, yb, tau):
            sl = (yb - float(energy.h(tau))) / (t_last - tau)
            return Segment(tau, t_last, AFFINE, intercept=yb - sl * t_last, slope=sl), True
        return seg, False

    t1, t2, ok, _resid = _newton_double_tangent(energy, seg.lo, seg.hi, 1.0, t_last, nt, ni)
    if ok and t1 >= 1.0 and _chord_below(energy, t1, t2):
        h1, h2 = float(energy.h(t1)), float(energy.h(t2))
        sl = (h2 - h1) / (t2 - t1)
        return Segment(t1, t2, AFFINE, intercept=h1 - sl * t1, slope=sl), True
    return seg, False


def _chord_segment_below(energy, ta, ya, tau, n=64, tol=1e-9):
    """Whether the line from (ta, ya) to the graph at tau stays below h."""
    if not tau > ta:
        return False
    h_tau = float(energy.h(tau))
    slope = (h_tau - ya) / (tau - ta)
    ts = np.linspace(max(ta, 1.0), tau, n)
    hv = np.asarray(energy.h(np.maximum(ts, 1.0)), dtype=float)
    chord = ya + slope * (ts - ta)
    return bool(np.all(chord <= hv + tol * np.maximum(1.0, np.abs(hv))))


def _segments_from_hull(energy, flat: FlattenResult, cfg: EnvelopeConfig, vertices=None):
    """Classify hull edges of the flattened samples into envelope segments.

    ``vertices`` overrides the hull vertex indices (used by the
    reflection route, where the hull is computed on the mirrored set and
    samples touching it act as vertices).
    """
    t, yf, yh = flat.t, flat.values, flat.h_values
    n = len(t)
    if vertices is None:
        hull = list(_kernels.hull_indices(t, np.ascontiguousarray(yf)))
    else:
        hull = list(vertices)
    notes = []
    refined_all = cfg.refine_maxwell

    min_arg = float(t[flat.i_min])
    min_value = flat.min_value
    if cfg.refine_maxwell and 0 < flat.i_min < n - 1:
        lo_b = float(t[max(flat.i_min - 2, 0)])
        hi_b = float(t[min(flat.i_min + 2, n - 1)])
        m_arg, ok = _newton_minimum(energy, min_arg, lo_b, hi_b, cfg.newton_tol, cfg.newton_max_iter)
        if ok:
            min_arg, min_value = m_arg, float(energy.h(m_arg))
        else:
            notes.append("minimizer not refined")
            refined_all = False

    segments = []
    left_anchor = None

    if flat.i_min > 0:
        # constant part: hull vertices still at the minimum level of h
        scale = 1.0 + abs(min_value)
        at_level = [v for v in hull if yh[v] <= flat.min_value + 1e-12 * scale]
        end_v = int(max(at_level)) if at_level else flat.i_min
        flat_end = float(t[end_v])
        if cfg.refine_maxwell and 0 < end_v < n - 1:
            tau, ok = _newton_minimum(
                energy, flat_end, float(t[max(end_v - 2, 0)]), float(t[min(end_v + 2, n - 1)]),
                cfg.newton_tol, cfg.newton_max_iter,
            )
            if ok and abs(float(energy.h(tau)) - min_value) <= 1e-8 * scale:
                flat_end = tau
            else:
                refined_all = False
                notes.append("constant segment end not refined")
        segments.append(Segment(1.0, flat_end, CONSTANT, value=min_value))
        hull = [v for v in hull if v >= end_v]
        left_anchor = (flat_end, min_value)
        if len(hull) < 2:
            return segments, min_value, min_arg, refined_all, notes

    i = 0
    while i < len(hull) - 1:
        if hull[i + 1] == hull[i] + 1:
            j = i
            while j + 1 < len(hull) and hull[j + 1] == hull[j] + 1:
                j += 1
            lo = segments[-1].hi if segments else 1.0
            hi = float(t[hull[j]])
            if hi > lo:
                segments.append(Segment(lo, hi, FOLLOW_H))
            left_anchor = None
            i = j
        else:
            seg, ok = _refine_bridge(energy, t, yh, hull[i], hull[i + 1], left_anchor, n, cfg)
            refined_all = refined_all and ok
            if not ok and cfg.refine_maxwell:
                notes.append(f"chord near [{t[hull[i]]:.6g}, {t[hull[i + 1]]:.6g}] kept discrete")
            if segments:
                # stretch or shrink the elastic previous segment to the refined breakpoint
                prev = segments[-1]
                if seg.lo > prev.lo:
                    segments[-1] = replace(prev, hi=seg.lo)
                else:
                    seg = replace(seg, lo=prev.hi)
            else:
                seg = replace(seg, lo=1.0) if seg.lo < 1.0 else seg
            segments.append(seg)
            left_anchor = None
            i += 1

    if not segments:
        segments.append(Segment(1.0, float(t[-1]), FOLLOW_H))
    # cover any remainder up to t_max by following h (hull always ends at the last sample)
    if segments[-1].hi < float(t[-1]):
        if segments[-1].kind == FOLLOW_H:
            segments[-1] = replace(segments[-1], hi=float(t[-1]))
        else:
            segments.append(Segment(segments[-1].hi, float(t[-1]), FOLLOW_H))
    return segments, min_value, min_arg, refined_all, notes


def _absorb_degenerate(segments, cfg: EnvelopeConfig):
    """Drop affine slivers narrower than two local sample spacings (hull noise)."""
    ratio = cfg.t_max ** (1.0 / (cfg.n_samples - 1))
    out = []
    for seg in segments:
        if (seg.kind == AFFINE and math.isfinite(seg.hi)
                and seg.hi - seg.lo < seg.lo * (ratio * ratio - 1.0) and out):
            out[-1] = replace(out[-1], hi=seg.hi)
            continue
        out.append(seg)
    return out


def _merge_adjacent(segments):
    """Merge neighboring segments of identical behavior."""
    out = [segments[0]]
    for seg in segments[1:]:
        prev = out[-1]
        same = (
            seg.kind == prev.kind == FOLLOW_H
            or (seg.kind == prev.kind == CONSTANT
                and abs(seg.value - prev.value) <= 1e-12 * (1.0 + abs(prev.value)))
            or (seg.kind == prev.kind == AFFINE
                and abs(seg.slope - prev.slope) <= 1e-12 * (1.0 + abs(prev.slope))
                and abs(seg.intercept - prev.intercept) <= 1e-12 * (1.0 + abs(prev.intercept)))
        )
        if same:
            out[-1] = replace(prev, hi=seg.hi)
        else:
            out.append(seg)
    return out


def _tail_is_convex_increasing(t, y, from_t):
    sel = t >= from_t
    ts, ys = t[sel], y[sel]
    if len(ts) < 3:
        return True
    d1 = np.diff(ys)
    dd2 = (d1[1:] / np.diff(ts)[1:] - d1[:-1] / np.diff(ts)[:-1]) / (ts[2:] - ts[:-2])
    mono_ok = np.all(d1 >= -1e-9 * np.maximum(1.0, np.abs(ys[:-1])))
    conv_ok = np.all(dd2 >= -1e-9 * np.maximum(1.0, np.abs(ys[1:-1])))
    return bool(mono_ok and conv_ok)


# ---------------------------------------------------------------------------
# main construction
# ---------------------------------------------------------------------------


def _finish(segments, energy, cfg, min_value, min_arg, refined, notes, t, yh,
            doubling_check=True):
    """Shared tail handling and assembly for both envelope routes."""
    segments = _absorb_degenerate(segments, cfg)
    tail_follow = _tail_is_convex_increasing(t, yh, cfg.t_max / 10.0)
    truncation_sensitive = not _tail_is_convex_increasing(t, yh, cfg.t_max / 2.0)
    if truncation_sensitive:
        notes = notes + ["h is not convex non-decreasing near t_max"]

    last = segments[-1]
    if tail_follow and last.kind == FOLLOW_H:
        segments[-1] = replace(last, hi=math.inf)
    elif tail_follow:
        segments.append(Segment(last.hi, math.inf, FOLLOW_H))
    else:
        segments[-1] = replace(last, hi=math.inf)
        if last.kind == AFFINE and doubling_check:
            wide = monotone_convex_envelope(
                energy,
                replace(cfg, t_max=2.0 * cfg.t_max, refine_maxwell=False),
                _doubling_check=False,
            )
            aff = wide.affine_segments()
            slope_wide = aff[-1].slope if aff else last.slope
            if abs(slope_wide - last.slope) > 1e-6:
                truncation_sensitive = True
                notes = notes + ["final chord slope changes by more than 1e-6 under t_max doubling"]

    segments = _merge_adjacent(segments)
    return PiecewiseEnvelope(
        segments=segments,
        energy=energy,
        config=cfg,
        min_value=min_value,
        min_arg=min_arg,
        refined=refined and cfg.refine_maxwell,
        truncation_sensitive=truncation_sensitive,
        notes=notes,
    )


def monotone_convex_envelope(energy, cfg: EnvelopeConfig = EnvelopeConfig(),
                             *, _doubling_check: bool = True) -> PiecewiseEnvelope:
    """Compute the monotone-convex envelope of the energy's ratio form.

    Construction: sample log-spaced on [1, t_max], flatten left of the
    first minimizer, take the discrete lower hull, classify hull edges
    into follow/affine/constant segments, and (by default) refine chord
    breakpoints to true tangency by Newton iteration.
    """
    cfg, clamp_notes = _effective_cfg(energy, cfg)
    flat = flatten_to_monotone(energy, cfg)
    segments, min_value, min_arg, refined, notes = _segments_from_hull(energy, flat, cfg)
    return _finish(segments, energy, cfg, min_value, min_arg, refined, clamp_notes + notes,
                   flat.t, flat.h_values, doubling_check=_doubling_check)


def reflection_extension_envelope(energy, cfg: EnvelopeConfig = EnvelopeConfig()) -> PiecewiseEnvelope:
    """Envelope via reflection of the graph about t = 1 and a plain lower hull.

    Mirrors the samples to abscissae 2 - t, hulls the combined point
    set, and restricts to [1, inf).  Mathematically identical to the
    flatten route; exposed as an independent cross-check.
    """
    cfg, clamp_notes = _effective_cfg(energy, cfg)
    t, y = _sample(energy, cfg)
    _check_bounded_below(t, y)
    x = np.concatenate((2.0 - t[:0:-1], t))
    v = np.concatenate((y[:0:-1], y))
    env_vals = _robust_hull_values(x, v)[len(t) - 1:]

    # samples the restricted hull touches act as vertices, strictly-cut
    # samples as chord interior; the shared classifier does the rest
    i_min = int(np.argmin(y))
    touch = env_vals >= y - 1e-11 * np.maximum(1.0, np.abs(y))
    touch[i_min] = True
    vertices = np.nonzero(touch)[0]
    flat = FlattenResult(t=t, values=np.minimum(env_vals, y), h_values=y,
                         i_min=i_min, min_value=float(y[i_min]))
    segments, min_value, min_arg, refined, notes = _segments_from_hull(energy, flat, cfg, vertices)
    return _finish(segments, energy, cfg, min_value, min_arg, refined, clamp_notes + notes, t, y)


# ---------------------------------------------------------------------------
# radial family and the constant envelope
# ---------------------------------------------------------------------------


@dataclass
class RadialEnvelope:
    """Convex envelope of the even extension of a radial profile g(r)."""

    r: np.ndarray
    values: np.ndarray
    profile_values: np.ndarray
    source: RadialDistanceEnergy

    def envelope_1d(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        out = np.interp(r, self.r, self.values)
        return float(out) if out.ndim == 0 else out

    def eval(self, F) -> float:
        from .kinematics import euclid_dist_cso2_sq

        return float(self.envelope_1d(math.sqrt(2.0 * euclid_dist_cso2_sq(F))))


def dacorogna_radial_envelope(g, *, r_max: float = 64.0, n_samples: int = 4097) -> RadialEnvelope:
    """Envelope of W(F) = g(sqrt(||F||^2 - 2 det F)) via the even extension of g.

    Accepts a plain callable on [0, inf) or a RadialDistanceEnergy.  The
    even extension's plain convex envelope restricted to [0, inf) is the
    monotone-convex envelope of g, and composing it with the Euclidean
    distance to the scaled rotations gives every generalized convex
    envelope of W at once (they coincide for this family).
    """
    energy = g if isinstance(g, RadialDistanceEnergy) else RadialDistanceEnergy(g)
    r = np.linspace(0.0, r_max, n_samples)
    y = energy.radial(r)
    if not np.all(np.isfinite(y)):
        raise EvaluationError("radial profile not finite on the sample range")
    half = n_samples // 2
    if bool(np.all(np.diff(y[half:]) < 0.0)) and y[-1] < y[0] and y[-1] < 0.0:
        raise EnvelopeUndefined("radial profile appears unbounded below")
    x = np.concatenate((-r[:0:-1], r))
    v = np.concatenate((y[:0:-1], y))
    env = _robust_hull_values(x, v)[n_samples - 1:]
    return RadialEnvelope(r=r, values=env, profile_values=y, source=energy)


def constant_convex_envelope(energy, cfg: EnvelopeConfig = EnvelopeConfig()) -> float:
    """The classical convex envelope level: the infimum of h on [1, t_max].

    For conformally invariant energies the classical convex envelope is
    this constant, below the monotone-convex envelope everywhere.
    """
    cfg, _ = _effective_cfg(energy, cfg)
    flat = flatten_to_monotone(energy, cfg)
    value, i_min, n = flat.min_value, flat.i_min, len(flat.t)
    if 0 < i_min < n - 1:
        arg, ok = _newton_minimum(
            energy,
            float(flat.t[i_min]),
            float(flat.t[max(i_min - 2, 0)]),
            float(flat.t[min(i_min + 2, n - 1)]),
            cfg.newton_tol,
            cfg.newton_max_iter,
        )
        if ok:
            value = min(value, float(energy.h(arg)))
    return value
