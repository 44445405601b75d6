"""Conformally invariant planar energies and their representations.

Every energy here can be written three equivalent ways: as h(t) of the
singular value ratio t = lambda_max/lambda_min >= 1, as Psi(kk) of the
outer distortion kk >= 1, or as g(x, y) of the singular values.  The
ratio form h is the canonical one internally; the others are converted
through k = kk + sqrt(kk^2 - 1) and kk = (k + 1/k)/2 at construction.

The symmetric extension h(x) = h(1/x) for x < 1 is applied implicitly
whenever an evaluation would leave [1, inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, UnsupportedRepresentation
from .kinematics import linear_distortion

__all__ = [
    "ConformalEnergy",
    "DevHencky",
    "LogDistortionSq",
    "ExpHencky",
    "CoshDistortion",
    "IsochoricSVK",
    "CustomEnergy",
    "TabulatedEnergy",
    "RadialDistanceEnergy",
    "SampleSpec",
    "ValidationReport",
    "h_eval",
    "psi_eval",
    "eval_energy",
    "validate_rep",
    "energy_from_spec",
]

_EPS = np.finfo(float).eps
_FD1_STEP = _EPS ** (1.0 / 3.0)  # central first differences
_FD2_STEP = _EPS**0.25  # central second differences


def _fd1(f, x):
    s = _FD1_STEP * max(1.0, abs(x))
    return (f(x + s) - f(x - s)) / (2.0 * s)


def _fd2(f, x):
    s = _FD2_STEP * max(1.0, abs(x))
    return (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s)


class ConformalEnergy:
    """Base class; subclasses provide `_h` on [1, inf) and optionally derivatives.

    All evaluation methods are NumPy-transparent: they accept scalars or
    arrays and return the matching kind.
    """

    #: spec string understood by :func:`energy_from_spec`; None if not representable
    spec: str | None = None

    def finite_ratio_limit(self) -> float | None:
        """Largest ratio t at which h is still representable in doubles, or None."""
        return None

    # --- canonical ratio form -------------------------------------------------
    def _h(self, t):
        raise NotImplementedError

    def h(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 1.0):
            raise DomainError("h is defined for ratio t >= 1")
        out = self._h(t)
        return float(out) if np.isscalar(out) or out.ndim == 0 else out

    def h_ext(self, t):
        """h with the symmetric extension h(t) = h(1/t) for t < 1."""
        t = np.asarray(t, dtype=float)
        return self._h(np.where(t < 1.0, 1.0 / t, t))

    def h_prime(self, t):
        return _fd1(self.h_ext, float(t))

    def h_second(self, t):
        return _fd2(self.h_ext, float(t))

    # --- distortion form ------------------------------------------------------
    def _psi(self, kk):
        k = kk + np.sqrt(np.maximum(kk * kk - 1.0, 0.0))
        return self._h(k)

    def psi(self, kk):
        kk = np.asarray(kk, dtype=float)
        if np.any(kk < 1.0):
            raise DomainError("psi is defined for outer distortion kk >= 1")
        out = self._psi(kk)
        return float(out) if np.isscalar(out) or out.ndim == 0 else out

    def psi_prime(self, kk):
        kk = float(kk)
        s = min(_FD1_STEP * max(1.0, kk), 0.49 * (kk - 1.0)) if kk > 1.0 else 0.0
        if s <= 0.0:
            raise DomainError("psi derivative requested at kk = 1")
        return (self.psi(kk + s) - self.psi(kk - s)) / (2.0 * s)

    def psi_second(self, kk):
        kk = float(kk)
        s = min(_FD2_STEP * max(1.0, kk), 0.49 * (kk - 1.0)) if kk > 1.0 else 0.0
        if s <= 0.0:
            raise DomainError("psi derivative requested at kk = 1")
        return (self.psi(kk + s) - 2.0 * self.psi(kk) + self.psi(kk - s)) / (s * s)

    # --- singular value form --------------------------------------------------
    def g(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any(x <= 0.0) or np.any(y <= 0.0):
            raise DomainError("singular values must be positive")
        out = self._h(np.maximum(x / y, y / x))
        return float(out) if np.isscalar(out) or out.ndim == 0 else out

    # --- on matrices ------------------------------------------------------
    def eval(self, F) -> float:
        return float(self._h(np.asarray(linear_distortion(F))))

    def __call__(self, F) -> float:
        return self.eval(F)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


class DevHencky(ConformalEnergy):
    """Deviatoric Hencky energy: h(t) = log^2 t, psi(kk) = arccosh^2 kk."""

    spec = "dev_hencky"

    def _h(self, t):
        return np.log(t) ** 2

    def h_prime(self, t):
        return 2.0 * math.log(t) / t

    def h_second(self, t):
        return (2.0 - 2.0 * math.log(t)) / (t * t)

    def _psi(self, kk):
        return np.arccosh(kk) ** 2

    def psi_prime(self, kk):
        out = 2.0 * _arccosh_over_sqrt(kk)
        return float(out) if out.ndim == 0 else out

    def psi_second(self, kk):
        kk = np.maximum(np.asarray(kk, dtype=float), 1.0)
        e = kk - 1.0
        small = e < 1e-5
        safe = np.where(small, 2.0, kk)
        s2 = safe * safe - 1.0
        with np.errstate(invalid="ignore"):
            exact = 2.0 / s2 - 2.0 * np.arccosh(safe) * safe / s2**1.5
        out = np.where(small, -2.0 / 3.0 + (8.0 / 15.0) * e, exact)
        return float(out) if out.ndim == 0 else out

    def __eq__(self, other):
        return type(other) is DevHencky

    def __hash__(self):
        return hash("dev_hencky")


def _arccosh_over_sqrt(kk):
    """arccosh(kk)/sqrt(kk^2-1), continuous through kk = 1; array friendly."""
    kk = np.maximum(np.asarray(kk, dtype=float), 1.0)
    e = kk - 1.0
    small = e < 1e-8
    safe = np.where(small, 2.0, kk)
    with np.errstate(invalid="ignore"):
        r = np.arccosh(safe) / np.sqrt(safe * safe - 1.0)
    return np.where(small, 1.0 - e / 3.0, r)


class LogDistortionSq(ConformalEnergy):
    """Squared log of the outer distortion: psi(kk) = log^2 kk."""

    spec = "log_distortion_sq"

    def _h(self, t):
        return np.log(0.5 * (t + 1.0 / t)) ** 2

    def h_prime(self, t):
        kk = 0.5 * (t + 1.0 / t)
        return 2.0 * math.log(kk) / kk * 0.5 * (1.0 - 1.0 / (t * t))

    def h_second(self, t):
        kk = 0.5 * (t + 1.0 / t)
        d1 = 0.5 * (1.0 - 1.0 / (t * t))
        d2 = 1.0 / t**3
        return (2.0 - 2.0 * math.log(kk)) / kk**2 * d1 * d1 + 2.0 * math.log(kk) / kk * d2

    def _psi(self, kk):
        return np.log(kk) ** 2

    def psi_prime(self, kk):
        kk = np.asarray(kk, dtype=float)
        out = 2.0 * np.log(kk) / kk
        return float(out) if out.ndim == 0 else out

    def psi_second(self, kk):
        kk = np.asarray(kk, dtype=float)
        out = (2.0 - 2.0 * np.log(kk)) / (kk * kk)
        return float(out) if out.ndim == 0 else out

    def __eq__(self, other):
        return type(other) is LogDistortionSq

    def __hash__(self):
        return hash("log_distortion_sq")


@dataclass(frozen=True)
class ExpHencky(ConformalEnergy):
    """Exponentiated Hencky energy: h(t) = exp(k log^2 t), k > 0."""

    k: float

    def __post_init__(self):
        if not self.k > 0.0:
            raise DomainError(f"exp_hencky requires k > 0, got {self.k}")

    @property
    def spec(self):
        return f"exp_hencky{{k={self.k!r}}}"

    def finite_ratio_limit(self):
        return math.exp(math.sqrt(700.0 / self.k))

    def _h(self, t):
        return np.exp(self.k * np.log(t) ** 2)

    def h_prime(self, t):
        lt = math.log(t)
        return math.exp(self.k * lt * lt) * 2.0 * self.k * lt / t

    def h_second(self, t):
        k, lt = self.k, math.log(t)
        return math.exp(k * lt * lt) / (t * t) * (4.0 * k * k * lt * lt + 2.0 * k - 2.0 * k * lt)

    def _psi(self, kk):
        return np.exp(self.k * np.arccosh(kk) ** 2)

    def psi_prime(self, kk):
        kk = float(kk)
        return self.psi(kk) * 2.0 * self.k * float(_arccosh_over_sqrt(kk))

    def psi_array_prime(self, kk):
        return self._psi(kk) * 2.0 * self.k * _arccosh_over_sqrt(kk)

    def psi_second(self, kk):
        kk = float(kk)
        dh = DevHencky()
        a = dh.psi_prime(kk)  # derivative of arccosh^2
        return self.psi(kk) * (self.k * self.k * a * a + self.k * dh.psi_second(kk))


@dataclass(frozen=True)
class CoshDistortion(ConformalEnergy):
    """Distortion-well energy: psi(kk) = cosh(kk - L) - 1, L >= 1.

    Vanishes exactly where the outer distortion equals L; the ratio form
    has its minimum at t = L + sqrt(L^2 - 1).
    """

    L: float

    def __post_init__(self):
        if not self.L >= 1.0:
            raise DomainError(f"cosh energy requires L >= 1, got {self.L}")

    @property
    def spec(self):
        return f"cosh{{L={self.L!r}}}"

    @property
    def argmin_ratio(self) -> float:
        return self.L + math.sqrt(self.L * self.L - 1.0)

    def finite_ratio_limit(self):
        return 2.0 * (700.0 + self.L)

    def _h(self, t):
        with np.errstate(over="ignore"):
            return np.cosh(0.5 * (t + 1.0 / t) - self.L) - 1.0

    def h_prime(self, t):
        kk = 0.5 * (t + 1.0 / t)
        return math.sinh(kk - self.L) * 0.5 * (1.0 - 1.0 / (t * t))

    def h_second(self, t):
        kk = 0.5 * (t + 1.0 / t)
        d1 = 0.5 * (1.0 - 1.0 / (t * t))
        return math.cosh(kk - self.L) * d1 * d1 + math.sinh(kk - self.L) / t**3

    def _psi(self, kk):
        with np.errstate(over="ignore"):
            return np.cosh(kk - self.L) - 1.0

    def psi_prime(self, kk):
        return math.sinh(kk - self.L)

    def psi_second(self, kk):
        return math.cosh(kk - self.L)


class IsochoricSVK(ConformalEnergy):
    """Isochoric St. Venant-Kirchhoff-type energy: h(t) = (t-1)^2 + (1/t-1)^2."""

    spec = "svk_isochoric"

    def _h(self, t):
        return (t - 1.0) ** 2 + (1.0 / t - 1.0) ** 2

    def h_prime(self, t):
        return 2.0 * (t - 1.0) - 2.0 * (1.0 / t - 1.0) / (t * t)

    def h_second(self, t):
        return 2.0 + 2.0 / t**4 + 4.0 * (1.0 / t - 1.0) / t**3

    def _psi(self, kk):
        return 4.0 * (kk * kk - kk)

    def psi_prime(self, kk):
        return 8.0 * kk - 4.0

    def psi_second(self, kk):
        return 8.0

    def g(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = (x / y - 1.0) ** 2 + (y / x - 1.0) ** 2
        return float(out) if out.ndim == 0 else out

    def __eq__(self, other):
        return type(other) is IsochoricSVK

    def __hash__(self):
        return hash("svk_isochoric")


# ---------------------------------------------------------------------------
# user-defined energies
# ---------------------------------------------------------------------------


class CustomEnergy(ConformalEnergy):
    """Energy defined by exactly one of `h`, `psi`, or `g`.

    Optional `h_prime`/`h_second` (resp. `psi_prime`/`psi_second`)
    callables override the finite-difference defaults.  Callables are
    applied elementwise, so plain scalar functions are fine.
    """

    spec = None

    def __init__(self, *, h=None, psi=None, g=None,
                 h_prime=None, h_second=None, psi_prime=None, psi_second=None):
        forms = [f for f in (h, psi, g) if f is not None]
        if len(forms) != 1:
            raise ValueError("exactly one of h, psi, g must be given")
        self._native = "h" if h is not None else ("psi" if psi is not None else "g")
        self._hf, self._pf, self._gf = h, psi, g
        self._hp, self._hs = h_prime, h_second
        self._pp, self._ps = psi_prime, psi_second

    def _scalarize(self, f, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return np.asarray(f(float(x)), dtype=float)
        return np.asarray([f(float(v)) for v in x.ravel()]).reshape(x.shape)

    def _h(self, t):
        if self._native == "h":
            return self._scalarize(self._hf, t)
        if self._native == "psi":
            return self._scalarize(self._pf, 0.5 * (np.asarray(t, float) + 1.0 / np.asarray(t, float)))
        return self._scalarize(lambda tv: self._gf(tv, 1.0), t)

    def _psi(self, kk):
        if self._native == "psi":
            return self._scalarize(self._pf, kk)
        return super()._psi(np.asarray(kk, dtype=float))

    def g_native(self, x, y):
        if self._native != "g":
            raise UnsupportedRepresentation("energy was not given in g form")
        return self._gf(x, y)

    @property
    def native_form(self) -> str:
        return self._native

    def h_prime(self, t):
        if self._hp is not None:
            return float(self._hp(float(t)))
        return super().h_prime(t)

    def h_second(self, t):
        if self._hs is not None:
            return float(self._hs(float(t)))
        return super().h_second(t)

    def psi_prime(self, kk):
        if self._pp is not None:
            return float(self._pp(float(kk)))
        return super().psi_prime(kk)

    def psi_second(self, kk):
        if self._ps is not None:
            return float(self._ps(float(kk)))
        return super().psi_second(kk)


class TabulatedEnergy(ConformalEnergy):
    """Energy defined by sampled (t, h) pairs, interpolated linearly in log t."""

    def __init__(self, t, values, *, source: str | None = None):
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != values.shape or len(t) < 2:
            raise ValueError("need matching 1-D arrays with at least 2 samples")
        if t[0] < 1.0 or np.any(np.diff(t) <= 0):
            raise ValueError("t samples must be >= 1 and strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("table values must be finite")
        self._logt = np.log(t)
        self._vals = values
        self._source = source

    @property
    def spec(self):
        return None if self._source is None else f"table{{path={self._source}}}"

    @classmethod
    def from_csv(cls, path) -> "TabulatedEnergy":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1], source=str(path))

    def _h(self, t):
        return np.interp(np.log(np.asarray(t, dtype=float)), self._logt, self._vals)


class RadialDistanceEnergy:
    """Energy of the form W(F) = g(sqrt(||F||^2 - 2 det F)).

    Not conformally invariant (it measures Euclidean distance to the
    scaled rotations, not a ratio), so it deliberately does not subclass
    :class:`ConformalEnergy`.  Only the radial-envelope operations accept
    it; the h/psi accessors raise.
    """

    spec = None

    def __init__(self, g):
        self._g = g

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        if r.ndim == 0:
            return float(self._g(float(r)))
        return np.asarray([self._g(float(v)) for v in r.ravel()]).reshape(r.shape)

    def eval(self, F) -> float:
        from .kinematics import euclid_dist_cso2_sq

        return float(self.radial(math.sqrt(2.0 * euclid_dist_cso2_sq(F))))

    def _unsupported(self, *_a, **_kw):
        raise UnsupportedRepresentation(
            "radial distance energies are not conformally invariant; "
            "only the radial envelope operations accept them"
        )

    h = h_ext = psi = g = h_prime = psi_prime = _unsupported


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def h_eval(energy, t):
    """Value of the energy at singular value ratio t >= 1."""
    if isinstance(energy, RadialDistanceEnergy):
        raise UnsupportedRepresentation("radial distance energy has no ratio form")
    return energy.h(t)


def psi_eval(energy, kk):
    """Value of the energy at outer distortion kk >= 1."""
    if isinstance(energy, RadialDistanceEnergy):
        raise UnsupportedRepresentation("radial distance energy has no distortion form")
    return energy.psi(kk)


def eval_energy(energy, F) -> float:
    """Value of the energy at a deformation gradient with det F > 0."""
    return energy.eval(F)


@dataclass(frozen=True)
class SampleSpec:
    """Log-spaced sample set used by :func:`validate_rep`."""

    n_axis: int = 8
    lo: float = 0.2
    hi: float = 5.0
    scales: tuple = (0.5, 2.0, 7.5)

    def axis(self) -> np.ndarray:
        return np.exp(np.linspace(math.log(self.lo), math.log(self.hi), self.n_axis))


@dataclass
class Violation:
    identity: str
    point: tuple
    values: tuple
    rel_err: float


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_rep(energy, spec: SampleSpec = SampleSpec(), tol: float = 1e-9) -> ValidationReport:
    """Check the symmetry g(x,y) = g(y,x) and scale invariance g(ax,ay) = g(x,y).

    Violations are collected with their witnessing sample; non-finite
    values are reported rather than raised.
    """
    gf = energy.g_native if isinstance(energy, CustomEnergy) and energy.native_form == "g" else energy.g
    report = ValidationReport()
    axis = spec.axis()

    def record(identity, point, va, vb):
        scale = max(1.0, abs(va), abs(vb))
        if not (np.isfinite(va) and np.isfinite(vb)):
            report.violations.append(Violation("finite", point, (va, vb), math.inf))
        elif abs(va - vb) > tol * scale:
            report.violations.append(Violation(identity, point, (va, vb), abs(va - vb) / scale))

    for x in axis:
        for y in axis:
            va, vb = float(gf(x, y)), float(gf(y, x))
            record("symmetry", (x, y), va, vb)
            for a in spec.scales:
                record("scale", (x, y, a), float(gf(a * x, a * y)), va)
    return report


# ---------------------------------------------------------------------------
# catalog registry for the CLI
# ---------------------------------------------------------------------------


def _parse_params(body: str) -> dict:
    params = {}
    for item in body.split(","):
        if not item.strip():
            continue
        key, _, val = item.partition("=")
        if not _:
            raise ValueError(f"malformed parameter {item!r}")
        params[key.strip()] = val.strip()
    return params


def energy_from_spec(spec: str):
    """Construct a catalog energy from a string like ``exp_hencky{k=0.11}``.

    Supported tags: dev_hencky, log_distortion_sq, exp_hencky{k=...},
    cosh{L=...}, svk_isochoric, table{path=...}.
    """
    spec = spec.strip()
    tag, brace, rest = spec.partition("{")
    tag = tag.strip()
    params = {}
    if brace:
        if not rest.endswith("}"):
            raise ValueError(f"unbalanced braces in energy spec {spec!r}")
        params = _parse_params(rest[:-1])
    try:
        if tag == "dev_hencky":
            return DevHencky()
        if tag == "log_distortion_sq":
            return LogDistortionSq()
        if tag == "exp_hencky":
            return ExpHencky(k=float(params.pop("k")))
        if tag == "cosh":
            return CoshDistortion(L=float(params.pop("L")))
        if tag == "svk_isochoric":
            return IsochoricSVK()
        if tag == "table":
            return TabulatedEnergy.from_csv(params.pop("path"))
    except KeyError as exc:
        raise ValueError(f"energy {tag!r} is missing parameter {exc}") from None
    raise ValueError(f"unknown energy tag {tag!r}")
