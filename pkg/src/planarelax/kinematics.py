"""Exact 2x2 kinematics: singular values, distortions, conformal distances.

All quantities are derived from the two Frobenius invariants of a planar
deformation gradient F, namely ||F||^2 and det F.  With

    s = sqrt(||F||^2 + 2 det F) = lambda_max + lambda_min
    d = sqrt(||F||^2 - 2 det F) = lambda_max - lambda_min

the singular values follow in closed form without ever forming F^T F,
which keeps the small singular value accurate for distortions up to
roughly 1e8 in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

__all__ = [
    "Mat2",
    "SingularPair",
    "DistortionPair",
    "singular_values",
    "outer_distortion",
    "linear_distortion",
    "distortions",
    "kk_from_k",
    "k_from_kk",
    "dev_log_stretch_norm_sq",
    "euclid_dist_cso2_sq",
]

# Below this, ||F||^2 - 2 det F is treated as exactly zero (conformal F);
# avoids NaN from tiny negative round-off under the square root.
_DSQ_CLAMP = 1e-30


@dataclass(frozen=True)
class Mat2:
    """A real 2x2 matrix, typically a deformation gradient."""

    e11: float
    e12: float
    e21: float
    e22: float

    @staticmethod
    def from_array(a) -> "Mat2":
        a = np.asarray(a, dtype=float)
        if a.shape != (2, 2):
            raise ValueError(f"expected a 2x2 array, got shape {a.shape}")
        return Mat2(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    @staticmethod
    def diag(x: float, y: float) -> "Mat2":
        return Mat2(float(x), 0.0, 0.0, float(y))

    def as_array(self) -> np.ndarray:
        return np.array([[self.e11, self.e12], [self.e21, self.e22]])

    @property
    def det(self) -> float:
        return self.e11 * self.e22 - self.e12 * self.e21

    @property
    def norm_sq(self) -> float:
        return self.e11**2 + self.e12**2 + self.e21**2 + self.e22**2

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.e11 + other.e11, self.e12 + other.e12,
                    self.e21 + other.e21, self.e22 + other.e22)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.e11 - other.e11, self.e12 - other.e12,
                    self.e21 - other.e21, self.e22 - other.e22)

    def __rmul__(self, a: float) -> "Mat2":
        return Mat2(a * self.e11, a * self.e12, a * self.e21, a * self.e22)

    def matmul(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.e11 * other.e11 + self.e12 * other.e21,
            self.e11 * other.e12 + self.e12 * other.e22,
            self.e21 * other.e11 + self.e22 * other.e21,
            self.e21 * other.e12 + self.e22 * other.e22,
        )


@dataclass(frozen=True)
class SingularPair:
    """Ordered singular values lambda_max >= lambda_min > 0."""

    lambda_max: float
    lambda_min: float

    @property
    def ratio(self) -> float:
        return self.lambda_max / self.lambda_min


@dataclass(frozen=True)
class DistortionPair:
    """Outer distortion kk and linear distortion k, both >= 1."""

    kk: float
    k: float


def _coerce(F) -> Mat2:
    if isinstance(F, Mat2):
        return F
    return Mat2.from_array(F)


def _require_glp(F: Mat2) -> float:
    det = F.det
    if not det > 0.0:
        raise DomainError(f"not in GL+(2): det F = {det}")
    return det


def singular_values(F) -> SingularPair:
    """Closed-form singular values of F with det F > 0.

    Raises
    ------
    DomainError
        If det F <= 0.
    """
    F = _coerce(F)
    det = _require_glp(F)
    nsq = F.norm_sq
    s = math.sqrt(nsq + 2.0 * det)
    dsq = nsq - 2.0 * det
    d = 0.0 if dsq < _DSQ_CLAMP else math.sqrt(dsq)
    lam_max = 0.5 * (s + d)
    # lambda_min via the product identity; (s - d)/2 cancels for large ratios
    lam_min = 2.0 * det / (s + d)
    return SingularPair(lam_max, lam_min)


def outer_distortion(F) -> float:
    """Outer distortion: half the squared Frobenius norm over the determinant."""
    F = _coerce(F)
    det = _require_glp(F)
    return 0.5 * F.norm_sq / det


def linear_distortion(F) -> float:
    """Linear distortion: ratio of the singular values, lambda_max / lambda_min."""
    sv = singular_values(F)
    return sv.lambda_max / sv.lambda_min


def distortions(F) -> DistortionPair:
    """Both distortion measures of F, computed from one singular value pass."""
    sv = singular_values(F)
    k = sv.lambda_max / sv.lambda_min
    return DistortionPair(kk=0.5 * (k + 1.0 / k), k=k)


def kk_from_k(k: float) -> float:
    """Outer distortion from linear distortion: (k + 1/k) / 2."""
    if not k >= 1.0:
        raise DomainError(f"linear distortion must be >= 1, got {k}")
    return 0.5 * (k + 1.0 / k)


def k_from_kk(kk: float) -> float:
    """Linear distortion from outer distortion: kk + sqrt(kk^2 - 1)."""
    if not kk >= 1.0:
        raise DomainError(f"outer distortion must be >= 1, got {kk}")
    return kk + math.sqrt(max(kk * kk - 1.0, 0.0))


def dev_log_stretch_norm_sq(F) -> float:
    """Squared norm of the deviatoric Hencky strain, log^2(ratio) / 2."""
    return 0.5 * math.log(linear_distortion(F)) ** 2


def euclid_dist_cso2_sq(F) -> float:
    """Squared Euclidean distance of F to the scaled rotations, (||F||^2 - 2 det F)/2.

    Defined for every 2x2 matrix; no positivity of det F is required.
    """
    F = _coerce(F)
    return 0.5 * max(F.norm_sq - 2.0 * F.det, 0.0)
