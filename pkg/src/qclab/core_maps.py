"""Model power maps, their Beltrami data, and the admissibility regions.

The model map is ``f_tau(z) = z |z|^(tau - 1)``.  Writing ``tau = alpha (1 + i gamma)``,
``alpha`` is the stretching exponent at the origin and ``gamma`` the rotation rate.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import DegenerateRegion, DerivativeUndefined, InvalidParameters

VARIANTS = ("global-power", "disk-localized", "spiral")
BOUNDARY_RTOL = 1e-12


@dataclass(frozen=True)
class ModelMapParams:
    tau: complex
    variant: str = "global-power"

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        if self.variant not in VARIANTS:
            raise InvalidParameters(f"unknown variant {self.variant!r}")
        if not np.isfinite(self.tau) or self.tau.real <= 0:
            raise InvalidParameters(f"Re tau must be positive, got {self.tau}")
        if self.variant == "spiral" and self.tau.real != 1.0:
            raise InvalidParameters("spiral variant requires Re tau = 1")

    @classmethod
    def spiral(cls, gamma: float) -> "ModelMapParams":
        return cls(complex(1.0, gamma), "spiral")

    @classmethod
    def from_alpha_gamma(cls, alpha: float, gamma: float, variant: str = "global-power"):
        return cls(complex(alpha, alpha * gamma), variant)

    @classmethod
    def from_eta(cls, eta: complex, variant: str = "global-power") -> "ModelMapParams":
        """Map with Beltrami coefficient ``eta * z / conj(z)``."""
        eta = complex(eta)
        if abs(eta) >= 1:
            raise InvalidParameters("|eta| must be < 1")
        return cls((1 + eta) / (1 - eta), variant)

    @property
    def eta(self) -> complex:
        return (self.tau - 1) / (self.tau + 1)

    @property
    def alpha(self) -> float:
        return self.tau.real

    @property
    def gamma(self) -> float:
        return self.tau.imag / self.tau.real

    @property
    def K(self) -> float:
        return minimal_distortion(self.tau)

    def __call__(self, z):
        """Vectorised map evaluation."""
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = z * np.exp((self.tau - 1) * np.log(r))
        w = np.where(r == 0, 0j, w)
        if self.variant == "disk-localized":
            w = np.where(r <= 1, w, z)
        return w[()] if w.ndim == 0 else w


@dataclass(frozen=True)
class MapValue:
    value: complex
    fz: complex
    fzbar: complex
    mu: complex


def model_map_eval(params: ModelMapParams, z: complex, derivatives: bool = True) -> MapValue:
    z = complex(z)
    value = complex(params(z))
    if not derivatives:
        nan = complex("nan")
        return MapValue(value, nan, nan, nan)
    if z == 0:
        raise DerivativeUndefined("derivatives undefined at origin")
    tau = params.tau
    if params.variant == "disk-localized" and abs(z) > 1:
        return MapValue(value, 1 + 0j, 0j, 0j)
    # on |z| = 1 the disk-localized map uses the inner (power-law) derivatives
    scale = np.exp((tau - 1) * np.log(abs(z)))
    fz = (tau + 1) / 2 * scale
    fzbar = (tau - 1) / 2 * (z / z.conjugate()) * scale
    return MapValue(value, complex(fz), complex(fzbar), complex(fzbar / fz))


def minimal_distortion(tau: complex) -> float:
    """Smallest K for which ``f_tau`` is K-quasiconformal."""
    tau = complex(tau)
    if tau.real <= 0:
        raise InvalidParameters(f"Re tau must be positive, got {tau}")
    k = abs((tau - 1) / (tau + 1))
    return (1 + k) / (1 - k)


class Location(str, enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


REGION_KINDS = ("pointwise-disk", "critical-ellipse", "lemma-ellipse", "ap-dual")


@dataclass(frozen=True)
class RegionSpec:
    """Disk or two-focus ellipse; ``closed`` records open vs closed semantics."""

    kind: str
    K: float | None = None
    p0: float | None = None
    lam_abs: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise InvalidParameters(f"unknown region kind {self.kind!r}")
        if self.kind in ("pointwise-disk", "critical-ellipse", "ap-dual"):
            if self.K is None or not self.K >= 1:
                raise InvalidParameters("K >= 1 required")
            if self.K == 1:
                raise DegenerateRegion(f"{self.kind} collapses at K = 1")
        if self.kind == "lemma-ellipse":
            if self.p0 is None or not self.p0 > 0:
                raise InvalidParameters("p0 > 0 required")
            if self.lam_abs is None or not 0 < self.lam_abs < 1:
                raise InvalidParameters("0 < lam_abs < 1 required")
        if self.kind == "ap-dual" and (self.p is None or not self.p > 1):
            raise InvalidParameters("p > 1 required")

    @classmethod
    def pointwise_disk(cls, K):
        return cls("pointwise-disk", K=float(K))

    @classmethod
    def critical_ellipse(cls, K):
        return cls("critical-ellipse", K=float(K))

    @classmethod
    def lemma_ellipse(cls, p0, lam_abs):
        return cls("lemma-ellipse", p0=float(p0), lam_abs=float(lam_abs))

    @classmethod
    def ap_dual(cls, K, p):
        return cls("ap-dual", K=float(K), p=float(p))

    @property
    def closed(self) -> bool:
        return self.kind in ("pointwise-disk", "lemma-ellipse")

    @property
    def is_disk(self) -> bool:
        return self.kind == "pointwise-disk"

    def disk(self) -> tuple[float, float]:
        K = self.K
        return (K + 1 / K) / 2, (K - 1 / K) / 2

    def ellipse(self) -> tuple[complex, complex, float]:
        """Foci and distance-sum bound."""
        if self.kind == "critical-ellipse":
            K = self.K
            return 0j, 2 + 0j, 2 * (K + 1) / (K - 1)
        if self.kind == "lemma-ellipse":
            return 0j, complex(self.p0), self.p0 / self.lam_abs
        if self.kind == "ap-dual":
            K, p = self.K, self.p
            return 0j, complex(-2 * (p - 1)), 2 * (p - 1) * (K + 1) / (K - 1)
        raise InvalidParameters("not an ellipse")

    def center(self) -> complex:
        if self.is_disk:
            return complex(self.disk()[0])
        f1, f2, _ = self.ellipse()
        return (f1 + f2) / 2

    def residual(self, point) -> np.ndarray:
        """Signed defining scalar: negative inside, zero on the boundary."""
        point = np.asarray(point, dtype=complex)
        if self.is_disk:
            c, a = self.disk()
            return np.abs(point - c) - a
        f1, f2, bound = self.ellipse()
        return np.abs(point - f1) + np.abs(point - f2) - bound

    def scale(self) -> float:
        return self.disk()[1] if self.is_disk else self.ellipse()[2]

    def admits(self, point) -> bool:
        loc = region_contains(self, point)
        return loc is Location.INSIDE or (self.closed and loc is Location.BOUNDARY)


def region_contains(region: RegionSpec, point: complex) -> Location:
    res = float(region.residual(complex(point)))
    if abs(res) <= BOUNDARY_RTOL * region.scale():
        return Location.BOUNDARY
    return Location.INSIDE if res < 0 else Location.OUTSIDE


def boundary_crossing(region: RegionSpec, start: complex, direction: complex,
                      xtol: float = 1e-14) -> complex:
    """Boundary point on the ray ``start + s*direction``, ``s > 0``, by bisection.

    ``start`` must lie inside the region.
    """
    start, direction = complex(start), complex(direction)
    if direction == 0:
        raise InvalidParameters("direction must be nonzero")
    direction /= abs(direction)
    g = lambda s: float(region.residual(start + s * direction))
    if g(0.0) >= 0:
        raise InvalidParameters("start point is not inside the region")
    hi = 1.0
    while g(hi) < 0:
        hi *= 2
    s = bisect(g, 0.0, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
    return start + s * direction
