"""Complex Burkholder functionals, their parameter solvers and the interpolation lemma.

For a principal map with Beltrami coefficient of modulus ``m`` and a complex
exponent ``p`` with ``1 <= |p - 1| <= 1/m``, the unimodular ``rho`` is defined by
``arg(p rho) = arg(1 + rho m)`` and ``beta`` lies on the ellipse with foci 0, 2
tangent to the line ``Re(beta/p) = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .core_maps import RegionSpec, Location, region_contains
from .errors import Infeasible, InvalidParameters, MissingData, PreconditionViolation

QUAD_TOL = 1e-8
QUAD_LIMIT = 10_000
ADMISSIBLE_RTOL = 1e-12


def _rho_residual(theta, p, m):
    # increasing in theta with total increase 2 pi, hence a unique root in [-pi, pi]
    return theta + np.angle(p) - np.angle(1 + m * np.exp(1j * theta))


def _check_p(p: complex, m) -> None:
    a = abs(p - 1)
    mmax = float(np.max(m)) if np.size(m) else 0.0
    if a < 1 - ADMISSIBLE_RTOL or (mmax > 0 and a * mmax > 1 + ADMISSIBLE_RTOL):
        raise Infeasible(f"need 1 <= |p - 1| <= 1/m; got |p - 1| = {a}, m = {mmax}")


def solve_rho(p: complex, m, *, check: bool = True):
    """Unimodular ``rho`` with ``arg(p rho) = arg(1 + rho m)``; vectorised over ``m``.

    Found by bisection in ``theta = arg rho`` over ``[-pi, pi]``.
    """
    p = complex(p)
    m_arr = np.asarray(m, dtype=float)
    if np.any(m_arr < 0) or np.any(m_arr >= 1):
        raise InvalidParameters("m must lie in [0, 1)")
    if p == 0:
        raise Infeasible("p = 0 has no argument")
    if check:
        _check_p(p, m_arr)
    lo = np.full(m_arr.shape, -math.pi)
    hi = np.full(m_arr.shape, math.pi)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        neg = _rho_residual(mid, p, m_arr) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    theta = 0.5 * (lo + hi)
    rho = np.exp(1j * theta)
    w = p * rho * m_arr / (1 + rho * m_arr)
    if check and (np.any(w.real < -1e-10) or np.any(w.real > 1 + 1e-10)
                  or np.any(np.abs(w.imag) > 1e-10 * np.maximum(1, np.abs(w)))):
        raise Infeasible("p rho m / (1 + rho m) leaves [0, 1]")
    return complex(rho) if rho.ndim == 0 else rho


def solve_beta(p: complex) -> complex:
    """Point of the ellipse ``|b| + |b - 2| = 2|p - 1|`` with ``Re(b/p) = 1``.

    The line ``Re(b/p) = 1`` passes through ``p`` and is tangent to the ellipse,
    so the root is the maximiser of ``Re(beta(theta)/p)`` over the ellipse
    parametrisation ``beta(theta) = 1 + a cos(theta) + i b sin(theta)``.
    """
    p = complex(p)
    a = abs(p - 1)
    if a < 1 - ADMISSIBLE_RTOL:
        raise Infeasible(f"|p - 1| = {a} < 1")
    if p.real <= 0 and a <= 1 + ADMISSIBLE_RTOL:
        raise Infeasible("p = 0 has no tangent line")
    b = math.sqrt(max(a * a - 1, 0.0))
    # Re(beta conj p) = p1 (1 + a cos) + p2 b sin is maximal at theta = atan2(b p2, a p1)
    theta = math.atan2(b * p.imag, a * p.real)
    beta = complex(1 + a * math.cos(theta), b * math.sin(theta))
    res = (beta / p).real - 1
    if abs(res) > 1e-12 * max(1.0, abs(beta / p)):
        raise Infeasible(f"tangency residual {res}")
    return beta


def power_integral_exponent(tau: complex, beta: complex) -> float:
    """Radial exponent: ``int_D |f_z^beta|`` is finite iff the return value is positive."""
    tau, beta = complex(tau), complex(beta)
    if tau.real <= 0:
        raise InvalidParameters("Re tau must be positive")
    return (beta * (tau - 1)).real + 2


@dataclass(frozen=True)
class PowerMapProfile:
    """Disk-localized power map ``z |z|^(tau-1)`` on D, identity outside."""

    tau: complex

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        if self.tau.real <= 0:
            raise InvalidParameters("Re tau must be positive")

    @classmethod
    def identity(cls):
        return cls(1 + 0j)

    @classmethod
    def extremal(cls, p: complex, k: float) -> "PowerMapProfile":
        """Power map with equality in the Burkholder inequality for exponent ``p``."""
        rho = solve_rho(p, k)
        eta = -rho * k  # Beltrami coefficient of the map is eta z / conj(z)
        return cls((1 + eta) / (1 - eta))

    @property
    def eta(self) -> complex:
        return (self.tau - 1) / (self.tau + 1)

    @property
    def k(self) -> float:
        return abs(self.eta)

    def log_fz(self, u):
        """Principal ``log f_z`` at ``|z| = exp(-u)``."""
        return np.log((self.tau + 1) / 2) - (self.tau - 1) * np.asarray(u)


def _admissible_beta(p: complex, beta: complex) -> None:
    a = abs(p - 1)
    if a <= 1 + ADMISSIBLE_RTOL:
        if abs(beta - 2) > 1e-12:
            raise Infeasible("|p - 1| = 1 forces beta = 2")
        return
    s = abs(beta) + abs(beta - 2)
    if s > 2 * a * (1 + ADMISSIBLE_RTOL):
        raise Infeasible(f"beta = {beta} outside |b| + |b - 2| <= 2|p - 1| = {2 * a}")


def _integrand_parts(fz, log_fz, m, p, beta, rho):
    afz = np.abs(fz)
    weight = np.abs(afz + rho * m * afz) - abs(p) * m * afz
    logw = log_fz + np.log(1 + rho * m)
    return weight * np.exp(((beta - 1) * logw).real)


def _log_integrand(log_fz, m, p, beta, rho):
    """Logarithm of the Burkholder integrand; the weight factor is >= 0."""
    w = abs(1 + rho * m) - abs(p) * m
    if w <= 0:
        return -math.inf
    logw = log_fz + np.log(1 + rho * m)
    return math.log(w) + float(log_fz.real) + float(((beta - 1) * logw).real)


def burkholder_integral(source, p: complex, beta: complex, *, tol: float = QUAD_TOL,
                        method: str = "quad") -> float:
    """``(1/pi) int_D (||f_z| + rho|f_zbar|| - |p||f_zbar|) |(f_z + rho|mu| f_z)^(beta-1)|``.

    ``source`` is a :class:`PowerMapProfile` (radial quadrature in ``u = log 1/|z|``,
    or the closed form with ``method="closed"``) or a solved flow/grid bundle
    exposing ``fz``, ``mu`` and ``log_fz()`` (midpoint rule over grid cells in D).
    """
    p, beta = complex(p), complex(beta)
    _admissible_beta(p, beta)
    if isinstance(source, PowerMapProfile):
        k = source.k
        _check_p(p, k)
        if k == 0:
            return 1.0  # f_z = 1 and the weight is 1
        rho = solve_rho(p, k)
        if method == "closed":
            lf0 = np.log((source.tau + 1) / 2)
            c0 = _integrand_parts(np.exp(lf0), lf0, k, p, beta, rho)
            # log f_z is affine in u with slope -(tau - 1)
            rate = (-(beta - 1) * (source.tau - 1)).real - (source.tau - 1).real
            decay = 2 - rate
            return math.inf if decay <= 0 else float(2 * c0 / decay)
        if method != "quad":
            raise InvalidParameters(f"unknown method {method!r}")

        def g(u):
            return 2 * math.exp(_log_integrand(source.log_fz(u), k, p, beta, rho) - 2 * u)

        val, _ = quad(g, 0, math.inf, epsabs=tol, epsrel=tol, limit=QUAD_LIMIT)
        return float(val)
    fz, mu = _grid_channels(source)
    data_fz = fz.data
    m = np.abs(mu.data)
    _check_p(p, m)
    log_fz = source.log_fz().data if hasattr(source, "log_fz") else np.log(data_fz)
    Z = fz.coords()
    inside = np.abs(Z) < 1
    rho = solve_rho(p, m[inside])
    vals = _integrand_parts(data_fz[inside], log_fz[inside], m[inside], p, beta, rho)
    return float(np.sum(vals) * fz.spacing ** 2 / math.pi)


def _grid_channels(source):
    fz = getattr(source, "fz", None)
    mu = getattr(source, "mu", None)
    if fz is None or mu is None:
        raise MissingData("grid source needs fz and mu channels")
    return fz, mu


@dataclass(frozen=True)
class PowerAverage:
    value: float
    divergent: bool
    exponent: float | None = None


def complex_power_integral(source, beta: complex, disk: tuple[complex, float] = (0j, 1.0),
                           *, tol: float = QUAD_TOL) -> PowerAverage:
    """Average of ``|f_z^beta|`` over ``disk``.

    Power-map profiles need a disk centred at 0 inside D; they are integrated by
    radial quadrature and flagged divergent when the radial exponent is <= 0.
    Grid sources use the midpoint rule with the principal ``log f_z`` unless they
    provide a ``log_fz()`` channel.
    """
    beta = complex(beta)
    center, radius = complex(disk[0]), float(disk[1])
    if radius <= 0:
        raise InvalidParameters("radius must be positive")
    if isinstance(source, PowerMapProfile):
        if center != 0 or radius > 1:
            raise InvalidParameters("profile disks must be centred at 0 with radius <= 1")
        expo = power_integral_exponent(source.tau, beta)
        if expo <= 0:
            return PowerAverage(math.inf, True, expo)
        u0 = math.log(1 / radius)

        def g(u):
            return 2 * math.exp((beta * source.log_fz(u)).real - 2 * (u - u0))

        val, _ = quad(g, u0, math.inf, epsabs=tol, epsrel=tol, limit=QUAD_LIMIT)
        return PowerAverage(float(val), False, expo)
    fz = getattr(source, "fz", None)
    if fz is None:
        fz = source
    Z = fz.coords()
    cell = np.abs(Z - center) < radius
    if not cell.any():
        raise InvalidParameters("disk contains no grid cells")
    log_fz = source.log_fz().data if hasattr(source, "log_fz") else np.log(fz.data)
    vals = np.exp((beta * log_fz[cell]).real)
    return PowerAverage(float(vals.mean()), False, None)


def power_average_closed_form(tau: complex, beta: complex, radius: float = 1.0) -> float:
    """Closed form of the profile average: ``|((tau+1)/2)^beta| 2 R^c / (c + 2)``."""
    tau, beta = complex(tau), complex(beta)
    c = (beta * (tau - 1)).real
    if c + 2 <= 0:
        return math.inf
    return math.exp((beta * np.log((tau + 1) / 2)).real) * 2 * radius ** c / (c + 2)


# ---------------------------------------------------------------- interpolation


class ConstantFamily:
    """``Phi_lambda == 1`` on a measure space of total mass ``mass``."""

    def __init__(self, mass: float = 1.0):
        self.mass = float(mass)

    def integral(self, lam: complex, beta: complex) -> float:
        return self.mass


class PowerFlowFamily:
    """``Phi_lambda = (1 + alpha_lambda) f_z^lambda`` for a power map and exponent ``p``.

    The flow multiplies the Beltrami coefficient by ``alpha_lambda conj(rho) / k``
    where ``alpha/(1 + alpha) = c lambda/(1 + lambda)`` and ``c = p rho k/(1 + rho k)``;
    the measure is ``(1 - c) dA / pi`` on D.  At ``lambda = 1/(p - 1)`` the original
    map is recovered.
    """

    def __init__(self, tau: complex, p: complex, method: str = "quad"):
        self.profile = PowerMapProfile(tau)
        self.p = complex(p)
        k = self.profile.k
        if k == 0:
            raise InvalidParameters("the identity has no flow direction")
        _check_p(self.p, k)
        self.rho = solve_rho(self.p, k)
        self.c = float((self.p * self.rho * k / (1 + self.rho * k)).real)
        self.method = method

    @classmethod
    def extremal(cls, p: complex, k: float, method: str = "quad"):
        return cls(PowerMapProfile.extremal(p, k).tau, p, method)

    @classmethod
    def spiral(cls, k: float, scale: float = 2.0, method: str = "closed"):
        """Flow of the spiral coefficient ``i k z/conj(z)``; ``p = scale (k + i)`` puts
        ``rho = -i`` so the flow direction is purely rotational."""
        tau = (1 + 1j * k) / (1 - 1j * k)
        return cls(tau, scale * complex(k, 1.0), method)

    def coefficients(self, lam: complex):
        lam = complex(lam)
        alpha = self.c * lam / (1 + (1 - self.c) * lam)
        eta = alpha * self.rho.conjugate() * self.profile.eta / self.profile.k
        return alpha, eta

    def log_phi(self, lam: complex, u):
        """``log Phi_lambda`` at ``|z| = exp(-u)`` on the branch with ``log Phi_0 = 0``."""
        alpha, eta = self.coefficients(lam)
        tau_m1 = 2 * eta / (1 - eta)
        return np.log(1 + alpha) - np.log(1 - eta) - tau_m1 * np.asarray(u)

    def integral(self, lam: complex, beta: complex) -> float:
        beta = complex(beta)
        alpha, eta = self.coefficients(lam)
        tau_m1 = 2 * eta / (1 - eta)
        decay = 2 + (beta * tau_m1).real
        if decay <= 0:
            return math.inf
        w = 1 - self.c
        if self.method == "closed":
            c0 = math.exp((beta * (np.log(1 + alpha) - np.log(1 - eta))).real)
            return w * 2 * c0 / decay

        def g(u):
            return 2 * math.exp((beta * self.log_phi(lam, u)).real - 2 * u)

        val, _ = quad(g, 0, math.inf, epsabs=QUAD_TOL * 1e-2, epsrel=QUAD_TOL * 1e-2,
                      limit=QUAD_LIMIT)
        return w * float(val)


@dataclass(frozen=True)
class InterpolationRecord:
    beta: complex
    integral: float
    inside: bool
    passed: bool


def verify_interpolation(family, p0: float, lam: complex, betas: Sequence[complex], *,
                         tol: float = 1e-6) -> list[InterpolationRecord]:
    """Check ``int |Phi_lambda^beta| dsigma <= 1`` for each beta.

    ``family.integral(lam, beta)`` must return the integral.  Failures outside the
    ellipse ``|beta| + |beta - p0| <= p0/|lam|`` are reported, not raised.
    """
    lam = complex(lam)
    if not 0 < abs(lam) < 1:
        raise InvalidParameters("need 0 < |lambda| < 1")
    base = [family.integral(0j, b) for b in (p0, 1.0, 1 + 1j)]
    if max(base) > 1 + tol or max(base) - min(base) > tol:
        raise PreconditionViolation("Phi_0 must be identically 1 on a measure of mass <= 1")
    norm = family.integral(lam, p0)
    if not norm <= 1 + tol:
        raise PreconditionViolation(f"||Phi_lambda||_p0^p0 = {norm} exceeds 1")
    region = RegionSpec.lemma_ellipse(p0, abs(lam))
    out = []
    for b in betas:
        b = complex(b)
        val = family.integral(lam, b)
        inside = region_contains(region, b) is not Location.OUTSIDE
        out.append(InterpolationRecord(b, float(val), inside, bool(val <= 1 + tol)))
    return out


def sample_lemma_betas(p0: float, lam_abs: float, n: int, where: str = "inside",
                       seed: int = 0) -> list[complex]:
    """Deterministic exponents inside the lemma ellipse, or 10% beyond its major-axis
    vertices (alternating sides)."""
    rng = np.random.default_rng(seed)
    c = p0 / 2
    a = p0 / (2 * lam_abs)
    b = math.sqrt(a * a - c * c)
    if where == "inside":
        rad = np.sqrt(rng.uniform(0, 1, n)) * 0.999
        th = rng.uniform(0, 2 * np.pi, n)
        return [complex(c + a * q * math.cos(t), b * q * math.sin(t)) for q, t in zip(rad, th)]
    if where == "beyond-axis":
        out = []
        for i in range(n):
            sgn = 1 if i % 2 == 0 else -1
            out.append(complex(c + sgn * a * (1.1 + 0.1 * rng.uniform())))
        return out
    raise InvalidParameters(f"unknown sampling region {where!r}")
