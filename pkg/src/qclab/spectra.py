"""Closed-form multifractal spectra and sharp pointwise bounds.

Outside admissibility the spectra return ``-inf`` (the level set is empty).
The Minkowski-type spectrum has the same closed form as :func:`joint_spectrum`.
"""
from __future__ import annotations

import math

from .core_maps import BOUNDARY_RTOL
from .errors import InvalidParameters

NEG_INF = float("-inf")


def _check_K(K, name="K"):
    if not K >= 1 or not math.isfinite(K):
        raise InvalidParameters(f"{name} must be >= 1, got {K}")


def ellipticity(K: float) -> float:
    """k = (K-1)/(K+1)."""
    return (K - 1) / (K + 1)


def in_pointwise_disk(K: float, alpha: float, gamma: float) -> bool:
    c, a = (K + 1 / K) / 2, (K - 1 / K) / 2
    tau = complex(alpha, alpha * gamma)
    return abs(tau - c) - a <= BOUNDARY_RTOL * max(a, 1.0)


def joint_spectrum(K: float, alpha: float, gamma: float) -> float:
    """F_K(alpha, gamma); ``-inf`` when alpha(1 + i gamma) is not admissible."""
    _check_K(K)
    if not alpha > 0:
        raise InvalidParameters(f"alpha must be positive, got {alpha}")
    if K == 1:
        return 2.0 if (alpha, gamma) == (1, 0) else NEG_INF
    if not in_pointwise_disk(K, alpha, gamma):
        return NEG_INF
    k = ellipticity(K)
    root = math.sqrt((1 - alpha) ** 2 + (1 - k * k) * alpha * alpha * gamma * gamma)
    # admissible points satisfy F >= 0 analytically; clip roundoff only
    return max((1 + alpha) - root / k, 0.0)


def joint_spectrum_raw(K: float, alpha: float, gamma: float) -> float:
    """Unclipped K-form of the joint spectrum (no admissibility test)."""
    return (1 + alpha) - math.sqrt((1 - alpha) ** 2 * (K + 1) ** 2
                                   + 4 * K * alpha ** 2 * gamma ** 2) / (K - 1)


def admissible_alpha_interval(K: float, gamma: float) -> tuple[float, float] | None:
    """Stretch exponents alpha with alpha(1 + i gamma) in the pointwise disk."""
    _check_K(K)
    c = (K + 1 / K) / 2
    q = 1 + gamma * gamma
    disc = c * c - q  # c^2 - a^2 = 1
    if disc < 0:
        return None
    s = math.sqrt(disc)
    return (c - s) / q, (c + s) / q


def rotation_spectrum(K: float, gamma: float, side: str = "source") -> float:
    _check_K(K)
    if side not in ("source", "image"):
        raise InvalidParameters(f"side must be source or image, got {side!r}")
    g = abs(gamma)
    if K == 1:
        return 2.0 if g == 0 else NEG_INF
    gmax = sharp_bound("qc-gamma-max", K)
    if g > gmax * (1 + BOUNDARY_RTOL):
        return NEG_INF
    if g == 0:
        return 2.0
    if side == "image":
        return max(2 - 4 * K * g / (K * K - 1), 0.0)
    k = ellipticity(K)
    return max(2 - (1 / k - k) / (math.sqrt(1 + g * g) / g - k), 0.0)


def bilip_spectrum(L: float, gamma: float) -> float:
    _check_K(L, "L")
    g = abs(gamma)
    if L == 1:
        return 2.0 if g == 0 else NEG_INF
    if g > (L - 1 / L) * (1 + BOUNDARY_RTOL):
        return NEG_INF
    return max(2 - 2 * L * g / (L * L - 1), 0.0)


SHARP_BOUND_KINDS = ("qc-gamma-max", "bilip-gamma-max", "qc-exp-threshold",
                     "bilip-exp-threshold", "qc-alpha-range")


def sharp_bound(kind: str, param: float):
    """Sharp pointwise/integrability bounds.

    ``qc-alpha-range`` returns a closed interval ``(1/K, K)``; the
    exponential-integrability thresholds are infinite at ``param = 1``.
    """
    if kind not in SHARP_BOUND_KINDS:
        raise InvalidParameters(f"unknown bound kind {kind!r}")
    _check_K(param, "param")
    P = float(param)
    if kind == "qc-gamma-max":
        return (P - 1 / P) / 2
    if kind == "bilip-gamma-max":
        return P - 1 / P
    if kind == "qc-alpha-range":
        return (1 / P, P)
    if P == 1:
        return math.inf
    if kind == "qc-exp-threshold":
        return 4 * P / (P * P - 1)
    return 2 * P / (P * P - 1)


def factoring_lower_bound(gamma: float, L0: float) -> int:
    """Minimum number of L0-bilipschitz factors to produce rotation rate gamma."""
    if not L0 > 1:
        raise InvalidParameters(f"L0 must exceed 1, got {L0}")
    ratio = abs(gamma) / (L0 - 1 / L0)
    n = math.ceil(ratio)
    # do not round up ratios that are integers up to roundoff
    if n - ratio > 1 - 1e-12 * max(ratio, 1.0):
        n -= 1
    return int(n)


def motion_dim_bound(lam_abs: float, alpha: float, gamma: float) -> float:
    """Dimension bound for points moved with exponent alpha(1 + i gamma); may be negative."""
    if not 0 < lam_abs < 1:
        raise InvalidParameters(f"lam_abs must lie in (0, 1), got {lam_abs}")
    if not alpha > 0:
        raise InvalidParameters(f"alpha must be positive, got {alpha}")
    k = lam_abs
    return 1 + alpha - math.sqrt((1 - alpha) ** 2 + (1 - k * k) * alpha ** 2 * gamma ** 2) / k
