"""Extremal maps built from nested spiralling annuli, and dimension estimators.

Given an admissible exponent ``tau = alpha (1 + i gamma)`` we move along the ray
from 1 through ``tau`` until the boundary of the pointwise disk, at
``tau0 = (tau - 1)/t + 1``.  Each annulus ``B(w, R) \\ sB`` with ``s = r^t`` is mapped by
the radial power ``tau0`` and the inner disk ``sB`` by the matching similarity.
The inner disk carries ``N = floor(s / 2r)^2`` children of radius ``r R``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameters
from .branches import continuous_log
from .spectra import in_pointwise_disk

LOGGER = logging.getLogger(__name__)

MAX_NODES = 2_000_000


@dataclass(frozen=True)
class ConeParameters:
    t: float
    alpha0: float
    gamma0: float

    @property
    def tau0(self) -> complex:
        return complex(self.alpha0, self.alpha0 * self.gamma0)


def solve_cone_parameter(K: float, alpha: float, gamma: float) -> ConeParameters:
    if not K > 1:
        raise InvalidParameters("K > 1 required")
    if not alpha > 0:
        raise InvalidParameters("alpha must be positive")
    tau = complex(alpha, alpha * gamma)
    if tau == 1:
        raise InvalidParameters("tau = 1 is the identity exponent; the cone parameter degenerates to t = 0")
    if not in_pointwise_disk(K, alpha, gamma):
        raise InvalidParameters(f"tau = {tau} lies outside the pointwise disk of K = {K}")
    c, a = (K + 1 / K) / 2, (K - 1 / K) / 2
    d = tau - 1
    # |d u + (1 - c)|^2 = a^2 in u = 1/t
    A = abs(d) ** 2
    B = 2 * (d * (1 - c)).real
    C = (1 - c) ** 2 - a * a  # = -(K - 1)^2 / K < 0
    disc = math.sqrt(B * B - 4 * A * C)
    # larger root, written to avoid cancellation
    u = (-B + disc) / (2 * A) if B <= 0 else (-2 * C) / (B + disc)
    t = min(1 / u, 1.0)
    tau0 = d / t + 1
    return ConeParameters(t, tau0.real, tau0.imag / tau0.real)


@dataclass
class CantorMap:
    K: float
    alpha: float
    gamma: float
    r: float
    depth: int
    cone: ConeParameters = field(init=False)
    s: float = field(init=False)
    n_side: int = field(init=False)
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise InvalidParameters("r must lie in (0, 1)")
        if self.depth < 0 or int(self.depth) != self.depth:
            raise InvalidParameters("depth must be a nonnegative integer")
        self.depth = int(self.depth)
        self.cone = solve_cone_parameter(self.K, self.alpha, self.gamma)
        self.s = self.r ** self.cone.t
        self.n_side = math.floor(self.s / (2 * self.r))
        if self.n_side < 1:
            raise InvalidParameters(
                f"r = {self.r} too large: need s/(2r) >= 1, i.e. r <= 2^(-1/(1-t)) = "
                f"{2 ** (-1 / (1 - self.cone.t)) if self.cone.t < 1 else 0.0}")
        if not self.smallness_ok:
            LOGGER.warning("r = %g violates r < r^t / 16; the packing is still valid", self.r)
        n, r = self.n_side, self.r
        # odd grids are shifted by one child radius so no child covers the centre
        shift = 0.0 if n % 2 == 0 else 1.0
        ax = r * (2 * np.arange(n) - n + 1 + shift)
        self.offsets = (ax[None, :] + 1j * ax[:, None]).ravel()
        self._lo = ax[0]
        far = np.max(np.abs(self.offsets)) + r
        if far > self.s * (1 + 1e-12):
            raise InvalidParameters(f"child grid does not fit inside the inner disk for r = {self.r}")

    @property
    def N(self) -> int:
        return self.n_side ** 2

    @property
    def tau0(self) -> complex:
        return self.cone.tau0

    @property
    def t(self) -> float:
        return self.cone.t

    @property
    def smallness_ok(self) -> bool:
        return self.r < self.s / 16

    @property
    def inner_factor(self) -> complex:
        """Similarity multiplier ``s^(tau0 - 1)`` used inside each inner disk."""
        return complex(np.exp((self.tau0 - 1) * math.log(self.s)))

    def node_count(self, level: int) -> int:
        return self.N ** level

    def level_centers(self, level: int) -> np.ndarray:
        """Centres of all level-``level`` disks (radius ``r**level``)."""
        if level < 0 or level > self.depth:
            raise InvalidParameters(f"level must lie in [0, {self.depth}]")
        if self.node_count(level) > MAX_NODES:
            raise InvalidParameters(f"level {level} has {self.node_count(level)} nodes (cap {MAX_NODES})")
        pts = np.zeros(1, dtype=complex)
        for j in range(1, level + 1):
            pts = (pts[:, None] + self.r ** (j - 1) * self.offsets[None, :]).ravel()
        return pts

    @property
    def tree(self) -> list[list[tuple[complex, float]]]:
        """Materialised levels ``(center, outer_radius)`` up to the node cap."""
        levels, total = [], 0
        for j in range(self.depth + 1):
            total += self.node_count(j)
            if total > MAX_NODES:
                break
            R = self.r ** j
            levels.append([(c, R) for c in self.level_centers(j).tolist()])
        return levels

    def _child(self, u):
        """Index of the child disk containing the scaled offset ``u`` (or -1)."""
        n = self.n_side
        ix = np.clip(np.rint((u.real - self._lo) / (2 * self.r)).astype(int), 0, n - 1)
        iy = np.clip(np.rint((u.imag - self._lo) / (2 * self.r)).astype(int), 0, n - 1)
        idx = iy * n + ix
        hit = np.abs(u - self.offsets[idx]) < self.r
        return np.where(hit, idx, -1)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        z = z.ravel()
        out = z.copy()
        tau0 = self.tau0
        lam = self.inner_factor
        active = np.abs(z) < 1
        idx = np.nonzero(active)[0]
        c = np.zeros(idx.size, dtype=complex)  # current disk centre
        Tc = np.zeros(idx.size, dtype=complex)  # its image
        A = np.ones(idx.size, dtype=complex)  # multiplier of the ancestor similarity
        R = 1.0
        for j in range(self.depth + 1):
            if idx.size == 0:
                break
            zz = z[idx]
            d = zz - c
            rho = np.abs(d)
            ann = rho >= self.s * R
            if ann.any():
                dd, rr = d[ann], rho[ann]
                out[idx[ann]] = Tc[ann] + A[ann] * R * (dd / rr) * np.exp(tau0 * np.log(rr / R))
            inner = ~ann
            idx, c, Tc, A, d = idx[inner], c[inner], Tc[inner], A[inner] * lam, d[inner]
            if j == self.depth:
                out[idx] = Tc + A * d
                break
            child = self._child(d / R)
            stop = child < 0
            out[idx[stop]] = Tc[stop] + A[stop] * d[stop]
            keep = ~stop
            idx, c, Tc, A, d, child = idx[keep], c[keep], Tc[keep], A[keep], d[keep], child[keep]
            shift = R * self.offsets[child]
            c = c + shift
            Tc = Tc + A * shift
            R *= self.r
        out = out.reshape(shape)
        return out[()] if out.ndim == 0 else out


def build_cantor_map(K: float, alpha: float, gamma: float, r: float, depth: int) -> CantorMap:
    return CantorMap(K, alpha, gamma, r, depth)


def eval_cantor_map(cmap: CantorMap, z):
    return cmap(z)


def cantor_set_points(cmap: CantorMap, level: int) -> np.ndarray:
    return cmap.level_centers(level)


@dataclass(frozen=True)
class BoxCount:
    per_scale: list[tuple[float, int, float]]
    fit: float


def box_counting_dimension(points, scales, offset: complex = 0j) -> BoxCount:
    """Occupied-cell counts on grids anchored at the bounding-box corner.

    ``offset`` (in units of the cell side) shifts the anchor for sensitivity checks.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    scales = np.asarray(scales, dtype=float)
    if pts.size == 0:
        raise InvalidParameters("no points")
    if scales.size < 2 or np.any(scales <= 0):
        raise InvalidParameters("need at least two positive scales")
    corner = complex(pts.real.min(), pts.imag.min())
    rows = []
    for h in scales:
        shifted = (pts - corner) / h + offset
        cells = np.stack([np.floor(shifted.real), np.floor(shifted.imag)], axis=1)
        count = int(np.unique(cells, axis=0).shape[0])
        rows.append((float(h), count, math.log(count) / math.log(1 / h)))
    x = np.log(1 / scales)
    y = np.log([c for _, c, _ in rows])
    fit = 0.0 if np.ptp(y) == 0 else float(np.polyfit(x, y, 1)[0])
    return BoxCount(rows, fit)


@dataclass(frozen=True)
class LevelCount:
    level: int
    scale: float
    count: int
    log_ratio: float


def level_box_counts(cmap: CantorMap, levels=None, offset: complex = 0.5 + 0.5j) -> list[LevelCount]:
    """Occupied cells of side ``r**j`` among the level-``j`` centres.

    Sibling centres sit on a lattice of spacing ``2 r**j``; the half-cell offset keeps
    every centre away from cell edges, so each disk lands in its own cell and the
    count is ``N**j`` whenever the construction is consistent.
    """
    if levels is None:
        levels = range(1, cmap.depth + 1)
    out = []
    for j in levels:
        pts = cmap.level_centers(j)
        h = cmap.r ** j
        corner = complex(pts.real.min(), pts.imag.min())
        w = (pts - corner) / h + offset
        cells = np.stack([np.floor(w.real), np.floor(w.imag)], axis=1)
        count = int(np.unique(cells, axis=0).shape[0])
        out.append(LevelCount(int(j), float(h), count, math.log(count) / math.log(1 / h)))
    return out


@dataclass(frozen=True)
class MinkowskiEstimate:
    count: int
    log_ratio: float
    candidates: int
    qualifying: int


def minkowski_spectrum_estimate(f, alpha: float, gamma: float, eps: float, scale: float,
                                domain: tuple[complex, float] = (0j, 1.0), *,
                                far: float = 1e3) -> MinkowskiEstimate:
    """Greedy packing count of disks ``B(z, scale)`` with stretch quotient within
    ``eps`` of ``alpha`` and rotation quotient within ``eps`` of ``gamma``.

    Rotation is measured on the branch that is principal along the horizontal ray
    from ``z + far`` (appropriate for maps equal to the identity near infinity).
    """
    if not eps > 0 or not scale > 0:
        raise InvalidParameters("eps and scale must be positive")
    center, radius = complex(domain[0]), float(domain[1])
    step = scale / 2
    m = int(math.floor(radius / step))
    ax = step * np.arange(-m, m + 1)
    cand = (center + ax[None, :] + 1j * ax[:, None]).ravel()
    cand = cand[np.abs(cand - center) <= radius]
    if cand.size == 0:
        return MinkowskiEstimate(0, float("-inf"), 0, 0)
    fz = np.asarray(f(cand), dtype=complex)

    def quotients(ts):
        pts = cand[None, :] + ts[:, None]
        vals = np.asarray(f(pts.ravel()), dtype=complex).reshape(pts.shape)
        return (vals - fz[None, :]) / ts[:, None]

    ts = np.geomspace(far, scale, 64)
    # parameter increases along the path: use -log t
    params = -np.log(ts)
    func = lambda p: quotients(np.exp(-p))
    _, _, logs, _, _ = continuous_log(func, params)
    lq = logs[-1]
    log_mod = lq.real + math.log(scale)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = log_mod / math.log(scale)
        g = lq.imag / log_mod
    ok = (np.abs(a - alpha) < eps) & (np.abs(g - gamma) < eps)
    chosen = _greedy_pack(cand[ok], scale)
    count = len(chosen)
    ratio = math.log(count) / math.log(1 / scale) if count else float("-inf")
    return MinkowskiEstimate(count, ratio, int(cand.size), int(ok.sum()))


def _greedy_pack(points: np.ndarray, radius: float) -> list[complex]:
    """Row-major greedy selection of centres with pairwise distance >= 2 radius."""
    cell = 2 * radius
    buckets: dict[tuple[int, int], list[complex]] = {}
    chosen = []
    for p in points.tolist():
        i, j = math.floor(p.real / cell), math.floor(p.imag / cell)
        clash = False
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for q in buckets.get((i + di, j + dj), ()):
                    if abs(p - q) < cell * (1 - 1e-12):
                        clash = True
                        break
                if clash:
                    break
            if clash:
                break
        if not clash:
            chosen.append(p)
            buckets.setdefault((i, j), []).append(p)
    return chosen
