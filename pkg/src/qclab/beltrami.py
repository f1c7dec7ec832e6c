"""Grid principal solutions of compactly supported Beltrami equations.

Samples live on the nodes ``origin + h (j + i l)`` of a square-celled grid; arrays are
stored ``data[row, col]`` with the row index along y.  Spectral multipliers, with
``zeta = xi_x + i xi_y``::

    dbar  <->  (i/2) zeta        d  <->  (i/2) conj(zeta)
    C     <->  -2i / zeta        S  <->  conj(zeta) / zeta

all set to zero at ``zeta = 0``.  The "periodic" transforms are these multipliers on
the torus.  The default "free" transforms add the exact difference between the
periodic and the planar kernels, which near the origin is a polynomial in
``z - xi`` built from the square-lattice Eisenstein sums; with it the grid solution
approximates the principal solution on the whole plane rather than its periodisation.
"""
from __future__ import annotations

import json
import logging
import math
import os
import warnings
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .errors import (AliasingWarning, DivergenceError, InvalidParameters, NeedsDenserLambdas,
                     NoConvergence)

LOGGER = logging.getLogger(__name__)

# G_n = sum over nonzero Gaussian integers w of w^(-n), n = 4, 8, 12, 16;
# G_4 = Gamma(1/4)^8 / (960 pi^2).  G_n vanishes unless 4 | n.
LATTICE_SUMS = {4: 3.151212002153897, 8: 4.2557730353651895,
                12: 3.9388490128279705, 16: 4.015695033025025}
HEADER_TAG = "QCGRID1"
ORIGIN_MASK_CELLS = 2


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("QCLAB_THREADS", "1")))
    except ValueError:
        return 1


def _fft2(a):
    return sfft.fft2(a, workers=_workers())


def _ifft2(a):
    return sfft.ifft2(a, workers=_workers())


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass
class ComplexGrid:
    """Complex samples ``data[ny, nx]`` at ``origin + spacing * (col + i row)``."""

    nx: int
    ny: int
    origin: complex
    spacing: float
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.nx, self.ny = int(self.nx), int(self.ny)
        if not (_is_pow2(self.nx) and _is_pow2(self.ny)):
            raise InvalidParameters(f"nx, ny must be powers of two, got {self.nx}, {self.ny}")
        if not self.spacing > 0:
            raise InvalidParameters("spacing must be positive")
        self.origin = complex(self.origin)
        self.spacing = float(self.spacing)
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (self.ny, self.nx):
            raise InvalidParameters(f"data shape {self.data.shape} != ({self.ny}, {self.nx})")

    @classmethod
    def square(cls, n: int, half_width: float = 2.0, data=None) -> "ComplexGrid":
        """``n x n`` grid on ``[-half_width, half_width)^2``; 0 is a node."""
        h = 2 * half_width / n
        if data is None:
            data = np.zeros((n, n), dtype=complex)
        return cls(n, n, complex(-half_width, -half_width), h, data)

    def like(self, data) -> "ComplexGrid":
        return ComplexGrid(self.nx, self.ny, self.origin, self.spacing, data)

    @property
    def width(self) -> float:
        return self.nx * self.spacing

    @property
    def height(self) -> float:
        return self.ny * self.spacing

    @property
    def center(self) -> complex:
        return self.origin + complex(self.width, self.height) / 2

    def coords(self) -> np.ndarray:
        x = self.origin.real + self.spacing * np.arange(self.nx)
        y = self.origin.imag + self.spacing * np.arange(self.ny)
        return x[None, :] + 1j * y[:, None]

    def frequencies(self) -> np.ndarray:
        """``zeta = xi_x + i xi_y`` on the FFT layout."""
        kx = 2 * np.pi * sfft.fftfreq(self.nx, d=self.spacing)
        ky = 2 * np.pi * sfft.fftfreq(self.ny, d=self.spacing)
        return kx[None, :] + 1j * ky[:, None]

    def index_of(self, z: complex) -> tuple[int, int]:
        """(row, col) of the node nearest ``z``."""
        w = (complex(z) - self.origin) / self.spacing
        col, row = int(round(w.real)), int(round(w.imag))
        if not (0 <= col < self.nx and 0 <= row < self.ny):
            raise InvalidParameters(f"{z} lies outside the grid")
        return row, col

    def at(self, z: complex) -> complex:
        row, col = self.index_of(z)
        return complex(self.data[row, col])

    def norm(self, mask=None) -> float:
        """Discrete L2 norm ``h * sqrt(sum |data|^2)``."""
        d = self.data if mask is None else self.data[mask]
        return float(self.spacing * np.sqrt(np.sum(np.abs(d) ** 2)))

    def write(self, path) -> None:
        header = {"nx": self.nx, "ny": self.ny, "origin_re": self.origin.real,
                  "origin_im": self.origin.imag, "spacing": self.spacing}
        with open(path, "wb") as fh:
            fh.write(f"{HEADER_TAG} {json.dumps(header, sort_keys=True)}\n".encode("ascii"))
            fh.write(np.ascontiguousarray(self.data, dtype="<c16").tobytes())

    @classmethod
    def read(cls, path) -> "ComplexGrid":
        raw = Path(path).read_bytes()
        nl = raw.index(b"\n")
        tag, _, meta = raw[:nl].decode("ascii").partition(" ")
        if tag != HEADER_TAG:
            raise InvalidParameters(f"not a {HEADER_TAG} file: {path}")
        h = json.loads(meta)
        nx, ny = int(h["nx"]), int(h["ny"])
        body = raw[nl + 1:]
        if len(body) != 16 * nx * ny:
            raise InvalidParameters(f"payload has {len(body)} bytes, expected {16 * nx * ny}")
        data = np.frombuffer(body, dtype="<c16").reshape(ny, nx).astype(complex)
        return cls(nx, ny, complex(h["origin_re"], h["origin_im"]), h["spacing"], data)


# ------------------------------------------------------------------ transforms


def _multiplier(grid: ComplexGrid, kind: str) -> np.ndarray:
    Z = grid.frequencies()
    safe = np.where(Z == 0, 1, Z)
    if kind == "dbar":
        return 0.5j * Z
    if kind == "d":
        return 0.5j * np.conj(Z)
    if kind == "cauchy":
        m = -2j / safe
    elif kind == "beurling":
        m = np.conj(Z) / safe
    else:
        raise InvalidParameters(kind)
    m[Z == 0] = 0
    return m


def _apply(grid: ComplexGrid, data, kind: str) -> np.ndarray:
    return _ifft2(_multiplier(grid, kind) * _fft2(data))


def dbar(g: ComplexGrid) -> ComplexGrid:
    """Spectral ``d/dzbar``."""
    return g.like(_apply(g, g.data, "dbar"))


def dz(g: ComplexGrid) -> ComplexGrid:
    """Spectral ``d/dz``."""
    return g.like(_apply(g, g.data, "d"))


def support_warning(g: ComplexGrid, data=None) -> bool:
    """Warn (and return True) if the data reach outside the central half of the box."""
    d = g.data if data is None else data
    a = np.abs(d)
    if not a.any():
        return False
    nz = a > 1e-10 * a.max()
    if not nz.any():
        return False
    w = g.coords()[nz] - g.center
    bad = bool(np.any(np.abs(w.real) > g.width / 4 * (1 + 1e-12))
               or np.any(np.abs(w.imag) > g.height / 4 * (1 + 1e-12)))
    if bad:
        warnings.warn("support leaves the guarded interior; periodisation error may be large",
                      AliasingWarning, stacklevel=3)
    return bad


class _LatticeCorrection:
    """Polynomial difference between the periodic and the planar kernels."""

    def __init__(self, grid: ComplexGrid, orders=(4, 8, 12, 16)):
        if grid.nx != grid.ny:
            raise InvalidParameters("free transforms need a square grid")
        self.grid = grid
        self.L = grid.width
        self.orders = orders
        self.nmax = max(orders) - 1
        self.Z = grid.coords() - grid.center

    def moments(self, values, pts):
        h2 = self.grid.spacing ** 2
        out = np.empty(self.nmax + 1, dtype=complex)
        p = np.ones_like(pts)
        for j in range(self.nmax + 1):
            out[j] = h2 * np.sum(values * p)
            p = p * pts
        return out

    def _poly(self, M, deriv: bool):
        """Coefficients (ascending powers of z) of sum_n c_n int g (z - xi)^n."""
        coef = np.zeros(self.nmax + 1, dtype=complex)
        for o in self.orders:
            c = LATTICE_SUMS[o] / self.L ** o / math.pi
            n = o - 1
            if deriv:
                c, n = c * (o - 1), o - 2
            for j in range(n + 1):
                coef[n - j] += c * comb(n, j) * (-1) ** j * M[j]
        return coef

    @staticmethod
    def _horner(coef, z):
        out = np.full(z.shape, coef[-1], dtype=complex)
        for c in coef[-2::-1]:
            out = out * z + c
        return out

    def beurling(self, values, pts, where):
        return self._horner(self._poly(self.moments(values, pts), True), where)

    def cauchy(self, values, pts, where):
        M = self.moments(values, pts)
        mbar = self.grid.spacing ** 2 * np.sum(values * np.conj(pts))
        return (M[0] * np.conj(where) - mbar) / self.L ** 2 + self._horner(self._poly(M, False), where)


def _check_mode(mode):
    if mode not in ("free", "periodic"):
        raise InvalidParameters(f"mode must be 'free' or 'periodic', got {mode!r}")


def beurling_transform(g: ComplexGrid, mode: str = "free") -> ComplexGrid:
    """Discrete Beurling transform, fixed so that ``S(dbar phi) = d phi``."""
    _check_mode(mode)
    support_warning(g)
    out = _apply(g, g.data, "beurling")
    if mode == "free":
        corr = _LatticeCorrection(g)
        nz = g.data != 0
        out = out + corr.beurling(g.data[nz], corr.Z[nz], corr.Z)
    return g.like(out)


def cauchy_transform(g: ComplexGrid, mode: str = "free") -> ComplexGrid:
    """Discrete Cauchy transform, a right inverse of ``dbar``.

    In free mode this approximates ``(1/pi) int g(xi)/(z - xi) dA(xi)``, which
    vanishes at infinity; in periodic mode the result has zero mean.
    """
    _check_mode(mode)
    support_warning(g)
    out = _apply(g, g.data, "cauchy")
    if mode == "free":
        corr = _LatticeCorrection(g)
        nz = g.data != 0
        out = out + corr.cauchy(g.data[nz], corr.Z[nz], corr.Z)
    return g.like(out)


def cauchy_direct(g: ComplexGrid, z: complex) -> complex:
    """``(h^2/pi) sum g(xi)/(z - xi)`` over nodes, skipping ``xi = z``."""
    Z = g.coords()
    d = complex(z) - Z
    keep = (g.data != 0) & (np.abs(d) > 1e-12 * g.spacing)
    return complex(g.spacing ** 2 / math.pi * np.sum(g.data[keep] / d[keep]))


# ------------------------------------------------------------- coefficients


def mu_constant(grid: ComplexGrid, k: complex, radius: float = 1.0) -> ComplexGrid:
    """``k`` on the disk ``|z| < radius``, zero elsewhere."""
    Z = grid.coords()
    return grid.like(np.where(np.abs(Z) < radius, complex(k), 0j))


def mu_power(grid: ComplexGrid, tau: complex) -> ComplexGrid:
    """Coefficient ``eta z/conj(z)`` on D of the power map ``z |z|^(tau - 1)``; 0 at z = 0."""
    tau = complex(tau)
    if tau.real <= 0:
        raise InvalidParameters("Re tau must be positive")
    eta = (tau - 1) / (tau + 1)
    Z = grid.coords()
    inside = (np.abs(Z) < 1) & (Z != 0)
    ratio = np.where(inside, Z / np.where(Z == 0, 1, np.conj(Z)), 0)
    return grid.like(eta * ratio)


def power_map_exact(grid: ComplexGrid, tau: complex) -> np.ndarray:
    """Closed form of the principal solution for :func:`mu_power`."""
    Z = grid.coords()
    r = np.abs(Z)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = Z * np.exp((complex(tau) - 1) * np.log(r))
    w = np.where(r == 0, 0j, w)
    return np.where(r < 1, w, Z)


def constant_map_exact(z, k: complex):
    """Principal solution for ``k`` times the indicator of D: ``z + k zbar`` / ``z + k/z``."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(z) < 1, z + k * np.conj(z), z + k / z)
    return out[()] if out.ndim == 0 else out


# ----------------------------------------------------------------- solvers


@dataclass(frozen=True)
class FlowResult:
    lam: complex
    f: ComplexGrid  # f - z
    fz: ComplexGrid
    fzbar: ComplexGrid
    mu: ComplexGrid  # the coefficient actually solved
    series_terms: int
    residual: float
    increments: tuple = field(repr=False)
    tol: float = 1e-10
    aliasing: bool = False
    logfz: ComplexGrid | None = field(default=None, repr=False)

    @property
    def grid(self) -> ComplexGrid:
        return self.f

    def values(self) -> np.ndarray:
        return self.f.coords() + self.f.data

    def log_fz(self) -> ComplexGrid:
        """Continued ``log f_z`` when available, otherwise the principal logarithm."""
        if self.logfz is not None:
            return self.logfz
        return self.fz.like(np.log(self.fz.data))

    def with_log(self, logfz: ComplexGrid) -> "FlowResult":
        return FlowResult(self.lam, self.f, self.fz, self.fzbar, self.mu, self.series_terms,
                          self.residual, self.increments, self.tol, self.aliasing, logfz)

    def interior_mask(self) -> np.ndarray:
        """Cells away from the box edge and from the origin cell."""
        Z = self.f.coords()
        h = self.f.spacing
        return np.abs(Z) > ORIGIN_MASK_CELLS * h

    def multipole(self, nterms: int = 24) -> np.ndarray:
        """Coefficients ``c_n`` with ``f(z) - z = sum c_n z^(-n-1)`` outside the support."""
        g = self.fzbar
        Z = g.coords()
        nz = g.data != 0
        w, pts = g.data[nz], Z[nz]
        out = np.empty(nterms, dtype=complex)
        p = np.ones_like(pts)
        for n in range(nterms):
            out[n] = g.spacing ** 2 / math.pi * np.sum(w * p)
            p = p * pts
        return out

    def support_radius(self) -> float:
        nz = self.fzbar.data != 0
        if not nz.any():
            return 0.0
        return float(np.max(np.abs(self.f.coords()[nz])))

    def evaluator(self, nterms: int = 24):
        """Vectorised map ``z -> f(z)``: bilinear inside the box, multipole far out."""
        coef = self.multipole(nterms)
        R = self.support_radius()
        g = self.f
        far_r = max(1.5 * R, 1e-300)

        def f(z):
            z = np.asarray(z, dtype=complex)
            shape = z.shape
            z = z.ravel()
            out = np.empty_like(z)
            w = (z - g.origin) / g.spacing
            inside = ((w.real >= 0) & (w.real <= g.nx - 1) & (w.imag >= 0) & (w.imag <= g.ny - 1)
                      & (np.abs(z) <= far_r))
            if R == 0:
                inside[:] = False
            far = ~inside
            if far.any():
                zf = z[far]
                acc = np.zeros_like(zf)
                inv = 1 / np.where(zf == 0, 1, zf)
                for c in coef[::-1]:
                    acc = (acc + c) * inv
                out[far] = zf + acc
            if inside.any():
                wi = w[inside]
                c0 = np.minimum(np.floor(wi.real).astype(int), g.nx - 2)
                r0 = np.minimum(np.floor(wi.imag).astype(int), g.ny - 2)
                fx, fy = wi.real - c0, wi.imag - r0
                d = g.data
                val = ((1 - fx) * (1 - fy) * d[r0, c0] + fx * (1 - fy) * d[r0, c0 + 1]
                       + (1 - fx) * fy * d[r0 + 1, c0] + fx * fy * d[r0 + 1, c0 + 1])
                out[inside] = z[inside] + val
            out = out.reshape(shape)
            return out[()] if out.ndim == 0 else out

        return f


def _sup(mu: ComplexGrid) -> float:
    return float(np.max(np.abs(mu.data))) if mu.data.size else 0.0


class _Neumann:
    """Shared machinery for ``omega <- mu S(omega) + mu``."""

    def __init__(self, grid: ComplexGrid, mode: str):
        _check_mode(mode)
        self.grid = grid
        self.mode = mode
        self.mult = _multiplier(grid, "beurling")
        self.corr = _LatticeCorrection(grid) if mode == "free" else None

    def S_on(self, w, mask):
        """Beurling transform of ``w`` (supported in ``mask``), full grid."""
        out = _ifft2(self.mult * _fft2(w))
        if self.corr is not None:
            pts = self.corr.Z[mask]
            out = out + self.corr.beurling(w[mask], pts, self.corr.Z)
        return out

    def S_masked(self, w, mask):
        """Beurling transform of ``w`` evaluated only on ``mask``."""
        out = _ifft2(self.mult * _fft2(w))[mask]
        if self.corr is not None:
            pts = self.corr.Z[mask]
            out = out + self.corr.beurling(w[mask], pts, pts)
        return out

    def C_on(self, w, mask):
        out = _ifft2(_multiplier(self.grid, "cauchy") * _fft2(w))
        if self.corr is not None:
            pts = self.corr.Z[mask]
            out = out + self.corr.cauchy(w[mask], pts, self.corr.Z)
        return out


def _iterate(mu: ComplexGrid, tol: float, mode: str, omega0=None, max_terms: int | None = None):
    k = _sup(mu)
    if k >= 1:
        raise InvalidParameters(f"||mu||_inf = {k} must be < 1")
    if not tol > 0:
        raise InvalidParameters("tol must be positive")
    aliasing = support_warning(mu)
    eng = _Neumann(mu, mode)
    mask = mu.data != 0
    m = mu.data[mask]
    h = mu.spacing
    if max_terms is None:
        bound = math.ceil(math.log(tol) / math.log(k)) if 0 < k else 1
        max_terms = bound + 60
    w = np.zeros(mu.data.shape, dtype=complex)
    if omega0 is not None:
        w[mask] = omega0[mask]
    incs, grow = [], 0
    terms = 0
    while True:
        terms += 1
        new = m * eng.S_masked(w, mask) + m if m.size else m
        inc = float(h * np.sqrt(np.sum(np.abs(new - w[mask]) ** 2)))
        w[mask] = new
        if incs and inc > incs[-1]:
            grow += 1
            if grow >= 3:
                raise DivergenceError(f"Neumann increments grew 3 times in a row (last {inc:.3e})")
        else:
            grow = 0
        incs.append(inc)
        if inc < tol:
            break
        if terms >= max_terms:
            raise NoConvergence(f"no convergence after {terms} terms (increment {inc:.3e})")
    return eng, w, mask, terms, incs, aliasing


def _assemble(mu: ComplexGrid, lam, eng, w, mask, terms, incs, tol, aliasing) -> FlowResult:
    Sw = eng.S_on(w, mask)
    fz = 1 + Sw
    f = eng.C_on(w, mask)
    res = mu.like(w - mu.data * fz).norm()
    return FlowResult(complex(lam), mu.like(f), mu.like(fz), mu.like(w.copy()), mu, terms, res,
                      tuple(incs), tol, aliasing)


def _scaled_mu(mu: ComplexGrid, lam: complex) -> ComplexGrid:
    lam = complex(lam)
    if not abs(lam) < 1:
        raise InvalidParameters("need |lambda| < 1")
    k = _sup(mu)
    if k >= 1:
        raise InvalidParameters(f"||mu||_inf = {k} must be < 1")
    if k == 0:
        return mu.like(np.zeros_like(mu.data))  # 0/0 = 0
    if lam == k:
        return mu  # the original equation, same array
    return mu.like(lam * mu.data / k)


def solve_flow(mu: ComplexGrid, lam: complex, tol: float = 1e-10, mode: str = "free",
               omega0=None) -> FlowResult:
    """Principal solution for ``mu_lambda = lambda mu / ||mu||_inf``.

    ``omega0`` optionally warm-starts the iteration with a previous ``f_zbar``.
    """
    mu_l = _scaled_mu(mu, lam)
    eng, w, mask, terms, incs, alias = _iterate(mu_l, tol, mode, omega0)
    return _assemble(mu_l, lam, eng, w, mask, terms, incs, tol, alias)


def solve_principal(mu: ComplexGrid, tol: float = 1e-10, mode: str = "free") -> FlowResult:
    """Principal solution ``f(z) = z + C(omega)``, ``omega = mu (1 + S omega)``."""
    k = _sup(mu)
    if k >= 1:
        raise InvalidParameters(f"||mu||_inf = {k} must be < 1")
    return solve_flow(mu, k, tol, mode)


def lambda_circle_mean(mu: ComplexGrid, z: complex, radius: float = 0.3, n: int = 8,
                       tol: float = 1e-10) -> complex:
    """Mean of ``f^lambda(z)`` over ``n`` equispaced points of ``|lambda| = radius``."""
    lams = radius * np.exp(2j * np.pi * np.arange(n) / n)
    vals = []
    for lam in lams:
        res = solve_flow(mu, lam, tol)
        row, col = res.f.index_of(z)
        vals.append(res.f.coords()[row, col] + res.f.data[row, col])
    return complex(np.mean(vals))


# ------------------------------------------------------- log f_z: two routes


def continued_log_fz(mu: ComplexGrid, lambdas, tol: float = 1e-10, mode: str = "free",
                     max_jump: float = math.pi / 2, refine: bool = True) -> FlowResult:
    """Solve the flow along ``lambdas`` (starting at 0) and continue ``log f_z`` from 0.

    Consecutive solves are warm-started.  With ``refine`` a step whose jump exceeds
    ``max_jump`` anywhere on the grid is halved; otherwise it raises.
    """
    lams = [complex(x) for x in lambdas]
    if not lams or lams[0] != 0:
        lams = [0j] + lams
    log = np.zeros(mu.data.shape, dtype=complex)
    prev_fz = np.ones(mu.data.shape, dtype=complex)
    omega = None
    res = None
    queue = lams[1:][::-1]
    cur = lams[0]
    depth = 0
    while queue:
        nxt = queue.pop()
        res = solve_flow(mu, nxt, tol, mode, omega0=omega)
        step = np.angle(res.fz.data / prev_fz)
        if np.max(np.abs(step)) >= max_jump:
            if not refine or depth > 30:
                raise NeedsDenserLambdas(f"log f_z jumps by {np.max(np.abs(step)):.3f} between "
                                         f"lambda = {cur} and {nxt}")
            queue.append(nxt)
            queue.append(0.5 * (cur + nxt))
            depth += 1
            continue
        log = log + np.log(np.abs(res.fz.data / prev_fz)) + 1j * step
        prev_fz = res.fz.data
        omega = res.fzbar.data
        cur = nxt
    if res is None:
        res = solve_flow(mu, 0j, tol, mode)
    # re-anchor on the principal value to avoid drift
    principal = np.log(res.fz.data)
    log = principal + 2j * np.pi * np.round((log.imag - principal.imag) / (2 * np.pi))
    return res.with_log(res.fz.like(log))


def neumann_log_coefficients(mu: ComplexGrid, z: complex, lam_max: float, tol: float = 1e-12,
                             mode: str = "free", max_terms: int = 400) -> np.ndarray:
    """Taylor coefficients ``a_n`` of ``f_z^lambda(z) = 1 + sum_{n>=1} a_n lambda^n``.

    ``omega_1 = nu``, ``omega_{n+1} = nu S(omega_n)`` with ``nu = mu/||mu||_inf``;
    ``a_n = S(omega_n)(z)``.  Terms stop once ``lam_max^n ||omega_n|| < tol``.
    """
    k = _sup(mu)
    row, col = mu.index_of(z)
    if k == 0:
        return np.zeros(0, dtype=complex)
    nu = mu.data / k
    eng = _Neumann(mu, mode)
    mask = nu != 0
    w = nu.copy()
    out = []
    for n in range(1, max_terms + 1):
        Sw = eng.S_on(w, mask)
        out.append(Sw[row, col])
        if lam_max ** n * mu.like(w).norm() < tol:
            break
        w = np.where(mask, nu * Sw, 0)
    else:
        raise NoConvergence(f"series did not converge in {max_terms} terms")
    return np.array(out)


@dataclass(frozen=True)
class LogComparison:
    z: complex
    analytic_log: complex
    geometric_log: complex

    @property
    def difference(self) -> complex:
        return self.analytic_log - self.geometric_log


def analytic_log_at(mu: ComplexGrid, z: complex, lambdas, tol: float = 1e-12,
                    max_jump: float = math.pi / 2, mode: str = "free") -> complex:
    """``log f_z^lambda(z)`` continued along ``lambdas`` from ``log 1 = 0``."""
    lams = np.asarray([complex(x) for x in lambdas])
    if lams.size == 0:
        raise InvalidParameters("empty lambda list")
    if lams[0] != 0:
        lams = np.concatenate([[0j], lams])
    coef = neumann_log_coefficients(mu, z, float(np.max(np.abs(lams))), tol, mode)
    vals = np.ones(lams.shape, dtype=complex)
    p = np.ones(lams.shape, dtype=complex)
    for a in coef:
        p = p * lams
        vals = vals + a * p
    if np.any(vals == 0):
        raise NeedsDenserLambdas("f_z^lambda vanishes on the lambda path")
    steps = np.angle(vals[1:] / vals[:-1])
    if steps.size and np.max(np.abs(steps)) >= max_jump:
        i = int(np.argmax(np.abs(steps)))
        raise NeedsDenserLambdas(f"arg f_z jumps by {steps[i]:.3f} between lambda = "
                                 f"{lams[i]} and {lams[i + 1]}")
    return complex(np.log(abs(vals[-1])) + 1j * np.sum(steps))


def geometric_log_at(result: FlowResult, z: complex, *, far: float = 1e6,
                     samples: int = 16, stride: int = 2, degree: int = 4) -> complex:
    """Principal-branch limit of ``log((f(z + t) - f(z))/t)`` as ``t -> 0+``, minus
    ``Log(1 + mu(z))``.

    The branch is tracked along the horizontal ray from ``z + far``.  The limit is a
    least-squares polynomial extrapolation from the nodes ``t = stride*h, ...,
    samples*stride*h``; the smallest offsets are avoided because grid errors in
    ``f`` are amplified by ``1/t``.
    """
    from .branches import track_branch

    g = result.f
    row, col = g.index_of(z)
    z0 = complex(g.coords()[row, col])
    h = g.spacing
    m = stride * np.arange(samples, 0, -1)
    if col + m[0] >= g.nx:
        raise InvalidParameters("extrapolation offsets leave the grid")
    ts = h * m.astype(float)
    fmap = result.evaluator()
    path = np.concatenate([[z0 + far], z0 + np.geomspace(far, ts[0], 40)[1:-1], z0 + ts])
    trace = track_branch(fmap, z0, path)
    logs = trace.at_nodes()[-samples:]
    lim = complex(np.polyfit(ts, logs, degree)[-1])
    mz = complex(result.mu.data[row, col])
    return lim - complex(np.log(1 + mz))


def compare_log_branches(mu: ComplexGrid, z: complex, lambdas, *, tol: float = 1e-10,
                         mode: str = "free") -> LogComparison:
    """Analytic (lambda-continuation) versus geometric (difference-quotient) ``log f_z``.

    ``lambdas`` runs radially from 0 to ``||mu||_inf``; the geometric side is computed
    on the solution at the last lambda.
    """
    lams = [complex(x) for x in lambdas]
    if not lams:
        raise InvalidParameters("empty lambda list")
    if _sup(mu) == 0:
        return LogComparison(complex(z), 0j, 0j)
    an = analytic_log_at(mu, z, lams, mode=mode)
    res = solve_flow(mu, lams[-1], tol, mode)
    geo = geometric_log_at(res, z)
    return LogComparison(complex(z), an, geo)


# -------------------------------------------------------------- diagnostics


def distortion_fraction(result: FlowResult, K: float, mask=None) -> float:
    """Fraction of cells with ``(|f_z| + |f_zbar|)^2 <= K (|f_z|^2 - |f_zbar|^2)``."""
    a, b = np.abs(result.fz.data), np.abs(result.fzbar.data)
    ok = (a + b) ** 2 <= K * (a * a - b * b) * (1 + 1e-9)
    if mask is None:
        mask = result.interior_mask()
    return float(np.mean(ok[mask]))


def area_ratio(result: FlowResult, radius: float = 1.0) -> float:
    """``(1/(pi R^2)) int_{|z|<R} J``, with ``J = |f_z|^2 - |f_zbar|^2``."""
    Z = result.f.coords()
    cell = np.abs(Z) < radius
    J = np.abs(result.fz.data) ** 2 - np.abs(result.fzbar.data) ** 2
    return float(np.sum(J[cell]) * result.f.spacing ** 2 / (math.pi * radius ** 2))


def exp_arg_integral(result: FlowResult, b: float, radius: float = 1.0) -> float:
    """``(1/pi) int_{|z|<R} exp(b |arg f_z|)`` on the continued branch (origin cell excluded)."""
    Z = result.f.coords()
    cell = (np.abs(Z) < radius) & (Z != 0)
    arg = result.log_fz().data.imag
    return float(np.sum(np.exp(b * np.abs(arg[cell]))) * result.f.spacing ** 2 / math.pi)
