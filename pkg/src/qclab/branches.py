"""Continuous logarithms of difference quotients along paths.

For an injective map ``f`` and basepoint ``w`` the quotient
``q(z) = (f(z) - f(w)) / (z - w)`` never vanishes, so ``log q`` has a continuous
branch along any path avoiding ``w``.  Paths are refined by bisection until the
argument changes by less than ``max_jump`` per step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BranchUndefined, InvalidParameters, NoConvergence, NotNormalized

MapEvaluator = Callable[[np.ndarray], np.ndarray]

TWO_PI = 2 * math.pi
MAX_DEPTH = 40


@dataclass
class BranchTrace:
    basepoint: complex
    z: np.ndarray
    logval: np.ndarray
    refinement_depth: int
    node_index: np.ndarray = field(repr=False)  # positions of the input vertices

    @property
    def samples(self) -> list[tuple[complex, complex]]:
        return list(zip(self.z.tolist(), self.logval.tolist()))

    def at_nodes(self) -> np.ndarray:
        """Log values at the original path vertices."""
        return self.logval[self.node_index]

    def total_turns(self) -> float:
        """Net change of the argument along the path, in full turns."""
        return float((self.logval[-1].imag - self.logval[0].imag) / TWO_PI)


def _eval(f, pts):
    return np.asarray(f(np.asarray(pts, dtype=complex)), dtype=complex).reshape(np.shape(pts))


def _check_nonzero(t, vals):
    bad = (vals == 0) | ~np.isfinite(vals)
    if bad.ndim > 1:
        bad = bad.any(axis=tuple(range(1, bad.ndim)))
    if bad.any():
        raise BranchUndefined(f"quotient vanishes or is undefined at parameter {t[np.nonzero(bad)[0][0]]!r}")


def continuous_log(func: Callable[[np.ndarray], np.ndarray], params: np.ndarray,
                   seed_imag: float | None = None, max_jump: float = math.pi / 2,
                   max_depth: int = MAX_DEPTH, step_ok=None):
    """Refine the increasing real parameter grid ``params`` until ``arg func`` moves by
    less than ``max_jump`` per step, then unwrap.

    ``func`` maps an array of parameters to an array of shape ``(len(params), ...)``
    (several curves may be tracked at once; refinement is shared).  ``step_ok(a, b)``
    optionally vetoes steps on geometric grounds.
    Returns ``(params, values, logs, depth, node_index)``.
    """
    t = np.asarray(params, dtype=float)
    vals = np.asarray(func(t), dtype=complex)
    _check_nonzero(t, vals)
    node = np.arange(len(t))
    # every step is checked against its midpoint: a step is accepted once the two
    # half-steps together move the argument by less than max_jump, which rules out
    # hidden full turns that a single wrapped difference cannot see
    pending = np.ones(max(len(t) - 1, 0), dtype=bool)
    depth = 0
    while pending.any():
        if depth == max_depth:
            i = int(np.nonzero(pending)[0][0])
            raise NoConvergence(f"refinement cap {max_depth} reached on segment "
                                f"[{t[i]!r}, {t[i + 1]!r}]")
        idx = np.nonzero(pending)[0]
        mids = 0.5 * (t[idx] + t[idx + 1])
        mvals = np.asarray(func(mids), dtype=complex)
        _check_nonzero(mids, mvals)
        left = np.abs(np.angle(mvals / vals[idx]))
        right = np.abs(np.angle(vals[idx + 1] / mvals))
        bad = left + right >= max_jump
        if bad.ndim > 1:
            bad = bad.any(axis=tuple(range(1, bad.ndim)))
        if step_ok is not None:
            bad = bad | ~step_ok(t[idx], mids) | ~step_ok(mids, t[idx + 1])
        t = np.insert(t, idx + 1, mids)
        vals = np.insert(vals, idx + 1, mvals, axis=0)
        node = node + np.searchsorted(idx, node, side="left")
        # new pending flags: each refined interval becomes two halves
        halves = np.repeat(bad, 2)
        new_pending = np.zeros(len(t) - 1, dtype=bool)
        pos = idx + np.arange(len(idx))  # left half position after insertion
        new_pending[pos] = halves[0::2]
        new_pending[pos + 1] = halves[1::2]
        pending = new_pending
        depth += 1
    arg0 = np.angle(vals[:1])
    if seed_imag is not None:
        arg0 = arg0 + TWO_PI * np.round((seed_imag - arg0) / TWO_PI)
    steps = np.angle(vals[1:] / vals[:-1]) if len(t) > 1 else np.zeros((0,) + vals.shape[1:])
    acc = np.concatenate([arg0, arg0 + np.cumsum(steps, axis=0)], axis=0)
    # re-anchor on the principal argument to stop roundoff drift
    principal = np.angle(vals)
    imag = principal + TWO_PI * np.round((acc - principal) / TWO_PI)
    logs = np.log(np.abs(vals)) + 1j * imag
    return t, vals, logs, depth, node


def track_branch(f: MapEvaluator, w: complex, path: Sequence[complex],
                 seed: complex | str = "principal", *, max_jump: float = math.pi / 2,
                 max_depth: int = MAX_DEPTH, max_rel_step: float = 0.5) -> BranchTrace:
    """Continuous branch of ``log((f(z) - f(w)) / (z - w))`` along a polyline.

    ``seed`` is either an explicit log value at the path start or ``"principal"``,
    meaning the principal logarithm at the start; the principal branch of a map
    normalised ``f(z) = z + o(1)`` is obtained by starting at large ``|z|``.
    Steps are bisected until the argument moves by less than ``max_jump`` and each
    step is at most ``max_rel_step`` times its distance to ``w``.
    """
    w = complex(w)
    path = np.asarray(path, dtype=complex).ravel()
    if path.size == 0:
        raise InvalidParameters("empty path")
    fw = complex(_eval(f, np.array([w]))[0])
    nseg = max(len(path) - 1, 1)

    def point(s):
        s = np.asarray(s, dtype=float)
        i = np.minimum(np.floor(s).astype(int), nseg - 1)
        frac = s - i
        if len(path) == 1:
            return np.full(s.shape, path[0])
        # convex form keeps vertices exact (frac = 0 or 1)
        return path[i] * (1 - frac) + path[i + 1] * frac

    def quotient(s):
        z = point(s)
        if np.any(z == w):
            raise BranchUndefined("path passes through the basepoint")
        return (_eval(f, z) - fw) / (z - w)

    if seed == "principal":
        seed_imag = None
    else:
        seed = complex(seed)
        q0 = quotient(np.array([0.0]))[0]
        if abs(np.exp(seed) - q0) > 1e-9 * abs(q0):
            raise InvalidParameters("seed is not a logarithm of the quotient at the path start")
        seed_imag = seed.imag
    def step_ok(a, b):
        # a step may not be long compared with its distance to the basepoint;
        # near w the quotient winds on every scale and a pure argument test can
        # miss whole turns
        za, zb = point(a), point(b)
        return np.abs(zb - za) <= max_rel_step * np.minimum(np.abs(za - w), np.abs(zb - w))

    s, _, logs, depth, node = continuous_log(quotient, np.arange(len(path), dtype=float),
                                             seed_imag, max_jump, max_depth, step_ok)
    return BranchTrace(w, point(s), logs, depth, node)


@dataclass(frozen=True)
class ExponentEstimate:
    radius: float
    alpha_r: float
    gamma_r: float
    logval: complex  # log of (f(z + r d) - f(z)) / (r d) on the tracked branch


def estimate_exponents(f: MapEvaluator, z: complex, radii: Sequence[float], *,
                       direction: complex = 1.0, anchor: float = 1.0,
                       seed: complex | str = "principal") -> list[ExponentEstimate]:
    """Stretch and rotation quotients at ``z`` for each radius.

    A single branch is tracked along ``z + anchor*d -> z + r_0 d -> z + r_1 d ...``
    where ``seed`` fixes the logarithm at ``z + anchor*d``.  With a large anchor and
    the principal seed this is the principal branch of a normalised map.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0 or np.any(radii <= 0):
        raise InvalidParameters("radii must be positive")
    d = complex(direction)
    if d == 0:
        raise InvalidParameters("direction must be nonzero")
    d /= abs(d)
    z = complex(z)
    # extra collinear vertices at ratio <= 2 keep the bisection depth small
    offsets, where = [float(anchor)], []
    for r in radii:
        a = offsets[-1]
        n = int(math.ceil(abs(math.log2(a / r))))
        if n > 1:
            offsets.extend(np.geomspace(a, r, n + 1)[1:-1].tolist())
        where.append(len(offsets))
        offsets.append(float(r))
    path = z + d * np.array(offsets)
    trace = track_branch(f, z, path, seed)
    logs = trace.at_nodes()[where]
    out = []
    for r, lq in zip(radii, logs):
        log_mod = lq.real + math.log(r)
        arg = lq.imag + math.atan2(d.imag, d.real)
        if log_mod == 0:
            raise BranchUndefined(f"|f(z+r)-f(z)| = 1 at r={r}; rotation quotient undefined")
        out.append(ExponentEstimate(float(r), log_mod / math.log(r), arg / log_mod, complex(lq)))
    return out


def check_local_inequality(f: MapEvaluator, K: float, r: float, *,
                           norm_tol: float = 1e-9) -> float:
    """Slack of ``|log f(r) - (K + 1/K)/2 log r| <= (K - 1/K)/2 log(1/r)``.

    ``f`` must satisfy ``f(0) = 0`` and ``f(1) = 1``; ``log f`` is the branch with
    ``log f(1) = 0`` continued along ``[1, r]``.
    """
    if not 0 < r < 1:
        raise InvalidParameters("r must lie in (0, 1)")
    if not K >= 1:
        raise InvalidParameters("K must be >= 1")
    f0, f1 = _eval(f, np.array([0j, 1 + 0j]))
    if abs(f0) > norm_tol or abs(f1 - 1) > norm_tol:
        raise NotNormalized(f"f(0) = {f0}, f(1) = {f1}")
    trace = track_branch(f, 0j, np.array([1 + 0j, complex(r)]), seed=0j)
    log_fr = trace.logval[-1] + math.log(r)
    lhs = abs(log_fr - 0.5 * (K + 1 / K) * math.log(r))
    return 0.5 * (K - 1 / K) * math.log(1 / r) - lhs
