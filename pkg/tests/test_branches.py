import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qclab.branches import check_local_inequality, estimate_exponents, track_branch
from qclab.core_maps import ModelMapParams
from qclab.errors import BranchUndefined, InvalidParameters, NoConvergence, NotNormalized

identity = lambda z: np.asarray(z, dtype=complex)


def _check_invariants(f, tr):
    z = tr.z
    q = (f(z) - f(np.array([tr.basepoint]))[0]) / (z - tr.basepoint)
    assert np.all(np.abs(np.diff(tr.logval.imag)) < math.pi)
    assert np.allclose(np.exp(tr.logval), q, rtol=1e-9, atol=0)


def test_identity_circle():
    path = np.exp(2j * np.pi * np.linspace(0, 1, 9))
    tr = track_branch(identity, 0, path)
    assert np.all(tr.logval == 0)
    assert tr.total_turns() == 0


@given(st.floats(-8, 8), st.floats(1e-4, 2), st.floats(1e-4, 2))
def test_spiral_radial_increment(g, r0, r1):
    f = ModelMapParams.spiral(g)
    tr = track_branch(f, 0, [r0, r1], seed=1j * g * math.log(r0))
    assert tr.logval[-1] - tr.logval[0] == pytest.approx(1j * g * (math.log(r1) - math.log(r0)),
                                                         abs=1e-9)
    _check_invariants(f, tr)


def test_principal_from_solver(constant_solution_256):
    f = constant_solution_256.evaluator()
    path = np.concatenate([[1e6], np.geomspace(1e6, 0.5, 30)[1:]]) + 0j
    tr = track_branch(f, 0.1 + 0.05j, path)
    assert abs(tr.logval[0]) < 1e-3
    # inside D the map is z + k zbar, so the quotient is 1 + k conj(d)/d
    d = 0.5 - (0.1 + 0.05j)
    assert tr.logval[-1] == pytest.approx(cmath.log(1 + d.conjugate() / d / 3), abs=1e-2)


@given(st.floats(-5, 5))
def test_refinement_consistency(g):
    f = ModelMapParams.spiral(g)
    path = np.array([2.0, 0.3 + 0.2j, 0.01, 1e-3j])
    fine = np.empty(2 * len(path) - 1, dtype=complex)
    fine[0::2] = path
    fine[1::2] = 0.5 * (path[:-1] + path[1:])
    a = track_branch(f, 0, path).at_nodes()
    b = track_branch(f, 0, fine).at_nodes()[0::2]
    assert np.allclose(a, b, atol=1e-9, rtol=0)


@given(st.integers(-3, 3), st.floats(0.5, 3))
def test_seed_shift(k, g):
    f = ModelMapParams.spiral(g)
    path = [1.0, 0.2, 1e-3]
    base = track_branch(f, 0, path, seed=0j)
    shifted = track_branch(f, 0, path, seed=2j * math.pi * k)
    assert np.allclose(shifted.logval - base.logval, 2j * math.pi * k, atol=1e-12)


def test_gamma_seed_dependence():
    f = ModelMapParams.from_alpha_gamma(1.2, 0.4)
    r = [1e-1, 1e-3, 1e-5]
    a = estimate_exponents(f, 0, r, seed=0j)
    b = estimate_exponents(f, 0, r, seed=2j * math.pi)
    for ea, eb in zip(a, b):
        log_mod = ea.logval.real + math.log(ea.radius)
        assert eb.gamma_r - ea.gamma_r == pytest.approx(2 * math.pi / log_mod, rel=1e-10)
        assert eb.alpha_r == ea.alpha_r


@pytest.mark.parametrize("g,r", [(3.0, 1e-3), (10.0, 1e-4), (0.5, 1e-6)])
def test_spiral_winding_count(g, r):
    tr = track_branch(ModelMapParams.spiral(g), 0, [1.0, r], seed=0j)
    turns = abs(tr.total_turns())
    assert abs(math.floor(turns) - math.floor(g * math.log(1 / r) / (2 * math.pi))) <= 1


@given(st.floats(-6, 6))
def test_spiral_exponents_exact(g):
    est = estimate_exponents(ModelMapParams.spiral(g), 0, [0.5, 1e-2, 1e-5])
    for e in est:
        assert abs(e.alpha_r - 1) <= 1e-12
        assert abs(e.gamma_r - g) <= 1e-12


@pytest.mark.parametrize("tau", [2.0, 0.5 + 0.3j, 1.25 + 0.75j, 3 - 1j])
def test_power_exponents_exact(tau):
    p = ModelMapParams(tau)
    est = estimate_exponents(p, 0, [10.0 ** -j for j in range(1, 7)])
    for e in est:
        assert abs(e.alpha_r - p.alpha) <= 1e-12
        assert abs(e.gamma_r - p.gamma) <= 1e-12


def test_local_inequality_identity():
    assert check_local_inequality(identity, 1.0, 0.5) == 0


@pytest.mark.parametrize("K", [1.5, 2.0, 4.0])
@pytest.mark.parametrize("th", [0.3, 1.2, 2.5, -2.0])
def test_local_inequality_extremal(K, th):
    tau = (K + 1 / K) / 2 + (K - 1 / K) / 2 * cmath.exp(1j * th)
    assert abs(check_local_inequality(ModelMapParams(tau), K, 0.1)) <= 1e-9


def test_local_inequality_solved_map(constant_solution_256):
    g = constant_solution_256.evaluator()
    g0, g1 = g(np.array([0j, 1 + 0j]))
    f = lambda z: (g(z) - g0) / (g1 - g0)
    K = 2.0
    assert check_local_inequality(f, K, 0.25) >= -3 * (K - 1) * math.log(8)


def test_errors():
    with pytest.raises(BranchUndefined):
        track_branch(identity, 0.5, [1.0, 0.0])
    with pytest.raises(BranchUndefined):
        track_branch(lambda z: np.zeros_like(z), 0, [1.0, 2.0])
    with pytest.raises(NoConvergence):
        track_branch(ModelMapParams.spiral(50.0), 0, [1.0, 1e-6], max_depth=3)
    with pytest.raises(NotNormalized):
        check_local_inequality(lambda z: 2 * np.asarray(z), 2, 0.5)
    with pytest.raises(InvalidParameters):
        estimate_exponents(identity, 0, [0.1, -1])
    with pytest.raises(InvalidParameters):
        track_branch(identity, 0, [1.0, 2.0], seed=1.0 + 0j)
