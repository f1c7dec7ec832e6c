import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.optimize import minimize_scalar

from qclab.errors import InvalidParameters
from qclab.spectra import (admissible_alpha_interval, bilip_spectrum, factoring_lower_bound,
                           in_pointwise_disk, joint_spectrum, joint_spectrum_raw,
                           motion_dim_bound, rotation_spectrum, sharp_bound)

Ks = st.floats(1.05, 8.0)


def test_joint_examples():
    for K in (1.1, 2, 5):
        assert joint_spectrum(K, 1, 0) == 2
    assert joint_spectrum(2, 1, math.sqrt(0.5)) == pytest.approx(0, abs=1e-12)
    assert joint_spectrum(2, 1, 0.5) == pytest.approx(2 - math.sqrt(2), abs=1e-15)
    assert joint_spectrum(2, 1, 0.8) == -math.inf


def test_K_equal_one():
    assert joint_spectrum(1, 1, 0) == 2
    assert joint_spectrum(1, 1.1, 0) == -math.inf
    assert rotation_spectrum(1, 0) == 2 and rotation_spectrum(1, 0.1) == -math.inf
    with pytest.raises(InvalidParameters):
        joint_spectrum(2, 0, 0)


@given(Ks, st.floats(0.3, 3), st.floats(-2, 2))
def test_even_in_gamma(K, a, g):
    assert joint_spectrum(K, a, g) == joint_spectrum(K, a, -g)


@given(Ks, st.floats(0.3, 3), st.floats(-2, 2))
def test_k_form_matches_K_form(K, a, g):
    assume(in_pointwise_disk(K, a, g))
    v = joint_spectrum(K, a, g)
    assert 0 <= v <= 2
    assert v == pytest.approx(max(joint_spectrum_raw(K, a, g), 0.0), abs=1e-10)


@given(Ks, st.floats(0, 2 * math.pi), st.floats(0.05, 0.95))
def test_cone_property(K, th, frac):
    c, a = (K + 1 / K) / 2, (K - 1 / K) / 2
    edge = c + a * complex(math.cos(th), math.sin(th))
    assume(edge.real > 1e-3)
    tau = 1 + frac * (edge - 1)
    val = joint_spectrum(K, tau.real, tau.imag / tau.real)
    assert val == pytest.approx(2 * (1 - frac), abs=1e-9)
    assert joint_spectrum(K, edge.real, edge.imag / edge.real) == pytest.approx(0, abs=1e-9)


def test_rotation_examples():
    assert rotation_spectrum(2, 1e-12, "source") == pytest.approx(2, abs=1e-10)
    assert rotation_spectrum(2, 0.75, "source") == pytest.approx(0, abs=1e-12)
    assert rotation_spectrum(2, 0.75, "image") == pytest.approx(0, abs=1e-12)
    assert rotation_spectrum(2, 0.8, "image") == -math.inf


@pytest.mark.parametrize("K", [1.5, 2.0, 4.0])
@pytest.mark.parametrize("frac", [0.1, 0.4, 0.7, 0.95])
def test_rotation_is_sup_over_alpha(K, frac):
    g = frac * (K - 1 / K) / 2
    lo, hi = admissible_alpha_interval(K, g)
    res = minimize_scalar(lambda a: -joint_spectrum(K, a, g), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    assert -res.fun == pytest.approx(rotation_spectrum(K, g, "source"), abs=1e-8)


@given(Ks, st.floats(0, 1), st.floats(0, 1))
def test_rotation_monotone(K, u, v):
    gm = (K - 1 / K) / 2
    g1, g2 = sorted((u * gm, v * gm))
    for side in ("source", "image"):
        assert rotation_spectrum(K, g1, side) >= rotation_spectrum(K, g2, side) - 1e-12


def test_bilip_examples():
    assert bilip_spectrum(2, 0) == 2
    assert bilip_spectrum(2, 1.5) == pytest.approx(0, abs=1e-15)
    assert bilip_spectrum(2, 1) == pytest.approx(2 / 3, abs=1e-15)
    assert joint_spectrum(4, 1, 1) == pytest.approx(2 / 3, abs=1e-15)


def test_sharp_bounds():
    assert sharp_bound("bilip-gamma-max", 2) == 1.5
    assert sharp_bound("qc-exp-threshold", 2) == pytest.approx(8 / 3, abs=1e-15)
    assert sharp_bound("qc-gamma-max", 1) == 0
    assert sharp_bound("qc-alpha-range", 3) == (1 / 3, 3)
    assert sharp_bound("qc-exp-threshold", 1) == math.inf
    with pytest.raises(InvalidParameters):
        sharp_bound("qc-gamma-max", 0.5)
    with pytest.raises(InvalidParameters):
        sharp_bound("nope", 2)


@given(st.floats(1.01, 6), st.floats(1.01, 6))
def test_bounds_monotone(P1, P2):
    lo, hi = sorted((P1, P2))
    assert sharp_bound("qc-gamma-max", lo) <= sharp_bound("qc-gamma-max", hi)
    assert sharp_bound("qc-exp-threshold", lo) >= sharp_bound("qc-exp-threshold", hi)
    assert sharp_bound("bilip-exp-threshold", lo) >= sharp_bound("bilip-exp-threshold", hi)


def test_factoring():
    assert factoring_lower_bound(0, 2) == 0
    assert factoring_lower_bound(10, 2) == 7
    assert factoring_lower_bound(1.5, 2) == 1
    with pytest.raises(InvalidParameters):
        factoring_lower_bound(1, 1)


def test_motion_examples():
    assert motion_dim_bound(0.4, 1, 0) == 2
    assert motion_dim_bound(1 / 3, 1, 0.5) == pytest.approx(2 - math.sqrt(2), abs=1e-15)
    assert motion_dim_bound(1 / 3, 2, 0) == pytest.approx(0, abs=1e-15)
    assert motion_dim_bound(0.2, 5, 0) < 0
    with pytest.raises(InvalidParameters):
        motion_dim_bound(1.0, 1, 0)


@given(st.floats(0.01, 0.95), st.floats(0.2, 5), st.floats(-3, 3))
def test_motion_equals_joint(k, a, g):
    K = (1 + k) / (1 - k)
    assume(in_pointwise_disk(K, a, g))
    assert motion_dim_bound(k, a, g) == pytest.approx(joint_spectrum(K, a, g), abs=1e-10)


@given(st.floats(1.01, 5), st.floats(-1, 1))
def test_bilip_equals_joint(L, frac):
    g = frac * (L - 1 / L)
    assert bilip_spectrum(L, g) == pytest.approx(joint_spectrum(L * L, 1, g), abs=1e-10)
