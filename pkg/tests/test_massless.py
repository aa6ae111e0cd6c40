"""Closed-form massless map: worked values, structural lemmas and agreement with simulation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from softhop.massless import (
    MapCoefficients,
    NoGaitError,
    coefficients,
    cubic_real_root,
    depth_ratio,
    eigenvalue,
    energy_loss,
    eps_from_depth,
    extension_equilibrium_depth,
    fixed_point,
    gait_metrics,
    liftoff_margin,
    map_eval,
    map_minimum,
    map_slope,
    critical_points,
    min_injected_energy,
    pre_injection_depth,
)
from softhop.model import ModelParams
from softhop.sim import simulate_hop


def unit_ratio_fixed_point(eps_inj, kappa_c):
    """Fixed point for phi <= 1, where the loss is half the squared depth."""
    keq = kappa_c / (1 + kappa_c)
    return ((math.sqrt(2 * eps_inj) - 1) ** 2 - 1) / (2 * keq)


def unit_ratio_eigenvalue(eps_star, kappa_c):
    keq = kappa_c / (1 + kappa_c)
    s = math.sqrt(1 + 2 * keq * eps_star)
    return 1 - (1 + s) * keq / s


triples = st.tuples(st.floats(0.5, 60.0), st.floats(0.2, 4.0), st.floats(0.01, 10.0))


# -- worked values -------------------------------------------------------------

def test_pre_injection_depth_values():
    assert pre_injection_depth(0.0, 0.37) == -2.0
    assert pre_injection_depth(10.0, 0.1) == pytest.approx(-2.67874, abs=1e-5)
    assert pre_injection_depth(60.8065, 0.1) == pytest.approx(-4.47214, abs=1e-5)
    arr = pre_injection_depth(np.array([0.0, 10.0]), 0.1)
    assert arr.shape == (2,) and arr[0] == -2.0


def test_depth_ratio_values():
    assert depth_ratio(-3.1, ModelParams(10.0, 1.0, 0.3)) == 1.0
    assert depth_ratio(-3.1, ModelParams(10.0, 0.6, 0.3)) == 1.0
    assert depth_ratio(-2.5, ModelParams(10.0, 2.0, 1e-9)) == pytest.approx(3.0, rel=1e-6)
    assert depth_ratio(-2.0, ModelParams(10.0, 2.0, 0.1)) == pytest.approx(19.6 / 7.6, rel=1e-12)


def test_map_values():
    # from rest the depth is -2, so the ratio is (8a + 2c)/(4b + d)
    co = coefficients(10.0, 2.0, 0.1)
    hand = 10.0 - 10.0 * ((8 * co.a + 2 * co.c) / (4 * co.b + co.d)) ** 2
    assert map_eval(0.0, ModelParams(10.0, 2.0, 0.1)) == pytest.approx(hand, rel=1e-12)
    assert hand == pytest.approx(-3.30, abs=0.01)
    p = ModelParams(10.0, 1.0, 0.1)
    assert map_eval(60.8065, p) == pytest.approx(60.8065, abs=1e-3)
    for k in (0.01, 0.3, 7.0):
        assert map_eval(0.0, ModelParams(2.0, 0.9, k)) == pytest.approx(0.0, abs=1e-12)


def test_coefficients_positive():
    co = coefficients(3.0, 0.4, 0.2)
    assert co.phi_eff == 1.0
    assert min(co.a, co.b, co.c, co.d) > 0
    assert co.kappa_eq_c == pytest.approx(0.2 / 1.2)
    assert MapCoefficients.from_params(ModelParams(3.0, 0.4, 0.2)) == co


def test_fixed_point_values():
    p = ModelParams(10.0, 1.0, 0.1)
    eps = fixed_point(p)
    assert eps == pytest.approx(unit_ratio_fixed_point(10.0, 0.1), rel=1e-12)
    assert eps == pytest.approx(60.8065, abs=1e-4)
    assert cubic_real_root(MapCoefficients.from_params(p)) == pytest.approx(-4.47214, abs=1e-5)
    assert fixed_point(ModelParams(12.84, 1.52, 0.1)) == pytest.approx(10.0, abs=0.15)
    assert fixed_point(ModelParams(19.0, 2.235, 0.1)) == pytest.approx(1.04, abs=0.01)


def test_eigenvalue_values():
    p = ModelParams(10.0, 1.0, 0.1)
    eps = fixed_point(p)
    assert eigenvalue(p) == pytest.approx(unit_ratio_eigenvalue(eps, 0.1), rel=1e-12)
    assert eigenvalue(p) == pytest.approx(0.8829, abs=1e-4)
    assert eigenvalue(ModelParams(19.0, 2.235, 0.1)) == pytest.approx(-0.32, abs=0.01)


def test_no_gait_below_minimum():
    with pytest.raises(NoGaitError):
        fixed_point(ModelParams(10.0, 2.5, 0.1))
    with pytest.raises(NoGaitError):
        fixed_point(ModelParams(1.9, 0.5, 0.1))
    with pytest.raises(NoGaitError):
        fixed_point(ModelParams(0.0, 0.5, 0.1))


def test_min_injected_energy_values():
    assert min_injected_energy(0.7, 0.3) == 2.0
    assert min_injected_energy(2.0, 0.25) == pytest.approx(11.7, abs=0.1)
    for k in (0.05, 0.25, 2.0):
        assert min_injected_energy(3.0, k) > min_injected_energy(2.0, k) > min_injected_energy(1.2, k)
    assert min_injected_energy(2.0, 0.1) > min_injected_energy(2.0, 1.0)


def test_min_injected_energy_is_existence_boundary():
    for phi, k in ((1.3, 0.1), (2.0, 0.25), (2.5, 0.1), (4.0, 3.0)):
        e = min_injected_energy(phi, k)
        assert map_eval(0.0, ModelParams(e, phi, k)) == pytest.approx(0.0, abs=1e-9)
        fixed_point(ModelParams(e * 1.001, phi, k))
        with pytest.raises(NoGaitError):
            fixed_point(ModelParams(e * 0.999, phi, k))


def test_gait_metrics_values():
    g = gait_metrics(ModelParams(10.0, 1.0, 0.1))
    assert g.efficiency == pytest.approx(0.8588, abs=1e-4)
    assert g.efficiency == g.fixed_point / (10.0 + g.fixed_point)
    assert g.stability_margin == pytest.approx(0.2205, abs=1e-4)
    assert g.globally_stable
    assert not gait_metrics(ModelParams(19.0, 2.235, 0.1)).globally_stable


def test_extension_equilibrium_lies_between_depths():
    p = ModelParams(10.0, 2.0, 0.1)
    xi_m = pre_injection_depth(5.0, 0.1)
    bar = extension_equilibrium_depth(xi_m, p)
    assert bar < xi_m
    # the post-reyield depth overshoots the equilibrium by the same distance
    xi_p = depth_ratio(xi_m, p) * xi_m
    assert xi_p - bar == pytest.approx(bar - xi_m, rel=1e-9)


# -- structure -------------------------------------------------------------------

@given(triples)
@settings(max_examples=1000)
def test_loss_increases_with_touchdown_energy(t):
    p = ModelParams(*t)
    grid = np.linspace(0.0, 100.0, 200)
    loss = energy_loss(grid, p)
    assert np.all(np.diff(loss) > 0)
    assert np.allclose(grid + p.eps_inj - map_eval(grid, p), loss)


@given(triples)
@settings(max_examples=1000)
def test_slope_below_one(t):
    p = ModelParams(*t)
    assert np.all(map_slope(np.linspace(0.0, 100.0, 200), p) < 1.0)


def test_cubic_has_one_real_root():
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        co = coefficients(rng.uniform(0.01, 100), rng.uniform(0.05, 5.0), 10 ** rng.uniform(-3, 2))
        assert co.discriminant() < 0
        assert np.sum(np.abs(np.roots(co.cubic()).imag) < 1e-12) == 1


@given(st.tuples(st.floats(0.5, 60.0), st.floats(0.2, 3.0), st.floats(0.01, 10.0)))
@settings(max_examples=300)
def test_map_decreases_then_increases(t):
    p = ModelParams(*t)
    assert len(critical_points(p)) <= 1
    slope = map_slope(np.linspace(0.0, 200.0, 2000), p)
    signs = np.sign(slope)
    changes = np.flatnonzero(np.diff(signs) != 0)
    assert len(changes) <= 1
    if len(changes):
        assert signs[0] < 0 < signs[-1]
    elif signs[0] == 0:
        assert map_slope(1e-3, p) > 0
    x, v = map_minimum(p)
    assert v <= map_eval(np.linspace(0.0, 200.0, 2000), p).min() + 1e-12
    if x > 0:
        assert map_slope(x, p) == pytest.approx(0.0, abs=1e-9)


@given(triples)
@settings(max_examples=500)
def test_fixed_point_consistency(t):
    p = ModelParams(*t)
    try:
        eps = fixed_point(p)
    except NoGaitError:
        assert p.eps_inj < min_injected_energy(p.phi, p.kappa_c) * (1 + 1e-9)
        return
    assert abs(map_eval(eps, p) - eps) < 1e-9 * max(1.0, eps)
    assert eps_from_depth(pre_injection_depth(eps, p.kappa_c), p.kappa_c) == pytest.approx(eps, rel=1e-9, abs=1e-12)


@given(triples)
@settings(max_examples=300)
def test_eigenvalue_matches_finite_difference(t):
    p = ModelParams(*t)
    try:
        eps = fixed_point(p)
    except NoGaitError:
        return
    h = 1e-5
    if eps >= h:
        fd = (map_eval(eps + h, p) - map_eval(eps - h, p)) / (2 * h)
    else:
        # second-order one-sided difference at the boundary
        fd = (-3 * map_eval(eps, p) + 4 * map_eval(eps + h, p) - map_eval(eps + 2 * h, p)) / (2 * h)
    assert abs(eigenvalue(p, eps) - fd) < 1e-6 * max(1.0, abs(fd))


def test_large_force_ratio_breaks_uniqueness():
    # past phi of about 5.9 the cubic can have three admissible roots
    p = ModelParams(77.67054460308637, 6.149382845477752, 38.59122138951973)
    co = MapCoefficients.from_params(p)
    assert co.discriminant() > 0
    roots = np.sort(np.roots(co.cubic()).real)
    assert np.all(roots < -2)
    for xi in roots:
        eps = eps_from_depth(xi, p.kappa_c)
        assert map_eval(eps, p) == pytest.approx(eps, abs=1e-6)
    assert max(map_slope(eps_from_depth(roots, p.kappa_c), p)) > 1
    with pytest.raises(ArithmeticError):
        fixed_point(p)


def test_several_critical_points_above_three():
    p = ModelParams(17.0, 4.0, 9.0)
    crit = critical_points(p)
    assert len(crit) == 3
    assert np.allclose(map_slope(crit, p), 0.0, atol=1e-9)
    grid = np.linspace(0.0, 1500.0, 30001)
    x, v = map_minimum(p)
    assert v <= map_eval(grid, p).min() + 1e-12


def test_unit_minimum_for_random_pairs():
    rng = np.random.default_rng(2)
    for _ in range(100):
        phi, k = rng.uniform(0.01, 1.0), 10 ** rng.uniform(-3, 2)
        assert min_injected_energy(phi, k) == 2.0
        assert map_eval(0.0, ModelParams(2.0, phi, k)) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(0.5, 60.0), st.floats(0.01, 10.0), st.floats(0.0, 80.0))
def test_cusp_at_unit_force_ratio(eps_inj, k, eps):
    base = map_eval(eps, ModelParams(eps_inj, 1.0, k))
    for phi in (0.2, 0.7, 1.0 - 1e-12):
        assert map_eval(eps, ModelParams(eps_inj, phi, k)) == base
    assert map_eval(eps, ModelParams(eps_inj, 1.0 + 1e-9, k)) == pytest.approx(base, rel=1e-6, abs=1e-6)


# -- agreement with simulation -------------------------------------------------

AGREEMENT = [(e, phi) for e in (10.0, 20.0) for phi in (0.8, 1.0, 1.5, 2.5)]


@pytest.mark.parametrize("eps_inj,phi", AGREEMENT)
def test_agrees_with_light_foot_simulation(eps_inj, phi):
    p = ModelParams(eps_inj, phi, 0.1, mu=1e-3)
    checked = 0
    for eps in np.linspace(0.1, 50.0, 25):
        if liftoff_margin(eps, p) <= 0.05:
            continue
        ref = map_eval(eps, p)
        got = simulate_hop(eps, p).map_value
        # near the zero crossing compare against the energy scale, not the value
        assert abs(got - ref) <= 0.01 * max(abs(ref), 1.0)
        checked += 1
    assert checked >= 10


def test_negative_liftoff_margin_means_stall():
    p = ModelParams(20.0, 0.8, 0.1, mu=1e-3)
    for eps in np.linspace(0.1, 50.0, 25):
        m = liftoff_margin(eps, p)
        if abs(m) < 0.05:
            continue
        rec = simulate_hop(eps, p)
        assert rec.failed == (m < 0)
        if m < 0:
            assert map_eval(eps, p) > 0
    assert liftoff_margin(0.0, ModelParams(5.0, 1.0, 0.1)) == pytest.approx(0.0, abs=1e-12)
