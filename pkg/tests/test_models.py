import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracrod.errors import AsymptoticsViolation, DomainError
from fracrod.models import (
    MaterialModel,
    OrderDistribution,
    complex_modulus_E,
    distributed,
    estimate_asymptotics,
    f_derivative,
    f_eval,
    modulus_M,
    modulus_squared,
    modulus_squared_below_cut,
    phi_symbol,
    phi_symbol_below_cut,
    phi_symbol_derivative,
    transfer_P,
    transfer_Q,
    zener,
)

ZENER = zener(0.2, 0.6, 0.5)
DISTRIBUTED = distributed(0.2, 0.6)

MIXED = OrderDistribution(atoms=((1.0, 0.0), (0.3, 0.4), (0.7, 1.0)), densities=((0.5, 2.0),))
DISTS = [
    OrderDistribution.atom(1.0, 0.0),
    ZENER.phi_sigma,
    OrderDistribution.density(1.0, 0.2),
    MIXED,
]


def central_difference(fun, s, h=1e-5):
    return (fun(s + h) - fun(s - h)) / (2 * h)


# ---- phi_symbol ---------------------------------------------------------


def test_delta_at_zero_is_one():
    d = OrderDistribution.atom(1.0, 0.0)
    for s in (0.5, 3 + 2j, -4 + 1e-3j):
        assert phi_symbol(d, s) == 1


def test_zener_symbol_matches_closed_form():
    a, alpha = 0.2, 0.5
    for x in (0.1, 1.0, 7.5):
        assert phi_symbol(ZENER.phi_sigma, x) == pytest.approx(1 + a * x**alpha, rel=1e-15)


def test_density_removable_singularity():
    # (x - 1)/ln x -> 1 as x -> 1; mpmath limit is the independent oracle
    a = 0.2
    expected = complex(mpmath.limit(lambda x: (x - 1) / mpmath.log(x), 1))
    d = OrderDistribution.density(1.0, a)
    assert phi_symbol(d, 1 / a) == pytest.approx(expected, abs=1e-15)
    for eps in (1e-12, 1e-7, 1e-5, -3e-4, 2e-3j):
        s = (1 + eps) / a
        x = mpmath.mpc(1 + eps)
        ref = complex((x - 1) / mpmath.log(x))
        assert abs(phi_symbol(d, s) - ref) <= 1e-14 * abs(ref)


def test_density_far_from_one_matches_direct_formula():
    d = OrderDistribution.density(2.0, 0.6)
    s = 3.0 - 4.0j
    x = 0.6 * s
    assert phi_symbol(d, s) == pytest.approx(2.0 * (x - 1) / cmath.log(x), rel=1e-14)


@pytest.mark.parametrize("s", [0.0, -1.0, -1e-9 + 0j, complex(-2.0, -0.0)])
def test_symbol_rejects_cut(s):
    with pytest.raises(DomainError):
        phi_symbol(MIXED, s)


def test_below_cut_matches_limit_from_below():
    q = 0.8
    lower = phi_symbol_below_cut(MIXED, q)
    near = phi_symbol(MIXED, complex(-q, -1e-12))
    assert abs(lower - near) < 1e-9
    # and the upper lip is its conjugate
    assert abs(phi_symbol(MIXED, complex(-q, 1e-12)) - np.conj(lower)) < 1e-9


# ---- derivative ---------------------------------------------------------


def test_derivative_of_constant_symbol_is_zero():
    assert phi_symbol_derivative(OrderDistribution.atom(1.0, 0.0), 2 + 1j) == 0


def test_zener_derivative_at_one():
    # d/ds (1 + a s^alpha) = a alpha at s = 1
    assert phi_symbol_derivative(ZENER.phi_sigma, 1.0) == pytest.approx(0.2 * 0.5, rel=1e-15)


@pytest.mark.parametrize("dist", DISTS)
def test_derivative_matches_finite_difference_at_2_plus_i(dist):
    s = 2 + 1j
    fd = central_difference(lambda z: phi_symbol(dist, z), s)
    an = phi_symbol_derivative(dist, s)
    assert abs(an - fd) <= 1e-6 * max(abs(an), 1e-12) + 1e-12


def test_density_derivative_near_removable_point():
    d = OrderDistribution.density(1.0, 0.2)
    for eps in (0.0, 1e-9, 1e-4, 0.3, 0.6):
        s = (1 + eps) / 0.2
        x = mpmath.mpf(1 + eps)
        ref = 0.2 * float(mpmath.diff(lambda y: (y - 1) / mpmath.log(y) if y != 1 else 1, x))
        assert phi_symbol_derivative(d, s) == pytest.approx(ref, rel=1e-12)


upper_points = st.builds(
    complex,
    st.floats(-50, 50, allow_nan=False),
    st.floats(1e-3, 50, allow_nan=False),
)


@settings(max_examples=200, deadline=None)
@given(upper_points, st.sampled_from(DISTS))
def test_derivative_property(s, dist):
    h = 1e-6 * max(1.0, abs(s))
    fd = (phi_symbol(dist, s + h) - phi_symbol(dist, s - h)) / (2 * h)
    an = phi_symbol_derivative(dist, s)
    assert abs(an - fd) <= 1e-6 * abs(an) + 1e-9


# ---- M, E, transfers ----------------------------------------------------


def test_identical_distributions_give_unit_modulus():
    m = zener(0.5, 0.5, 0.3)
    s = np.array([0.1, 1 + 1j, -3 + 0.2j, 1e4j])
    assert np.allclose(modulus_M(m, s), 1.0, rtol=0, atol=1e-15)
    assert m.is_elastic


def test_zener_modulus_at_one():
    assert modulus_M(ZENER, 1.0) == pytest.approx(math.sqrt(1.2 / 1.6), rel=1e-15)
    assert abs(modulus_M(ZENER, 1.0) - 0.86603) < 5e-6


def test_distributed_modulus_large_real_tends_to_sqrt_ratio():
    # logarithmic approach: deviation shrinks as log(s) grows
    devs = [abs(modulus_M(DISTRIBUTED, x) - math.sqrt(0.2 / 0.6)) for x in (1e4, 1e8, 1e16, 1e64, 1e256)]
    assert all(d2 < d1 for d1, d2 in zip(devs, devs[1:]))
    assert devs[-1] < 2e-3


@settings(max_examples=1000, deadline=None)
@given(upper_points, st.sampled_from([ZENER, DISTRIBUTED, zener(0.58, 0.6, 0.45)]))
def test_conjugate_symmetry_of_M(s, model):
    m = modulus_M(model, s)
    mc = modulus_M(model, s.conjugate())
    assert abs(mc - np.conj(m)) <= 1e-12 * abs(m)


@pytest.mark.parametrize("model", [ZENER, DISTRIBUTED, zener(0.2, 0.6, 0.1)])
def test_reality_on_positive_axis(model):
    x = np.logspace(-6, 6, 300)
    m = modulus_M(model, x)
    assert np.all(np.abs(m.imag) <= 1e-10 * np.abs(m))


def test_complex_modulus_elastic():
    e1, e2 = complex_modulus_E(zener(0.5, 0.5, 0.7), np.logspace(-3, 3, 13))
    assert np.allclose(e1, 1.0, atol=1e-15) and np.allclose(e2, 0.0, atol=1e-15)


def test_complex_modulus_zener_limits():
    e1, e2 = complex_modulus_E(ZENER, 1e-10)
    assert e1 == pytest.approx(1.0, abs=1e-4) and 0 < e2 < 1e-4
    e1, e2 = complex_modulus_E(ZENER, 1e12)
    assert e1 == pytest.approx(3.0, rel=1e-4)


def test_complex_modulus_rejects_nonpositive_frequency():
    with pytest.raises(ValueError):
        complex_modulus_E(ZENER, 0.0)


def test_elastic_transfers():
    m = zener(0.4, 0.4, 0.5)
    s = 0.3 + 2j
    assert transfer_P(m, s) == pytest.approx(1 / (1 + s * s), rel=1e-15)
    assert transfer_Q(m, s) == pytest.approx(1 / (1 + s * s), rel=1e-15)
    assert f_eval(m, 2j) == pytest.approx(-3, abs=1e-15)


def test_zener_f_at_one():
    assert f_eval(ZENER, 1.0) == pytest.approx(1.75, rel=1e-15)


@settings(max_examples=300, deadline=None)
@given(upper_points, st.sampled_from([ZENER, DISTRIBUTED]))
def test_P_equals_M2_Q(s, model):
    p = transfer_P(model, s)
    q = transfer_Q(model, s)
    m2 = modulus_squared(model, s)
    assert abs(p - m2 * q) <= 1e-13 * abs(p)


@pytest.mark.parametrize("model", [ZENER, DISTRIBUTED])
@pytest.mark.parametrize("phase", [0.0, math.pi / 2])
def test_transfer_decay_like_inverse_square(model, phase):
    radii = np.logspace(3, 9, 7)
    s = radii * np.exp(1j * phase)
    sp = np.abs(s**2 * transfer_P(model, s))
    sq = np.abs(s**2 * transfer_Q(model, s))
    # bounded, and settling: successive changes shrink
    assert np.all(sp < 10) and np.all(sq < 10)
    assert abs(sp[-1] - sp[-2]) < abs(sp[1] - sp[0]) + 1e-12
    assert abs(sq[-1] - sq[-2]) < abs(sq[1] - sq[0]) + 1e-12


def test_f_derivative_matches_finite_difference():
    for model in (ZENER, DISTRIBUTED):
        s = -0.1 + 1.1j
        fd = central_difference(lambda z: f_eval(model, z), s, h=1e-6)
        assert abs(f_derivative(model, s) - fd) < 1e-7


def test_lower_cut_modulus_is_conjugate_of_upper():
    q = np.logspace(-3, 3, 31)
    low = modulus_squared_below_cut(ZENER, q)
    up = modulus_squared(ZENER, -q + 1e-300j)
    assert np.allclose(low, np.conj(up), rtol=1e-13, atol=0)


# ---- asymptotics --------------------------------------------------------


@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_zener_asymptotics(alpha):
    c0, cinf = estimate_asymptotics(zener(0.2, 0.6, alpha))
    assert c0 == pytest.approx(1.0, rel=1e-15)
    assert cinf == pytest.approx(math.sqrt(0.2 / 0.6), rel=1e-15)


def test_elastic_asymptotics():
    assert estimate_asymptotics(zener(0.3, 0.3, 0.5)) == (1.0, 1.0)


def test_distributed_asymptotics():
    c0, cinf = estimate_asymptotics(DISTRIBUTED)
    assert c0 == pytest.approx(1.0, abs=1e-12)
    assert abs(cinf - 0.57735) < 1e-4


def test_unbounded_modulus_violates_asymptotics():
    m = MaterialModel(OrderDistribution.atom(1.0, 1.0), OrderDistribution.atom(1.0, 0.0))
    with pytest.raises(AsymptoticsViolation):
        estimate_asymptotics(m)
    with pytest.raises(AsymptoticsViolation):
        m.c_inf


def test_distribution_validation():
    with pytest.raises(ValueError):
        OrderDistribution()
    with pytest.raises(ValueError):
        OrderDistribution.atom(-1.0, 0.5)
    with pytest.raises(ValueError):
        OrderDistribution.atom(1.0, 1.5)
    with pytest.raises(ValueError):
        OrderDistribution.density(1.0, 0.0)
    with pytest.raises(ValueError):
        MaterialModel(ZENER.phi_sigma, ZENER.phi_eps, x0=-1.0)
