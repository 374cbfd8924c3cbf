import math

import numpy as np
import pytest
from scipy import integrate

from tricomi import geometry as geo
from tricomi.bump import BumpTestFunction
from tricomi.chi import (AffineSurface1D, ConeSurface, chi_action_1d, chi_of_k_action, chi_pointwise,
                         delta_layer_action, derivative_relation_residual, epd_box_identity_residual,
                         euler_identity_residual)
from tricomi.errors import DegeneracyError, DomainError


def gauss(lo, hi, m):
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def bump1(center=0.2, radius=0.9):
    return BumpTestFunction([center], [radius])


# ------------------------------------------------------------ pointwise


def test_chi_pointwise_examples():
    assert chi_pointwise(0, 2.5) == 1.0
    assert chi_pointwise(1, 2.0) == pytest.approx(2.0, rel=1e-15)
    assert chi_pointwise(-0.5, 1.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)
    assert chi_pointwise(0.7, -3.0) == 0.0
    assert chi_pointwise(0.0, 0.0) == 0.0


def test_chi_pointwise_rejects_low_order():
    with pytest.raises(DomainError):
        chi_pointwise(-1.0, 1.0)


def test_chi_pointwise_homogeneity():
    s = np.linspace(0.1, 3.0, 11)
    for q in (-0.5, 0.0, 0.3, 2.5):
        for lam in (0.5, 2.0, 7.0):
            assert np.allclose(chi_pointwise(q, lam * s), lam ** q * chi_pointwise(q, s), rtol=1e-14, atol=0)


# ------------------------------------------------------------ 1-D action


def test_chi_action_delta_collapse():
    phi = bump1()
    assert chi_action_1d(-1.0, phi) == pytest.approx(float(phi(0.0)), abs=1e-12)
    assert chi_action_1d(-2.0, phi) == pytest.approx(-float(phi.derivative(1, 0.0)), abs=1e-10)
    for m in (1, 2, 3):
        expected = (-1) ** (m - 1) * float(phi.derivative(m - 1, 0.0))
        assert chi_action_1d(-float(m), phi) == pytest.approx(expected, abs=1e-9)


def test_chi_action_heaviside():
    phi = bump1()
    oracle, _ = integrate.quad(lambda s: float(phi(s)), 0.0, 1.1, epsabs=1e-14, epsrel=1e-13)
    assert chi_action_1d(0.0, phi) == pytest.approx(oracle, abs=1e-12)


def test_chi_action_locally_integrable_matches_direct_integral():
    phi = bump1(0.5, 0.8)
    oracle, _ = integrate.quad(lambda s: float(phi(s)), 0.0, 1.3, weight="alg", wvar=(-0.3, 0.0),
                               epsabs=1e-14, epsrel=1e-13)
    assert chi_action_1d(-0.3, phi) == pytest.approx(oracle / math.gamma(0.7), rel=1e-11)


def test_chi_action_depth_independence():
    rng = np.random.default_rng(11)
    for _ in range(10):
        phi = bump1(rng.uniform(-0.4, 0.6), rng.uniform(0.5, 1.2))
        for q in (-2.5, -1.0, -0.3, 0.0, 0.7):
            k = max(0, math.floor(-1.0 - q) + 1)
            a = chi_action_1d(q, phi, depth=k, check=False)
            b = chi_action_1d(q, phi, depth=k + 1, check=False)
            assert abs(a - b) <= 1e-10 * max(1.0, abs(a))
            assert derivative_relation_residual(q, phi) <= 1e-10 * max(1.0, abs(a))


def test_chi_action_too_shallow():
    with pytest.raises(DomainError):
        chi_action_1d(-2.5, bump1(), depth=1)


@pytest.mark.parametrize("q", [1.0, 0.5, -0.4, -1.5])
def test_euler_identity(q):
    assert euler_identity_residual(q, bump1()) <= 1e-9


def test_euler_identity_when_phi_vanishes_at_zero():
    phi = bump1(1.5, 0.5)
    assert euler_identity_residual(0.0, phi) <= 1e-9


# ------------------------------------------------------ χ_q(k) on ℝ^{n+1}


def test_chi_of_k_zero_outside_cone():
    # t - 1 < |x| on the whole support
    phi = BumpTestFunction([2.0, 1.5], [0.3, 0.3])
    assert chi_of_k_action(0.0, 1, 1.0, phi) == 0.0


def test_chi_of_k_heaviside_n1():
    phi = BumpTestFunction([0.15, 1.5], [0.6, 0.5])
    t0 = 1.0
    # the cone t - t0 > |x| cut with the box, as a 2-D integral
    oracle, _ = integrate.dblquad(lambda x, t: float(phi(np.array([x, t]))), 1.0, 2.0,
                                  lambda t: -(t - t0), lambda t: t - t0, epsabs=1e-13, epsrel=1e-12)
    assert chi_of_k_action(0.0, 1, t0, phi) == pytest.approx(oracle, abs=1e-10)


def test_chi_of_k_inverse_square_root_n2_grid_oracle():
    phi = BumpTestFunction([0.1, -0.05, 1.6], [0.5, 0.5, 0.5])
    t0 = 1.0
    # r = L sin α with L = t - t0 turns r dr / sqrt(L² - r²) into L sin α dα
    t, wt = gauss(1.1, 2.1, 120)
    alpha, wa = gauss(0.0, 0.5 * math.pi, 120)
    theta, wth = gauss(0.0, 2.0 * math.pi, 160)
    T, A, TH = np.meshgrid(t, alpha, theta, indexing="ij")
    L = T - t0
    r = L * np.sin(A)
    pts = np.stack([r * np.cos(TH), r * np.sin(TH), T], axis=-1)
    vals = phi(pts) * L * np.sin(A) / math.sqrt(math.pi)
    oracle = np.einsum("ijk,i,j,k->", vals, wt, wa, wth)
    assert chi_of_k_action(-0.5, 2, t0, phi) == pytest.approx(oracle, abs=1e-6)


def test_chi_of_k_rejects_low_order():
    with pytest.raises(DomainError):
        chi_of_k_action(-1.0, 1, 1.0, BumpTestFunction([0.0, 1.5], [0.5, 0.5]))


# --------------------------------------------------------- EPD identities


@pytest.mark.parametrize("j, n", [(2, 1), (1, 1), (3, 2)])
def test_epd_identities(j, n):
    phi = BumpTestFunction(np.append(np.full(n, 0.1), 1.7), np.full(n + 1, 0.5))
    box, time = epd_box_identity_residual(j, n, 1.0, phi)
    assert box <= 1e-6 and time <= 1e-6


def test_epd_identities_outside_cone():
    phi = BumpTestFunction([3.0, 1.5], [0.3, 0.3])
    assert tuple(epd_box_identity_residual(2, 1, 1.0, phi)) == (0.0, 0.0)


def test_epd_identity_order_guard():
    with pytest.raises(DomainError):
        epd_box_identity_residual(1, 3, 1.0, BumpTestFunction([0.1] * 3 + [1.7], 0.5))


# ----------------------------------------------------------- layers


def test_flat_layer():
    phi = bump1(0.8, 0.6)
    surface = AffineSurface1D(1.0, -1.0)
    assert delta_layer_action(0, 1, 1.0, surface, phi) == pytest.approx(float(phi(1.0)), abs=1e-14)
    # δ'(s - 1) pairs to -φ'(1)
    assert delta_layer_action(1, 1, 1.0, surface, phi) == pytest.approx(-float(phi.derivative(1, 1.0)), rel=1e-8)


def test_flat_layer_degenerate():
    with pytest.raises(DegeneracyError):
        AffineSurface1D(0.0, 1.0)


@pytest.mark.parametrize("order", [0, 1, 2])
def test_layer_scaling_law_affine(order):
    phi = bump1(0.8, 0.6)
    surface = AffineSurface1D(2.0, -1.5)
    base = delta_layer_action(order, 1, 1.0, surface, phi)
    for a in (0.5, 3.0):
        scaled = delta_layer_action(order, 1, 1.0, surface.scaled(a), phi)
        assert abs(scaled - a ** (-(order + 1)) * base) <= 1e-8 * max(1.0, abs(base))


def cone_layer_oracle(phi, source, m=80):
    """⟨δ(ρ(y)² - |x|²), φ⟩ for n = 3 on a (y, θ, ϕ) tensor grid."""
    lower, upper = phi.box
    y, wy = gauss(lower[3], min(upper[3], source.b), m)
    th, wth = gauss(0.0, math.pi, m)
    ph, wph = gauss(0.0, 2.0 * math.pi, 2 * m)
    Y, TH, PH = np.meshgrid(y, th, ph, indexing="ij")
    rho = geo.cone_radius(Y, source.a)
    pts = np.stack([rho * np.sin(TH) * np.cos(PH), rho * np.sin(TH) * np.sin(PH), rho * np.cos(TH), Y], axis=-1)
    vals = phi(pts) * 0.5 * rho * np.sin(TH)
    return np.einsum("ijk,i,j,k->", vals, wy, wth, wph)


def test_cone_layer_against_grid_oracle():
    source = geo.SourcePoint(-1.0)
    phi = BumpTestFunction([0.2, 0.1, -0.1, -1.6], [0.5, 0.5, 0.5, 0.5])
    oracle = cone_layer_oracle(phi, source)
    value = delta_layer_action(0, 3, 1.0, ConeSurface(source, 3), phi)
    assert value == pytest.approx(oracle, abs=1e-5)
    assert abs(oracle) > 1e-2


def test_cone_layer_scaling_law():
    source = geo.SourcePoint(-1.0)
    phi = BumpTestFunction([0.2, 0.1, -0.1, -1.6], [0.5, 0.5, 0.5, 0.5])
    surface = ConeSurface(source, 3)
    base = delta_layer_action(0, 3, 1.0, surface, phi)
    scaled = delta_layer_action(0, 3, 1.0, surface.scaled(2.5), phi)
    assert abs(scaled - base / 2.5) <= 1e-8 * max(1.0, abs(base))


def test_cone_layer_vanishes_above_apex():
    source = geo.SourcePoint(-1.0)
    phi = BumpTestFunction([0.0, 0.0, 0.0, -0.5], [0.3, 0.3, 0.3, 0.3])
    assert delta_layer_action(0, 3, 1.0, ConeSurface(source, 3), phi) == 0.0
