import math

import numpy as np
import pytest

from tricomi import geometry as geo
from tricomi.errors import DomainError
from tricomi.specfun import Branch

A = 2.0 / 3.0
SOURCE = geo.SourcePoint(-1.0)


def test_source_point():
    assert SOURCE.a == pytest.approx(A, rel=1e-15)
    assert geo.SourcePoint.from_a(A).b == pytest.approx(-1.0, rel=1e-15)
    with pytest.raises(DomainError):
        geo.SourcePoint(0.0)
    with pytest.raises(DomainError):
        geo.SourcePoint.from_a(-1.0)


def test_to_t_and_back():
    assert geo.to_t(-1.0) == pytest.approx(2.0 / 3.0, rel=1e-15)
    y = -np.geomspace(1e-3, 10.0, 200)
    assert np.allclose(geo.to_y(geo.to_t(y)), y, rtol=1e-14, atol=0)
    with pytest.raises(DomainError):
        geo.to_t(0.5)
    with pytest.raises(DomainError):
        geo.to_y(-1.0)


def test_jacobian():
    assert abs(geo.jacobian(1.0)) == pytest.approx((2.0 / 3.0) ** (1.0 / 3.0), rel=1e-15)
    # dy/dt against a central difference of to_y
    t, h = 0.8, 1e-6
    fd = (geo.to_y(t + h) - geo.to_y(t - h)) / (2 * h)
    assert geo.jacobian(t) == pytest.approx(fd, rel=1e-8)


def test_k_val():
    assert geo.k_val(0.0, 2.0, A) == pytest.approx(16.0 / 9.0, rel=1e-15)
    assert geo.k_val(np.array([0.6, 0.8]), 2.0, 1.0) == 0.0
    assert geo.k_val(5.0, 2.0, A) == 0.0


def test_uv_examples():
    u, v = geo.uv(0.0, -1.0, A)
    assert u == pytest.approx(0.0, abs=1e-14)
    assert v == pytest.approx(-16.0, rel=1e-14)
    u, v = geo.uv(A, 0.0, A)
    assert (u, v) == (0.0, 0.0)
    with pytest.raises(DomainError):
        geo.uv(0.0, 0.5, A)


def test_v_vanishes_on_characteristic():
    # r_a: 3(x - a) = 2(-y)^{3/2}
    y = -np.linspace(0.1, 3.0, 20)
    x = A + 2.0 * (-y) ** 1.5 / 3.0
    _, v = geo.uv(x[:, None], y, A)
    assert np.max(np.abs(v)) < 1e-12


def test_uv_polynomial_form():
    rng = np.random.default_rng(5)
    x = rng.uniform(-3, 3, 1000)
    y = -rng.uniform(0, 3, 1000)
    u, v = geo.uv(x[:, None], y, A)
    s = (-y) ** 1.5
    assert np.allclose(u, 9 * (x * x - A * A) + 12 * A * s + 4 * y ** 3, rtol=1e-12, atol=1e-11)
    assert np.allclose(v, 9 * (x * x - A * A) - 12 * A * s + 4 * y ** 3, rtol=1e-12, atol=1e-11)


def test_pullback_identity():
    rng = np.random.default_rng(6)
    x = rng.uniform(-2, 2, (1000, 2))
    y = -rng.uniform(0.01, 3, 1000)
    t = geo.to_t(y)
    r2 = np.sum(x * x, axis=1)
    u, v = geo.uv(x, y, A)
    assert np.max(np.abs((t - A) ** 2 - r2 + u / 9)) < 1e-12 * 100
    assert np.max(np.abs((t + A) ** 2 - r2 + v / 9)) < 1e-12 * 100


def test_factorization_n1():
    rng = np.random.default_rng(7)
    x = rng.uniform(-3, 3, 500)
    y = -rng.uniform(0, 3, 500)
    s = 2.0 * (-y) ** 1.5
    u, _ = geo.uv(x[:, None], y, A)
    assert np.max(np.abs(u - (3 * (x - A) + s) * (3 * (x + A) - s))) < 1e-10
    ell, m = geo.characteristic_coordinates(x, y)
    assert np.allclose(u, 9 * (ell - A) * (m + A), atol=1e-10)


def test_complex_uv():
    u, v = geo.complex_uv(0.0, 1.0, A, Branch.LOWER)
    assert u.real == pytest.approx(0.0, abs=1e-15)
    assert u.imag == pytest.approx(-8.0, rel=1e-15)
    assert v == np.conj(u)
    up, _ = geo.complex_uv(0.0, 1.0, A, Branch.UPPER)
    assert up == np.conj(u)
    small, _ = geo.complex_uv(A, 1e-12, A)
    assert abs(small) < 1e-16
    with pytest.raises(DomainError):
        geo.complex_uv(0.0, -1.0, A)


def test_classify_examples():
    assert geo.classify(0.0, -2.0, SOURCE) is geo.RegionTag.DMinusInterior
    assert geo.classify(0.0, SOURCE.b, SOURCE) is geo.RegionTag.DMinusBoundary
    assert geo.classify(10.0, -1.0, SOURCE) is geo.RegionTag.DPlus
    assert geo.classify(0.3, 0.5, SOURCE) is geo.RegionTag.EllipticHalf
    assert geo.classify(0.3, 0.0, SOURCE) is geo.RegionTag.DPlus
    assert geo.classify(np.array([0.1, 0.2]), -2.0, SOURCE) is geo.RegionTag.DMinusInterior


def test_classify_matches_cone():
    x, y = np.meshgrid(np.linspace(-4, 4, 100), np.linspace(-4, 0, 100))
    tags = geo.classify_radial(np.abs(x), y, SOURCE)
    interior = tags == geo.RegionTag.DMinusInterior
    t = 2.0 * (-y) ** 1.5 / 3.0
    cone = (t - A > np.abs(x)) & (t > A)
    assert np.array_equal(interior, cone)


def test_cone_boundary_parametrization():
    assert geo.cone_boundary_parametrization(SOURCE, SOURCE.b) == pytest.approx(0.0, abs=1e-15)
    assert geo.cone_boundary_parametrization(SOURCE, -4.0) == pytest.approx(14.0 / 3.0, rel=1e-14)
    y = -np.linspace(1.0, 6.0, 100)
    rho = geo.cone_boundary_parametrization(SOURCE, y)
    u, _ = geo.uv_radial(rho, y, A)
    assert np.max(np.abs(u)) < 1e-10
    with pytest.raises(DomainError):
        geo.cone_boundary_parametrization(SOURCE, -0.5)


def test_origin_form():
    assert geo.origin_form(0.0, -1.0) == pytest.approx(-4.0, rel=1e-15)
    assert geo.origin_form(np.array([1.0, 0.0]), 0.5) == pytest.approx(9.5, rel=1e-15)
    y = -np.linspace(0.1, 2, 10)
    r = 2.0 * (-y) ** 1.5 / 3.0
    assert np.max(np.abs(geo.origin_form_radial(r, y))) < 1e-13


def test_anchored_forms_are_exact_offsets():
    # y = anchor + offset with anchor on u = 0: the anchored form keeps digits plain y loses
    r = 0.9
    anchor = geo.to_y(A + r)
    offsets = np.array([1e-14, -3e-13, 2e-10, -1e-6])
    u_anchor, v_anchor = geo.uv_radial_anchored(np.full(4, r), np.full(4, anchor), offsets, A)
    # first-order expansion: du/dy = 18 (t - a) dt/dy, dt/dy = -(-y)^{1/2}
    slope = -18.0 * (geo.to_t(anchor) - A) * math.sqrt(-anchor)
    assert np.allclose(u_anchor[:3], slope * offsets[:3], rtol=1e-6)
    _, v_plain = geo.uv_radial(r, anchor + offsets, A)
    assert np.allclose(v_anchor, v_plain, rtol=1e-12)
    q = geo.origin_form_anchored(np.full(2, 0.5), np.full(2, geo.to_y(0.5)), np.array([1e-13, -1e-13]))
    # a positive offset lowers t below r
    assert q[0] > 0 > q[1]
