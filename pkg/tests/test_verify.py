import numpy as np
import pytest
from scipy import integrate

from tricomi import fundsol as fs
from tricomi import geometry as geo
from tricomi.bump import BumpTestFunction
from tricomi.errors import DomainError
from tricomi.verify import (KernelChoice, QuadConfig, green_bilinear_residual, limit_check, tricomi_apply,
                            tricomi_field, weak_form_residual)

A = 2.0 / 3.0


def test_tricomi_apply_outside_support():
    phi = BumpTestFunction([0.0, -1.0], [0.5, 0.5])
    assert tricomi_apply(phi, np.array([[2.0, -1.0], [0.0, 1.0]])).tolist() == [0.0, 0.0]


def test_tricomi_apply_against_finite_differences():
    phi = BumpTestFunction([0.1, 0.2, -0.8], [0.6, 0.5, 0.7])
    p = np.array([0.2, 0.1, -0.6])
    h = 1e-3
    e = np.eye(3)

    def d2(i):
        return (phi(p + h * e[i]) - 2 * phi(p) + phi(p - h * e[i])) / h ** 2

    fd = p[2] * (d2(0) + d2(1)) + d2(2)
    assert float(tricomi_apply(phi, p)) == pytest.approx(float(fd), rel=1e-5)


def test_tricomi_field_matches_apply():
    phi = BumpTestFunction([0.1, -0.8], [0.6, 0.7])
    pts = np.array([[0.0, -0.5], [0.3, -1.0], [-0.2, -0.9]])
    field = tricomi_field(phi)
    assert np.allclose(field(pts), tricomi_apply(phi, pts), rtol=1e-13, atol=1e-13)


def test_green_bilinear_identity():
    rng = np.random.default_rng(21)
    for _ in range(10):
        d = int(rng.integers(2, 4))
        phi = BumpTestFunction(rng.uniform(-0.3, 0.3, d), rng.uniform(0.4, 0.8, d))
        psi = BumpTestFunction(rng.uniform(-0.3, 0.3, d), rng.uniform(0.4, 0.8, d))
        assert abs(green_bilinear_residual(phi, psi)) <= 1e-10


def test_green_bilinear_disjoint():
    phi = BumpTestFunction([0.0, 0.0], [0.3, 0.3])
    psi = BumpTestFunction([2.0, 0.0], [0.3, 0.3])
    assert green_bilinear_residual(phi, psi) == 0.0


# -------------------------------------------------------------- weak form


def brute_force_pairing_n1(phi, b=-1.0):
    """⟨E_-, Tφ⟩ for n = 1 as a plain scipy double integral over D_{b,-}."""
    a = geo.SourcePoint(b).a
    lo, hi = phi.box
    y_lo, y_hi = lo[1], min(hi[1], b)

    def integrand(x, y):
        return float(fs.eval_E_minus(fs.KernelSpec.make(1, b), x, y)) * float(
            tricomi_apply(phi, np.array([x, y])))

    value, _ = integrate.dblquad(integrand, y_lo, y_hi,
                                 lambda y: max(lo[0], -(geo.to_t(y) - a)),
                                 lambda y: min(hi[0], geo.to_t(y) - a), epsabs=1e-8, epsrel=1e-7)
    return value


def test_weak_form_n1_at_pole_and_brute_force():
    phi = BumpTestFunction([0.1, -1.2], [0.5, 0.5])
    report = weak_form_residual(KernelChoice("Eminus", 1), phi)
    assert report.passed
    assert report.residual <= 1e-7
    assert report.target == pytest.approx(float(phi(np.array([0.0, -1.0]))), rel=1e-15)
    assert report.volume == pytest.approx(brute_force_pairing_n1(phi), abs=1e-5)


def test_weak_form_disjoint_bump():
    phi = BumpTestFunction([3.0, -0.5], [0.3, 0.3])
    report = weak_form_residual(KernelChoice("Eminus", 1), phi)
    assert report.target == 0.0
    assert abs(report.total) <= 1e-12
    assert report.passed


@pytest.mark.parametrize("name", ["Eminus", "Fminus", "Fplus"])
def test_weak_form_n2(name):
    center = [0.1, -0.05, -1.1] if name == "Eminus" else [0.1, -0.05, 0.05]
    phi = BumpTestFunction(center, [0.5, 0.5, 0.4])
    report = weak_form_residual(KernelChoice(name, 2), phi)
    assert report.passed, report.as_record()


def test_etilde_null_straddling_characteristics():
    phi = BumpTestFunction([A + 0.3, -0.4], [0.5, 0.4])
    for part in ("real", "imag"):
        report = weak_form_residual(KernelChoice("Etilde", 1, part=part), phi)
        assert report.target == 0.0
        assert report.passed, report.as_record()


def test_etilde_across_y_zero_needs_analytic_continuation():
    phi = BumpTestFunction([0.0, 0.0], [0.4, 0.3])
    principal = weak_form_residual(KernelChoice("Etilde", 1), phi)
    analytic = weak_form_residual(KernelChoice("Etilde", 1, continuation="analytic"), phi)
    assert principal.residual > 0.05
    assert analytic.residual <= 1e-8


def test_etilde_analytic_continuation_fails_in_elliptic_half():
    # the continuation jumps on u/v = -1 inside y > 0, where the principal branch is smooth
    phi = BumpTestFunction([0.5, 0.3], [0.3, 0.2])
    principal = weak_form_residual(KernelChoice("Etilde", 1), phi)
    analytic = weak_form_residual(KernelChoice("Etilde", 1, continuation="analytic"), phi)
    assert principal.residual <= 1e-8
    assert analytic.residual > 0.05


def test_report_formats():
    phi = BumpTestFunction([3.0, -0.5], [0.3, 0.3])
    report = weak_form_residual(KernelChoice("Fminus", 1), phi)
    record = dict(line.split("=", 1) for line in report.as_record().splitlines())
    assert record["status"] == "PASS"
    assert record["kernel"] == "Fminus(n=1)"
    assert report.csv_row().split(",")[0] == "Fminus(n=1)"
    assert len(report.csv_row().split(",")) == len(report.CSV_HEADER.split(","))


def test_weak_form_dimension_mismatch():
    with pytest.raises(DomainError):
        weak_form_residual(KernelChoice("Eminus", 2), BumpTestFunction([0.0, -1.0], [0.5, 0.5]))


def test_kernel_choice_validation():
    with pytest.raises(DomainError):
        KernelChoice("Enone", 1)
    with pytest.raises(DomainError):
        KernelChoice("Eplus", 2)
    with pytest.raises(DomainError):
        KernelChoice("Etilde", 1, part="abs")
    with pytest.raises(DomainError):
        KernelChoice("Etilde", 1, continuation="other")
    assert KernelChoice("Etilde", 1, branch="upper").label == "Etilde(n=1,upper,real,principal)"


def test_quad_config_validation():
    with pytest.raises(DomainError):
        QuadConfig(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadConfig(tol=-1.0)
    with pytest.raises(DomainError):
        QuadConfig(max_level=2)
    assert QuadConfig().threshold(2) == 1e-3
    assert QuadConfig().threshold(3) == 1e-2
    assert QuadConfig(tol=1e-6).threshold(3) == 1e-6
    with pytest.raises(DomainError):
        QuadConfig(excision=0.5).check_excision(BumpTestFunction([0.0] * 4, 0.3))


# ---------------------------------------------------------- b -> 0 limit


@pytest.mark.parametrize("n", [1, 2])
def test_limit_check_monotone(n):
    points = [np.append(np.zeros(n), -2.0), np.append(np.full(n, 0.1), -1.5)]
    table = limit_check(n, points, [-0.5, -0.1, -0.01])
    assert table.all_monotone
    assert not table.skipped
    assert all(gaps[-1] < 1e-2 for _, gaps in table.rows)


def test_limit_check_skips_points():
    table = limit_check(1, [[0.0, -0.3], [5.0, -1.0]], [-0.5, -0.1])
    reasons = [note for _, note in table.skipped]
    assert reasons[0].startswith("outside D_(b,-)")
    assert reasons[1] == "not interior to D_-"
    assert not table.all_monotone
