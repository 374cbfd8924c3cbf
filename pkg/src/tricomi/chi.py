"""The homogeneous distributions χ_q(s) = s₊^q / Γ(q+1) and their calculus.

For q > -1, χ_q is the locally integrable function above.  For other q it is
defined by analytic continuation, which amounts to integrating by parts:

    ⟨χ_q, φ⟩ = (-1)^k ∫₀^∞ s^(q+k) φ⁽ᵏ⁾(s) ds / Γ(q+k+1)

for any k with q + k > -1.  At negative integers this collapses to
χ_{-m} = δ^(m-1).

The module also pairs χ_q composed with the cone function
k(x, t) = (t - t0)² - |x|² (inside the forward cone, 0 outside) against test
functions on ℝ^(n+1), and pairs surface layers δ^(q)(P) on level sets.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _quadrature as quad
from .errors import DegeneracyError, DomainError, QuadratureError
from .bump import SeparableField
from .specfun import rgamma

DEFAULT_REL_TOL = 1e-12
DEFAULT_ABS_TOL = 1e-14


def _depth(q):
    """Smallest k >= 0 with q + k > -1.

    Deeper integration by parts is equally exact in theory but differentiates
    the test function more often, and each extra derivative of a narrow bump
    costs several digits to cancellation.
    """
    return max(0, math.floor(-1.0 - q) + 1)


def chi_pointwise(q, s):
    """s^q / Γ(q+1) for s > 0 and 0 for s <= 0 (requires q > -1)."""
    if q <= -1:
        raise DomainError("χ_q is not a function for q <= -1")
    s = np.asarray(s, dtype=float)
    pos = s > 0
    out = np.zeros_like(s)
    out[pos] = s[pos] ** q * rgamma(q + 1.0)
    return out if out.ndim else float(out)


def _half_line_moment(q, k, phi, rel_tol, abs_tol):
    lo, hi = phi.support
    lo = max(lo, 0.0)
    if hi <= lo:
        return 0.0, 0.0
    expo = q + k

    def integrand(s):
        return s ** expo * phi.derivative(k, s)

    value, err, _ = quad.tanh_sinh(integrand, lo, hi, rel_tol=rel_tol, abs_tol=abs_tol)
    sign = -1.0 if k % 2 else 1.0
    return sign * value * rgamma(expo + 1.0), err * abs(rgamma(expo + 1.0))


def chi_action_1d(q, phi, depth=None, check=True, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """⟨χ_q, φ⟩ for a one-dimensional test function and any real q.

    ``phi`` needs ``support`` (an interval) and ``derivative(k, s)``.  With
    ``check=True`` the pairing is also computed one integration-by-parts
    step deeper and the two must agree, otherwise :class:`QuadratureError`
    is raised carrying the discrepancy.
    """
    k = _depth(q) if depth is None else int(depth)
    if q + k <= -1:
        raise DomainError(f"depth {k} is too shallow for q = {q}")
    value, err = _half_line_moment(q, k, phi, rel_tol, abs_tol)
    if check:
        other, err2 = _half_line_moment(q, k + 1, phi, rel_tol, abs_tol)
        scale = max(abs(value), abs(other), _scale(phi))
        gap = abs(value - other)
        if gap > 1e3 * (err + err2) + 1e-11 * scale:
            raise QuadratureError(f"χ_{q} pairing depends on the depth: {value} vs {other}", estimate=gap)
    return value


def _scale(phi):
    norm = getattr(phi, "sup_norm", None)
    if norm is None:
        norm = getattr(getattr(phi, "base", None), "sup_norm", 1.0)
    return norm


def euler_identity_residual(q, phi):
    """|⟨χ_{q-1}, s·φ⟩ - q⟨χ_q, φ⟩|, which vanishes because s χ_{q-1} = q χ_q."""
    from .bump import MonomialTimes

    lhs = chi_action_1d(q - 1.0, MonomialTimes(phi, 1))
    rhs = q * chi_action_1d(q, phi)
    return abs(lhs - rhs)


def derivative_relation_residual(q, phi):
    """|⟨χ_q, φ⟩ + ⟨χ_{q+1}, φ'⟩|, from χ_q = d/ds χ_{q+1}.

    The right side is integrated one step deeper than the left so the two
    sides are genuinely different integrals.
    """
    lhs = chi_action_1d(q, phi)
    rhs = -chi_action_1d(q + 1.0, _Derivative(phi), depth=_depth(q + 1.0) + 1)
    return abs(lhs - rhs)


class _Derivative:
    """φ' as a one-dimensional test function."""

    def __init__(self, base):
        self.base = base

    @property
    def support(self):
        return self.base.support

    @property
    def sup_norm(self):
        return _scale(self.base)

    def derivative(self, k, s):
        return self.base.derivative(k + 1, s)


# ------------------------------------------------- χ_q(k) on ℝ^(n+1)


def _radial_range(box, n):
    """[min, max] of |x| over the spatial part of a support box."""
    lower, upper = box
    lo, hi = lower[:n], upper[:n]
    nearest = np.clip(0.0, lo, hi)
    farthest = np.maximum(np.abs(lo), np.abs(hi))
    if n == 1:
        # signed line: fold onto r = |x|
        return float(np.abs(nearest).max()), float(farthest.max())
    return float(np.linalg.norm(nearest)), float(np.linalg.norm(farthest))


def _radial_breaks(box, n, r_min, r_max, extra=()):
    """Sorted outer breakpoints in r: the range ends, box event radii and ``extra``."""
    lower, upper = box
    events = quad.event_radii(lower[:n], upper[:n]) if n > 1 else np.empty(0)
    pts = np.concatenate([events, np.asarray(extra, dtype=float)])
    pts = pts[(pts > r_min) & (pts < r_max)]
    return np.concatenate([[r_min], np.unique(pts), [r_max]])


def _pair_with_cone(weight_fn, n, t0, field, rel_tol, abs_tol, level):
    """∫∫ weight_fn(r, t) r^(n-1) f̄(r, t) over the cone t - t0 > r.

    The radius is the outer variable so the sphere integrals of the spatial
    factors are computed once per radial node; t runs from the cone (or the
    bottom of the box) to the top of the box.
    """
    lower, upper = field.box
    t_lo, t_hi = max(lower[n], t0), upper[n]
    r_min, r_max = _radial_range(field.box, n)
    r_max = min(r_max, t_hi - t0)
    if t_hi <= t_lo or r_max <= r_min:
        return quad.NestedResult(0.0, 0.0, 0, 0)
    breaks = _radial_breaks(field.box, n, r_min, r_max, extra=[t_lo - t0])

    def inner_breaks(r):
        return [np.maximum(t0 + r, t_lo), np.full_like(r, t_hi)]

    def outer(r):
        return field.spatial_means(r, level) * r ** (n - 1)

    def integrand(t, r, factors):
        return weight_fn(r, t) * np.sum(factors * field.temporal(t), axis=0)

    return quad.nested_integral(breaks, inner_breaks, integrand, rel_tol, abs_tol,
                                min_level=2, max_level=7, outer_factors=outer)


def chi_of_k_action(q, n, t0, phi, rel_tol=1e-10, abs_tol=1e-13, angular_level=None, field=None):
    """∫ χ_q(k(x, t)) φ(x, t) dx dt with k the cone function of apex (0, t0).

    ``phi`` is a product bump on ℝ^(n+1) (time last).  ``field`` (a
    :class:`~tricomi.bump.SeparableField`) replaces φ as the integrated
    function, e.g. a derivative of φ.
    """
    if q <= -1:
        raise DomainError("chi_of_k_action covers q > -1; use layer pairings below that")
    target = SeparableField.of(phi) if field is None else field

    def weight(r, t):
        lag = t - t0
        return chi_pointwise(q, (lag - r) * (lag + r))

    return _pair_with_cone(weight, n, t0, target, rel_tol, abs_tol, angular_level).value


def wave_operator(phi, points, n):
    """□φ = φ_tt - Δ_x φ with exact bump derivatives (time last)."""
    eye = np.eye(n + 1, dtype=int)
    out = phi.partial(2 * eye[n], points)
    for i in range(n):
        out = out - phi.partial(2 * eye[i], points)
    return out


def _unit_orders(dim, axis, k):
    orders = [0] * dim
    orders[axis] = k
    return tuple(orders)


def wave_field(phi):
    """□φ = φ_tt - Δ_x φ as a separable field."""
    d = phi.dim
    spec = [(1.0, _unit_orders(d, d - 1, 2), None)]
    spec += [(-1.0, _unit_orders(d, i, 2), None) for i in range(d - 1)]
    return SeparableField.from_bump(phi, spec)


def time_derivative_field(phi):
    """∂φ/∂t as a separable field."""
    return SeparableField.from_bump(phi, [(1.0, _unit_orders(phi.dim, phi.dim - 1, 1), None)])


def _lag_field(phi, t0):
    return SeparableField.from_bump(phi, [(1.0, (0,) * phi.dim, lambda t, h: 2.0 * (t - t0) * h)])


@dataclass(frozen=True)
class EpdResiduals:
    """Relative residuals of the two identities used to build the EPD series."""

    box: float
    time: float

    def __iter__(self):
        return iter((self.box, self.time))


def _relative(x, y, floor):
    return abs(x - y) / max(abs(x), abs(y), floor)


def epd_box_identity_residual(j, n, t0, phi, rel_tol=1e-10, angular_level=None):
    """Residuals of □χ_p(k) = 4j χ_{p-1}(k) and ∂_t χ_p(k) = 2(t-t0) χ_{p-1}(k).

    Here p = j + 1/2 - n/2, and both orders must exceed -1 so that each side
    is a locally integrable function.
    """
    p = j + 0.5 - 0.5 * n
    if p - 1.0 <= -1.0:
        raise DomainError(f"j = {j} gives χ order {p - 1} <= -1 for n = {n}")
    opts = dict(rel_tol=rel_tol, angular_level=angular_level)
    box_lhs = chi_of_k_action(p, n, t0, phi, field=wave_field(phi), **opts)
    box_rhs = 4.0 * j * chi_of_k_action(p - 1.0, n, t0, phi, **opts)
    time_lhs = -chi_of_k_action(p, n, t0, phi, field=time_derivative_field(phi), **opts)
    time_rhs = chi_of_k_action(p - 1.0, n, t0, phi, field=_lag_field(phi, t0), **opts)
    floor = 1e-12 * phi.sup_norm
    return EpdResiduals(_relative(box_lhs, box_rhs, floor), _relative(time_lhs, time_rhs, floor))


# ------------------------------------------------------------ surface layers


class AffineSurface1D:
    """Level set of P(s) = slope·s + offset on the real line."""

    def __init__(self, slope, offset):
        if slope == 0:
            raise DegeneracyError("affine level function has zero slope")
        self.slope = float(slope)
        self.offset = float(offset)

    def scaled(self, factor):
        return AffineSurface1D(self.slope * factor, self.offset * factor)

    def trace(self, level, coeff, func):
        """Co-area density at P = level: coeff·func / |P'|."""
        s = (level - self.offset) / self.slope
        return coeff(s) * func(np.asarray(s)) / abs(self.slope)


class ConeSurface:
    """Level sets of P = scale·(ρ(y)² - |x|²), ρ(y) = |t(y) - a|, on y < b.

    With ``scale = 1`` this is (t - a)² - |x|² written in (x, y); it equals
    -u/9 and vanishes on the boundary of the conoid D_{b,-}.
    """

    def __init__(self, source, n, scale=1.0):
        if scale <= 0:
            raise DomainError("scale must be positive")
        self.source = source
        self.n = int(n)
        self.scale = float(scale)

    def scaled(self, factor):
        return ConeSurface(self.source, self.n, self.scale * factor)

    def radius(self, y):
        t = 2.0 * (-np.asarray(y, dtype=float)) ** 1.5 / 3.0
        return np.abs(t - self.source.a)

    def trace(self, level, y, coeff, field, angular_level=None):
        """Slice density at P = level: coeff·r^(n-1)·f̄(r, y) / |∂P/∂r|."""
        rho = self.radius(y)
        r2 = rho * rho - level / self.scale
        r = np.sqrt(np.maximum(r2, 0.0))
        mean = field.sphere_mean(r, y, angular_level)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = coeff(r, y) * r ** (self.n - 1) * mean / (2.0 * self.scale * r)
        return np.where(r2 > 0, out, 0.0)

    def heights(self, radii):
        """Heights y < 0 where the slice radius ρ(y) equals one of ``radii``."""
        a = self.source.a
        t = np.concatenate([a - np.asarray(radii), a + np.asarray(radii)])
        t = t[t > 0]
        return -(1.5 * t) ** (2.0 / 3.0)


def _richardson_derivative(fn, order, h):
    """order-th derivative at 0 from central differences at h, h/2, h/4."""
    if order == 0:
        return fn(0.0)
    from math import comb

    def central(step):
        acc = 0.0
        for i in range(order + 1):
            acc = acc + (-1) ** i * comb(order, i) * fn((order / 2.0 - i) * step)
        return acc / step ** order

    d1, d2, d3 = central(h), central(h / 2.0), central(h / 4.0)
    # error expansion in even powers of h
    e1 = (4.0 * d2 - d1) / 3.0
    e2 = (4.0 * d3 - d2) / 3.0
    return (16.0 * e2 - e1) / 15.0


def delta_layer_action(order, n, coeff, surface, phi, field=None, excision=1e-4,
                       rel_tol=1e-10, abs_tol=1e-13, angular_level=None, fd_step=1e-3):
    """⟨coeff·δ^(order)(P), g⟩ for the level set P = 0 of ``surface``.

    ``g`` is ``phi`` unless ``field`` is given, in which case ``phi`` only
    provides the support box.  For :class:`ConeSurface` the integrated
    function is a :class:`~tricomi.bump.SeparableField`; for
    :class:`AffineSurface1D` any callable on ℝ.  The pairing is reduced to
    slices: on each slice P is a function of a single variable and

        ⟨δ^(q)(P), g⟩ = (-1)^q d^q/dσ^q [co-area density at P = σ] at σ = 0,

    with the σ-derivatives taken by Richardson-extrapolated central
    differences (step ``fd_step`` times the slice scale).  For the cone the
    slices are y = const, the apex is excised over a height
    ``excision * t0`` and the excised strip is restored by linear
    extrapolation from two excision heights.
    """
    order = int(order)
    if order < 0:
        raise DomainError("layer order must be nonnegative")
    sign = -1.0 if order % 2 else 1.0
    if isinstance(surface, AffineSurface1D):
        target = phi if field is None else field
        coeff_fn = coeff if callable(coeff) else (lambda s: coeff)
        step = fd_step * max(1.0, abs(surface.offset))
        return sign * float(_richardson_derivative(
            lambda lvl: surface.trace(lvl, coeff_fn, target), order, step))
    if not isinstance(surface, ConeSurface):
        raise DomainError("unsupported surface type")
    target = SeparableField.of(phi) if field is None else field
    coeff_fn = coeff if callable(coeff) else (lambda r, y: coeff)
    source = surface.source
    lower, upper = target.box
    y_lo = lower[n]
    y_top = min(upper[n], source.b)
    if y_top <= y_lo:
        return 0.0
    r_min, r_max = _radial_range(target.box, n)
    radial = _radial_breaks(target.box, n, r_min, r_max)
    cuts = surface.heights(radial)

    def integrand(y):
        rho = surface.radius(y)
        scale_s = surface.scale * rho * rho
        inside = (rho >= r_min) & (rho <= r_max)
        out = np.zeros_like(y)
        if not inside.any():
            return out
        yi, si = y[inside], scale_s[inside]

        def density(tau):
            # levels measured in units of the slice scale
            return surface.trace(tau * si, yi, coeff_fn, target, angular_level)

        out[inside] = _richardson_derivative(density, order, fd_step) / si ** order
        return out

    def strip_value(cut):
        hi = min(y_top, source.b - cut)
        if hi <= y_lo:
            return 0.0
        pts = np.concatenate([[y_lo], cuts[(cuts > y_lo) & (cuts < hi)], [hi]])
        pts = np.unique(pts)
        total = 0.0
        for lo_piece, hi_piece in zip(pts[:-1], pts[1:]):
            value, _, _ = quad.tanh_sinh(integrand, lo_piece, hi_piece, rel_tol=rel_tol,
                                         abs_tol=abs_tol, min_level=2, max_level=8)
            total += value
        return total

    eps = excision * source.a
    if source.b - eps <= y_lo or excision <= 0:
        return sign * strip_value(0.0)
    full, half = strip_value(eps), strip_value(0.5 * eps)
    return sign * (2.0 * half - full)
