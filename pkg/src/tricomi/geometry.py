"""Coordinates and regions attached to the operator y Δ_x + ∂²/∂y².

In the hyperbolic half-space y < 0 the substitution t = 2(-y)^{3/2}/3 turns
the characteristic conoid through the source (0, b) into the ordinary cone
t - t0 > |x| with t0 = 2(-b)^{3/2}/3.  The two quadratic forms

    u = 9(|x|² - a²) + 12 a (-y)^{3/2} + 4y³,
    v = 9(|x|² - a²) - 12 a (-y)^{3/2} + 4y³,      a = t0,

satisfy (t - t0)² - |x|² = -u/9 and (t + t0)² - |x|² = -v/9.

Spatial points are arrays whose last axis holds the n coordinates; plain
scalars are read as points of ℝ¹.
"""
import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import Branch

BOUNDARY_TOL = 1e-12


def _array(x):
    return np.asarray(x, dtype=float)


def spatial_radius(x):
    """|x| for points given with the spatial axis last (scalars: ℝ¹)."""
    x = _array(x)
    if x.ndim == 0:
        return np.abs(x)
    return np.sqrt(np.sum(x * x, axis=-1))


def to_t(y):
    """t = 2(-y)^{3/2}/3 for y < 0."""
    y = _array(y)
    if np.any(y >= 0):
        raise DomainError("to_t needs y < 0")
    return 2.0 * (-y) ** 1.5 / 3.0


def to_y(t):
    """Inverse of :func:`to_t`: y = -(3t/2)^{2/3} for t > 0."""
    t = _array(t)
    if np.any(t <= 0):
        raise DomainError("to_y needs t > 0")
    return -(1.5 * t) ** (2.0 / 3.0)


def jacobian(t):
    """dy/dt = -(2/3)^{1/3} t^{-1/3}, the Jacobian of (x, t) -> (x, y)."""
    t = _array(t)
    if np.any(t <= 0):
        raise DomainError("jacobian needs t > 0")
    return -((2.0 / 3.0) ** (1.0 / 3.0)) * t ** (-1.0 / 3.0)


@dataclass(frozen=True)
class SourcePoint:
    """Source (0, b) with b < 0; ``a`` is its image t0 = 2(-b)^{3/2}/3."""

    b: float

    def __post_init__(self):
        if not self.b < 0:
            raise DomainError("source point needs b < 0")

    @property
    def a(self):
        return 2.0 * (-self.b) ** 1.5 / 3.0

    t0 = a

    @classmethod
    def from_a(cls, a):
        if not a > 0:
            raise DomainError("a must be positive")
        return cls(-(1.5 * a) ** (2.0 / 3.0))


class RegionTag(enum.Enum):
    DMinusInterior = "DMinusInterior"
    DMinusBoundary = "DMinusBoundary"
    DPlus = "DPlus"
    EllipticHalf = "EllipticHalf"


def k_val(x, t, t0):
    """Cone function: (t-t0)² - |x|² inside t - t0 > |x|, else 0."""
    r = spatial_radius(x)
    lag = _array(t) - t0
    return np.where(lag > r, lag * lag - r * r, 0.0)


def uv_radial(r, y, a):
    """(u, v) from |x| = r for y <= 0, in the factored characteristic form.

    Uses u = 9(r - (t-a))(r + (t-a)) and v = 9(r - (t+a))(r + (t+a)) with
    t = 2(-y)^{3/2}/3, which stays accurate near the curves u = 0, v = 0.
    """
    r = _array(r)
    t = 2.0 * (-np.minimum(_array(y), 0.0)) ** 1.5 / 3.0
    lag, lead = t - a, t + a
    return 9.0 * (r - lag) * (r + lag), 9.0 * (r - lead) * (r + lead)


def uv(x, y, a):
    """Real forms (u, v) for y <= 0."""
    y = _array(y)
    if np.any(y > 0):
        raise DomainError("uv is real only for y <= 0; use complex_uv")
    return uv_radial(spatial_radius(x), y, a)


def complex_uv(x, y, a, branch=Branch.LOWER):
    """(u, v) for y > 0 with (-y)^{3/2} = -i·sign·y^{3/2}.

    ``LOWER`` is the continuation from below the cut of u/v and gives
    Im u = -12 a y^{3/2}; ``UPPER`` gives the conjugate.  v = conj(u).
    """
    y = _array(y)
    if np.any(y <= 0):
        raise DomainError("complex_uv needs y > 0")
    sign = Branch.parse(branch).sign
    r = spatial_radius(x)
    real = 9.0 * (r * r - a * a) + 4.0 * y ** 3
    imag = 12.0 * a * y ** 1.5 * sign
    return real + 1j * imag, real - 1j * imag


def characteristic_coordinates(x, y):
    """(ℓ, m) = (x + 2(-y)^{3/2}/3, x - 2(-y)^{3/2}/3) for signed x ∈ ℝ, y <= 0.

    In these coordinates u = 9(ℓ - a)(m + a) and v = 9(m - a)(ℓ + a).
    """
    x = _array(x)
    t = 2.0 * (-_array(y)) ** 1.5 / 3.0
    return x + t, x - t


def cone_radius(y, a):
    """|t - a|: the radius of the slice {u = 0} at height y (no range check)."""
    return np.abs(2.0 * (-np.minimum(_array(y), 0.0)) ** 1.5 / 3.0 - a)


def cone_boundary_parametrization(source, y):
    """Sphere radius ρ(y) of the conoid boundary u = 0 at height y <= b."""
    y = _array(y)
    if np.any(y > source.b):
        raise DomainError("the conoid boundary only exists for y <= b")
    radicand = source.a ** 2 - (12.0 * source.a * (-y) ** 1.5 + 4.0 * y ** 3) / 9.0
    if np.any(radicand < -1e-12 * max(1.0, source.a ** 2)):
        raise DomainError("negative radicand: outside the conoid range")
    return cone_radius(y, source.a)


def classify_radial(r, y, source):
    """Region codes for arrays (r, y); values are :class:`RegionTag` members."""
    r, y = np.broadcast_arrays(_array(r), _array(y))
    u, v = uv_radial(r, y, source.a)
    scale = np.maximum(1.0, np.abs(v))
    tags = np.full(r.shape, RegionTag.DPlus, dtype=object)
    tags[y > 0] = RegionTag.EllipticHalf
    hyper = y <= 0
    tags[hyper & (u < 0) & (y < source.b)] = RegionTag.DMinusInterior
    tags[hyper & (np.abs(u) <= BOUNDARY_TOL * scale) & (y <= source.b)] = RegionTag.DMinusBoundary
    return tags


def classify(x, y, source):
    """RegionTag of a single point (x, y) relative to the source (0, b)."""
    tag = classify_radial(spatial_radius(x), y, source)
    return tag.item() if tag.ndim == 0 else tag


def in_minus_support(r, y, source):
    """Boolean mask of the open region D_{b,-}: u < 0 and y < b."""
    u, _ = uv_radial(r, y, source.a)
    return (u < 0) & (_array(y) < source.b)


def origin_form(x, y):
    """q = 9|x|² + 4y³, whose sign separates D₋ (q < 0) from D₊ (q > 0)."""
    r = spatial_radius(x)
    return origin_form_radial(r, y)


def origin_form_radial(r, y):
    """9r² + 4y³ factored as 9(r - s)(r + s) for y < 0 with s = 2(-y)^{3/2}/3."""
    r, y = _array(r), _array(y)
    s = 2.0 * (-np.minimum(y, 0.0)) ** 1.5 / 3.0
    return np.where(y < 0, 9.0 * (r - s) * (r + s), 9.0 * r * r + 4.0 * y ** 3)


# Anchored evaluation.  Quadrature nodes next to a singular curve are passed
# as y = anchor + offset with the offset exact; forms vanishing on the curve
# are then rebuilt from an exact increment instead of from the rounded y.

SNAP = 8.0 * np.finfo(float).eps


def _t_increment(anchor, offset):
    """(t at the anchor, t(anchor + offset) - t(anchor)) without cancellation."""
    anchor, offset = _array(anchor), _array(offset)
    w_c = np.maximum(-anchor, 0.0)
    w = np.maximum(-(anchor + offset), 0.0)
    dw = np.where((anchor < 0) & (anchor + offset < 0), -offset, w - w_c)
    root_sum = np.sqrt(w) + np.sqrt(w_c)
    with np.errstate(invalid="ignore", divide="ignore"):
        d_pow = np.where(root_sum > 0, dw * (w + np.sqrt(w * w_c) + w_c) / root_sum, 0.0)
    return 2.0 * w_c ** 1.5 / 3.0, 2.0 * d_pow / 3.0


def _snap(value, scale):
    return np.where(np.abs(value) <= SNAP * scale, 0.0, value)


def _difference_of_squares(r, shift, t_c, dt):
    """9(r² - (t - shift)²) with t = t_c + dt, factor by factor."""
    scale = r + t_c + abs(shift)
    minus = _snap(r - (t_c - shift), scale) - dt
    plus = _snap(r + (t_c - shift), scale) + dt
    return 9.0 * minus * plus


def uv_radial_anchored(r, anchor, offset, a):
    """(u, v) at (r, anchor + offset) for y <= 0, exact near u = 0 and v = 0."""
    r = _array(r)
    t_c, dt = _t_increment(anchor, offset)
    return _difference_of_squares(r, a, t_c, dt), _difference_of_squares(r, -a, t_c, dt)


def origin_form_anchored(r, anchor, offset):
    """9r² + 4y³ at y = anchor + offset, exact near the curve 9r² + 4y³ = 0."""
    r = _array(r)
    y = _array(anchor) + _array(offset)
    t_c, dt = _t_increment(anchor, offset)
    lower = _difference_of_squares(r, 0.0, t_c, dt)
    return np.where(y < 0, lower, 9.0 * r * r + 4.0 * y ** 3)
