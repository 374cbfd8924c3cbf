"""Compactly supported smooth test functions with exact derivatives.

The one-dimensional profile is ``ψ(s) = exp(1 - 1/(1 - s²))`` on ``|s| < 1``
(so ``ψ(0) = 1``) and zero elsewhere.  Its derivatives are

    ψ⁽ᵏ⁾(s) = P_k(s) (1 - s²)^(-2k) ψ(s),
    P_{k+1} = (1 - s²)² P_k' + (4k s (1 - s²) - 2s) P_k,

so every derivative is a polynomial times the profile, evaluated without
any finite differencing.
"""
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from . import _kernels
from . import _quadrature as quad
from .errors import DomainError


@lru_cache(maxsize=None)
def profile_polynomial(k):
    """Coefficients (highest power first) of the polynomial P_k."""
    if k < 0:
        raise DomainError("derivative order must be nonnegative")
    coef = np.array([1.0])  # lowest power first while building
    one_minus = np.array([1.0, 0.0, -1.0])
    for j in range(k):
        term = P.polymul(P.polymul(one_minus, one_minus), P.polyder(coef))
        factor = P.polysub(P.polymul([0.0, 4.0 * j], one_minus), [0.0, 2.0])
        coef = P.polyadd(term, P.polymul(factor, coef))
    return tuple(np.trim_zeros(coef[::-1], "f")) or (0.0,)


def profile(s, k=0):
    """k-th derivative of the unit profile ψ at ``s``."""
    return _kernels.bump_profile(s, np.array(profile_polynomial(k)), k)


class BumpTestFunction:
    """Product bump ``amplitude * Π_i ψ((x_i - center_i) / radius_i)``.

    Parameters
    ----------
    center : array_like
        Centre in ℝ^d; its length fixes the dimension.
    radius : float or array_like
        Half-width of the support along each axis.  The support is the
        closed box ``|x_i - center_i| <= radius_i``, i.e. the ball of that
        radius in the max-norm.
    amplitude : float
        Value at the centre, which is also the sup-norm.

    Points are passed as arrays whose last axis has length ``d``; for
    ``d == 1`` plain scalars and 1-D arrays of positions are accepted.
    """

    def __init__(self, center, radius, amplitude=1.0):
        self.center = np.atleast_1d(np.asarray(center, dtype=float)).copy()
        self.dim = self.center.shape[0]
        self.radius = np.broadcast_to(np.asarray(radius, dtype=float), (self.dim,)).copy()
        if np.any(self.radius <= 0):
            raise DomainError("bump radius must be positive")
        self.amplitude = float(amplitude)
        self._factors = {}
        self.center.flags.writeable = False
        self.radius.flags.writeable = False

    def __repr__(self):
        return (f"BumpTestFunction(center={self.center.tolist()}, "
                f"radius={self.radius.tolist()}, amplitude={self.amplitude})")

    @property
    def sup_norm(self):
        return abs(self.amplitude)

    @property
    def box(self):
        """(lower, upper) corners of the support."""
        return self.center - self.radius, self.center + self.radius

    @property
    def support(self):
        """Support interval for the one-dimensional case."""
        if self.dim != 1:
            raise DomainError("support interval is only defined for d = 1")
        lo, hi = self.box
        return float(lo[0]), float(hi[0])

    def _coords(self, points):
        pts = np.asarray(points, dtype=float)
        if self.dim == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        if pts.shape[-1] != self.dim:
            raise DomainError(f"points must have last axis {self.dim}")
        return (pts - self.center) / self.radius

    def partial(self, orders, points):
        """Mixed partial derivative with the given order along each axis."""
        orders = tuple(int(o) for o in np.broadcast_to(orders, (self.dim,)))
        scaled = self._coords(points)
        out = np.full(scaled.shape[:-1], self.amplitude)
        for axis, k in enumerate(orders):
            out = out * profile(scaled[..., axis], k) / self.radius[axis] ** k
        return out

    def __call__(self, points):
        return self.partial((0,) * self.dim, points)

    def derivative(self, k, s):
        """k-th derivative of a one-dimensional bump at ``s``."""
        if self.dim != 1:
            raise DomainError("derivative(k, s) is only defined for d = 1")
        return self.partial((k,), np.asarray(s, dtype=float)[..., None])

    def contains(self, points):
        """True where the point lies strictly inside the support box."""
        return np.all(np.abs(self._coords(points)) < 1.0, axis=-1)

    def factor(self, axis, k=0):
        """The k-th derivative of the 1-D factor along ``axis`` as a callable.

        The amplitude rides on axis 0, so the product of the factors over all
        axes is the bump.  Repeated requests return the same object.
        """
        key = (int(axis), int(k))
        if key not in self._factors:
            centre, width = self.center[axis], self.radius[axis]
            scale = (self.amplitude if axis == 0 else 1.0) / width ** k

            def fn(s):
                return scale * profile((np.asarray(s, dtype=float) - centre) / width, k)

            self._factors[key] = fn
        return self._factors[key]

    def laplacian(self, points):
        """Sum of the pure second derivatives over all axes."""
        eye = np.eye(self.dim, dtype=int)
        return sum(self.partial(2 * eye[i], points) for i in range(self.dim))


class MonomialTimes:
    """One-dimensional test function ``s**power * base(s)``.

    Derivatives follow from the Leibniz rule, so this wrapper can be paired
    with χ_q exactly like a bump.
    """

    def __init__(self, base, power=1):
        self.base = base
        self.power = int(power)

    @property
    def support(self):
        return self.base.support

    def derivative(self, k, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        coef = 1.0
        # d^i/ds^i s^p = p!/(p-i)! s^(p-i)
        for i in range(min(k, self.power) + 1):
            falling = np.prod(np.arange(self.power - i + 1, self.power + 1, dtype=float))
            out = out + coef * falling * s ** (self.power - i) * self.base.derivative(k - i, s)
            coef = coef * (k - i) / (i + 1)
        return out

    def __call__(self, s):
        return self.derivative(0, s)


class SeparableField:
    """A finite sum of axis products Σ_k Π_i f_ki(x_i) on ℝ^(n+1), t last.

    Parameters
    ----------
    terms : sequence of tuples
        Each term holds n+1 one-dimensional callables, the last acting on t.
    box : (lower, upper)
        Corners in ℝ^(n+1) outside which every spatial product vanishes with
        all derivatives (the time factors need not).

    Pairings with kernels that depend on x only through |x| need the sphere
    integrals of the spatial products alone, once per radius, and factors
    shared between terms are evaluated once per node.
    """

    def __init__(self, terms, box):
        self.terms = tuple(tuple(t) for t in terms)
        lower, upper = box
        self.box = (np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))
        self.n = self.box[0].shape[0] - 1
        self._ring_tables = {}
        if any(len(t) != self.n + 1 for t in self.terms):
            raise DomainError(f"every term needs {self.n + 1} factors")

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        total = 0.0
        for term in self.terms:
            prod = 1.0
            for i, fn in enumerate(term):
                prod = prod * fn(pts[..., i])
            total = total + prod
        return total

    def spatial_means(self, r, level=None):
        """∫_{S^(n-1)} Π_{i<=n} f_ki(rω_i) dω for each term; shape (K, len(r))."""
        lower, upper = self.box
        spatial = [t[:-1] for t in self.terms]
        return quad.product_sphere_means(spatial, (lower[:-1], upper[:-1]), r, self.n,
                                         level=level, tables=self._ring_tables)

    def temporal(self, t):
        """Time factors of each term; shape (K,) + t.shape."""
        t = np.asarray(t, dtype=float)
        return np.stack([np.broadcast_to(term[-1](t), t.shape) for term in self.terms])

    def sphere_mean(self, r, t, level=None):
        """∫_{S^(n-1)} f(rω, t) dω for matching arrays r and t."""
        return np.sum(self.spatial_means(r, level) * self.temporal(np.ravel(t)), axis=0)

    @classmethod
    def from_bump(cls, phi, spec):
        """Field Σ coef · (∂^orders φ with time factor reshaped) for a product bump.

        ``spec`` lists ``(coef, orders, time_map)`` with ``orders`` the
        derivative order per axis; ``time_map(t, h)`` (optional) turns the
        time factor values ``h`` at ``t`` into the term's time factor.
        """
        d = phi.dim
        terms = []
        for coef, orders, time_map in spec:
            factors = [phi.factor(i, orders[i]) for i in range(d)]
            base = factors[-1]
            if time_map is None and coef == 1.0:
                time = base
            else:
                def time(t, base=base, coef=coef, time_map=time_map):
                    h = base(t)
                    return coef * (h if time_map is None else time_map(np.asarray(t, dtype=float), h))
            terms.append(tuple(factors[:-1]) + (time,))
        return cls(terms, phi.box)

    @classmethod
    def of(cls, phi):
        """The product bump ``phi`` itself as a one-term field."""
        return cls.from_bump(phi, [(1.0, (0,) * phi.dim, None)])
