"""Quadrature rules shared by :mod:`tricomi.chi` and :mod:`tricomi.verify`.

Everything here is built on the tanh-sinh (double exponential) rule, which
tolerates algebraic and logarithmic endpoint singularities, so integrands
only need to be split at the curves where they are singular.
"""
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

HALF_PI = 0.5 * np.pi
ROUNDING = 1e-12
WHOLE_START = 0.7390851332151607
POINT_BUDGET = 1_000_000
# tanh-sinh level of the angular rules; about 1e-11 (n = 2) and 1e-6 (n = 3) relative
DEFAULT_ANGULAR_LEVEL = {2: 7, 3: 4}
# the tabulated n = 3 product rule affords a finer polar rule
RING_LEVEL_BOOST = 1


@lru_cache(maxsize=64)
def _unit_rule(level, tmax):
    """Nodes of the tanh-sinh rule on [-1, 1] at step 2**-level.

    Returns ``(side, gap, weight)``: the node is ``-1 + gap`` when
    ``side < 0``, ``1 - gap`` when ``side > 0`` and ``0`` when ``side == 0``.
    Keeping the gap to the nearest end separate avoids rounding nodes onto
    a singular endpoint.
    """
    h = 2.0 ** -level
    count = int(np.ceil(tmax / h))
    t = h * np.arange(-count, count + 1)
    inner = HALF_PI * np.sinh(t)
    gap = np.exp(-np.abs(inner)) / np.cosh(inner)
    weight = h * HALF_PI * np.cosh(t) / np.cosh(inner) ** 2
    side = np.sign(t)
    for arr in (side, gap, weight):
        arr.flags.writeable = False
    return side, gap, weight


def tanh_sinh_nodes(lo, hi, level, tmax=3.5):
    """Nodes and weights on each interval ``[lo_i, hi_i]``; shapes (M, K)."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))[:, None]
    hi = np.atleast_1d(np.asarray(hi, dtype=float))[:, None]
    side, gap, weight = _unit_rule(level, tmax)
    half = 0.5 * (hi - lo)
    offset = half * gap
    nodes = np.where(side < 0, lo + offset, np.where(side > 0, hi - offset, lo + half))
    return nodes, half * weight


def tanh_sinh_anchored(lo, hi, level, tmax=3.5):
    """Like :func:`tanh_sinh_nodes`, plus each node as ``anchor + offset``.

    The anchor is the nearer interval end and the offset is exact, so
    integrands can resolve singular endpoints below the rounding of the node.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))[:, None]
    hi = np.atleast_1d(np.asarray(hi, dtype=float))[:, None]
    side, gap, weight = _unit_rule(level, tmax)
    half = 0.5 * (hi - lo)
    anchor = np.where(side > 0, hi, lo)
    offset = np.where(side < 0, half * gap, np.where(side > 0, -half * gap, half))
    return anchor + offset, half * weight, anchor, offset


def tanh_sinh(f, lo, hi, rel_tol=1e-12, abs_tol=1e-15, min_level=3, max_level=9, tmax=3.5):
    """Integrate a vectorised ``f`` over [lo, hi] with level doubling.

    Returns ``(value, error_estimate, nodes_used)``.  Non-finite integrand
    values (which can only occur at nodes within rounding of a singular
    endpoint) are dropped.
    """
    if hi == lo:
        return 0.0, 0.0, 0
    previous = None
    used = 0
    for level in range(min_level, max_level + 1):
        x, w = tanh_sinh_nodes(lo, hi, level, tmax)
        vals = np.asarray(f(x[0]), dtype=float)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        value = float(np.dot(vals, w[0]))
        # cancellation floor: rounding in the sum is relative to ∫|f|
        floor = ROUNDING * float(np.dot(np.abs(vals), w[0]))
        used += x.shape[1]
        if previous is not None:
            err = abs(value - previous)
            if err <= max(abs_tol, rel_tol * abs(value), floor):
                return value, err, used
        previous = value
    raise QuadratureError(f"tanh-sinh did not converge on [{lo}, {hi}]", estimate=err)


@lru_cache(maxsize=64)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=32)
def full_sphere_rule(dim, order):
    """Directions and weights integrating over the unit sphere S^(dim-1) ⊂ ℝ^dim."""
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if dim == 2:
        count = 2 * order
        ang = 2 * np.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1), np.full(count, 2 * np.pi / count)
    gx, gw = gauss_legendre(order)
    theta = 0.5 * np.pi * (gx + 1.0)
    wt = 0.5 * np.pi * gw * np.sin(theta) ** (dim - 2)
    sub_dirs, sub_w = full_sphere_rule(dim - 1, order)
    dirs = np.concatenate([
        np.cos(theta)[:, None, None] * np.ones((1, sub_dirs.shape[0], 1)),
        np.sin(theta)[:, None, None] * sub_dirs[None, :, :],
    ], axis=-1).reshape(-1, dim)
    return dirs, np.outer(wt, sub_w).ravel()


def _orthonormal_frame(axis):
    """Rotation whose first column is ``axis`` (unit vector)."""
    dim = axis.shape[0]
    basis = np.eye(dim)
    basis[:, 0] = axis
    q, _ = np.linalg.qr(basis)
    if q[:, 0] @ axis < 0:
        q = -q
    return q


def cap_rule(dim, order, axis, cos_limit):
    """Rule for the cap {ω ∈ S^(dim-1): ω·axis >= cos_limit} for each cos_limit.

    ``cos_limit`` is an array of shape (M,).  Returns directions (M, K, dim)
    and weights (M, K).  The polar angle uses Gauss-Legendre on
    [0, θ_max] with the Jacobian sin^(dim-2)θ, which is smooth.
    """
    cos_limit = np.clip(np.atleast_1d(cos_limit), -1.0, 1.0)
    theta_max = np.arccos(cos_limit)
    gx, gw = gauss_legendre(order)
    theta = 0.5 * theta_max[:, None] * (gx[None, :] + 1.0)
    wt = 0.5 * theta_max[:, None] * gw[None, :]
    frame = _orthonormal_frame(axis)
    if dim == 1:
        dirs = np.array([[1.0], [-1.0]])
        return np.broadcast_to(dirs, (cos_limit.shape[0], 2, 1)), np.ones((cos_limit.shape[0], 2))
    sub_dirs, sub_w = full_sphere_rule(dim - 1, order)
    wt = wt * np.sin(theta) ** (dim - 2)
    local = np.concatenate([
        np.broadcast_to(np.cos(theta)[:, :, None, None], theta.shape + (sub_dirs.shape[0], 1)),
        np.sin(theta)[:, :, None, None] * sub_dirs[None, None, :, :],
    ], axis=-1)
    dirs = local @ frame.T
    weights = wt[:, :, None] * sub_w[None, None, :]
    m = cos_limit.shape[0]
    return dirs.reshape(m, -1, dim), weights.reshape(m, -1)


@dataclass
class NestedResult:
    value: float
    error: float
    nodes: int
    level: int
    converged: bool = True


class _FactorCache:
    """Outer factors keyed by node value.

    The dyadic tanh-sinh nodes of one level reappear bit for bit at the next
    level, so factors (typically sphere means) are computed once per node.
    """

    def __init__(self, fn):
        self.fn = fn
        self.keys = np.empty(0)
        self.values = None

    def __call__(self, nodes):
        fresh = np.setdiff1d(nodes, self.keys)
        if fresh.size:
            vals = np.atleast_2d(np.asarray(self.fn(fresh), dtype=float))
            keys = np.concatenate([self.keys, fresh])
            values = vals if self.values is None else np.concatenate([self.values, vals], axis=1)
            order = np.argsort(keys)
            self.keys, self.values = keys[order], values[:, order]
        return self.values[:, np.searchsorted(self.keys, nodes)]


def nested_integral(outer_breaks, inner_breaks, integrand, rel_tol, abs_tol,
                    min_level=3, max_level=6, tmax=3.5, chunk=200_000, outer_factors=None,
                    anchored=False):
    """∫ d(outer) ∫ d(inner) integrand with per-outer-node inner breakpoints.

    Parameters
    ----------
    outer_breaks : sequence of float
        Sorted outer breakpoints; consecutive pairs form the outer segments.
    inner_breaks : callable
        ``inner_breaks(o)`` maps an array of outer nodes to a list of arrays
        of the same shape: breakpoints per node, the first and last being
        the integration limits.  Interior points are clipped into the limits
        and empty segments are skipped.
    integrand : callable
        ``integrand(i, o)`` on flat arrays, or ``integrand(i, o, f)`` when
        ``outer_factors`` is given; ``f`` then holds the columns of
        ``outer_factors(o)`` (shape (K, M)) matching each inner node.
    outer_factors : callable, optional
        Expensive factors depending on the outer variable only; they are
        cached across levels.
    anchored : bool
        Also pass ``anchor=`` and ``offset=`` keywords, the inner nodes split
        as in :func:`tanh_sinh_anchored`.

    The error estimate is the change between two successive levels; the
    last level is returned with ``converged=False`` if the tolerance is not
    met.
    """
    outer_breaks = np.asarray(outer_breaks, dtype=float)
    lo_o, hi_o = outer_breaks[:-1], outer_breaks[1:]
    keep = hi_o > lo_o
    lo_o, hi_o = lo_o[keep], hi_o[keep]
    cache = _FactorCache(outer_factors) if outer_factors is not None else None
    previous = None
    total_nodes = 0
    err = np.inf
    for level in range(min_level, max_level + 1):
        on, ow = tanh_sinh_nodes(lo_o, hi_o, level, tmax)
        on, ow = on.ravel(), ow.ravel()
        factors = cache(on) if cache is not None and on.size else None
        cuts = np.stack([np.broadcast_to(np.asarray(c, dtype=float), on.shape) for c in inner_breaks(on)], axis=-1)
        first = cuts[:, :1]
        last = np.maximum(first, cuts[:, -1:])
        interior = np.sort(np.clip(cuts[:, 1:-1], first, last), axis=-1)
        cuts = np.concatenate([first, interior, last], axis=-1)
        seg_lo = cuts[:, :-1].ravel()
        seg_hi = cuts[:, 1:].ravel()
        seg_o = np.repeat(np.arange(on.shape[0]), cuts.shape[1] - 1)
        live = seg_hi > seg_lo
        seg_lo, seg_hi, seg_o = seg_lo[live], seg_hi[live], seg_o[live]
        inner = np.zeros(on.shape[0])
        if seg_lo.size:
            iN, iw, i_anchor, i_offset = tanh_sinh_anchored(seg_lo, seg_hi, level, tmax)
            per_seg = iN.shape[1]
            step = max(1, chunk // per_seg)
            for start in range(0, seg_lo.size, step):
                sl = slice(start, start + step)
                owner = np.repeat(seg_o[sl], per_seg)
                args = (iN[sl].ravel(), on[owner])
                if factors is not None:
                    args = args + (factors[:, owner],)
                extra = {"anchor": i_anchor[sl].ravel(), "offset": i_offset[sl].ravel()} if anchored else {}
                vals = np.asarray(integrand(*args, **extra), dtype=float).reshape(-1, per_seg)
                vals = np.where(np.isfinite(vals), vals, 0.0)
                np.add.at(inner, seg_o[sl], np.sum(vals * iw[sl], axis=1))
            total_nodes += iN.size
        value = float(np.dot(inner, ow))
        if previous is not None:
            err = abs(value - previous)
            if err <= max(abs_tol, rel_tol * abs(value)):
                return NestedResult(value, err, total_nodes, level, True)
        previous = value
    return NestedResult(value, err, total_nodes, max_level, False)


def circle_arcs(rho, lower, upper):
    """Arcs of the circles |x| = rho_i (x ∈ ℝ²) lying inside a rectangle.

    Returns ``(start, stop, owner, whole)``: flat arrays of angular limits,
    the index of the circle each arc belongs to, and whether the arc is the
    full circle (which calls for the periodic trapezoid rule instead).  The arc ends are where the
    circle crosses the rectangle edges, so an integrand vanishing to all
    orders on the edges is smooth and flat at both ends of every arc.
    """
    rho = np.ravel(np.asarray(rho, dtype=float))
    m = rho.shape[0]
    cand = np.full((m, 8), np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, c in enumerate((lower[0], upper[0])):
            ok = np.abs(c) < rho
            alpha = np.arccos(np.where(ok, c / rho, 0.0))
            cand[:, 2 * i] = np.where(ok, alpha, np.nan)
            cand[:, 2 * i + 1] = np.where(ok, -alpha, np.nan)
        for i, c in enumerate((lower[1], upper[1])):
            ok = np.abs(c) < rho
            beta = np.arcsin(np.where(ok, c / rho, 0.0))
            cand[:, 4 + 2 * i] = np.where(ok, beta, np.nan)
            cand[:, 5 + 2 * i] = np.where(ok, np.pi - beta, np.nan)
    cand = np.sort(np.mod(cand, 2 * np.pi), axis=1)  # NaN sorts last
    count = np.sum(np.isfinite(cand), axis=1)
    stop = np.concatenate([cand[:, 1:], np.full((m, 1), np.nan)], axis=1)
    rows = np.nonzero(count)[0]
    stop[rows, count[rows] - 1] = cand[rows, 0] + 2 * np.pi
    # circles without crossings lie wholly inside or wholly outside; the
    # start angle is arbitrary and chosen away from likely tangencies
    whole = count == 0
    cand[whole, 0] = WHOLE_START
    stop[whole, 0] = WHOLE_START + 2 * np.pi
    mid = 0.5 * (cand + stop)
    px, py = rho[:, None] * np.cos(mid), rho[:, None] * np.sin(mid)
    live = (np.isfinite(mid) & (stop > cand)
            & (px > lower[0]) & (px < upper[0]) & (py > lower[1]) & (py < upper[1]))
    owner = np.broadcast_to(np.arange(m)[:, None], cand.shape)
    full = np.broadcast_to(whole[:, None], cand.shape)
    return cand[live], stop[live], owner[live], full[live]


def _polar_ranges(r, lower, upper):
    """Polar-angle intervals θ (about the x3 axis) where |x| = r meets a box in ℝ³.

    Two constraints are combined: r cos θ must lie in the x3 range and
    r sin θ between the nearest and farthest distances from the x3 axis to
    the (x1, x2) rectangle.  Returns ``(start, stop, owner)`` flat arrays.
    """
    r = np.ravel(np.asarray(r, dtype=float))
    safe = np.maximum(r, 1e-300)
    gap = np.maximum(np.maximum(lower[:2], -upper[:2]), 0.0)
    near = float(np.linalg.norm(gap))
    far = float(np.linalg.norm(np.maximum(np.abs(lower[:2]), np.abs(upper[:2]))))
    theta_lo = np.arccos(np.clip(upper[2] / safe, -1.0, 1.0))
    theta_hi = np.arccos(np.clip(lower[2] / safe, -1.0, 1.0))
    s_lo = np.arcsin(np.clip(near / safe, 0.0, 1.0))
    s_hi = np.arcsin(np.clip(far / safe, 0.0, 1.0))
    starts = np.stack([np.maximum(theta_lo, s_lo), np.maximum(theta_lo, np.pi - s_hi)], axis=1)
    stops = np.stack([np.minimum(theta_hi, s_hi), np.minimum(theta_hi, np.pi - s_lo)], axis=1)
    # when the whole equator reaches the rectangle the two ranges join
    joined = far >= r
    stops[joined, 0] = stops[joined, 1]
    starts[joined, 1] = stops[joined, 1]
    live = (stops > starts) & (r[:, None] > 0) & (near < r[:, None])
    starts = np.where(live, starts, 0.0)
    stops = np.where(live, stops, 0.0)
    # split where latitude circles touch an edge line or pass a corner
    events = np.arcsin(np.clip(_edge_distances(lower, upper)[None, :] / safe[:, None], 0.0, 1.0))
    events = np.concatenate([events, np.pi - events], axis=1)
    pieces = []
    for k in range(2):
        inner = np.clip(events, starts[:, k:k + 1], stops[:, k:k + 1])
        cuts = np.sort(np.concatenate([starts[:, k:k + 1], inner, stops[:, k:k + 1]], axis=1), axis=1)
        pieces.append((cuts[:, :-1], cuts[:, 1:]))
    starts = np.concatenate([p[0] for p in pieces], axis=1)
    stops = np.concatenate([p[1] for p in pieces], axis=1)
    keep = stops > starts
    owner = np.broadcast_to(np.arange(r.shape[0])[:, None], starts.shape)
    return starts[keep], stops[keep], owner[keep]


def _edge_distances(lower, upper):
    """Distances at which circles about the origin pass a side or corner of a rectangle."""
    return event_radii(lower[:2], upper[:2])


def event_radii(lower, upper):
    """Radii at which spheres about the origin pass a face, edge or corner of a box.

    These are the critical values of |x| restricted to the faces of every
    dimension: a corner always counts, a higher-dimensional face only when
    the origin projects into its interior.  The sphere mean of a
    box-supported function is smooth but not analytic in r there, so they
    make useful quadrature breakpoints.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    dim = lower.shape[0]
    straddles = (lower < 0) & (upper > 0)
    ends = np.stack([lower, upper], axis=-1)
    out = set()
    for k in range(1, dim + 1):
        for axes in itertools.combinations(range(dim), k):
            free = [i for i in range(dim) if i not in axes]
            if not all(straddles[i] for i in free):
                continue
            for picks in itertools.product((0, 1), repeat=k):
                out.add(float(np.linalg.norm([ends[a, p] for a, p in zip(axes, picks)])))
    return _merge_close(np.array(sorted(out)))


def _merge_close(values, rel=1e-12):
    """Drop sorted values within rounding of their predecessor."""
    if values.size < 2:
        return values
    scale = max(1.0, float(np.abs(values).max()))
    keep = np.concatenate([[True], np.diff(values) > rel * scale])
    return values[keep]


def _arc_nodes(start, stop, whole, level, tmax):
    """tanh-sinh on proper arcs, the periodic trapezoid rule on full circles."""
    ang, w = tanh_sinh_nodes(start, stop, level, tmax)
    if np.any(whole):
        count = ang.shape[1]
        ang[whole] = start[whole, None] + 2 * np.pi * np.arange(count) / count
        w[whole] = 2 * np.pi / count
    return ang, w


def _circle_nodes(rho, lower, upper, level, tmax):
    """Flat nodes (x1, x2), weights and owning circle for arcs inside a rectangle."""
    start, stop, owner, whole = circle_arcs(rho, lower, upper)
    if start.size == 0:
        empty = np.empty(0)
        return empty, empty, empty, np.empty(0, dtype=int)
    ang, w = _arc_nodes(start, stop, whole, level, tmax)
    rad = rho[owner][:, None]
    own = np.broadcast_to(owner[:, None], ang.shape).ravel()
    return (rad * np.cos(ang)).ravel(), (rad * np.sin(ang)).ravel(), w.ravel(), own


def _ring_nodes(r, lower, upper, level):
    """Latitude rings of the spheres |x| = r_i inside a box in ℝ³.

    Returns ring radius, ring height, ring weight (sin θ dθ) and owner.
    """
    start, stop, owner = _polar_ranges(r, lower, upper)
    if start.size == 0:
        empty = np.empty(0)
        return empty, empty, empty, np.empty(0, dtype=int)
    # split points inside the polar range are not flat zeros: full tail
    theta, wt = tanh_sinh_nodes(start, stop, level, 3.5)
    own = np.broadcast_to(owner[:, None], theta.shape).ravel()
    theta, wt = theta.ravel(), (wt * np.sin(theta)).ravel()
    rad = r[own]
    return rad * np.sin(theta), rad * np.cos(theta), wt, own


def _ring_batches(ring_count, level, tmax):
    per_ring = 4 * _unit_rule(level, tmax)[0].shape[0]
    step = max(1, POINT_BUDGET // per_ring)
    return [slice(first, first + step) for first in range(0, ring_count, step)]


def _circle_mean(func, lower, upper, r, level, tmax):
    x1, x2, w, own = _circle_nodes(r, lower, upper, level, tmax)
    vals = np.asarray(func(np.stack([x1, x2], axis=-1)), dtype=float) if x1.size else x1
    return np.bincount(own, weights=vals * w, minlength=r.shape[0])


def _sphere3_mean(func, lower, upper, r, level, tmax):
    ring_r, height, ring_w, ring_own = _ring_nodes(r, lower, upper, level)
    out = np.zeros(r.shape[0])
    for sl in _ring_batches(ring_r.shape[0], level, tmax):
        x1, x2, w, ring = _circle_nodes(ring_r[sl], lower[:2], upper[:2], level, tmax)
        if x1.size == 0:
            continue
        pts = np.stack([x1, x2, height[sl][ring]], axis=-1)
        vals = np.asarray(func(pts), dtype=float)
        out += np.bincount(ring_own[sl][ring], weights=vals * w * ring_w[sl][ring], minlength=r.shape[0])
    return out


def _cap_mean(func, lower, upper, r, n, order, budget):
    centre = 0.5 * (lower + upper)
    reach = float(np.linalg.norm(0.5 * (upper - lower)))
    dist = float(np.linalg.norm(centre))
    axis = centre / dist if dist > 0 else np.eye(n)[0]
    if dist > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            cos_limit = (r * r + dist * dist - reach * reach) / (2.0 * r * dist)
        cos_limit = np.where(r > 0, np.nan_to_num(cos_limit, nan=-1.0), -1.0)
    else:
        cos_limit = np.full(r.shape, -1.0)
    out = np.zeros(r.shape[0])
    probe_dirs, _ = cap_rule(n, order, axis, cos_limit[:1])
    step = max(1, budget // probe_dirs.shape[1])
    for start in range(0, r.shape[0], step):
        sl = slice(start, start + step)
        dirs, weights = cap_rule(n, order, axis, cos_limit[sl])
        out[sl] = np.sum(func(r[sl, None, None] * dirs) * weights, axis=1)
    return out


def sphere_mean(func, box, r, n, order=24, level=None, tmax=2.0, chunk=500):
    """∫_{S^(n-1)} func(rω) dω for an array of radii.

    ``func`` takes points of shape (..., n) and vanishes, with all
    derivatives, outside ``box = (lower, upper)`` (corners in ℝ^n).

    * n = 1: the "sphere" is the pair {+1, -1} with unit weights.
    * n = 2, 3: only the exact arcs (n = 3: polar ranges about the x3 axis,
      then arcs of each latitude circle) inside the box are integrated, with
      tanh-sinh at ``level`` (default per dimension in
      ``DEFAULT_ANGULAR_LEVEL``); the arc ends are flat zeros of the integrand.
    * n >= 4: Gauss-Legendre of ``order`` on the cap that can meet the box.
      The default order gives about 1e-3 relative error for a bump whose box
      is small against the sphere; raise it for tighter results.
    """
    r = np.ravel(np.asarray(r, dtype=float))
    lower, upper = (np.asarray(c, dtype=float)[:n] for c in box)
    out = np.zeros(r.shape[0])
    if r.size == 0:
        return out
    if n == 1:
        return (np.asarray(func(r[:, None]), dtype=float)
                + np.asarray(func(-r[:, None]), dtype=float))
    if n > 3:
        return _cap_mean(func, lower, upper, r, n, order, POINT_BUDGET)
    if level is None:
        level = DEFAULT_ANGULAR_LEVEL[n]
    if n == 2:
        rule = _circle_mean
        step = max(1, POINT_BUDGET // (4 * _unit_rule(level, tmax)[0].shape[0]))
    else:
        rule, step = _sphere3_mean, chunk
    for start in range(0, r.shape[0], step):
        sl = slice(start, start + step)
        out[sl] = rule(func, lower, upper, r[sl], level, tmax)
    return out


class _FactorTable:
    """Values of 1-D factors at one set of coordinates, each computed once."""

    def __init__(self, coords):
        self.coords = coords
        self.values = {}

    def __getitem__(self, fn):
        key = id(fn)
        if key not in self.values:
            self.values[key] = (fn, np.asarray(fn(self.coords), dtype=float))
        return self.values[key][1]


def _product(tables, term):
    out = tables[0][term[0]]
    for table, fn in zip(tables[1:], term[1:]):
        out = out * table[fn]
    return out


def product_sphere_means(terms, box, r, n, order=24, level=None, tmax=2.0, tables=None):
    """Sphere integrals of sums of axis products, one row per term.

    Each term is a tuple of n one-dimensional callables (f_1, ..., f_n) and
    stands for Π f_i(x_i); the product must vanish with all derivatives
    outside ``box``.  Factors shared between terms are evaluated once per
    node.  For n = 3 the rings of latitude about the x3 axis are integrated
    through a :class:`RingTable` per planar factor pair (kept in ``tables``
    between calls), so each sphere reduces to a 1-D polar integral.
    Returns an array of shape (len(terms), len(r)).
    """
    r = np.ravel(np.asarray(r, dtype=float))
    terms = [tuple(t) for t in terms]
    lower, upper = (np.asarray(c, dtype=float)[:n] for c in box)
    out = np.zeros((len(terms), r.shape[0]))
    if r.size == 0 or not terms:
        return out
    if n == 1 or n > 3:
        for k, term in enumerate(terms):
            def joint(pts, term=term):
                return _product([_FactorTable(pts[..., i]) for i in range(n)], term)
            out[k] = sphere_mean(joint, box, r, n, order=order, level=level, tmax=tmax)
        return out
    if level is None:
        level = DEFAULT_ANGULAR_LEVEL[n]
    if n == 2:
        step = max(1, POINT_BUDGET // (4 * _unit_rule(level, tmax)[0].shape[0]))
        for first in range(0, r.shape[0], step):
            sl = slice(first, first + step)
            x1, x2, w, own = _circle_nodes(r[sl], lower, upper, level, tmax)
            if x1.size == 0:
                continue
            tables = (_FactorTable(x1), _FactorTable(x2))
            for k, term in enumerate(terms):
                out[k, sl] = np.bincount(own, weights=_product(tables, term) * w, minlength=r[sl].shape[0])
        return out
    if tables is None:
        tables = {}
    start, stop, owner = _polar_ranges(r, lower, upper)
    if start.size == 0:
        return out
    theta, wt = tanh_sinh_nodes(start, stop, level + RING_LEVEL_BOOST, 3.5)
    own = np.broadcast_to(owner[:, None], theta.shape).ravel()
    theta, wt = theta.ravel(), (wt * np.sin(theta)).ravel()
    rad = r[own]
    ring_r, height = rad * np.sin(theta), rad * np.cos(theta)
    axial = _FactorTable(height)
    for k, term in enumerate(terms):
        key = (id(term[0]), id(term[1]))
        if key not in tables:
            tables[key] = RingTable(term[0], term[1], lower[:2], upper[:2])
        around = tables[key](ring_r)
        out[k] = np.bincount(own, weights=around * axial[term[2]] * wt, minlength=r.shape[0])
    return out


class RingTable:
    """ρ ↦ ∮ f1(ρ cos φ) f2(ρ sin φ) dφ as piecewise Chebyshev interpolants.

    The circle integral of a product supported in a rectangle is a smooth
    function of the radius alone, analytic between the radii where circles
    pass a side or corner of the rectangle.  It is sampled once at
    ``nodes`` Chebyshev points per piece with a fine arc rule, after which
    each ring of a sphere costs one interpolation instead of an arc
    quadrature.
    """

    def __init__(self, f1, f2, lower, upper, nodes=128, level=6, tmax=2.0):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        near = float(np.linalg.norm(np.maximum(np.maximum(lower, -upper), 0.0)))
        far = float(np.linalg.norm(np.maximum(np.abs(lower), np.abs(upper))))
        events = event_radii(lower, upper)
        breaks = _merge_close(np.concatenate([[near], events[(events > near) & (events < far)], [far]]))
        self.breaks = breaks
        self.near, self.far = near, far
        x = np.cos(np.pi * (np.arange(nodes) + 0.5) / nodes)
        self.coefs = []
        for a, b in zip(breaks[:-1], breaks[1:]):
            rho = a + 0.5 * (b - a) * (x + 1.0)
            x1, x2, w, own = _circle_nodes(rho, lower, upper, level, tmax)
            vals = np.bincount(own, weights=f1(x1) * f2(x2) * w, minlength=nodes) if x1.size else np.zeros(nodes)
            self.coefs.append(np.polynomial.chebyshev.chebfit(x, vals, nodes - 1))

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros(rho.shape)
        piece = np.searchsorted(self.breaks, rho, side="right") - 1
        piece = np.where(rho == self.far, len(self.coefs) - 1, piece)
        for i, coef in enumerate(self.coefs):
            mask = piece == i
            if mask.any():
                a, b = self.breaks[i], self.breaks[i + 1]
                out[mask] = np.polynomial.chebyshev.chebval(2.0 * (rho[mask] - a) / (b - a) - 1.0, coef)
        return out
