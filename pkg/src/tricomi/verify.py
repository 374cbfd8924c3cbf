"""Weak-form certification of the fundamental solutions.

A locally integrable kernel E is a fundamental solution relative to (0, b)
when ⟨E, Tφ⟩ = φ(0, b) for every test function φ, T = y Δ_x + ∂²/∂y² being
formally self-adjoint.  The pairing is computed in (r, y) = (|x|, y): the
outer variable is r, with the sphere integrals of the spatial factors of Tφ
computed once per radius, and the inner variable is y, split at every curve
where some kernel is singular or jumps.  For odd n the surface layers of E_-
are added through :func:`tricomi.chi.delta_layer_action`.
"""
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _quadrature as quad
from . import fundsol as fs
from . import geometry as geo
from .bump import SeparableField
from .chi import _radial_range, _unit_orders, delta_layer_action
from .errors import DomainError
from .specfun import Branch

KERNELS = ("Eminus", "Eplus", "Etilde", "Fminus", "Fplus")


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature knobs for :func:`weak_form_residual`.

    ``tol`` is the pass threshold relative to ‖φ‖∞ (by default 1e-3, and
    1e-2 from n = 3 on where the surface layers enter); ``rel_tol``/``abs_tol``
    (the latter also relative to ‖φ‖∞) steer the level doubling.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-8
    max_level: int = 7
    excision: float = 1e-4
    boundary_substitution: bool = True
    tol: float | None = None
    angular_level: int | None = None

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0 or (self.tol is not None and self.tol <= 0):
            raise DomainError("tolerances must be positive")
        if self.max_level < 3:
            raise DomainError("max_level must be at least 3")

    def threshold(self, n):
        if self.tol is not None:
            return self.tol
        return 1e-3 if n <= 2 else 1e-2

    def check_excision(self, phi):
        if self.excision * 1.0 >= float(np.min(phi.radius)):
            raise DomainError("excision radius must be smaller than the bump radius")


@dataclass(frozen=True)
class KernelChoice:
    """Which kernel to pair, in which dimension, and which part of complex values."""

    name: str
    n: int
    b: float = -1.0
    branch: Branch = Branch.LOWER
    part: str = "real"
    continuation: str = "principal"

    def __post_init__(self):
        if self.name not in KERNELS:
            raise DomainError(f"unknown kernel {self.name!r}; expected one of {KERNELS}")
        if self.part not in ("real", "imag"):
            raise DomainError("part must be 'real' or 'imag'")
        if self.continuation not in fs.CONTINUATIONS:
            raise DomainError(f"continuation must be one of {fs.CONTINUATIONS}")
        if self.name in ("Eplus", "Etilde") and self.n != 1:
            raise DomainError(f"{self.name} is only available for n = 1")
        object.__setattr__(self, "branch", Branch.parse(self.branch))
        fs.Parity.of(self.n)

    @property
    def spec(self):
        return fs.KernelSpec.make(self.n, self.b, self.branch)

    @property
    def label(self):
        extra = ""
        if self.name in ("Eplus", "Etilde"):
            extra = f",{self.branch.name.lower()},{self.part},{self.continuation}"
        return f"{self.name}(n={self.n}{extra})"

    @property
    def anchored(self):
        """Whether the density has a strong singularity on a curve and wants exact offsets."""
        return self.name in ("Fminus", "Fplus") or (self.name == "Eminus" and self.n % 2 == 0)

    def density(self, r, y, anchor=None, offset=None):
        a = self.spec.source.a
        if self.name == "Eminus":
            return fs.E_minus_radial(self.n, r, y, a, anchor, offset)
        if self.name == "Fminus":
            return fs.F_minus_radial(self.n, r, y, anchor, offset)
        if self.name == "Fplus":
            return fs.F_plus_radial(self.n, r, y, anchor, offset)
        evaluate = fs.E_plus_radial if self.name == "Eplus" else fs.tilde_E_radial
        values = evaluate(r, y, a, self.branch, self.continuation)
        return values.real if self.part == "real" else values.imag

    def target(self, phi):
        """φ at the pole of the kernel, or 0 for null solutions and imaginary parts."""
        if self.name == "Etilde" or self.part == "imag":
            return 0.0
        y0 = self.b if self.name in ("Eminus", "Eplus") else 0.0
        return float(phi(np.append(np.zeros(self.n), y0)))

    def singular_exponent(self):
        """Exponent of the worst power singularity at a support boundary."""
        if self.name in ("Fminus", "Fplus"):
            return 1.0 / 3.0 - 0.5 * self.n
        if self.name == "Eminus" and self.n % 2 == 0:
            return 0.5 - 0.5 * self.n
        return 0.0


@dataclass
class VerifyReport:
    kernel: str
    target: float
    volume: float
    layers: list = field(default_factory=list)
    error_estimate: float = 0.0
    nodes: int = 0
    wall_time: float = 0.0
    bound: float = 0.0
    converged: bool = True
    note: str = ""

    @property
    def total(self):
        return self.volume + sum(self.layers)

    @property
    def residual(self):
        return abs(self.total - self.target)

    @property
    def passed(self):
        return bool(self.converged and self.residual <= self.bound)

    @property
    def status(self):
        return "PASS" if self.passed else "FAILED"

    def as_record(self):
        """key=value lines."""
        rows = [
            ("kernel", self.kernel),
            ("status", self.status),
            ("target", f"{self.target:.17g}"),
            ("volume", f"{self.volume:.17g}"),
        ]
        rows += [(f"layer{j}", f"{v:.17g}") for j, v in enumerate(self.layers)]
        rows += [
            ("total", f"{self.total:.17g}"),
            ("residual", f"{self.residual:.17g}"),
            ("bound", f"{self.bound:.17g}"),
            ("error_estimate", f"{self.error_estimate:.17g}"),
            ("nodes", str(self.nodes)),
            ("wall_time", f"{self.wall_time:.3f}"),
        ]
        if self.note:
            rows.append(("note", self.note))
        return "\n".join(f"{k}={v}" for k, v in rows)

    CSV_HEADER = "kernel,status,target,volume,layers,total,residual,bound,error_estimate,nodes"

    def csv_row(self):
        layers = ";".join(f"{v:.17g}" for v in self.layers)
        return (f"{self.kernel},{self.status},{self.target:.17g},{self.volume:.17g},{layers},"
                f"{self.total:.17g},{self.residual:.17g},{self.bound:.17g},"
                f"{self.error_estimate:.17g},{self.nodes}")


# ------------------------------------------------------------- operator


def tricomi_apply(phi, points):
    """y Δ_x φ + φ_yy at points of ℝ^(n+1) (y last), with exact bump derivatives."""
    pts = np.asarray(points, dtype=float)
    d = phi.dim
    y = pts[..., d - 1]
    eye = np.eye(d, dtype=int)
    lap = sum(phi.partial(2 * eye[i], pts) for i in range(d - 1))
    return y * lap + phi.partial(2 * eye[d - 1], pts)


def tricomi_field(phi):
    """Tφ as a :class:`~tricomi.bump.SeparableField`."""
    d = phi.dim
    spec = [(1.0, _unit_orders(d, i, 2), lambda y, h: y * h) for i in range(d - 1)]
    spec.append((1.0, _unit_orders(d, d - 1, 2), None))
    return SeparableField.from_bump(phi, spec)


def _line_integral(f, lo, hi):
    value, _, _ = quad.tanh_sinh(f, lo, hi, rel_tol=1e-14, abs_tol=1e-300, max_level=10)
    return value


def green_bilinear_residual(phi, psi):
    """∫ (φ Tψ - ψ Tφ) over ℝ^(n+1) for two product bumps; zero by self-adjointness.

    Every term is a product of one-dimensional integrals, each done to near
    machine precision on the overlap of the supports.
    """
    if phi.dim != psi.dim:
        raise DomainError("bumps live in different dimensions")
    d = phi.dim
    lo = np.maximum(phi.box[0], psi.box[0])
    hi = np.minimum(phi.box[1], psi.box[1])
    if np.any(hi <= lo):
        return 0.0

    def overlap(f, kf, g, kg, axis, weighted=False):
        ff, gg = f.factor(axis, kf), g.factor(axis, kg)
        if weighted:
            return _line_integral(lambda s: s * ff(s) * gg(s), lo[axis], hi[axis])
        return _line_integral(lambda s: ff(s) * gg(s), lo[axis], hi[axis])

    def pairing(f, g):
        # ∫ f·Tg = Σ_i ∫ y f g dy · ∫ f g'' dx_i · Π_{j≠i} ∫ f g dx_j + ∫ f g'' dy · Π_j ∫ f g dx_j
        plain = [overlap(f, 0, g, 0, i) for i in range(d - 1)]
        weighted = overlap(f, 0, g, 0, d - 1, weighted=True)
        total = overlap(f, 0, g, 2, d - 1) * math.prod(plain)
        for i in range(d - 1):
            others = math.prod(plain[j] for j in range(d - 1) if j != i)
            total += weighted * overlap(f, 0, g, 2, i) * others
        return total

    return float(pairing(phi, psi) - pairing(psi, phi))


# ------------------------------------------------------------ weak form


def _y_of_t(t):
    return -(1.5 * np.asarray(t, dtype=float)) ** (2.0 / 3.0)


def _inner_breaks(a, y_lo, y_hi):
    """Per-radius y breakpoints: the curves t = a ± r, t = r - a, t = r, and y = b, y = 0."""
    b = -(1.5 * a) ** (2.0 / 3.0)

    def breaks(r):
        lo = np.full(r.shape, y_lo)
        hi = np.full(r.shape, y_hi)
        curves = [np.full(r.shape, b), np.zeros(r.shape), _y_of_t(a + r), _y_of_t(r)]
        curves.append(np.where(r < a, _y_of_t(np.abs(a - r)), y_lo))
        curves.append(np.where(r > a, _y_of_t(np.abs(r - a)), y_lo))
        return [lo] + curves + [hi]

    return breaks


def _outer_breaks(box, n, a):
    lower, upper = box
    r_min, r_max = _radial_range(box, n)
    if n == 1:
        pts = [abs(lower[0]), abs(upper[0])]
    else:
        pts = list(quad.event_radii(lower[:n], upper[:n]))
    pts.append(a)
    for y_e in (lower[n], upper[n]):
        if y_e < 0:
            t_e = 2.0 * (-y_e) ** 1.5 / 3.0
            pts += [abs(t_e - a), t_e + a, t_e]
    pts = np.array([p for p in pts if r_min < p < r_max])
    return np.concatenate([[r_min], np.unique(pts), [r_max]])


def _origin_finite_part(kernel, field, lower_y, upper_y):
    """Slice-wise subtraction turning ∫ F g dy into its finite part across q = 0.

    For F_± with exponent λ ∈ (-2, -1) the pairing is the value at s = λ of the
    continuation of ∫ |q|^s g.  On the slice |x| = r let y_c be the root of
    q = 0 and d = |y - y_c|; near y_c, |q|^λ g ≈ d^λ H₀ with
    H₀ = (12 y_c²)^λ g(r, y_c).  Subtracting H₀ (d^λ - S^λ/(λ+1)) on the side
    of support (S its length) leaves an integrable remainder with the same
    continued value.  Returns the correction to add to the density times g.
    """
    lam = kernel.singular_exponent()
    sign = -1.0 if kernel.name == "Fminus" else 1.0
    const = fs._origin_constant(kernel.n, sign)

    def correction(y, r, factors, anchor, offset):
        y_c = _y_of_t(r)
        active = (y_c > lower_y) & (y_c < upper_y)
        span = np.where(sign < 0, y_c - lower_y, upper_y - y_c)
        signed = np.where(anchor == y_c, offset, y - y_c)
        dist = np.abs(signed)
        live = active & (sign * signed > 0)
        out = np.zeros(y.shape)
        if live.any():
            yc, fl = y_c[live], factors[:, live]
            h0 = const * (12.0 * yc * yc) ** lam * np.sum(fl * field.temporal(yc), axis=0)
            out[live] = h0 * (dist[live] ** lam - span[live] ** lam / (lam + 1.0))
        return out

    return correction


def volume_pairing(kernel, field, cfg, scale=1.0):
    """∫ K(|x|, y) g(x, y) dx dy for a separable field g, by nested quadrature.

    For the origin kernels with a non-integrable power the integral is
    taken in the finite-part sense of :func:`_origin_finite_part`.
    """
    n = kernel.n
    a = kernel.spec.source.a
    lower, upper = field.box
    outer_breaks = _outer_breaks(field.box, n, a)
    level = cfg.angular_level
    finite_part = None
    if kernel.name in ("Fminus", "Fplus") and kernel.singular_exponent() < -1.0:
        finite_part = _origin_finite_part(kernel, field, lower[n], upper[n])

    def outer(r):
        return field.spatial_means(r, level) * r ** (n - 1)

    def integrand(y, r, factors, anchor=None, offset=None):
        # endpoint nodes can land on a singular curve; the quadrature zeroes non-finite values
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            value = kernel.density(r, y, anchor, offset) * np.sum(factors * field.temporal(y), axis=0)
            if finite_part is not None:
                value = value - finite_part(y, r, factors, anchor, offset)
        return value

    anchored = (cfg.boundary_substitution and kernel.anchored) or finite_part is not None
    return quad.nested_integral(outer_breaks, _inner_breaks(a, lower[n], upper[n]), integrand,
                                cfg.rel_tol, cfg.abs_tol * scale, min_level=3,
                                max_level=cfg.max_level, outer_factors=outer, anchored=anchored)


def weak_form_residual(kernel, phi, cfg=None):
    """⟨K, Tφ⟩ (plus surface layers for odd-n E_-) against the expected value.

    ``kernel`` is a :class:`KernelChoice`; ``phi`` a product bump on ℝ^(n+1)
    with y as its last coordinate.
    """
    cfg = QuadConfig() if cfg is None else cfg
    if phi.dim != kernel.n + 1:
        raise DomainError(f"test function must live in ℝ^{kernel.n + 1}")
    start = time.perf_counter()
    scale = phi.sup_norm
    target = kernel.target(phi)
    bound = cfg.threshold(kernel.n) * scale
    if kernel.singular_exponent() <= -1.0 and kernel.name == "Eminus":
        return VerifyReport(kernel.label, target, math.nan, bound=bound, converged=False,
                            wall_time=time.perf_counter() - start,
                            note="kernel is not locally integrable; finite-part pairing not implemented")
    field_T = tricomi_field(phi)
    result = volume_pairing(kernel, field_T, cfg, scale)
    layers = []
    if kernel.name == "Eminus" and kernel.n % 2 == 1 and kernel.n > 1:
        cfg.check_excision(phi)
        for term in fs.singular_layers(kernel.spec):
            layers.append(delta_layer_action(term.order, kernel.n, term.coefficient, term.surface, phi,
                                             field=field_T, excision=cfg.excision,
                                             rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol * scale,
                                             angular_level=cfg.angular_level))
    note = "" if result.converged else f"volume quadrature stopped at level {result.level}"
    return VerifyReport(kernel.label, target, result.value, layers, result.error, result.nodes,
                        time.perf_counter() - start, bound, result.converged, note)


# ---------------------------------------------------------- limit check


@dataclass
class LimitTable:
    """Gaps |E_-(·; b) - F_-| per point along a sequence b -> 0⁻."""

    n: int
    b_sequence: tuple
    rows: list
    skipped: list

    def monotone(self):
        """Per-point flag: gaps strictly decreasing along the b sequence."""
        return [bool(np.all(np.diff(gaps) < 0)) for _, gaps in self.rows]

    @property
    def all_monotone(self):
        return bool(self.rows) and all(self.monotone())


def limit_check(n, points, b_sequence):
    """Table of |E_-(x, y; 0, b) - F_-(x, y)| for b along ``b_sequence``.

    Points must lie inside D_- and inside every D_{b,-}; others are skipped
    with a note.
    """
    rows, skipped = [], []
    for point in points:
        point = np.asarray(point, dtype=float)
        x, y = point[:-1], float(point[-1])
        r = float(np.linalg.norm(x))
        if geo.origin_form_radial(r, y) >= 0:
            skipped.append((tuple(point), "not interior to D_-"))
            continue
        gaps, note = [], None
        for b in b_sequence:
            source = geo.SourcePoint(b)
            if not geo.in_minus_support(r, y, source):
                note = f"outside D_(b,-) for b = {b}"
                break
            e = float(fs.E_minus_radial(n, r, y, source.a))
            f = float(fs.F_minus_radial(n, r, y))
            gaps.append(abs(e - f))
        if note:
            skipped.append((tuple(point), note))
        else:
            rows.append((tuple(point), np.array(gaps)))
    return LimitTable(n, tuple(b_sequence), rows, skipped)
