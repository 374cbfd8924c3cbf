"""Gamma-family functions and the Gauss hypergeometric function ₂F₁.

``hyp2f1`` accepts real parameters and complex arguments.  It dispatches
between the defining power series, the Pfaff transformation, the connection
formulas around ``z = 1`` and ``z = ∞`` (including the logarithmic case where
``b - a`` is an integer) and, where none of those converges fast enough, a
Taylor continuation of the hypergeometric differential equation.

Points on the branch cut ``[1, ∞)`` need an explicit :class:`Branch`; the
result is then the one-sided limit from that half plane.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, CutError, DomainError

SERIES_RADIUS = 0.8
MAX_TERMS = 10_000
SERIES_TOL = 1e-16
# distance below which a parameter combination counts as "nearly integer"
NEAR_INTEGER = 1e-3

_LANCZOS_G = 6.024680040776729583740234375
_LANCZOS_NUM = np.array([
    0.006061842346248906525783753964555936883222,
    0.5098416655656676188125178644804694509993,
    19.51992788247617482847860966235652136208,
    449.9445569063168119446858607650988409623,
    6955.999602515376140356310115515198987526,
    75999.29304014542649875303443598909137092,
    601859.6171681098786670226533699352302507,
    3481712.15498064590882071018964774556468,
    14605578.08768506808414169982791359218571,
    43338889.32467613834773723740590533316085,
    86363131.28813859145546927288977868422342,
    103794043.1163445451906271053616070238554,
    56906521.91347156388090791033559122686859,
])
_LANCZOS_DEN = np.array([
    1.0, 66.0, 1925.0, 32670.0, 357423.0, 2637558.0, 13339535.0,
    45995730.0, 105258076.0, 150917976.0, 120543840.0, 39916800.0, 0.0,
])
# Bernoulli terms B_2k / 2k for the digamma asymptotic expansion
_DIGAMMA_ASYMP = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760, 1 / 12)


class Branch(enum.IntEnum):
    """Side of a branch cut: ``UPPER`` is the limit from Im > 0."""

    UPPER = 1
    LOWER = -1

    @property
    def sign(self):
        return int(self)

    def flipped(self):
        return Branch(-int(self))

    @classmethod
    def parse(cls, value):
        if value is None or isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().upper()
            aliases = {"UPPERCUT": "UPPER", "LOWERCUT": "LOWER", "+": "UPPER", "-": "LOWER"}
            return cls[aliases.get(key, key)]
        return cls(int(value))


@dataclass(frozen=True)
class HypTriple:
    """Real parameters ``(a, b, c)`` of ₂F₁(a, b; c; z)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise DomainError(f"c = {self.c} is zero or a negative integer")

    def shifted(self, k=1):
        return HypTriple(self.a + k, self.b + k, self.c + k)

    def swapped(self):
        return HypTriple(self.b, self.a, self.c)

    @property
    def excess(self):
        """``c - a - b``, which controls the behaviour at z = 1."""
        return self.c - self.a - self.b


@dataclass(frozen=True)
class BranchedValue:
    """Complex value together with the cut side used to produce it.

    ``branch`` is ``None`` when no fractional power or logarithm of a
    non-positive real had to be resolved.
    """

    value: complex
    branch: Branch | None = None

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def __complex__(self):
        return complex(self.value)

    def conjugate(self):
        flipped = None if self.branch is None else self.branch.flipped()
        return BranchedValue(self.value.conjugate(), flipped)


# --------------------------------------------------------------- gamma family


def _is_nonpositive_integer(x):
    return x <= 0 and x == math.floor(x)


def _sinpi(x):
    """sin(πx) with exact zeros at integers."""
    r = math.fmod(x, 2.0)
    if r == math.floor(r):
        return 0.0
    return math.sin(math.pi * r)


def _lanczos_sum(x):
    if x <= 1.0:
        return np.polyval(_LANCZOS_NUM, x) / np.polyval(_LANCZOS_DEN, x)
    inv = 1.0 / x
    return np.polyval(_LANCZOS_NUM[::-1], inv) / np.polyval(_LANCZOS_DEN[::-1], inv)


def gamma(x):
    """Γ(x) for real ``x``.

    Lanczos rational approximation on x >= 0.5 and the reflection formula
    below that.  Poles raise :class:`DomainError`.
    """
    x = float(x)
    if math.isnan(x):
        return math.nan
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (_sinpi(x) * gamma(1.0 - x))
    if x > 171.7:
        return math.inf
    zgh = x + _LANCZOS_G - 0.5
    scale = float(_lanczos_sum(x))
    half = (zgh / math.e) ** ((x - 0.5) / 2.0)
    return scale * half * half


def rgamma(x):
    """1/Γ(x), equal to zero at the poles of Γ."""
    x = float(x)
    if _is_nonpositive_integer(x):
        return 0.0
    if x < 0.5:
        return _sinpi(x) * gamma(1.0 - x) / math.pi
    return 1.0 / gamma(x)


def digamma(x):
    """ψ(x) = Γ'(x)/Γ(x) for real non-pole ``x``."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise DomainError(f"digamma has a pole at {x}")
    if x < 0.5:
        return digamma(1.0 - x) - math.pi * math.cos(math.pi * x) / _sinpi(x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for coef in reversed(_DIGAMMA_ASYMP):
        series = series * inv2 + coef
    return acc + math.log(x) - 0.5 / x - series * inv2


def psi_over_gamma(x):
    """ψ(x)/Γ(x), continued to its finite limit (-1)^(k+1) k! at x = -k."""
    x = float(x)
    if _is_nonpositive_integer(x):
        k = int(-x)
        return (-1.0) ** (k + 1) * math.factorial(k)
    return digamma(x) * rgamma(x)


def pochhammer(a, j):
    """Rising factorial (a)_j = a (a+1) ... (a+j-1), with (a)_0 = 1."""
    if j < 0 or int(j) != j:
        raise DomainError("pochhammer needs a nonnegative integer length")
    out = 1.0
    for i in range(int(j)):
        out *= a + i
    return out


def beta(x, y):
    return gamma(x) * gamma(y) * rgamma(x + y)


# ------------------------------------------------------------ helper pieces


def _as_triple(p):
    if isinstance(p, HypTriple):
        return p
    return HypTriple(*map(float, p))


def _polynomial_degree(p):
    for par in (p.a, p.b):
        if _is_nonpositive_integer(par):
            return int(-par)
    return None


def _series_coefficients(a, b, c, nterms):
    k = np.arange(nterms - 1, dtype=np.float64)
    ratios = (a + k) * (b + k) / ((c + k) * (k + 1.0))
    return np.concatenate(([1.0], np.cumprod(ratios)))


def _terms_needed(radius):
    if radius <= 0.0:
        return 4
    return int(min(MAX_TERMS, math.ceil(45.0 / -math.log(radius)) + 80))


def _sum_series(coef_fn, w):
    """Sum a power series whose coefficients come from ``coef_fn(nterms)``."""
    w = np.asarray(w, dtype=np.complex128)
    if w.size == 0:
        return w.copy()
    n = _terms_needed(float(np.max(np.abs(w))))
    while True:
        total, used = _kernels.power_series(coef_fn(n), w, SERIES_TOL)
        if (used >= 0).all():
            return total
        if n >= MAX_TERMS:
            raise ConvergenceError(f"series did not converge within {MAX_TERMS} terms")
        n = MAX_TERMS


def _plain_series(p, w):
    def coefs(n):
        out = _series_coefficients(p.a, p.b, p.c, n)
        return out if np.isfinite(out).all() else np.nan_to_num(out)

    return _sum_series(coefs, w)


def _polynomial(p, z, degree):
    coefs = _series_coefficients(p.a, p.b, p.c, degree + 1)
    z = np.asarray(z, dtype=np.complex128)
    return np.polyval(coefs[::-1], z)


def _log_with_side(x, side):
    """Principal log; on the negative real axis take the side ``side``."""
    out = np.log(x.astype(np.complex128))
    on_cut = (x.imag == 0) & (x.real < 0)
    if np.any(on_cut):
        out = np.where(on_cut, np.log(np.abs(x)) + 1j * np.pi * side, out)
    return out


def _power_with_side(x, expo, side):
    return np.exp(expo * _log_with_side(x, side))


def branched_power(x, expo, branch):
    """x**expo on the principal branch, negative reals taken from side ``branch``.

    ``branch`` is a :class:`Branch` or an array of ±1 per point.
    """
    side = Branch.parse(branch).sign if isinstance(branch, (Branch, str)) else np.asarray(branch)
    x = np.asarray(x, dtype=np.complex128)
    return _power_with_side(x, expo, side)


# ------------------------------------------------------- transformed regimes


def _pfaff(p, z, side):
    """(1-z)^(-b) F(c-a, b; c; z/(z-1)); ``side`` is the side of z on its cut."""
    w = z / (z - 1.0)
    inner = HypTriple(p.c - p.a, p.b, p.c)
    # a point above [1, ∞) lands below the image cut, and 1 - z lands below (-∞, 0]
    return _power_with_side(1.0 - z, -p.b, -side) * _evaluate(inner, w, -side, depth=1)


def _inverse_two_term(p, z, side):
    """Continuation through 1/z when b - a is not an integer."""
    a, b, c = p.a, p.b, p.c
    gc = gamma(c)
    coef_a = gc * gamma(b - a) * rgamma(b) * rgamma(c - a)
    coef_b = gc * gamma(a - b) * rgamma(a) * rgamma(c - b)
    w = 1.0 / z
    out = np.zeros_like(z)
    # -z sits below the negative axis when z is above the positive cut
    if coef_a != 0.0:
        out = out + coef_a * _power_with_side(-z, -a, -side) * _evaluate(
            HypTriple(a, a - c + 1.0, a - b + 1.0), w, None, depth=1)
    if coef_b != 0.0:
        out = out + coef_b * _power_with_side(-z, -b, -side) * _evaluate(
            HypTriple(b, b - c + 1.0, b - a + 1.0), w, None, depth=1)
    return out


def _inverse_logarithmic(p, z, side):
    """Continuation through 1/z when b - a = m is a nonnegative integer."""
    a, b, c = p.a, p.b, p.c
    if b < a:
        a, b = b, a
    m = int(round(b - a))
    w = 1.0 / z
    log_mz = _log_with_side(-z, -side)
    out = np.zeros_like(z)
    if m > 0:
        finite = np.array([
            pochhammer(a, k) * math.factorial(m - k - 1) / math.factorial(k) * rgamma(c - a - k)
            for k in range(m)
        ])
        out = out + rgamma(a + m) * np.polyval(finite[::-1], w)

    def coefficient_tables(n):
        log_coef = np.empty(n)
        rest = np.empty(n)
        ratio = 1.0 / math.factorial(m)  # (a+m)_k (-1)^k / (k! (k+m)!)
        psi_sum = digamma(1.0 + m) + digamma(1.0) - digamma(a + m)
        for k in range(n):
            arg = c - a - m - k
            g = rgamma(arg)
            log_coef[k] = ratio * g
            rest[k] = ratio * ((psi_sum) * g - psi_over_gamma(arg))
            ratio *= -(a + m + k) / ((k + 1.0) * (k + m + 1.0))
            psi_sum += 1.0 / (1.0 + m + k) + 1.0 / (1.0 + k) - 1.0 / (a + m + k)
            if not np.isfinite(ratio):
                log_coef[k + 1:] = 0.0
                rest[k + 1:] = 0.0
                break
        return log_coef, rest

    cache = {}

    def table(n, which):
        if n not in cache:
            cache[n] = coefficient_tables(n)
        return cache[n][which]

    log_part = _sum_series(lambda n: table(n, 0), w)
    rest_part = _sum_series(lambda n: table(n, 1), w)
    tail = w ** m * (log_mz * log_part + rest_part) * rgamma(a)
    return gamma(c) * _power_with_side(-z, -a, -side) * (out + tail)


def _one_minus(p, z, side):
    """Connection formula around z = 1 for non-integer c - a - b."""
    a, b, c = p.a, p.b, p.c
    s = c - a - b
    gc = gamma(c)
    w = 1.0 - z
    first = gc * gamma(s) * rgamma(c - a) * rgamma(c - b)
    second = gc * gamma(-s) * rgamma(a) * rgamma(b)
    out = np.zeros_like(z)
    if first != 0.0:
        out = out + first * _evaluate(HypTriple(a, b, a + b - c + 1.0), w, None, depth=1)
    if second != 0.0:
        out = out + second * _power_with_side(w, s, -side) * _evaluate(
            HypTriple(c - a, c - b, s + 1.0), w, None, depth=1)
    return out


def _taylor(p, z, side):
    """Integrate the hypergeometric equation from a point where the series is cheap."""
    z = np.asarray(z, dtype=np.complex128)
    mag = np.abs(z)
    start = np.where(mag > 0.5, 0.5 * z / np.where(mag > 0, mag, 1.0), z)
    f0 = _plain_series(p, start)
    df0 = p.a * p.b / p.c * _plain_series(p.shifted(), start)
    # detour around z = 1 when the ray start -> z passes close to it
    along = np.clip(((1.0 - start) * np.conj(z - start)).real / np.maximum(np.abs(z - start) ** 2, 1e-300), 0.0, 1.0)
    closest = np.abs(start + along * (z - start) - 1.0)
    detour = closest < 0.3
    if np.any(detour):
        sign = np.sign(z.imag)
        sign = np.where(sign == 0, side, sign)
        waypoint = 0.5 + 0.8j * sign
        mid = np.where(detour, waypoint, z)
        f0, df0 = _kernels.taylor_path(p.a, p.b, p.c, start, f0, df0, mid)
        start = mid
    f, _ = _kernels.taylor_path(p.a, p.b, p.c, start, f0, df0, z)
    return f


def _near_integer(x):
    return abs(x - round(x)) < NEAR_INTEGER


def _choose(p, z):
    """Regime label per element (only for points away from 0, 1 and |z| <= 0.8)."""
    mag = np.abs(z)
    pf = np.abs(z / (z - 1.0))
    with np.errstate(over="ignore"):
        inv = np.where(mag > 0, 1.0 / np.where(mag > 0, mag, 1.0), np.inf)
    om = np.abs(1.0 - z)
    ab_gap = p.b - p.a
    inverse_ok = (not _near_integer(ab_gap)) or (ab_gap == round(ab_gap))
    one_minus_ok = not _near_integer(p.excess)
    inv_score = np.where(inverse_ok, inv, np.inf)
    om_score = np.where(one_minus_ok, om, np.inf)
    labels = np.full(z.shape, "taylor", dtype=object)
    labels = np.where(np.minimum(inv_score, om_score) <= SERIES_RADIUS,
                      np.where(inv_score <= om_score, "inverse", "one_minus"), labels)
    labels = np.where(pf <= SERIES_RADIUS, "pfaff", labels)
    labels = np.where(mag <= SERIES_RADIUS, "series", labels)
    return labels


_METHODS = ("auto", "series", "pfaff", "inverse", "one_minus", "taylor")


def _run(method, p, z, side):
    if method == "series":
        return _plain_series(p, z)
    if method == "pfaff":
        return _pfaff(p, z, side)
    if method == "inverse":
        if p.b - p.a == round(p.b - p.a):
            return _inverse_logarithmic(p, z, side)
        return _inverse_two_term(p, z, side)
    if method == "one_minus":
        return _one_minus(p, z, side)
    return _taylor(p, z, side)


def _evaluate(p, z, side, depth=0, method="auto"):
    z = np.asarray(z, dtype=np.complex128)
    side_arr = np.zeros(z.shape) if side is None else np.broadcast_to(np.asarray(side, dtype=float), z.shape)
    on_cut = (z.imag == 0) & (z.real > 1)
    if np.any(on_cut & (side_arr == 0)):
        raise CutError("argument on the cut [1, ∞) needs an explicit branch")
    degree = _polynomial_degree(p)
    if degree is not None:
        return _polynomial(p, z, degree)
    out = np.empty(z.shape, dtype=np.complex128)
    at_one = z == 1.0
    if np.any(at_one):
        out[at_one] = gauss_at_one(p)
    rest = ~at_one
    if method != "auto":
        if np.any(rest):
            out[rest] = _run(method, p, z[rest], side_arr[rest])
        return out
    labels = np.full(z.shape, "", dtype=object)
    labels[rest] = _choose(p, z[rest])
    if depth > 0:
        # transformed arguments always sit inside the series disc or need no further dispatch
        labels[rest & (np.abs(z) <= SERIES_RADIUS)] = "series"
    for label in ("series", "pfaff", "inverse", "one_minus", "taylor"):
        mask = labels == label
        if np.any(mask):
            out[mask] = _run(label, p, z[mask], side_arr[mask])
    return out


# ----------------------------------------------------------------- public API


def hyp2f1_array(p, z, branch=None, method="auto"):
    """Vectorised ₂F₁ over an array of complex arguments.

    ``branch`` may be a :class:`Branch`, an array of ±1 (0 meaning "none"),
    or ``None``.  ``method`` forces one regime (``"series"``, ``"pfaff"``,
    ``"inverse"``, ``"one_minus"``, ``"taylor"``) instead of the automatic
    dispatch, which is useful for cross-checking regimes against each other.
    """
    p = _as_triple(p)
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}")
    z = np.asarray(z, dtype=np.complex128)
    if isinstance(branch, (Branch, str)):
        side = float(Branch.parse(branch).sign)
    elif branch is None:
        side = None
    else:
        side = np.asarray(branch, dtype=float)
    flat_side = None if side is None else np.broadcast_to(side, z.shape).ravel()
    return _evaluate(p, z.ravel(), flat_side, method=method).reshape(z.shape)


def _on_cut(z):
    return z.imag == 0 and z.real > 1


def hyp2f1(p, z, branch=None, method="auto"):
    """₂F₁(a, b; c; z) for a :class:`HypTriple` (or tuple) and complex ``z``.

    Returns a :class:`BranchedValue`.  On the cut ``[1, ∞)`` an explicit
    ``branch`` is mandatory and selects the one-sided limit.
    """
    z = complex(z)
    branch = Branch.parse(branch)
    if z == 1 and _as_triple(p).excess <= 0:
        raise DomainError("F diverges at z = 1 unless c - a - b > 0")
    value = complex(hyp2f1_array(p, np.array([z]), branch, method)[0])
    return BranchedValue(value, branch if _on_cut(z) else None)


def pfaff_transform(p, z, branch=None):
    """(1-z)^(-b) F(c-a, b; c; z/(z-1)) on the principal branch."""
    p = _as_triple(p)
    z = complex(z)
    if z == 1:
        raise DomainError("Pfaff transformation is singular at z = 1")
    branch = Branch.parse(branch)
    if _on_cut(z) and branch is None:
        raise CutError("argument on the cut [1, ∞) needs an explicit branch")
    side = 0.0 if branch is None else float(branch.sign)
    value = complex(_pfaff(p, np.array([z]), np.array([side]))[0])
    return BranchedValue(value, branch if _on_cut(z) else None)


def gauss_at_one(p):
    """Gauss summation Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b)), requires c - a - b > 0."""
    p = _as_triple(p)
    if p.excess <= 0:
        raise DomainError("Gauss summation needs c - a - b > 0")
    return gamma(p.c) * gamma(p.excess) * rgamma(p.c - p.a) * rgamma(p.c - p.b)


def hyp2f1_derivative(p, z, branch=None):
    """d/dz ₂F₁ = (ab/c) ₂F₁(a+1, b+1; c+1; z)."""
    p = _as_triple(p)
    inner = hyp2f1(p.shifted(), z, branch)
    return BranchedValue(p.a * p.b / p.c * inner.value, inner.branch)


def hyp2f1_oracle(p, z):
    """Independent ₂F₁ from the Euler integral, by QUADPACK with algebraic weights.

    Needs c > b > 0 and z off the cut.  Only meant for cross-checking.
    """
    from scipy import integrate

    p = _as_triple(p)
    z = complex(z)
    if not p.c > p.b > 0:
        raise DomainError("Euler integral needs c > b > 0")
    if _on_cut(z) or z == 1:
        raise DomainError("Euler integral oracle is undefined on the cut")
    if z == 0:
        return 1.0 + 0.0j

    def part(fn):
        val, _ = integrate.quad(
            lambda t: fn((1.0 - z * t) ** (-p.a)), 0.0, 1.0,
            weight="alg", wvar=(p.b - 1.0, p.c - p.b - 1.0),
            epsabs=0.0, epsrel=1e-13, limit=400,
        )
        return val

    norm = math.exp(math.lgamma(p.c) - math.lgamma(p.b) - math.lgamma(p.c - p.b))
    return norm * complex(part(lambda w: w.real), part(lambda w: w.imag))
