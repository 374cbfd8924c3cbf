"""Hot inner loops, each in a numba flavour and a vectorised numpy flavour.

The public names at the bottom pick one of the two according to
:mod:`tricomi._accel`.  Both flavours implement the same stopping rules so
their results agree to rounding.
"""
import numpy as np

from . import _accel

# ---------------------------------------------------------------- power series


def _power_series_np(coefs, w, tol):
    w = np.asarray(w, dtype=np.complex128)
    total = np.zeros_like(w)
    power = np.ones_like(w)
    prev = np.full(w.shape, np.inf)
    nterms = np.full(w.shape, -1, dtype=np.int64)
    active = np.ones(w.shape, dtype=bool)
    for k in range(coefs.shape[0]):
        term = coefs[k] * power
        total = np.where(active, total + term, total)
        mag = np.abs(term)
        small = (mag <= tol * np.abs(total)) & (prev <= tol * np.abs(total))
        done = active & small
        nterms[done] = k + 1
        active &= ~small
        if not active.any():
            break
        prev = mag
        power = power * w
    return total, nterms


@_accel.njit
def _power_series_nb(coefs, w, tol):
    m = w.shape[0]
    total = np.zeros(m, dtype=np.complex128)
    nterms = np.full(m, -1, dtype=np.int64)
    for i in range(m):
        s = 0j
        power = 1.0 + 0j
        prev = np.inf
        for k in range(coefs.shape[0]):
            term = coefs[k] * power
            s += term
            mag = abs(term)
            if mag <= tol * abs(s) and prev <= tol * abs(s):
                nterms[i] = k + 1
                break
            prev = mag
            power *= w[i]
        total[i] = s
    return total, nterms


# ------------------------------------------------------- Taylor continuation


def _taylor_path_np(a, b, c, p, f, df, target, tol, max_terms):
    p = np.array(p, dtype=np.complex128)
    f = np.array(f, dtype=np.complex128)
    df = np.array(df, dtype=np.complex128)
    target = np.asarray(target, dtype=np.complex128)
    ab = a * b
    s1 = a + b + 1.0
    active = np.abs(target - p) > 0
    while active.any():
        pa, fa, dfa = p[active], f[active], df[active]
        gap = target[active] - pa
        dist = np.abs(gap)
        reach = 0.45 * np.minimum(np.abs(pa), np.abs(1.0 - pa))
        step = np.where(dist <= reach, gap, gap / dist * reach)
        p0 = pa * (1.0 - pa)
        p1 = 1.0 - 2.0 * pa
        q0 = c - s1 * pa
        t_prev = fa
        t_cur = dfa * step
        val = t_prev + t_cur
        der = t_cur.copy()
        quiet = np.zeros(pa.shape, dtype=bool)
        for k in range(max_terms):
            t_next = -(
                (p1 * k * (k + 1) + q0 * (k + 1)) * step * t_cur
                + (-k * (k - 1) - s1 * k - ab) * step * step * t_prev
            ) / (p0 * (k + 2) * (k + 1))
            val = val + t_next
            der = der + (k + 2) * t_next
            small = (np.abs(t_next) <= tol * np.abs(val)) & (np.abs(t_cur) <= tol * np.abs(val))
            quiet |= small
            if quiet.all():
                break
            t_prev, t_cur = t_cur, t_next
        idx = np.flatnonzero(active)
        p[idx] = np.where(dist <= reach, target[active], pa + step)
        f[idx] = val
        df[idx] = der / step
        active[idx] = dist > reach
    return f, df


@_accel.njit
def _taylor_path_nb(a, b, c, p, f, df, target, tol, max_terms):
    m = p.shape[0]
    fo = np.empty(m, dtype=np.complex128)
    dfo = np.empty(m, dtype=np.complex128)
    ab = a * b
    s1 = a + b + 1.0
    for i in range(m):
        pc = p[i]
        fc = f[i]
        dc = df[i]
        while True:
            gap = target[i] - pc
            dist = abs(gap)
            if dist == 0.0:
                break
            reach = 0.45 * min(abs(pc), abs(1.0 - pc))
            last = dist <= reach
            step = gap if last else gap / dist * reach
            p0 = pc * (1.0 - pc)
            p1 = 1.0 - 2.0 * pc
            q0 = c - s1 * pc
            t_prev = fc
            t_cur = dc * step
            val = t_prev + t_cur
            der = t_cur
            for k in range(max_terms):
                t_next = -(
                    (p1 * k * (k + 1) + q0 * (k + 1)) * step * t_cur
                    + (-k * (k - 1) - s1 * k - ab) * step * step * t_prev
                ) / (p0 * (k + 2) * (k + 1))
                val += t_next
                der += (k + 2) * t_next
                if abs(t_next) <= tol * abs(val) and abs(t_cur) <= tol * abs(val):
                    break
                t_prev = t_cur
                t_cur = t_next
            fc = val
            dc = der / step
            if last:
                pc = target[i]
                break
            pc = pc + step
        fo[i] = fc
        dfo[i] = dc
    return fo, dfo


# ------------------------------------------------------------- bump profile


def _bump_profile_np(s, poly, k):
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    g = 1.0 - si * si
    out[inside] = np.polyval(poly, si) * np.exp(1.0 - 1.0 / g - 2.0 * k * np.log(g))
    return out


@_accel.njit
def _bump_profile_nb(s, poly, k):
    out = np.zeros(s.shape[0])
    for i in range(s.shape[0]):
        x = s[i]
        if abs(x) >= 1.0:
            continue
        g = 1.0 - x * x
        acc = 0.0
        for coef in poly:
            acc = acc * x + coef
        out[i] = acc * np.exp(1.0 - 1.0 / g - 2.0 * k * np.log(g))
    return out


# --------------------------------------------------------------- dispatch

NUMPY = {
    "power_series": _power_series_np,
    "taylor_path": _taylor_path_np,
    "bump_profile": _bump_profile_np,
}
NUMBA = {
    "power_series": _power_series_nb,
    "taylor_path": _taylor_path_nb,
    "bump_profile": _bump_profile_nb,
}
ACTIVE = NUMBA if _accel.USE_NUMBA else NUMPY


def power_series(coefs, w, tol=1e-16):
    """Sum ``coefs[k] * w**k`` pointwise; ``nterms == -1`` marks no convergence."""
    w = np.ascontiguousarray(np.ravel(w), dtype=np.complex128)
    coefs = np.ascontiguousarray(coefs, dtype=np.complex128)
    return ACTIVE["power_series"](coefs, w, tol)


def taylor_path(a, b, c, p, f, df, target, tol=1e-17, max_terms=200):
    """Continue a ₂F₁ solution and its derivative along straight lines p -> target."""
    cast = lambda arr: np.ascontiguousarray(np.ravel(arr), dtype=np.complex128)
    return ACTIVE["taylor_path"](
        float(a), float(b), float(c), cast(p), cast(f), cast(df), cast(target), tol, max_terms
    )


def bump_profile(s, poly, k):
    """Evaluate ``poly(s) (1-s²)^(-2k) e^(1-1/(1-s²))`` on |s|<1, zero outside."""
    s = np.asarray(s, dtype=np.float64)
    flat = np.ascontiguousarray(s.ravel())
    out = ACTIVE["bump_profile"](flat, np.ascontiguousarray(poly, dtype=np.float64), int(k))
    return out.reshape(s.shape)
