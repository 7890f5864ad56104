"""Classical and generalized convolution kernels.

Covers the phase-shifted Dirichlet kernel D_{k,beta}, the Fejer kernel F_k,
the de la Vallee Poussin kernel V_m, the difference V_{2n} - V_n (orthogonal
to all polynomials of degree < n), and the tail kernel

    Psi_{beta,n}(t) = sum_{k>=n} psi(k) cos(kt - beta*pi/2),

which for n = 1 is the generating kernel of the weight psi.  Tail evaluation
uses summation by parts (once or twice) so the terms decay like differences
of psi; raw summation would not converge for weights whose series diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularPoint, ToleranceUnreachable
from .lp_norms import NormResult
from .psi_catalog import PsiSpec, psi_delta
from .trig_poly import TWO_PI, TrigPoly

# Series summation never uses more than this many terms.
MAX_TAIL_TERMS = 10 ** 7
# Closed forms switch to direct cosine sums when |sin(t/2)| drops below this.
SIN_HALF_FLOOR = 1e-6
_CHUNK = 1 << 19


def _reduce(t):
    """Map t to [0, 2*pi) and return (reduced t, distance to nearest multiple of 2*pi)."""
    tr = np.mod(np.asarray(t, dtype=float), TWO_PI)
    return tr, np.minimum(tr, TWO_PI - tr)


def dirichlet_beta(k: int, beta: float, t):
    """Phase-shifted Dirichlet kernel of order k.

    Equals cos(b)/2 + sum_{v=1..k} cos(v*t - b) with b = beta*pi/2.  The
    closed form has a removable singularity at multiples of 2*pi, where the
    value is cos(b)*(k + 1/2); points too close to the singularity fall back
    to the direct cosine sum.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    tr, _ = _reduce(t)
    scalar = np.isscalar(t) or np.asarray(t).ndim == 0
    tr = np.atleast_1d(tr)
    phi = 0.5 * beta * math.pi
    cphi, sphi = math.cos(phi), math.sin(phi)

    s_half = np.sin(0.5 * tr)
    out = np.empty_like(tr)
    near = np.abs(s_half) < SIN_HALF_FLOOR
    if np.any(~near):
        x = tr[~near]
        sh = s_half[~near]
        main = np.sin((k + 0.5) * x) / (2.0 * sh)
        conj = (np.cos(0.5 * x) - np.cos((k + 0.5) * x)) / (2.0 * sh)
        out[~near] = cphi * main + sphi * conj
    if np.any(near):
        x = tr[near]
        nu = np.arange(1, k + 1)
        out[near] = 0.5 * cphi + np.sum(np.cos(np.outer(nu, x) - phi), axis=0)
    return float(out[0]) if scalar else out


def dirichlet(k: int, t):
    """Classical Dirichlet kernel D_k = 1/2 + sum cos(v*t)."""
    return dirichlet_beta(k, 0.0, t)


def fejer(k: int, t):
    """Fejer kernel F_k(t) = (1/(k+1)) sum_{v=0..k} D_v(t); nonnegative,
    bounded by (k+1)/2."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    tr, _ = _reduce(t)
    scalar = np.isscalar(t) or np.asarray(t).ndim == 0
    tr = np.atleast_1d(tr)
    s_half = np.sin(0.5 * tr)
    out = np.empty_like(tr)
    near = np.abs(s_half) < SIN_HALF_FLOOR
    if np.any(~near):
        x = tr[~near]
        num = np.sin(0.5 * (k + 1) * x)
        out[~near] = num * num / (2.0 * (k + 1) * s_half[~near] ** 2)
    if np.any(near):
        # coefficient form 1/2 + sum (1 - j/(k+1)) cos(j t): stable at t ~ 0
        x = tr[near]
        j = np.arange(1, k + 1)
        coeff = 1.0 - j / (k + 1.0)
        out[near] = 0.5 + coeff @ np.cos(np.outer(j, x)) if k else 0.5
    return float(out[0]) if scalar else out


def vallee_poussin(m: int, t):
    """Vallee Poussin kernel V_m(t) = (1/m) sum_{k=m..2m-1} D_k(t),
    computed through the Fejer identity V_m = 2 F_{2m-1} - F_{m-1}."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return 2.0 * fejer(2 * m - 1, t) - fejer(m - 1, t)


# -- coefficient-space builders ---------------------------------------------

def dirichlet_poly(k: int) -> TrigPoly:
    """D_k as an explicit polynomial: mean 1/2, unit cosine coefficients."""
    return TrigPoly(1.0, np.ones(k), np.zeros(k))


def fejer_poly(k: int) -> TrigPoly:
    """F_k as an explicit polynomial: cosine coefficients 1 - j/(k+1)."""
    j = np.arange(1, k + 1)
    return TrigPoly(1.0, 1.0 - j / (k + 1.0), np.zeros(k))


def vallee_poussin_poly(m: int) -> TrigPoly:
    """V_m as an explicit polynomial of degree 2m - 1."""
    a = np.zeros(2 * m - 1)
    a[:m] = 1.0
    j = np.arange(m + 1, 2 * m)
    a[m:] = 2.0 * (1.0 - j / (2.0 * m))
    return TrigPoly(1.0, a, np.zeros_like(a))


def vp_difference(n: int) -> TrigPoly:
    """The difference V_{2n} - V_n as an explicit polynomial of degree 4n - 1.

    Cosine coefficients: -(1 - k/n) on n+1 <= k <= 2n and 2(1 - k/(4n)) on
    2n+1 <= k <= 4n-1; zero mean, no sine part.  Harmonics 0..n all vanish,
    so the polynomial is orthogonal to every polynomial of degree <= n-1.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a = np.zeros(4 * n - 1)
    k_lo = np.arange(n + 1, 2 * n + 1)
    a[k_lo - 1] = -(1.0 - k_lo / n)
    k_hi = np.arange(2 * n + 1, 4 * n)
    a[k_hi - 1] = 2.0 * (1.0 - k_hi / (4.0 * n))
    return TrigPoly(0.0, a, np.zeros_like(a))


# -- tail kernel --------------------------------------------------------------

@dataclass(frozen=True)
class KernelTailSpec:
    """Tail of the generating kernel: harmonics k >= n of weight psi, phase beta."""

    psi: PsiSpec
    beta: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"tail start must be >= 1, got n={self.n}")


def _tail_sum(psi: PsiSpec, n: int, tol: float) -> float:
    """sum_{k>=n} psi(k) with an integral-bracketed remainder below tol."""
    if not psi.series_convergent:
        raise SingularPoint("coefficient series diverges; tail sum is infinite")
    k_stop = max(n, 8)
    while float(psi(float(k_stop))) >= tol:
        k_stop *= 2
        if k_stop > MAX_TAIL_TERMS:
            raise ToleranceUnreachable(
                f"tail sum needs more than {MAX_TAIL_TERMS} terms for tol={tol}")
    ks = np.arange(n, k_stop + 1, dtype=float)
    partial = float(np.sum(psi(ks)[::-1]))  # ascending magnitudes
    hi = psi.integral_tail(float(k_stop))
    lo = psi.integral_tail(float(k_stop + 1))
    return partial + 0.5 * (hi + lo)


def _grow_terms(bound, start: int, tol: float):
    """Double k until bound(k) < tol; None when the cap cannot reach tol."""
    k = max(start, 64)
    while k <= MAX_TAIL_TERMS:
        if bound(k) < tol:
            return k
        k *= 2
    return None


def _tail_convex_from(psi: PsiSpec, k0: int) -> bool:
    ks = np.unique(np.rint(np.geomspace(max(k0, 1), max(4 * k0, 16), num=24)))
    d2 = psi(ks) - 2.0 * psi(ks + 1.0) + psi(ks + 2.0)
    return bool(np.all(d2 >= -1e-18))


def _chunked_phase_sums(weights_of, n: int, k_stop: int, freq_of, t: np.ndarray):
    """sum_k w(k) * exp(i * freq(k) * t) accumulated in chunks of k."""
    acc = np.zeros(t.shape, dtype=complex)
    step = max(1, _CHUNK // max(t.size, 1))
    for lo in range(n, k_stop + 1, step):
        hi = min(lo + step - 1, k_stop)
        ks = np.arange(lo, hi + 1, dtype=float)
        w = weights_of(ks)
        acc += np.exp(1j * np.outer(freq_of(ks), t)).T @ w
    return acc


def _abel_order1(psi, beta, n, tr, k_stop):
    phi = 0.5 * beta * math.pi
    cphi, sphi = math.cos(phi), math.sin(phi)
    dpsi = lambda ks: psi(ks) - psi(ks + 1.0)
    z = _chunked_phase_sums(dpsi, n, k_stop, lambda ks: ks + 0.5, tr)
    w_total = psi(float(n)) - psi(float(k_stop + 1))
    s_half = np.sin(0.5 * tr)
    main = (cphi * z.imag + sphi * (np.cos(0.5 * tr) * w_total - z.real)) / (2.0 * s_half)
    return main - psi(float(n)) * dirichlet_beta(n - 1, beta, tr)


def _abel_order2(psi, beta, n, tr, k_stop):
    phi = 0.5 * beta * math.pi
    cphi, sphi = math.cos(phi), math.sin(phi)
    d2 = lambda ks: psi(ks) - 2.0 * psi(ks + 1.0) + psi(ks + 2.0)

    z = _chunked_phase_sums(d2, n, k_stop, lambda ks: ks + 1.0, tr)
    ks_all = np.arange(n, k_stop + 1, dtype=float)
    w = d2(ks_all)
    v0 = float(np.sum(w[::-1]))
    v1 = float(np.sum((w * (ks_all + 1.0))[::-1]))

    s_half = np.sin(0.5 * tr)
    inv4 = 1.0 / (4.0 * s_half ** 2)
    cot_half = np.cos(0.5 * tr) / s_half
    sin_nt = np.sin(n * tr)
    # partial sums of the shifted-kernel family from order 0:
    #   P(m) = sum_{v<m} D_v       = sin^2(m t/2) / (2 sin^2(t/2))
    #   Q(m) = sum_{v<m} conj(D_v) = m cot(t/2)/2 - sin(m t)/(4 sin^2(t/2))
    p_n = 2.0 * np.sin(0.5 * n * tr) ** 2 * inv4
    q_n = 0.5 * n * cot_half - sin_nt * inv4

    # sum_k d2(k) (P(k+1) - P(n)), using sum d2 sin^2((k+1)t/2) = (v0 - Re z)/2
    cos_part = cphi * ((v0 - z.real) * inv4 - p_n * v0)
    # sum_k d2(k) (Q(k+1) - Q(n)) = 0.5 cot (v1 - n v0) - (Im z - v0 sin nt)/(4 sin^2)
    sin_part = sphi * (0.5 * (v1 - n * v0) * cot_half
                       - (z.imag - v0 * sin_nt) * inv4)

    # dropped k > k_stop: the oscillating parts stay bounded (the reported
    # error term); the constant and linear-in-k parts telescope exactly:
    #   sum_{k>K} d2(k) = dpsi(K+1),  sum_{k>K} d2(k)(k+1) = dpsi(K+1)(K+2) + psi(K+2)
    dpsi_next = psi(float(k_stop + 1)) - psi(float(k_stop + 2))
    tail_linear = dpsi_next * (k_stop + 2.0) + psi(float(k_stop + 2))
    corr = (-(cphi * p_n + sphi * q_n) * dpsi_next
            + 0.5 * sphi * cot_half * tail_linear)
    return cos_part + sin_part + corr - psi(float(n)) * dirichlet_beta(n - 1, beta, tr)


def kernel_tail_eval(spec: KernelTailSpec, t, tol: float = 1e-10):
    """Value of the tail kernel at t (scalar or array), to absolute accuracy tol.

    Summation by parts is applied once (term size ~ psi-differences / distance
    to the singular point) or twice when the weight is convex on the summation
    range (term size ~ second differences / distance^2), whichever needs fewer
    terms.  At multiples of 2*pi the series value is returned when the
    coefficient sum converges, else SingularPoint is raised; if no strategy
    reaches tol within the term cap, ToleranceUnreachable is raised.
    """
    psi, beta, n = spec.psi, spec.beta, spec.n
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    tr, that = _reduce(np.atleast_1d(t_arr))
    out = np.empty_like(tr)
    phi = 0.5 * beta * math.pi

    at_zero = that == 0.0
    if np.any(at_zero):
        out[at_zero] = math.cos(phi) * _tail_sum(psi, n, 0.5 * tol)

    rest = ~at_zero
    if np.any(rest):
        tr_r, that_r = tr[rest], that[rest]
        tiny = that_r < SIN_HALF_FLOOR
        if np.any(tiny) and psi.series_convergent:
            # direct cosine sum: no cancellation against a near-zero denominator
            k_stop = _grow_terms(lambda k: psi.integral_tail(float(k)), n, 0.5 * tol)
            if k_stop is None:
                raise ToleranceUnreachable(
                    f"direct summation cannot reach tol={tol} near the singular point")
            z = _chunked_phase_sums(lambda ks: psi(ks), n, k_stop,
                                    lambda ks: ks, tr_r[tiny])
            out_r = np.empty_like(tr_r)
            out_r[tiny] = (z * np.exp(-1j * phi)).real
            if np.any(~tiny):
                out_r[~tiny] = _abel_eval(psi, beta, n, tr_r[~tiny], that_r[~tiny], tol)
            out[rest] = out_r
        else:
            out[rest] = _abel_eval(psi, beta, n, tr_r, that_r, tol)

    return float(out[0]) if scalar else out.reshape(t_arr.shape)


def _abel_eval(psi, beta, n, tr, that, tol):
    t_min = float(np.min(that))
    s_min = math.sin(0.5 * t_min)

    def bound1(k):
        b = (1.0 + math.pi) * psi(float(k + 1)) / t_min
        if psi.series_convergent:
            b = min(b, psi(float(k + 1)) * (k + 1.5) + psi.integral_tail(float(k + 1)))
        return b

    def bound2(k):
        dp = psi(float(k + 1)) - psi(float(k + 2))
        return 1.5 * dp / (2.0 * s_min ** 2)

    k1 = _grow_terms(bound1, n, tol)
    k2 = _grow_terms(bound2, n, tol)
    if k2 is not None and (k1 is None or k2 < k1) and _tail_convex_from(psi, max(n, k2 // 4)):
        return _abel_order2(psi, beta, n, tr, k2)
    if k1 is None:
        raise ToleranceUnreachable(
            f"tail evaluation cannot reach tol={tol} at distance {t_min:.3e} "
            f"from the singular point within {MAX_TAIL_TERMS} terms")
    return _abel_order1(psi, beta, n, tr, k1)


# -- grid evaluation and norms ------------------------------------------------

def _binned_grid_eval(spec: KernelTailSpec, n_grid: int, weights: np.ndarray) -> np.ndarray:
    """Tail kernel at the midpoint grid t_j = (j+1/2)*2*pi/N via one FFT.

    `weights` holds psi(k) for k = spec.n, spec.n+1, ...; the sum is exact up
    to the dropped terms beyond the array.  The midpoint phase exp(i*pi*k/N)
    depends on k only through k mod 2N, so one real bincount into 2N residue
    classes suffices.
    """
    n = spec.n
    two_n = 2 * n_grid
    res = np.bincount(np.arange(n, n + weights.size) % two_n,
                      weights=weights, minlength=two_n)
    folded = (res[:n_grid] - res[n_grid:]) * np.exp(1j * np.pi * np.arange(n_grid) / n_grid)
    z = n_grid * np.fft.ifft(folded)
    phi = 0.5 * spec.beta * math.pi
    return (z * np.exp(-1j * phi)).real


class _WeightCache:
    """psi(k) for k = n..stop, grown on demand."""

    def __init__(self, psi, n):
        self.psi, self.n = psi, n
        self.vals = np.zeros(0)

    def upto(self, k_stop: int) -> np.ndarray:
        have = self.n + self.vals.size
        if k_stop >= have:
            ks = np.arange(have, k_stop + 1, dtype=float)
            self.vals = np.concatenate([self.vals, self.psi(ks)])
        return self.vals[: k_stop - self.n + 1]


def _dropped_tail_correction(spec, k_stop: int, tr, that):
    """Closed-form estimate of sum_{k>k_stop} psi(k) cos(kt - phase) plus an
    error bound per point.

    One summation by parts contributes the exact boundary term
    -psi(K+1) D_{K,beta}; when the weight is convex past K a second pass also
    telescopes the constant and linear parts exactly, leaving a remainder of
    size dpsi(K+1)/sin^2(t/2).
    """
    psi, beta = spec.psi, spec.beta
    phi = 0.5 * beta * math.pi
    cphi, sphi = math.cos(phi), math.sin(phi)
    k1 = float(k_stop + 1)
    psi_k1 = psi(k1)
    boundary = -psi_k1 * dirichlet_beta(k_stop, beta, tr)
    if _tail_convex_from(psi, k_stop + 1):
        dpsi_k1 = psi_k1 - psi(k1 + 1.0)
        s_half = np.sin(0.5 * tr)
        inv4 = 1.0 / (4.0 * s_half ** 2)
        cot_half = np.cos(0.5 * tr) / s_half
        m = k_stop + 1.0
        p_m = 2.0 * np.sin(0.5 * m * tr) ** 2 * inv4
        q_m = 0.5 * m * cot_half - np.sin(m * tr) * inv4
        tail_linear = dpsi_k1 * (k_stop + 2.0) + psi(k1 + 1.0)
        corr = (boundary - (cphi * p_m + sphi * q_m) * dpsi_k1
                + 0.5 * sphi * cot_half * tail_linear)
        eps = 1.5 * dpsi_k1 / (2.0 * np.sin(0.5 * that) ** 2)
    else:
        corr = boundary
        eps = (1.0 + math.pi) * psi_k1 / that
    if psi.series_convergent:
        direct = psi.integral_tail(float(k_stop)) + np.abs(corr)
        eps = np.minimum(eps, direct)
    return corr, eps


def kernel_tail_norm(spec: KernelTailSpec, q: float, tol: float = 1e-7) -> NormResult:
    """L_q([0, 2*pi]) norm of the tail kernel with a reported error estimate.

    q = inf takes the sup over a fine grid (plus the t -> 0 limit when the
    coefficient sum converges) with local refinement; finite q integrates
    |kernel|^q, on a uniform midpoint mesh for kernels bounded at 0 and on a
    mesh graded toward 0 and 2*pi otherwise, excluding a neighborhood of the
    singular point whose contribution is bounded through the partial-sum
    majorant.
    """
    if q != math.inf and not 1.0 < q < math.inf:
        raise ValueError(f"q must be in (1, inf], got {q}")
    if q == math.inf:
        return _tail_sup_norm(spec, tol)
    if spec.psi.series_convergent:
        return _tail_norm_uniform(spec, q, tol)
    return _tail_norm_graded(spec, q, tol)


def _tail_norm_uniform(spec, q, tol):
    """Uniform midpoint quadrature of |kernel|^q; tol is relative to the norm.

    The truncation point grows until the per-node remainder bounds contribute
    less than a quarter of the budget; the grid doubles until successive
    levels agree.
    """
    cache = _WeightCache(spec.psi, spec.n)
    n_grid, k_stop = 4096, max(4096, 8 * spec.n)
    integrals: list[float] = []
    est_prev = None
    level = 0
    while True:
        ts = TWO_PI * (np.arange(n_grid) + 0.5) / n_grid
        _, that = _reduce(ts)
        vals = _binned_grid_eval(spec, n_grid, cache.upto(k_stop))
        corr, eps = _dropped_tail_correction(spec, k_stop, ts, that)
        vals = vals + corr
        h = TWO_PI / n_grid
        integral = float(np.sum(np.abs(vals) ** q)) * h
        err_int = float(np.sum(q * np.maximum(np.abs(vals), eps) ** (q - 1.0) * eps)) * h
        norm_raw = integral ** (1.0 / q)
        err_trunc = (integral + err_int) ** (1.0 / q) - norm_raw

        if err_trunc > 0.25 * tol * norm_raw and k_stop < MAX_TAIL_TERMS:
            k_stop = min(2 * k_stop, MAX_TAIL_TERMS)
            continue
        integrals.append(integral)

        # aliasing decays like a power of the grid size; once three levels are
        # in, fit the rate and extrapolate the remaining geometric tail
        estimate = integral
        if len(integrals) >= 3:
            d_prev = integrals[-2] - integrals[-3]
            d_last = integrals[-1] - integrals[-2]
            if d_last != 0.0 and d_prev / d_last > 1.2:
                estimate = integral + d_last / (d_prev / d_last - 1.0)
        norm = max(estimate, 0.0) ** (1.0 / q)
        if est_prev is not None and len(integrals) >= 3:
            err = abs(norm - est_prev) + err_trunc + 0.05 * abs(norm - norm_raw)
            if err < tol * norm:
                return NormResult(norm, err, level)
            if n_grid >= 2 ** 18:
                return NormResult(norm, err, level, converged=False)
        est_prev = norm
        n_grid *= 2
        level += 1


def _tail_sup_norm(spec, tol):
    psi, n = spec.psi, spec.n
    if not psi.series_convergent:
        raise SingularPoint("kernel is unbounded: coefficient series diverges at 0")
    n_grid = max(8192, 64 * n)
    scale = _tail_sum(psi, n, math.inf)  # crude magnitude for the relative budget
    point_tol = 0.25 * tol * max(scale, 1e-300)
    k_stop = _grow_terms(lambda k: min(psi.integral_tail(float(k)),
                                       2 * (1 + math.pi) * psi(float(k + 1)) * n_grid / math.pi),
                         n, point_tol)
    if k_stop is None:
        k_stop = MAX_TAIL_TERMS
    cache = _WeightCache(psi, n)
    vals = np.abs(_binned_grid_eval(spec, n_grid, cache.upto(k_stop)))
    phi = 0.5 * spec.beta * math.pi
    best = abs(math.cos(phi)) * _tail_sum(psi, n, point_tol)

    left, right = np.roll(vals, 1), np.roll(vals, -1)
    peaks = np.flatnonzero((vals >= left) & (vals >= right))
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(vals))])
    top = peaks[np.argsort(vals[peaks])[::-1][:5]]
    ts = TWO_PI * (np.arange(n_grid) + 0.5) / n_grid
    h = TWO_PI / n_grid

    golden = (math.sqrt(5.0) - 1.0) / 2.0
    lo = ts[top] - h
    hi = ts[top] + h
    x1 = hi - golden * (hi - lo)
    x2 = lo + golden * (hi - lo)
    f1 = np.abs(kernel_tail_eval(spec, x1, point_tol))
    f2 = np.abs(kernel_tail_eval(spec, x2, point_tol))
    for _ in range(45):
        move = f1 < f2
        lo = np.where(move, x1, lo)
        hi = np.where(move, hi, x2)
        x1 = np.where(move, x2, hi - golden * (hi - lo))
        x2 = np.where(move, lo + golden * (hi - lo), x1)
        fx = np.abs(kernel_tail_eval(spec, np.where(move, x2, x1), point_tol))
        f1 = np.where(move, f2, fx)
        f2 = np.where(move, fx, f2)
    refined = float(np.max(np.maximum(f1, f2)))
    value = max(best, float(np.max(vals)), refined)
    return NormResult(value, 2.0 * point_tol, n_grid)


def _tail_norm_graded(spec, q, tol):
    """Graded-mesh norm for kernels singular at 0: panels shrink geometrically
    toward 0 and 2*pi; the unsampled head is estimated by extrapolation and its
    uncertainty bounded by the partial-sum majorant, all folded into the error
    estimate."""
    psi, n = spec.psi, spec.n

    def majorant(t):
        # split the series at m ~ 1/t: head bounded by the partial sum (via the
        # integral of psi), remainder by summation by parts
        m = np.maximum(np.ceil(1.0 / t), float(n))
        partial = np.array([psi(float(n)) + psi.integral_between(float(n), mi) for mi in m])
        return partial + 2.0 * (1.0 + math.pi) * psi(m) / t

    def head_bound(t_min):
        grid = np.geomspace(max(t_min * 1e-6, 1e-14), t_min, 64)
        return float(np.trapezoid(majorant(grid) ** q, grid))

    def that_of(t):
        return min(t % TWO_PI, TWO_PI - t % TWO_PI)

    xg, wg = np.polynomial.legendre.leggauss(16)
    t_min = 1e-4 * math.pi
    prev = None
    norm, err = math.nan, math.inf
    for level in range(3):
        # breakpoints t_min * 2^j up to pi, mirrored onto (pi, 2*pi - t_min)
        bps = [t_min]
        while bps[-1] < math.pi:
            bps.append(min(bps[-1] * 2.0, math.pi))
        bps = np.asarray(bps)
        breaks = np.concatenate([bps, (TWO_PI - bps)[::-1][1:]])
        mids = 0.5 * (breaks[:-1] + breaks[1:])
        half = 0.5 * np.diff(breaks)

        integral = 0.0
        unreachable = False
        for i in range(mids.size):
            # point tolerance proportional to the local scale: overshoot of
            # the majorant only loosens points that contribute little
            local = float(majorant(np.array([min(that_of(mids[i]), math.pi)]))[0])
            point_tol = tol * max(0.05 * local, 1e-300)
            pts = mids[i] + half[i] * xg
            try:
                vals = kernel_tail_eval(spec, pts, point_tol)
            except ToleranceUnreachable:
                unreachable = True
                break
            integral += float((np.abs(vals) ** q) @ wg * half[i])
        if unreachable:
            t_min *= 16.0
            continue

        # head on [0, t_min]: extrapolate |f|^q ~ A t^(-gamma), bound by majorant
        probe_t = np.array([1.5 * t_min, 3.0 * t_min])
        probe = np.abs(kernel_tail_eval(spec, probe_t,
                                        tol * 0.05 * float(majorant(probe_t)[0]))) ** q
        if probe[0] > 0 and probe[1] > 0:
            gamma = min(max(math.log(probe[0] / probe[1]) / math.log(2.0), 0.0), 0.99)
            head_est = probe[0] * (1.5 * t_min) ** gamma * t_min ** (1.0 - gamma) / (1.0 - gamma)
        else:
            head_est = 0.0
        head_unc = max(head_bound(t_min) - head_est, 0.5 * head_est)

        total = integral + head_est
        norm = total ** (1.0 / q)
        err = (total + head_unc) ** (1.0 / q) - norm
        if prev is not None:
            err += abs(norm - prev)
            if err < tol * norm:
                return NormResult(norm, err, level)
        prev = norm
        t_min /= 16.0
    return NormResult(norm, err, level, converged=False)
