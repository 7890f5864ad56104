"""Catalog of decreasing weight functions and finite-horizon decay-condition checks.

The weight psi(t) is defined for real t >= 1, positive and nonincreasing.  The
catalog covers power decay, power decay with logarithmic damping or growth,
geometric decay, and tabulated custom weights.  The condition checks certify
(over a finite horizon) doubling-controlled decay, the existence of an exponent
alpha > 1/p making t^alpha * psi(t) almost decreasing, the sign of the second
difference of 1/psi, and a uniform partial-sum bound used by the L1 Bernstein
inequality.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .errors import InconclusiveAtHorizon, PsiDomainError

# Almost-decreasing checks accept a majorization factor up to this value.
ALMOST_DECREASING_K = 10.0
# Doubling ratios above this value are treated as "not doubling-controlled".
DOUBLING_K = 1e6
# Exponent search step and number of steps above the 1/p threshold.
ALPHA_STEP = 0.05
ALPHA_STEPS = 200


class DecayFamily(str, enum.Enum):
    POWER = "power"
    POWER_LOG_DAMPED = "power_log_damped"
    POWER_LOG_GROWN = "power_log_grown"
    GEOMETRIC = "geometric"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PsiSpec:
    """A positive nonincreasing weight on [1, inf), closed under evaluation.

    Use the factory classmethods; parameters are validated there.
    """

    family: DecayFamily
    r: float = 0.0
    alpha: float = 0.0
    c: float = 0.0
    q: float = 0.0
    values: tuple = field(default=())

    # -- factories ---------------------------------------------------------

    @classmethod
    def power(cls, r: float) -> "PsiSpec":
        """psi(t) = t^(-r), r > 0."""
        if not r > 0:
            raise ValueError(f"power decay needs r > 0, got {r}")
        return cls(DecayFamily.POWER, r=float(r))

    @classmethod
    def power_log_damped(cls, r: float, alpha: float, c: float) -> "PsiSpec":
        """psi(t) = t^(-r) * ln(t+c)^(-alpha), alpha >= 0, c > 0."""
        if not (r > 0 and alpha >= 0 and c > 0):
            raise ValueError(f"need r > 0, alpha >= 0, c > 0, got {(r, alpha, c)}")
        return cls(DecayFamily.POWER_LOG_DAMPED, r=float(r), alpha=float(alpha), c=float(c))

    @classmethod
    def power_log_grown(cls, r: float, alpha: float, c: float) -> "PsiSpec":
        """psi(t) = ln(t+c)^alpha / t^r with c > e^(alpha/r) - 1 so psi decreases."""
        if not (r > 0 and alpha >= 0):
            raise ValueError(f"need r > 0 and alpha >= 0, got {(r, alpha)}")
        if not c > math.exp(alpha / r) - 1.0:
            raise ValueError(f"need c > e^(alpha/r) - 1 = {math.exp(alpha / r) - 1.0}, got c={c}")
        return cls(DecayFamily.POWER_LOG_GROWN, r=float(r), alpha=float(alpha), c=float(c))

    @classmethod
    def geometric(cls, q: float) -> "PsiSpec":
        """psi(t) = q^t, 0 < q < 1."""
        if not 0 < q < 1:
            raise ValueError(f"geometric decay needs 0 < q < 1, got {q}")
        return cls(DecayFamily.GEOMETRIC, q=float(q))

    @classmethod
    def custom(cls, values) -> "PsiSpec":
        """Tabulated positive nonincreasing values at t = 1, 2, ..., len(values).

        Linear interpolation between table points; evaluation past the table
        raises PsiDomainError.
        """
        vals = tuple(float(v) for v in values)
        if len(vals) < 2:
            raise ValueError("custom table needs at least two values")
        if any(v <= 0 for v in vals):
            raise ValueError("custom table values must be positive")
        if any(vals[i + 1] > vals[i] for i in range(len(vals) - 1)):
            raise ValueError("custom table values must be nonincreasing")
        return cls(DecayFamily.CUSTOM, values=vals)

    # -- evaluation --------------------------------------------------------

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 1.0):
            raise PsiDomainError(f"psi is defined for t >= 1, got min t = {t_arr.min()}")
        out = self._eval(t_arr)
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def _eval(self, t):
        f = self.family
        if f is DecayFamily.POWER:
            return t ** (-self.r)
        if f is DecayFamily.POWER_LOG_DAMPED:
            return t ** (-self.r) * np.log(t + self.c) ** (-self.alpha)
        if f is DecayFamily.POWER_LOG_GROWN:
            return np.log(t + self.c) ** self.alpha * t ** (-self.r)
        if f is DecayFamily.GEOMETRIC:
            return self.q ** t
        table = np.asarray(self.values)
        if np.any(t > len(table)):
            raise PsiDomainError(f"custom table covers t <= {len(table)}, got t up to {np.max(t)}")
        return np.interp(t, np.arange(1.0, len(table) + 1.0), table)

    def log_eval(self, t):
        """log psi(t), stable where psi underflows (e.g. geometric at large t)."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 1.0):
            raise PsiDomainError(f"psi is defined for t >= 1, got min t = {t_arr.min()}")
        f = self.family
        if f is DecayFamily.POWER:
            out = -self.r * np.log(t_arr)
        elif f is DecayFamily.POWER_LOG_DAMPED:
            out = -self.r * np.log(t_arr) - self.alpha * np.log(np.log(t_arr + self.c))
        elif f is DecayFamily.POWER_LOG_GROWN:
            out = self.alpha * np.log(np.log(t_arr + self.c)) - self.r * np.log(t_arr)
        elif f is DecayFamily.GEOMETRIC:
            out = t_arr * math.log(self.q)
        else:
            out = np.log(self._eval(t_arr))
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    @property
    def series_convergent(self) -> bool:
        """Whether sum_k psi(k) over the integers is finite."""
        f = self.family
        if f is DecayFamily.POWER:
            return self.r > 1.0
        if f is DecayFamily.POWER_LOG_DAMPED:
            return self.r > 1.0 or (self.r == 1.0 and self.alpha > 1.0)
        if f is DecayFamily.POWER_LOG_GROWN:
            return self.r > 1.0
        if f is DecayFamily.GEOMETRIC:
            return True
        return True  # finite table

    def integral_tail(self, x: float) -> float:
        """Integral of psi over [x, inf); brackets the series tail for monotone psi."""
        if not self.series_convergent:
            raise ValueError("tail integral requested for a divergent weight")
        f = self.family
        if f is DecayFamily.POWER:
            return x ** (1.0 - self.r) / (self.r - 1.0)
        if f is DecayFamily.GEOMETRIC:
            return self.q ** x / (-math.log(self.q))
        if f is DecayFamily.CUSTOM:
            n = len(self.values)
            if x >= n:
                return 0.0
            grid = np.linspace(x, float(n), 129)
            return float(np.trapezoid(self._eval(grid), grid))
        val, _ = integrate.quad(lambda s: float(self._eval(np.asarray(s))), x, np.inf, limit=200)
        return val

    def integral_between(self, a: float, b: float) -> float:
        """Integral of psi over [a, b], 1 <= a <= b."""
        if b <= a:
            return 0.0
        f = self.family
        if f is DecayFamily.POWER:
            if self.r == 1.0:
                return math.log(b / a)
            return (b ** (1.0 - self.r) - a ** (1.0 - self.r)) / (1.0 - self.r)
        if f is DecayFamily.GEOMETRIC:
            return (self.q ** a - self.q ** b) / (-math.log(self.q))
        if f is DecayFamily.CUSTOM:
            b = min(b, float(len(self.values)))
            if b <= a:
                return 0.0
            grid = np.linspace(a, b, 129)
            return float(np.trapezoid(self._eval(grid), grid))
        val, _ = integrate.quad(lambda s: float(self._eval(np.asarray(s))), a, b, limit=200)
        return val

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        params: dict = {}
        f = self.family
        if f is DecayFamily.POWER:
            params = {"r": self.r}
        elif f in (DecayFamily.POWER_LOG_DAMPED, DecayFamily.POWER_LOG_GROWN):
            params = {"r": self.r, "alpha": self.alpha, "c": self.c}
        elif f is DecayFamily.GEOMETRIC:
            params = {"q": self.q}
        else:
            params = {"values": list(self.values)}
        return {"family": f.value, "params": params}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PsiSpec":
        fam = DecayFamily(obj["family"])
        p = obj.get("params", {})
        if fam is DecayFamily.POWER:
            return cls.power(p["r"])
        if fam is DecayFamily.POWER_LOG_DAMPED:
            return cls.power_log_damped(p["r"], p["alpha"], p["c"])
        if fam is DecayFamily.POWER_LOG_GROWN:
            return cls.power_log_grown(p["r"], p["alpha"], p["c"])
        if fam is DecayFamily.GEOMETRIC:
            return cls.geometric(p["q"])
        return cls.custom(p["values"])


def psi_eval(spec: PsiSpec, t):
    """Value of the weight at t >= 1 (scalar or array)."""
    return spec(t)


def psi_delta(spec: PsiSpec, k):
    """Forward difference psi(k) - psi(k+1), nonnegative for the catalog families."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 1):
        raise PsiDomainError("k must be >= 1")
    out = spec._eval(k_arr) - spec._eval(k_arr + 1.0)
    return float(out) if np.isscalar(k) or k_arr.ndim == 0 else out


def delta2_reciprocal(spec: PsiSpec, k):
    """Second difference of 1/psi at k: 1/psi(k) - 2/psi(k+1) + 1/psi(k+2)."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 1):
        raise PsiDomainError("k must be >= 1")
    out = 1.0 / spec._eval(k_arr) - 2.0 / spec._eval(k_arr + 1.0) + 1.0 / spec._eval(k_arr + 2.0)
    return float(out) if np.isscalar(k) or k_arr.ndim == 0 else out


class Delta2Sign(str, enum.Enum):
    CONVEX = "convex"      # second difference of 1/psi >= 0 everywhere checked
    CONCAVE = "concave"    # <= 0 everywhere checked
    MIXED = "mixed"


@dataclass(frozen=True)
class ConditionReport:
    """Finite-horizon evidence for the decay-class conditions of a weight."""

    in_doubling_class: bool          # psi(t)/psi(2t) bounded over the grid
    doubling_sup: float              # witnessed sup of psi(t)/psi(2t)
    theta_alpha: Optional[float]     # exponent alpha > 1/p with t^alpha psi(t) almost decreasing
    theta_status: str                # "found" or "inconclusive_at_horizon"
    delta2_sign: Delta2Sign
    nerb_sum_bound: float            # max_n sum_{k<n} psi(n)/(k psi(k))
    horizon: int
    p: float


def almost_decreasing_constant(log_g: np.ndarray) -> float:
    """Smallest K with g(t1) <= K g(t2) for all grid t1 > t2, given log g on an ascending grid."""
    running_min = np.minimum.accumulate(log_g)
    return float(np.exp(np.max(log_g - running_min)))


def _condition_grid(horizon: int) -> np.ndarray:
    dense = np.arange(1.0, min(horizon, 64) + 1.0)
    coarse = np.geomspace(1.0, float(horizon), num=600)
    return np.unique(np.concatenate([dense, coarse]))


def find_almost_decreasing_exponent(spec: PsiSpec, threshold: float,
                                    horizon: int = 10_000,
                                    step: float = ALPHA_STEP,
                                    steps: int = ALPHA_STEPS) -> Optional[float]:
    """Search alpha in {threshold + j*step} making t^alpha psi(t) almost decreasing.

    Returns the first (smallest) exponent whose majorization constant over the
    log-spaced grid stays <= ALMOST_DECREASING_K, or None when the whole ladder
    fails.  Failure at a finite horizon is not a proof of non-membership.
    """
    grid = _condition_grid(horizon)
    log_psi = spec.log_eval(grid)
    log_t = np.log(grid)
    for j in range(1, steps + 1):
        a = threshold + j * step
        if almost_decreasing_constant(a * log_t + log_psi) <= ALMOST_DECREASING_K:
            return a
    return None


def check_class_conditions(spec: PsiSpec, p: float, horizon: int = 10_000,
                           tol: float = 1e-12) -> ConditionReport:
    """Run all decay-condition tests for the weight at integrability index p.

    The checks are grid-based certificates: a passing test witnesses the
    condition up to the horizon, a failing exponent search is reported as
    inconclusive rather than as a refutation.  Deterministic for fixed inputs.
    """
    if horizon < 16:
        raise ValueError(f"horizon must be >= 16, got {horizon}")
    if not 1.0 <= p < math.inf:
        raise ValueError(f"p must be in [1, inf), got {p}")
    if spec.family is DecayFamily.CUSTOM:
        horizon = min(horizon, len(spec.values) // 2)
        if horizon < 16:
            raise ValueError("custom table too short for condition checks")

    grid = _condition_grid(horizon)

    # Doubling control: sup of psi(t)/psi(2t) over the grid, in log space so
    # geometric decay overflows to inf instead of dividing by an underflow.
    log_ratio = spec.log_eval(grid) - spec.log_eval(2.0 * grid)
    with np.errstate(over="ignore"):
        doubling_sup = float(np.exp(np.max(log_ratio)))
    in_doubling = doubling_sup <= DOUBLING_K

    alpha = find_almost_decreasing_exponent(spec, 1.0 / p, horizon=horizon)
    status = "found" if alpha is not None else "inconclusive_at_horizon"

    # Sign of the second difference of 1/psi over integer arguments.
    ks = np.unique(np.concatenate([
        np.arange(1.0, min(horizon - 2, 1024) + 1.0),
        np.rint(np.geomspace(1.0, max(horizon - 2, 1), num=128)),
    ]))
    d2 = delta2_reciprocal(spec, ks)
    scale = 1.0 / spec._eval(ks)
    nonneg = np.all(d2 >= -tol * scale)
    nonpos = np.all(d2 <= tol * scale)
    if nonneg and not nonpos:
        d2_sign = Delta2Sign.CONVEX
    elif nonpos and not nonneg:
        d2_sign = Delta2Sign.CONCAVE
    elif nonneg and nonpos:
        d2_sign = Delta2Sign.CONVEX  # identically zero counts as convex
    else:
        d2_sign = Delta2Sign.MIXED

    # max over n <= horizon of sum_{k=1}^{n-1} psi(n)/(k psi(k)).
    n_max = min(horizon, 10_000)
    kk = np.arange(1.0, n_max + 1.0)
    inv = 1.0 / (kk * spec._eval(kk))
    prefix = np.concatenate([[0.0], np.cumsum(inv)])  # prefix[m] = sum_{k<=m}
    psi_n = spec._eval(kk)
    sums = psi_n[1:] * prefix[1:-1]  # n = 2..n_max
    nerb_bound = float(np.max(sums)) if sums.size else 0.0

    return ConditionReport(
        in_doubling_class=in_doubling,
        doubling_sup=doubling_sup,
        theta_alpha=alpha,
        theta_status=status,
        delta2_sign=d2_sign,
        nerb_sum_bound=nerb_bound,
        horizon=horizon,
        p=p,
    )


def require_theta(spec: PsiSpec, p: float, horizon: int = 10_000) -> float:
    """Return a witnessed exponent for the integrability condition or raise."""
    alpha = find_almost_decreasing_exponent(spec, 1.0 / p, horizon=horizon)
    if alpha is None:
        raise InconclusiveAtHorizon(
            f"no exponent above 1/p = {1.0 / p:.4g} makes t^alpha * psi(t) almost "
            f"decreasing within factor {ALMOST_DECREASING_K} up to t = {horizon}"
        )
    return alpha
