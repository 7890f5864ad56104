"""Finite trigonometric polynomials: evaluation, Fourier analysis, partial sums.

A polynomial of degree m is stored as the constant term a0/2 plus dense cosine
and sine coefficient arrays for harmonics 1..m.  Values and norms follow the
non-normalized convention on [0, 2*pi]:  ||f||_2^2 = integral of f^2, so a pure
harmonic cos(kt) has norm sqrt(pi).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AliasingRisk

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Immutable trigonometric polynomial a0/2 + sum_k (a_k cos kt + b_k sin kt)."""

    a0: float
    a: np.ndarray = field(default_factory=lambda: np.zeros(0))
    b: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float)).copy()
        b = np.atleast_1d(np.asarray(self.b, dtype=float)).copy()
        if a.size < b.size:
            a = np.concatenate([a, np.zeros(b.size - a.size)])
        elif b.size < a.size:
            b = np.concatenate([b, np.zeros(a.size - b.size)])
        # trim exactly-zero trailing harmonics so degree is well defined
        nz = np.flatnonzero((a != 0.0) | (b != 0.0))
        m = int(nz[-1] + 1) if nz.size else 0
        a, b = a[:m], b[:m]
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def degree(self) -> int:
        return self.a.size

    @property
    def mean(self) -> float:
        return 0.5 * self.a0

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls(0.0)

    @classmethod
    def harmonic(cls, k: int, a: float = 0.0, b: float = 0.0) -> "TrigPoly":
        """Single harmonic a*cos(kt) + b*sin(kt); k = 0 gives the constant a."""
        if k == 0:
            return cls(2.0 * a)
        ca = np.zeros(k)
        cb = np.zeros(k)
        ca[k - 1] = a
        cb[k - 1] = b
        return cls(0.0, ca, cb)

    # -- evaluation ----------------------------------------------------------

    def __call__(self, t):
        """Evaluate at t (scalar or array) by a complex Horner recurrence."""
        t_arr = np.asarray(t, dtype=float)
        if self.degree == 0:
            out = np.full(t_arr.shape, 0.5 * self.a0)
        else:
            z = np.exp(1j * t_arr)
            c = self.a - 1j * self.b  # sum Re(c_k z^k) = a_k cos + b_k sin
            s = np.zeros_like(z)
            for k in range(self.degree - 1, -1, -1):
                s = s * z + c[k]
            out = 0.5 * self.a0 + np.real(z * s)
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    # -- coefficient operations ----------------------------------------------

    def partial_sum(self, n: int) -> "TrigPoly":
        """Fourier sum of order n-1: keep the mean and harmonics k <= n-1."""
        if n < 1:
            raise ValueError(f"order must be >= 1, got n={n}")
        m = min(self.degree, n - 1)
        return TrigPoly(self.a0, self.a[:m], self.b[:m])

    def l2_norm(self) -> float:
        """Exact L2([0, 2*pi]) norm via the coefficient sum."""
        return float(np.sqrt(np.pi * (0.5 * self.a0 ** 2 + np.sum(self.a ** 2 + self.b ** 2))))

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        m = max(self.degree, other.degree)
        a = np.zeros(m)
        b = np.zeros(m)
        a[: self.degree] += self.a
        b[: self.degree] += self.b
        a[: other.degree] += other.a
        b[: other.degree] += other.b
        return TrigPoly(self.a0 + other.a0, a, b)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "TrigPoly":
        return TrigPoly(self.a0 * scalar, self.a * scalar, self.b * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "TrigPoly":
        return self * (1.0 / scalar)

    def __neg__(self) -> "TrigPoly":
        return self * (-1.0)

    def coefficient(self, k: int) -> tuple[float, float]:
        """(a_k, b_k) pair for harmonic k; (a0, 0) for k = 0."""
        if k == 0:
            return self.a0, 0.0
        if k > self.degree:
            return 0.0, 0.0
        return float(self.a[k - 1]), float(self.b[k - 1])

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"a0": self.a0, "a": self.a.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "TrigPoly":
        return cls(obj["a0"], np.asarray(obj.get("a", [])), np.asarray(obj.get("b", [])))


def analyze(f, degree: int, grid_size: int | None = None) -> TrigPoly:
    """Degree-`degree` truncation of the discrete Fourier expansion of f.

    Parameters
    ----------
    f : callable
        2*pi-periodic, vectorized over numpy arrays (a TrigPoly works).
    degree : int
        Highest harmonic retained.
    grid_size : int, optional
        Number of uniform samples; defaults to the alias-safe 4*degree + 4.
        A grid below that threshold triggers an AliasingRisk warning.

    The result is exact (to rounding) when f is itself a trigonometric
    polynomial of degree <= grid_size/2 - 1.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    n = int(grid_size) if grid_size is not None else 4 * degree + 4
    if n < 4 * degree + 4:
        warnings.warn(
            f"grid of {n} samples is below 4*degree+4 = {4 * degree + 4}; "
            "high harmonics may alias",
            AliasingRisk,
            stacklevel=2,
        )
    if n < 2 * degree + 2:
        raise ValueError(f"grid of {n} cannot resolve degree {degree} at all")
    ts = TWO_PI * np.arange(n) / n
    samples = np.asarray(f(ts), dtype=float)
    spec = np.fft.rfft(samples)
    a0 = 2.0 * spec[0].real / n
    a = 2.0 * spec[1: degree + 1].real / n
    b = -2.0 * spec[1: degree + 1].imag / n
    return TrigPoly(a0, a, b)
