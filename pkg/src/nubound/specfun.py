"""Associated Laguerre polynomials and deterministic adaptive quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, IntegrationFailureError

_MAX_DEPTH = 30


@dataclass(frozen=True)
class LaguerreOrder:
    """Degree n >= 0 and real order a > -1 (weight integrability)."""

    n: int
    a: float

    def __post_init__(self) -> None:
        if self.n < 0 or self.n != int(self.n):
            raise DomainError("degree n must be a non-negative integer")
        if not self.a > -1.0:
            raise DomainError("order a must exceed -1")


def laguerre(n: int, a: float, x):
    """Evaluate the associated Laguerre polynomial L_n^a(x).

    Uses the stable upward three-term recurrence
        L_0 = 1,  L_1 = 1 + a - x,
        (k+1) L_{k+1} = (2k + 1 + a - x) L_k - (k + a) L_{k-1}.
    Accepts a scalar or ndarray argument.
    """
    LaguerreOrder(n, a)  # validates
    if n == 0:
        return np.ones_like(x, dtype=float) if isinstance(x, np.ndarray) else 1.0
    prev = np.ones_like(x, dtype=float) if isinstance(x, np.ndarray) else 1.0
    cur = 1.0 + a - x
    for k in range(1, n):
        prev, cur = cur, ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0)
    return cur


def rodrigues_check(n: int, a: float, x: float) -> float:
    """Relative deviation between the Rodrigues form and ``laguerre``.

    Evaluates (1/n!) x**(-a) e**x d^n/dx^n [x**(n+a) e**(-x)] with a nested
    central-difference n-th derivative and compares against the recurrence.
    Intended as a small-n test oracle only.
    """
    if n > 5:
        raise DomainError("rodrigues_check supports n <= 5 only")
    LaguerreOrder(n, a)
    if n == 0:
        return 0.0
    if x <= 0.0:
        raise DomainError("x must be positive for the Rodrigues evaluation")
    # balance h**2 truncation against eps/h**n roundoff
    h = (2.2e-16) ** (1.0 / (n + 2)) * (1.0 + abs(x))
    if x - 0.5 * n * h <= 0.0:
        h = 1.9 * x / n

    def g(s: float) -> float:
        return s ** (n + a) * math.exp(-s)

    deriv = 0.0
    for i in range(n + 1):
        deriv += (-1.0) ** i * math.comb(n, i) * g(x + (0.5 * n - i) * h)
    deriv /= h**n
    rodrigues = deriv * math.exp(x) * x ** (-a) / math.factorial(n)
    ref = laguerre(n, a, x)
    return abs(rodrigues - ref) / max(1.0, abs(ref))


def integrate(f: Callable[[float], float], r_lo: float, r_hi: float, tol: float) -> float:
    """Adaptive composite Simpson quadrature of f over [r_lo, r_hi].

    Intervals are bisected until the local Richardson error estimate drops
    below the (halved-per-level) tolerance; evaluation order is fixed, so the
    result is deterministic.  Raises after 30 bisection levels.
    """
    if not (0.0 <= r_lo < r_hi):
        raise DomainError("require 0 <= r_lo < r_hi")
    if not tol > 0.0:
        raise DomainError("tolerance must be positive")

    def simpson(fa: float, fm: float, fb: float, width: float) -> float:
        return width / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(lo, hi, flo, fmid, fhi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = f(lm)
        frm = f(rm)
        left = simpson(flo, flm, fmid, mid - lo)
        right = simpson(fmid, frm, fhi, hi - mid)
        err = (left + right - whole) / 15.0
        if abs(err) <= eps:
            return left + right + err
        if depth >= _MAX_DEPTH:
            raise IntegrationFailureError(
                f"no convergence after {_MAX_DEPTH} bisection levels near [{lo}, {hi}]"
            )
        return recurse(lo, mid, flo, flm, fmid, left, eps / 2.0, depth + 1) + recurse(
            mid, hi, fmid, frm, fhi, right, eps / 2.0, depth + 1
        )

    flo, fhi = f(r_lo), f(r_hi)
    mid = 0.5 * (r_lo + r_hi)
    fmid = f(mid)
    whole = simpson(flo, fmid, fhi, r_hi - r_lo)
    return recurse(r_lo, r_hi, flo, fmid, fhi, whole, tol, 0)
