"""Closed-form roots of real quadratics and cubics.

Cubics are solved by removing the quadratic term and applying Cardano's
formula in complex arithmetic throughout, so the solver is total: it always
produces exactly three (possibly complex) roots.  The two cube roots are
paired through a*b = -F/3 rather than extracted independently, which keeps
the three root expressions consistent for every branch of the complex cube
root.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DegenerateEquationError, InvalidInputError

# primitive cube root of unity, exp(2*pi*i/3)
_OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)
_OMEGA2 = _OMEGA.conjugate()


def _require_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidInputError(f"non-finite coefficient: {v!r}")


@dataclass(frozen=True)
class RealCubic:
    """Coefficients of a3*r**3 + a2*r**2 + a1*r + a0 with a3 != 0."""

    a3: float
    a2: float
    a1: float
    a0: float

    def __post_init__(self) -> None:
        _require_finite(self.a3, self.a2, self.a1, self.a0)
        if self.a3 == 0.0:
            raise InvalidInputError("leading coefficient must be nonzero (degree exactly 3)")


@dataclass(frozen=True)
class DepressedCubic:
    """y**3 + F*y + H = 0 together with the shift r = y + shift."""

    F: float
    H: float
    shift: float


@dataclass(frozen=True)
class CubicRoots:
    """The three roots, each flagged real when |imag| <= tol_imag."""

    roots: tuple[complex, complex, complex]
    real_flags: tuple[bool, bool, bool]

    def real_roots(self) -> tuple[float, ...]:
        return tuple(r.real for r, flag in zip(self.roots, self.real_flags) if flag)


def depress(cubic: RealCubic) -> DepressedCubic:
    """Normalize monic and substitute r = y - a2/(3*a3) to kill the y**2 term."""
    b = cubic.a2 / cubic.a3
    c = cubic.a1 / cubic.a3
    d = cubic.a0 / cubic.a3
    F = c - b * b / 3.0
    H = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    return DepressedCubic(F=F, H=H, shift=-b / 3.0)


def _principal_cbrt(z: complex) -> complex:
    if z == 0:
        return 0j
    return cmath.exp(cmath.log(z) / 3.0)


def cardano_roots(dep: DepressedCubic) -> CubicRoots:
    """Roots of y**3 + F*y + H = 0, shifted back to the original variable.

    Uses the pair of cube quantities 2a^3 = H + s, 2b^3 = H - s with
    s = sqrt(H^2 + 4F^3/27); the better-conditioned cube is rooted first and
    its partner is recovered from a*b = -F/3 to avoid branch mismatch and
    cancellation.  Roots are sorted by (real, imag) for determinism.
    """
    F, H = dep.F, dep.H
    _require_finite(F, H)
    s = cmath.sqrt(complex(H * H + 4.0 * F**3 / 27.0, 0.0))
    two_a3 = H + s
    two_b3 = H - s
    if abs(two_a3) >= abs(two_b3):
        a = _principal_cbrt(two_a3 / 2.0)
        b = -F / (3.0 * a) if a != 0 else _principal_cbrt(two_b3 / 2.0)
    else:
        b = _principal_cbrt(two_b3 / 2.0)
        a = -F / (3.0 * b) if b != 0 else _principal_cbrt(two_a3 / 2.0)

    raw = (-a - b, -a * _OMEGA2 - b * _OMEGA, -a * _OMEGA - b * _OMEGA2)
    shifted = sorted((r + dep.shift for r in raw), key=lambda z: (z.real, z.imag))
    tol_imag = 1e-9 * (1.0 + max(abs(r) for r in shifted))
    flags = tuple(abs(r.imag) <= tol_imag for r in shifted)
    return CubicRoots(roots=tuple(shifted), real_flags=flags)


def quadratic_roots(a: float, b: float, c: float) -> tuple[complex, ...]:
    """Roots of a*x**2 + b*x + c = 0; a single root for the linear case.

    Real discriminants are evaluated cancellation-safely: the larger-magnitude
    root comes from the stable sign choice, the other from the product c/a.
    """
    _require_finite(a, b, c)
    if a == 0.0:
        if b == 0.0:
            raise DegenerateEquationError("a = b = 0: not an equation in x")
        return (complex(-c / b),)
    disc = b * b - 4.0 * a * c
    if disc >= 0.0:
        sq = math.sqrt(disc)
        t = -(b + math.copysign(sq, b)) / 2.0
        if t == 0.0:
            # b == 0 and disc == 0, hence c == 0
            roots = (0j, 0j)
        else:
            roots = (complex(t / a), complex(c / t))
    else:
        sq = cmath.sqrt(complex(disc, 0.0))
        roots = ((-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a))
    return tuple(sorted(roots, key=lambda z: (z.real, z.imag)))
