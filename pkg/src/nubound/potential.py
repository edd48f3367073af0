"""Inverse-power radial potentials.

Covers evaluation, the physical presets, a landscape survey (zeros and
extrema), and the second-order expansion of the r**-3 and deeper terms about
a point r0, which is what turns the problem into an exactly solvable
effective Coulomb-plus-centrifugal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import polycubic
from .errors import DomainError, InvalidInputError, NoStructureError

_BRACKET_LO = 1e-4
_BRACKET_HI = 1e4
_BRACKET_POINTS = 3000


@dataclass(frozen=True)
class InversePolyPotential:
    """V(r) = a0 + sum_h inv_coeffs[h-1] * r**-h for h = 1 .. h_max."""

    a0: float
    inv_coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.inv_coeffs)
        object.__setattr__(self, "inv_coeffs", coeffs)
        if len(coeffs) < 1:
            raise InvalidInputError("need at least one inverse-power coefficient (h_max >= 1)")
        for c in (self.a0, *coeffs):
            if not math.isfinite(c):
                raise InvalidInputError(f"non-finite coefficient: {c!r}")

    @property
    def h_max(self) -> int:
        return len(self.inv_coeffs)

    def coeff(self, h: int) -> float:
        """Coefficient of r**-h; h = 0 returns the constant term."""
        if h == 0:
            return self.a0
        if 1 <= h <= self.h_max:
            return self.inv_coeffs[h - 1]
        return 0.0

    def __call__(self, r):
        return evaluate(self, r)


def evaluate(p: InversePolyPotential, r):
    """V(r) via Horner evaluation in u = 1/r; r must be positive."""
    if np.any(np.asarray(r) <= 0.0):
        raise DomainError("potential is defined for r > 0 only")
    u = 1.0 / r
    acc = p.inv_coeffs[-1] if p.h_max else 0.0
    if isinstance(r, np.ndarray):
        acc = np.full_like(u, acc)
    for c in p.inv_coeffs[-2::-1]:
        acc = acc * u + c
    return p.a0 + acc * u


def derivative(p: InversePolyPotential, r):
    """V'(r) = -sum_h h * A_{-h} * r**-(h+1)."""
    if np.any(np.asarray(r) <= 0.0):
        raise DomainError("potential is defined for r > 0 only")
    u = 1.0 / r
    acc = p.h_max * p.inv_coeffs[-1]
    if isinstance(r, np.ndarray):
        acc = np.full_like(u, acc)
    for h in range(p.h_max - 1, 0, -1):
        acc = acc * u + h * p.inv_coeffs[h - 1]
    return -acc * u * u


def preset(name: str, **params) -> InversePolyPotential:
    """Build one of the named potential families.

    magnetic(alpha, A, B, C): alpha/r + A/r**2 + B/r**3 + C/r**4.
    neutrino(k, eps):         k(k+1)/r**2 + 2*eps*(k+1)/r**3 + 1/r**4,
                              k a nonzero integer, eps = +1 or -1.
    coulomb(alpha, ell):      alpha/r plus the centrifugal ell(ell+1)/r**2.
    """
    if name == "magnetic":
        alpha = float(params.pop("alpha", 0.0))
        A = float(params.pop("A", 0.0))
        B = float(params.pop("B", 0.0))
        C = float(params.pop("C", 0.0))
        _reject_extras(name, params)
        return InversePolyPotential(a0=0.0, inv_coeffs=(alpha, A, B, C))
    if name == "neutrino":
        if "k" not in params or "eps" not in params:
            raise InvalidInputError("neutrino preset requires k and eps")
        k = float(params.pop("k"))
        eps = float(params.pop("eps"))
        _reject_extras(name, params)
        if k != int(k) or k == 0.0:
            raise InvalidInputError("k must be a nonzero integer, k = +-(j + 1/2)")
        if eps not in (1.0, -1.0):
            raise InvalidInputError("eps must be +1 or -1")
        return InversePolyPotential(a0=0.0, inv_coeffs=(0.0, k * (k + 1.0), 2.0 * eps * (k + 1.0), 1.0))
    if name == "coulomb":
        alpha = float(params.pop("alpha", 0.0))
        ell = params.pop("ell", 0)
        _reject_extras(name, params)
        if ell != int(ell) or ell < 0:
            raise InvalidInputError("ell must be a non-negative integer")
        ell = int(ell)
        if ell == 0:
            return InversePolyPotential(a0=0.0, inv_coeffs=(alpha,))
        return InversePolyPotential(a0=0.0, inv_coeffs=(alpha, float(ell * (ell + 1))))
    raise InvalidInputError(f"unknown preset {name!r}")


def _reject_extras(name: str, leftover: dict) -> None:
    if leftover:
        raise InvalidInputError(f"preset {name!r} does not take {sorted(leftover)!r}")


@dataclass(frozen=True)
class Extremum:
    r: float
    value: float
    kind: str  # "minimum" | "maximum" | "inflection"


@dataclass(frozen=True)
class LandscapeReport:
    zeros: tuple[float, ...]
    extrema: tuple[Extremum, ...]
    method: str  # "closed-form-cubic" | "numeric-bracketing"


def _positive_real_roots(c3: float, c2: float, c1: float, c0: float) -> list[float]:
    """Positive real roots of c3 x**3 + c2 x**2 + c1 x + c0, deduplicated."""
    if c3 != 0.0:
        res = polycubic.cardano_roots(polycubic.depress(polycubic.RealCubic(c3, c2, c1, c0)))
        candidates = list(res.real_roots())
    elif c2 != 0.0 or c1 != 0.0:
        roots = polycubic.quadratic_roots(c2, c1, c0)
        candidates = [z.real for z in roots if abs(z.imag) <= 1e-9 * (1.0 + abs(z))]
    else:
        candidates = []
    out: list[float] = []
    for r in sorted(candidates):
        if r <= 0.0:
            continue
        if out and abs(r - out[-1]) <= 1e-8 * (1.0 + abs(r)):
            continue
        out.append(r)
    return out


def _second_derivative(p: InversePolyPotential, r: float) -> float:
    step = 1e-5 * r
    return (evaluate(p, r + step) - 2.0 * evaluate(p, r) + evaluate(p, r - step)) / (step * step)


def _curvature_scale(p: InversePolyPotential, r: float) -> float:
    return sum(h * (h + 1) * abs(c) * r ** -(h + 2) for h, c in enumerate(p.inv_coeffs, start=1))


def _classify(p: InversePolyPotential, r: float) -> Extremum:
    curv = _second_derivative(p, r)
    scale = _curvature_scale(p, r)
    if abs(curv) <= 1e-7 * scale:
        kind = "inflection"
    else:
        kind = "minimum" if curv > 0.0 else "maximum"
    return Extremum(r=r, value=float(evaluate(p, r)), kind=kind)


def _bisect(f, lo: float, hi: float) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi or (hi - lo) <= 1e-12 * mid:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (flo < 0.0) == (fm < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bracketed_roots(f) -> list[float]:
    grid = np.geomspace(_BRACKET_LO, _BRACKET_HI, _BRACKET_POINTS)
    vals = np.array([f(g) for g in grid])
    roots: list[float] = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0.0:
            roots.append(_bisect(f, float(grid[i]), float(grid[i + 1])))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    out: list[float] = []
    for r in sorted(roots):
        if out and abs(r - out[-1]) <= 1e-9 * (1.0 + abs(r)):
            continue
        out.append(r)
    return out


def landscape(p: InversePolyPotential) -> LandscapeReport:
    """Positive zeros of V and classified extrema of V.

    With a0 = 0 and h_max <= 4 both V*r**4 = 0 and V'*r**5 = 0 are
    polynomials of degree <= 3 and are solved in closed form; anything else
    falls back to sign-change bracketing on a log grid plus bisection.
    """
    if p.a0 == 0.0 and p.h_max <= 4:
        a = [p.coeff(1), p.coeff(2), p.coeff(3), p.coeff(4)]
        zeros = _positive_real_roots(a[0], a[1], a[2], a[3])
        crit = _positive_real_roots(a[0], 2.0 * a[1], 3.0 * a[2], 4.0 * a[3])
        method = "closed-form-cubic"
    else:
        zeros = _bracketed_roots(lambda r: float(evaluate(p, r)))
        crit = _bracketed_roots(lambda r: float(derivative(p, r)))
        method = "numeric-bracketing"
    extrema = tuple(_classify(p, r) for r in crit)
    return LandscapeReport(zeros=tuple(zeros), extrema=extrema, method=method)


@dataclass(frozen=True)
class ExpansionTriple:
    """Effective coefficients about r0: centrifugal q, Coulomb strength w,
    and the eigenvalue-independent constant part z_pot."""

    q: float
    w: float
    z_pot: float
    r0: float


def expansion_coeffs(p: InversePolyPotential, r0: float) -> ExpansionTriple:
    """Second-order expansion of the h >= 3 inverse powers about r0.

    The 1/r and 1/r**2 terms are kept exact; each deeper term A_{-h-2}/r**h
    (h >= 1) contributes
        q      += (h+2)(h+1)/2 * A_{-h-2} / r0**h
        w      += h(h+2)       * A_{-h-2} / r0**(h+1)
        z_pot  += h(h+1)/2     * A_{-h-2} / r0**(h+2)
    so that V is modeled by q/r**2 - w/r + z_pot near r0.
    """
    if not (r0 > 0.0 and math.isfinite(r0)):
        raise DomainError("expansion point r0 must be positive and finite")
    q = p.coeff(2)
    w = -p.coeff(1)
    z_pot = p.a0
    for h in range(1, p.h_max - 1):
        c = p.coeff(h + 2)
        q += 0.5 * (h + 2) * (h + 1) * c / r0**h
        w += h * (h + 2) * c / r0 ** (h + 1)
        z_pot += 0.5 * h * (h + 1) * c / r0 ** (h + 2)
    return ExpansionTriple(q=q, w=w, z_pot=z_pot, r0=r0)


def auto_r0(p: InversePolyPotential) -> float:
    """Innermost local minimum of V, else the smallest positive zero.

    Raises NoStructureError when the potential has neither, in which case the
    caller must supply r0 explicitly.
    """
    rep = landscape(p)
    minima = [e.r for e in rep.extrema if e.kind == "minimum"]
    if minima:
        return min(minima)
    if rep.zeros:
        return min(rep.zeros)
    raise NoStructureError(
        "auto_r0: potential has no positive minimum and no positive zero; pass r0 explicitly"
    )
