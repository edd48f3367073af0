"""Reduction of hypergeometric-type second-order equations to closed form.

The normal form handled here is

    y'' + (tau_tilde/sigma) y' + (sigma_tilde/sigma**2) y = 0

with deg(sigma) <= 2, deg(tau_tilde) <= 1, deg(sigma_tilde) <= 2.  Writing
y = phi * Y turns this into sigma Y'' + tau Y' + lambda_tilde Y = 0 provided
a degree-<=1 polynomial pi exists with

    pi = (sigma' - tau_tilde)/2 +- sqrt(((sigma' - tau_tilde)/2)**2
                                        - sigma_tilde + k*sigma)

for some constant k that makes the radicand a perfect square.  Each valid k
and inner sign yields one branch (k, pi, tau, lambda_tilde); polynomial
solutions of degree n then require lambda_tilde = -n tau' - n(n-1)/2 sigma''.
Branches with tau' >= 0 produce non-normalizable weight functions and are
flagged non-physical but still returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegenerateEquationError,
    DomainError,
    InvalidInputError,
    InvalidKError,
    NoBranchError,
    UnsupportedSigmaError,
)
from .polycubic import quadratic_roots

_DEG_TOL = 1e-14


@dataclass(frozen=True)
class LowPoly:
    """c0 + c1*s + c2*s**2 with an effective degree."""

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0

    def __post_init__(self) -> None:
        for c in (self.c0, self.c1, self.c2):
            if not math.isfinite(c):
                raise InvalidInputError(f"non-finite polynomial coefficient: {c!r}")

    @property
    def degree(self) -> int:
        if abs(self.c2) > _DEG_TOL:
            return 2
        if abs(self.c1) > _DEG_TOL:
            return 1
        return 0

    def __call__(self, s: float) -> float:
        return self.c0 + s * (self.c1 + s * self.c2)

    def derivative(self) -> "LowPoly":
        return LowPoly(self.c1, 2.0 * self.c2, 0.0)


def _add(a: LowPoly, b: LowPoly) -> LowPoly:
    return LowPoly(a.c0 + b.c0, a.c1 + b.c1, a.c2 + b.c2)


def _scale(a: LowPoly, f: float) -> LowPoly:
    return LowPoly(f * a.c0, f * a.c1, f * a.c2)


def _mul_linear(a: LowPoly, b: LowPoly) -> LowPoly:
    """Product of two degree-<=1 polynomials (degree <= 2, exact)."""
    return LowPoly(a.c0 * b.c0, a.c0 * b.c1 + a.c1 * b.c0, a.c1 * b.c1)


@dataclass(frozen=True)
class NUProblem:
    sigma: LowPoly
    tau_tilde: LowPoly
    sigma_tilde: LowPoly

    def __post_init__(self) -> None:
        if self.tau_tilde.degree > 1:
            raise InvalidInputError("tau_tilde must have degree <= 1")
        if self.sigma.degree == 0 and self.sigma.c0 == 0.0:
            raise InvalidInputError("sigma must not vanish identically")


@dataclass(frozen=True)
class NUBranch:
    k: float
    pi: LowPoly
    sign: int  # inner sign in front of the square root
    tau: LowPoly
    lambda_tilde: float
    physical: bool  # tau' < 0


@dataclass(frozen=True)
class QuantizationEquation:
    """lambda_tilde (branch constant) set equal to its degree-n value."""

    lhs: float
    rhs: float
    n: int

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class ClosedFormFactor:
    """s**power * exp(rate * s)."""

    power: float
    rate: float

    def __call__(self, s):
        import numpy as np

        return np.power(s, self.power) * np.exp(self.rate * s)


def _half_diff(prob: NUProblem) -> LowPoly:
    """(sigma' - tau_tilde)/2, a degree-<=1 polynomial."""
    sp = prob.sigma.derivative()
    return LowPoly(0.5 * (sp.c0 - prob.tau_tilde.c0), 0.5 * (sp.c1 - prob.tau_tilde.c1), 0.0)


def under_root(prob: NUProblem, k: float) -> LowPoly:
    """The radicand ((sigma' - tau_tilde)/2)**2 - sigma_tilde + k*sigma."""
    m = _half_diff(prob)
    sq = _mul_linear(m, m)
    return _add(_add(sq, _scale(prob.sigma_tilde, -1.0)), _scale(prob.sigma, k))


def _disc_poly_in_k(prob: NUProblem) -> tuple[float, float, float, tuple[float, ...]]:
    """Coefficients (qa, qb, qc) of disc_s(radicand) as a quadratic in k."""
    m = _half_diff(prob)
    sg, st = prob.sigma, prob.sigma_tilde
    A0, A1 = m.c1 * m.c1 - st.c2, sg.c2
    B0, B1 = 2.0 * m.c0 * m.c1 - st.c1, sg.c1
    C0, C1 = m.c0 * m.c0 - st.c0, sg.c0
    qa = B1 * B1 - 4.0 * A1 * C1
    qb = 2.0 * B0 * B1 - 4.0 * (A0 * C1 + A1 * C0)
    qc = B0 * B0 - 4.0 * A0 * C0
    return qa, qb, qc, (A0, A1, B0, B1, C0, C1)


def _near_zero(x: float, scale: float) -> bool:
    return abs(x) <= 1e-13 * scale


def k_candidates(prob: NUProblem) -> list[float]:
    """All real k for which the radicand is a perfect square in s.

    Zeroing the s-discriminant of the radicand gives a quadratic (or linear)
    equation in k.  Candidates are refined by one Newton step on disc(k) = 0
    and returned sorted ascending; coincident candidates are merged.
    """
    qa, qb, qc, (A0, A1, B0, B1, C0, C1) = _disc_poly_in_k(prob)
    m = _half_diff(prob)
    a_scale = m.c1 * m.c1 + abs(prob.sigma_tilde.c2) + 1.0

    if _near_zero(A1, abs(prob.sigma.c2) + 1.0) and _near_zero(A0, a_scale):
        # radicand has degree <= 1 in s for every k
        b_scale = abs(2.0 * m.c0 * m.c1) + abs(prob.sigma_tilde.c1) + 1.0
        if _near_zero(B1, abs(prob.sigma.c1) + 1.0) and _near_zero(B0, b_scale):
            # radicand is the constant C0 + C1*k; force it to zero
            if C1 == 0.0:
                raise NoBranchError("radicand is a fixed constant; no k to determine")
            return [-C0 / C1]
        if _near_zero(B1, abs(prob.sigma.c1) + 1.0):
            raise NoBranchError("linear radicand cannot be a perfect square")
        return [-B0 / B1]

    qscale = qa * qa + qb * qb + qc * qc
    if _near_zero(qa, math.sqrt(qscale) + 1.0) and _near_zero(qb, math.sqrt(qscale) + 1.0):
        raise NoBranchError("discriminant condition has no real solution for k")
    try:
        roots = quadratic_roots(qa, qb, qc)
    except DegenerateEquationError as exc:  # pragma: no cover - guarded above
        raise NoBranchError(str(exc)) from exc
    ks = [z.real for z in roots if abs(z.imag) <= 1e-9 * (1.0 + abs(z))]
    if not ks:
        raise NoBranchError("no real k zeroes the discriminant")

    refined = []
    for k in ks:
        slope = 2.0 * qa * k + qb
        if abs(slope) > 1e-12 * (abs(qa * k) + abs(qb) + 1.0):
            k = k - (qa * k * k + qb * k + qc) / slope
        refined.append(k)
    refined.sort()
    out = [refined[0]]
    for k in refined[1:]:
        if abs(k - out[-1]) > 1e-12 * (1.0 + abs(k)):
            out.append(k)
    return out


def _certify(p: LowPoly) -> None:
    scale = max(1.0, p.c1 * p.c1 + 4.0 * abs(p.c2 * p.c0))
    disc = p.c1 * p.c1 - 4.0 * p.c2 * p.c0
    if abs(disc) > 1e-9 * scale:
        raise InvalidKError(f"under-root quadratic is not a perfect square (disc = {disc:g})")


def _square_root_poly(p: LowPoly) -> tuple[float, float]:
    """(alpha, beta) with p = (alpha*s + beta)**2, alpha >= 0."""
    tiny = 1e-12 * max(1.0, abs(p.c0) + abs(p.c1) + abs(p.c2))
    if p.c2 > tiny:
        alpha = math.sqrt(p.c2)
        return alpha, p.c1 / (2.0 * alpha)
    if p.c2 < -tiny:
        raise InvalidKError("negative leading coefficient under the square root")
    return 0.0, math.sqrt(max(p.c0, 0.0))


def branches(prob: NUProblem, k: float) -> list[NUBranch]:
    """Both sign branches of pi for a certified k.

    The square root of the perfect-square radicand (alpha*s + beta)**2 is
    taken as +-(alpha*s + beta); both choices are enumerated.  Each branch
    carries tau = tau_tilde + 2*pi, lambda_tilde = k + pi', and the
    physicality flag tau' < 0.  A vanishing radicand collapses the two
    branches into one.
    """
    p = under_root(prob, k)
    _certify(p)
    alpha, beta = _square_root_poly(p)
    m = _half_diff(prob)
    out = []
    for sgn in (1, -1):
        pi = LowPoly(m.c0 + sgn * beta, m.c1 + sgn * alpha, 0.0)
        tau = _add(prob.tau_tilde, _scale(pi, 2.0))
        out.append(
            NUBranch(
                k=k,
                pi=pi,
                sign=sgn,
                tau=tau,
                lambda_tilde=k + pi.c1,
                physical=tau.c1 < 0.0,
            )
        )
    if alpha == 0.0 and beta == 0.0:
        return out[:1]
    return out


def lambda_n(prob: NUProblem, branch: NUBranch, n: int) -> float:
    """-n tau' - n(n-1)/2 sigma'', the degree-n eigenconstant."""
    if n < 0 or n != int(n):
        raise DomainError("n must be a non-negative integer")
    if not branch.physical:
        raise InvalidInputError("lambda_n requires a physical branch (tau' < 0)")
    return -n * branch.tau.c1 - 0.5 * n * (n - 1) * (2.0 * prob.sigma.c2)


def quantize(prob: NUProblem, branch: NUBranch, n: int) -> QuantizationEquation:
    """The eigenvalue condition lambda_tilde = lambda_n as a structured record.

    The caller solves it for whatever spectral parameter is embedded in the
    problem's polynomial coefficients.
    """
    return QuantizationEquation(lhs=branch.lambda_tilde, rhs=lambda_n(prob, branch, n), n=n)


def _require_sigma_is_s(sigma: LowPoly) -> float:
    scale = abs(sigma.c0) + abs(sigma.c1) + abs(sigma.c2)
    if abs(sigma.c0) > 1e-12 * scale or abs(sigma.c2) > 1e-12 * scale or sigma.c1 == 0.0:
        raise UnsupportedSigmaError("closed-form factors require sigma(s) proportional to s")
    return sigma.c1


def phi_factor(branch: NUBranch, sigma: LowPoly) -> ClosedFormFactor:
    """Solve phi'/phi = pi/sigma for sigma = s: phi = s**p0 * exp(p1*s)."""
    c1 = _require_sigma_is_s(sigma)
    return ClosedFormFactor(power=branch.pi.c0 / c1, rate=branch.pi.c1 / c1)


def rho_weight(branch: NUBranch, sigma: LowPoly) -> ClosedFormFactor:
    """Solve rho'/rho = (tau - sigma')/sigma for sigma = s."""
    c1 = _require_sigma_is_s(sigma)
    sp = sigma.derivative()
    return ClosedFormFactor(
        power=(branch.tau.c0 - sp.c0) / c1,
        rate=(branch.tau.c1 - sp.c1) / c1,
    )


def sigma_bar(prob: NUProblem, branch: NUBranch) -> LowPoly:
    """sigma_tilde + pi**2 + pi*(tau_tilde - sigma') + pi'*sigma.

    For a valid branch this equals lambda_tilde * sigma identically; the
    coefficient-level comparison is the internal consistency check of the
    whole reduction.
    """
    pi = branch.pi
    sp = prob.sigma.derivative()
    lin = LowPoly(prob.tau_tilde.c0 - sp.c0, prob.tau_tilde.c1 - sp.c1, 0.0)
    acc = _add(prob.sigma_tilde, _mul_linear(pi, pi))
    acc = _add(acc, _mul_linear(pi, lin))
    return _add(acc, _scale(prob.sigma, pi.c1))
