"""Closed-form eigenvalues and eigenfunctions for inverse-power potentials.

Each state is labeled by the quantum number n and the branch sign of the
eigenvalue formula

    lambda2 = z_pot - w**2 / [(2n + 1) + 2*sign*sqrt(q + 1/4)]**2

with (q, w, z_pot) from the second-order expansion about r0.  Bound states
carry the wavefunction

    U(r) = N * r**power * exp(-sqrt(z) r) * L_n^order(2 sqrt(z) r),
    power = 1/2 + sign*sqrt(q + 1/4),   order = 2*sign*sqrt(q + 1/4),

where z = z_pot - lambda2.  The Laguerre argument is the scaled 2*sqrt(z)*r;
this is the convention the Rodrigues construction with weight
r**order * exp(-2 sqrt(z) r) produces, and it is the one under which U solves
U'' = [q/r**2 - w/r + z] U exactly.  Only the plus branch can satisfy the
normalizability gates (z > 0, w > 0, power > 1/2); minus-branch states are
still computed and flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (
    ComplexIndexError,
    DomainError,
    InvalidInputError,
    NonNormalizableError,
    SingularBranchError,
)
from .potential import InversePolyPotential, auto_r0, expansion_coeffs
from .specfun import integrate, laguerre

_ENVELOPE_LOG_DROP = -20.0  # U**2 below exp(2*this) of its peak is discarded


@dataclass(frozen=True)
class EigenState:
    n: int
    branch_sign: int
    lambda2: float
    q: float
    w: float
    z: float
    r0: float
    power: float
    rate: float
    laguerre_order: float
    normalizable: bool
    norm: float | None = None
    norm_cutoff: float | None = None


def _branch_pieces(p: InversePolyPotential, r0: float, n: int, branch_sign: int):
    if n < 0 or n != int(n):
        raise DomainError("n must be a non-negative integer")
    if branch_sign not in (1, -1):
        raise InvalidInputError("branch_sign must be +1 or -1")
    tri = expansion_coeffs(p, r0)
    s_sq = tri.q + 0.25
    if s_sq < 0.0:
        raise ComplexIndexError(
            f"q + 1/4 = {s_sq:g} < 0: supercritical inverse-square attraction"
        )
    s = math.sqrt(s_sq)
    denom = (2 * n + 1) + 2.0 * branch_sign * s
    if abs(denom) <= 1e-12 * (2 * n + 1 + 2.0 * s):
        raise SingularBranchError(f"eigenvalue denominator vanishes at n={n}, sign={branch_sign:+d}")
    return tri, s, denom


def eigenvalue(p: InversePolyPotential, r0: float, n: int, branch_sign: int = 1) -> float:
    """lambda2 = z_pot - w**2 / [(2n + 1) + 2*sign*sqrt(q + 1/4)]**2."""
    tri, _, denom = _branch_pieces(p, r0, n, branch_sign)
    return tri.z_pot - (tri.w / denom) ** 2


def _raw_wavefunction(n: int, order: float, power: float, rate: float) -> Callable:
    def u(r):
        arr = np.asarray(r, dtype=float)
        if np.any(arr < 0.0):
            raise DomainError("wavefunction is defined for r >= 0")
        out = np.zeros_like(arr)
        with np.errstate(divide="ignore"):
            t = power * np.log(arr, where=arr > 0.0, out=np.full_like(arr, -np.inf)) - rate * arr
        mask = t > -600.0
        if np.any(mask):
            out[mask] = np.exp(t[mask]) * laguerre(n, order, 2.0 * rate * arr[mask])
        return float(out) if np.isscalar(r) or np.asarray(r).ndim == 0 else out

    return u


def _envelope_cutoff(n: int, power: float, rate: float) -> float:
    """Radius beyond which |U|**2 is below ~1e-17 of its peak."""
    g = power + n  # effective power of the decaying envelope r**g * exp(-rate*r)
    r_pk = max(g / rate, 1e-3 / rate)

    def eta(r: float) -> float:
        return g * math.log(r) - rate * r

    top = eta(r_pk)
    r = 2.0 * r_pk
    for _ in range(400):
        if eta(r) - top < _ENVELOPE_LOG_DROP:
            return r
        r *= 1.25
    return r


def _normalize(n: int, order: float, power: float, rate: float) -> tuple[float, float]:
    u = _raw_wavefunction(n, order, power, rate)
    cutoff = _envelope_cutoff(n, power, rate)
    grid = np.linspace(0.0, cutoff, 4097)
    vals = u(grid) ** 2
    rough = float(np.trapezoid(vals, grid))
    total = integrate(lambda r: u(r) ** 2, 0.0, cutoff, tol=max(1e-300, 1e-10 * rough))
    return 1.0 / math.sqrt(total), cutoff


def _build_state(
    p: InversePolyPotential, r0: float, n: int, branch_sign: int, normalize: bool = True
) -> EigenState:
    tri, s, denom = _branch_pieces(p, r0, n, branch_sign)
    z = (tri.w / denom) ** 2
    lam2 = tri.z_pot - z
    power = 0.5 + branch_sign * s
    order = 2.0 * branch_sign * s
    normalizable = z > 0.0 and tri.w > 0.0 and power > 0.5
    state = EigenState(
        n=n,
        branch_sign=branch_sign,
        lambda2=lam2,
        q=tri.q,
        w=tri.w,
        z=z,
        r0=r0,
        power=power,
        rate=math.sqrt(z),
        laguerre_order=order,
        normalizable=normalizable,
    )
    if normalizable and normalize:
        norm, cutoff = _normalize(n, order, power, state.rate)
        state = replace(state, norm=norm, norm_cutoff=cutoff)
    return state


def eigenfunction(state: EigenState) -> Callable:
    """Normalized U(r) as a callable over scalars or arrays; refuses
    non-normalizable states."""
    if not state.normalizable:
        raise NonNormalizableError(
            f"state n={state.n}, sign={state.branch_sign:+d} is not a bound state"
        )
    if state.norm is not None:
        norm, cutoff = state.norm, state.norm_cutoff
    else:
        norm, cutoff = _normalize(state.n, state.laguerre_order, state.power, state.rate)
    u = _raw_wavefunction(state.n, state.laguerre_order, state.power, state.rate)

    def wave(r):
        return norm * u(r)

    wave.cutoff = cutoff
    return wave


def solve_spectrum(
    p: InversePolyPotential,
    r0_policy,
    n_max: int,
    branch_policy: str = "plus",
) -> list[EigenState]:
    """States for n = 0..n_max and the requested branch signs, sorted by
    lambda2.

    r0_policy is either the string "auto" or an explicit positive value.
    Non-normalizable states are retained with their flag; (n, sign) pairs with
    a vanishing denominator are skipped.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    try:
        signs = {"plus": (1,), "minus": (-1,), "both": (1, -1)}[branch_policy]
    except KeyError:
        raise InvalidInputError(f"unknown branch policy {branch_policy!r}") from None
    r0 = auto_r0(p) if isinstance(r0_policy, str) and r0_policy == "auto" else float(r0_policy)
    if not (r0 > 0.0 and math.isfinite(r0)):
        raise DomainError("explicit r0 must be positive and finite")
    states: list[EigenState] = []
    for n in range(n_max + 1):
        for sgn in signs:
            try:
                states.append(_build_state(p, r0, n, sgn))
            except SingularBranchError:
                continue
    states.sort(key=lambda s: (s.lambda2, s.n, -s.branch_sign))
    return states


def node_count(state: EigenState, samples: int = 2000) -> int:
    """Sign changes of U on a log grid over the region where |U| is above
    1e-12 of its maximum."""
    wave = eigenfunction(state)
    r_pk = max((state.power + state.n) / state.rate, 1e-3 / state.rate)
    grid = np.geomspace(r_pk * 1e-6, wave.cutoff, samples)
    vals = wave(grid)
    live = vals[np.abs(vals) > 1e-12 * np.max(np.abs(vals))]
    return int(np.sum(live[:-1] * live[1:] < 0.0))
