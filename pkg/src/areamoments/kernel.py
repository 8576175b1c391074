"""Numeric kernel-method toolkit for the meander functional equation.

Structural constants of a step set, small/large branch extraction of the
kernel 1 - z S(u) = 0, square-root (Puiseux) leading-term verification, the
determinantal solution of the catalytic linear system at q = 1, and an
auditor for the analytic assumptions the limit theorems rest on.

All numerics are binary64 with explicit residual acceptance thresholds.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BracketFailure,
    ClassificationAmbiguity,
    IllConditioned,
    InternalInconsistency,
    RootFindFailure,
)
from .steps import StepSet, characteristics, eval_step_polynomial

ROOT_TOL = 1e-12          # |S'(tau)| acceptance
KERNEL_RESIDUAL_TOL = 1e-10
GAP_TOL = 1e-8            # small/large modulus separation
COND_LIMIT = 1e12
CROSS_CHECK_RTOL = 1e-8


class Regime(Enum):
    NEGATIVE = "NegativeDrift"
    ZERO = "ZeroDrift"
    POSITIVE = "PositiveDrift"


@dataclass(frozen=True)
class KernelProfile:
    """Structural constants of a step set (or compatible kernel model)."""

    tau: float     # positive critical point of S
    rho: float     # 1 / S(tau)
    beta: float    # sqrt(2 S(tau) / S''(tau))
    drift: Fraction | None
    regime: Regime
    period: int
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class BranchSet:
    """Kernel roots at one z, split into small and large branches.

    small[0] is the dominant branch: the unique positive real small root.
    """

    z: float
    small: tuple[complex, ...]
    large: tuple[complex, ...]
    max_residual: float

    @property
    def u1(self) -> float:
        return self.small[0].real


@dataclass(frozen=True)
class CatalyticSolution:
    """Excursion-type generating function values G_0..G_{c-1} at one z."""

    z: float
    g_values: tuple[float, ...]
    f_at: dict[float, float] | None
    condition: float


@dataclass(frozen=True)
class PuiseuxReport:
    rows: tuple[tuple[float, float], ...]  # (z, deviation from beta)
    beta: float
    max_deviation: float
    decreasing: bool
    success: bool


@dataclass(frozen=True)
class AssumptionReport:
    profile: KernelProfile
    rows: tuple[dict, ...]
    aperiodic: bool
    warnings: tuple[str, ...]


def _sp(s: StepSet, u: float, order: int = 0) -> float:
    return float(eval_step_polynomial(s, u, order))


def structural_constants(s: StepSet) -> KernelProfile:
    """tau, rho, beta, drift regime and period of a step set.

    tau is bracketed as the root of the polynomial u^(c+1) S'(u), which is
    negative at 0 and positive for large u, then Newton-polished on S'.
    """
    ch = characteristics(s)
    c = s.c

    def poly(u: float) -> float:
        return sum(float(w) * step * u ** (step + c) for step, w in s.items)

    hi = 1.0
    for _ in range(200):
        if poly(hi) > 0:
            break
        hi *= 2.0
    else:
        raise BracketFailure("no sign change found for u^(c+1) S'(u)")
    tau = brentq(poly, 0.0, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    for _ in range(3):
        d1 = _sp(s, tau, 1)
        d2 = _sp(s, tau, 2)
        tau -= d1 / d2
    if abs(_sp(s, tau, 1)) > ROOT_TOL:
        raise RootFindFailure(f"S'(tau) residual {abs(_sp(s, tau, 1)):.3e}")
    s_tau = _sp(s, tau, 0)
    s2_tau = _sp(s, tau, 2)
    if s2_tau <= 0:
        raise RootFindFailure("S''(tau) must be positive")
    rho = 1.0 / s_tau
    beta = (2.0 * s_tau / s2_tau) ** 0.5
    if ch.drift < 0:
        regime = Regime.NEGATIVE
    elif ch.drift > 0:
        regime = Regime.POSITIVE
    else:
        regime = Regime.ZERO
    warnings = ()
    if not ch.aperiodic:
        warnings = (
            f"periodic step set (period {ch.period}): the kernel has "
            f"{ch.period} dominant singularities and the separation checks "
            "may fail near rho",
        )
    return KernelProfile(tau, rho, beta, ch.drift, regime, ch.period, warnings)


def _kernel_coeffs(s: StepSet, z: float) -> np.ndarray:
    """Coefficients of u^c - z u^c S(u), highest degree first."""
    c, d = s.c, s.d
    coeffs = np.zeros(c + d + 1)
    coeffs[d] = 1.0  # u^c term sits at index (c+d) - c
    for step, w in s.items:
        coeffs[d - step] -= z * float(w)
    return coeffs


def _polish_root(coeffs: np.ndarray, r: complex) -> complex:
    deriv = np.polyder(coeffs)
    for _ in range(4):
        f = np.polyval(coeffs, r)
        df = np.polyval(deriv, r)
        if df == 0:
            break
        r -= f / df
    return r


def branches_at(s: StepSet, z: float) -> BranchSet:
    """All c + d kernel roots at real z in (0, rho), classified by modulus.

    Classification relies on the small-branch domination property; if the
    modulus gap between the c-th and (c+1)-th sorted root is below 1e-8 the
    split is refused.
    """
    profile = structural_constants(s)
    if not 0.0 < z < profile.rho:
        raise ValueError(f"z = {z} outside (0, rho = {profile.rho:.6g})")
    c = s.c
    coeffs = _kernel_coeffs(s, z)
    roots = [_polish_root(coeffs, r) for r in np.roots(coeffs)]
    roots.sort(key=abs)
    gap = abs(roots[c]) - abs(roots[c - 1])
    if gap < GAP_TOL:
        raise ClassificationAmbiguity(
            f"modulus gap {gap:.3e} between branch families at z = {z}"
        )
    max_res = 0.0
    for r in roots:
        res = abs(1.0 - z * _eval_laurent(s, r))
        max_res = max(max_res, res)
    if max_res > KERNEL_RESIDUAL_TOL:
        raise RootFindFailure(f"kernel residual {max_res:.3e} at z = {z}")
    small, large = roots[:c], roots[c:]
    positive_real = [
        r for r in small if abs(r.imag) < 1e-9 * max(1.0, abs(r)) and r.real > 0
    ]
    if len(positive_real) != 1:
        raise ClassificationAmbiguity(
            f"expected exactly one positive real small branch, got "
            f"{len(positive_real)} at z = {z}"
        )
    u1 = positive_real[0]
    rest = sorted((r for r in small if r is not u1),
                  key=lambda r: (abs(r), cmath.phase(r)))
    large.sort(key=lambda r: (abs(r), cmath.phase(r)))
    return BranchSet(z, (u1, *rest), tuple(large), max_res)


def _eval_laurent(s: StepSet, u: complex) -> complex:
    return sum(complex(w) * u**step for step, w in s.items)


def verify_puiseux(s: StepSet, grid) -> PuiseuxReport:
    """Deviation of (tau - u1(z)) / sqrt(1 - z/rho) from beta along a grid.

    The grid must lie in (0.8 rho, rho), ascending; the contract is a
    deviation decreasing along the grid with final value below 0.05 beta.
    """
    profile = structural_constants(s)
    grid = sorted(float(z) for z in grid)
    if not grid:
        raise ValueError("empty grid")
    if grid[0] <= 0.8 * profile.rho or grid[-1] >= profile.rho:
        raise ValueError(
            f"grid must lie strictly inside (0.8 rho, rho) = "
            f"({0.8 * profile.rho:.6g}, {profile.rho:.6g})"
        )
    rows = []
    for z in grid:
        u1 = branches_at(s, z).u1
        dev = abs((profile.tau - u1) / (1.0 - z / profile.rho) ** 0.5
                  - profile.beta)
        rows.append((z, dev))
    devs = [d for _, d in rows]
    decreasing = all(devs[i + 1] < devs[i] for i in range(len(devs) - 1))
    success = decreasing and devs[-1] < 0.05 * profile.beta
    return PuiseuxReport(tuple(rows), profile.beta, max(devs), decreasing, success)


def _r_laurent(s: StepSet, i: int, u: complex) -> complex:
    """Boundary Laurent polynomial r_i(u) = u^i sum_{j<= -(i+1)} s_j u^j."""
    return sum(
        complex(w) * u ** (i + step)
        for step, w in s.items
        if step <= -(i + 1)
    )


def _t_matrix(s: StepSet, z: float, us) -> np.ndarray:
    c = s.c
    m = np.empty((len(us), c), dtype=complex)
    for row, u in enumerate(us):
        uc = u**c
        for i in range(c):
            m[row, i] = z * uc * _r_laurent(s, i, u)
    return m


def solve_meander_gf(s: StepSet, z: float, u_eval=None) -> CatalyticSolution:
    """G_0(z)..G_{c-1}(z) at q = 1 by the kernel method, plus F(z,1,u).

    Substituting the c small branches into the functional equation yields the
    c x c system M x = y with M[l,i] = z u_l^c r_i(u_l) and y_l = u_l^c;
    the direct solve is cross-checked against both determinant forms.
    """
    branches = branches_at(s, z)
    us = branches.small
    c = s.c
    m = _t_matrix(s, z, us)
    y = np.array([u**c for u in us], dtype=complex)
    condition = float(np.linalg.cond(m))
    if condition > COND_LIMIT:
        raise IllConditioned(f"condition estimate {condition:.3e} at z = {z}")
    x = np.linalg.solve(m, y)

    det_m = complex(np.linalg.det(m))
    scale = max(max(abs(v) for v in x), 1e-300)  # vector norm, not per entry
    for k in range(c):
        # Cramer form: replace column k by y
        gk = m.copy()
        gk[:, k] = y
        cramer = complex(np.linalg.det(gk)) / det_m
        # Laplace expansion along that column via row/column minors
        laplace = 0.0 + 0.0j
        for l in range(c):
            minor = np.delete(np.delete(m, l, axis=0), k, axis=1)
            sign = (-1.0) ** (k + (l + 1) - 1)
            laplace += y[l] * sign * (
                complex(np.linalg.det(minor)) if c > 1 else 1.0
            )
        laplace /= det_m
        if (abs(x[k] - cramer) > CROSS_CHECK_RTOL * scale
                or abs(x[k] - laplace) > CROSS_CHECK_RTOL * scale):
            raise InternalInconsistency(
                f"catalytic solve disagrees with determinant forms at z = {z}"
            )

    imag = max(abs(v.imag) for v in x)
    if imag > 1e-8 * max(1.0, max(abs(v) for v in x)):
        raise InternalInconsistency(
            f"catalytic solution has imaginary part {imag:.3e}"
        )
    g_values = tuple(float(v.real) for v in x)

    f_at = None
    if u_eval is not None:
        f_at = {}
        for u in u_eval:
            u = float(u)
            phi = u**c * (1.0 - z * _eval_laurent(s, u).real)
            num = u**c - sum(
                (z * u**c * _r_laurent(s, i, u)).real * g_values[i]
                for i in range(c)
            )
            f_at[u] = num / phi
    return CatalyticSolution(z, g_values, f_at, condition)


def truncation_bound(s: StepSet, z: float, m_trunc: int) -> float:
    """Geometric tail bound (z S(u*))^(M+1) / (1 - z S(u*)), u* = max(1, tau).

    Valid because every weighted meander count of length m is at most
    S(u*)^m for u* >= 1.
    """
    profile = structural_constants(s)
    u_star = max(1.0, profile.tau)
    r = z * _sp(s, u_star, 0)
    if not 0.0 < r < 1.0:
        raise ValueError(f"majorant ratio z S(u*) = {r} not in (0, 1)")
    return r ** (m_trunc + 1) / (1.0 - r)


def assumption_report(s: StepSet, grid) -> AssumptionReport:
    """Numeric audit of the analytic assumptions on a z grid.

    Per grid point: minimal pairwise small-branch distance (simplicity),
    the small/large modulus gap (separation), and the normalized determinant
    |det M| / (|s_{-c} z|^c |Vandermonde|), which should stay away from 0
    (it equals 1 identically for the meander specialization).
    """
    profile = structural_constants(s)
    s_mc = float(s.items[0][1])
    c = s.c
    rows = []
    for z in sorted(float(z) for z in grid):
        branches = branches_at(s, z)
        us = branches.small
        if c >= 2:
            min_gap = min(
                abs(us[i] - us[j])
                for i in range(c) for j in range(i + 1, c)
            )
            vand = 1.0 + 0.0j
            for i in range(c):
                for j in range(i + 1, c):
                    vand *= us[i] - us[j]
            det_m = complex(np.linalg.det(_t_matrix(s, z, us)))
            det_proxy = abs(det_m) / (abs(s_mc * z) ** c * abs(vand))
        else:
            min_gap = float("inf")
            det_proxy = abs(complex(
                np.linalg.det(_t_matrix(s, z, us)))) / abs(s_mc * z)
        modulus_gap = min(abs(v) for v in branches.large) - max(
            abs(u) for u in us
        )
        rows.append({
            "z": z,
            "min_small_branch_gap": float(min_gap),
            "small_large_modulus_gap": float(modulus_gap),
            "det_proxy": float(det_proxy),
            "kernel_residual": branches.max_residual,
        })
    return AssumptionReport(
        profile=profile,
        rows=tuple(rows),
        aperiodic=(profile.period == 1),
        warnings=profile.warnings,
    )
