"""Column-convex polygon enumeration by half-perimeter, area and last column.

Three independent routes to the same numbers: a column-by-column DP, an
order-by-order exact solution of the catalytic functional equation of the
model, and (for small areas) a brute-force enumeration of fixed polyominoes
filtered to column convexity. The DP transition bookkeeping is the most
error-prone piece of the whole artifact, hence the redundancy.

Conventions: the size variable is the half-perimeter (a 1 x h column has
half-perimeter h + 1); area is the cell count; the catalytic variable is the
height of the rightmost column.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from scipy.optimize import brentq

from .errors import InternalInconsistency, OutOfMemoryBudget, RootFindFailure
from .kernel import KernelProfile, Regime

_CELL_BUDGET_DEFAULT = (1 << 31) // 48


# -- model data ---------------------------------------------------------------
# Bivariate rational functions of the functional equation, as integer
# polynomial (numerator, denominator) pairs in (z, u); keys are (z_deg, u_deg).
# Q(z,u) = (1-u)^2 (1-zu)^2 clears every denominator.

def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i, j), ca in a.items():
        for (k, l), cb in b.items():
            key = (i + k, j + l)
            out[key] = out.get(key, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


_ONE = {(0, 0): 1}
_1MU = {(0, 0): 1, (0, 1): -1}          # 1 - u
_1MZU = {(0, 0): 1, (1, 1): -1}         # 1 - zu
_Q = _poly_mul(_poly_mul(_1MU, _1MU), _poly_mul(_1MZU, _1MZU))


@dataclass(frozen=True)
class CCKernelData:
    """The model's S, r_0, r_1, W as numerator/denominator polynomial pairs."""

    s_num: dict
    s_den: dict
    r0_num: dict
    r0_den: dict
    r1_num: dict
    r1_den: dict
    w_num: dict
    w_den: dict
    q: dict

    @staticmethod
    def evaluate(num: dict, den: dict, z: float, u: float) -> float:
        ev = lambda p: sum(c * z**i * u**j for (i, j), c in p.items())
        d = ev(den)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at z={z}, u={u}")
        return ev(num) / d


def cc_kernel_data() -> CCKernelData:
    return CCKernelData(
        # S = u^2 (1-z)^2 / ((1-u)^2 (1-zu)^2)
        s_num={(0, 2): 1, (1, 2): -2, (2, 2): 1},
        s_den=_Q,
        # r_0 = z u^2 (2z - zu - 1) / ((1-u)^2 (1-zu))
        r0_num={(2, 2): 2, (2, 3): -1, (1, 2): -1},
        r0_den=_poly_mul(_poly_mul(_1MU, _1MU), _1MZU),
        # r_1 = z u / (1-u)
        r1_num={(1, 1): 1},
        r1_den=dict(_1MU),
        # W = z^2 u / (1-zu)
        w_num={(2, 1): 1},
        w_den=dict(_1MZU),
        q=dict(_Q),
    )


def cc_s_eval(z: float, u: float, order: int = 0) -> float:
    """S(z,u) and its first two u-derivatives, via the factored form."""
    if not (0 < u and u != 1 and z * u != 1):
        raise ZeroDivisionError(f"S undefined at z={z}, u={u}")
    s = u * u * (1 - z) ** 2 / ((1 - u) ** 2 * (1 - z * u) ** 2)
    if order == 0:
        return s
    log_d1 = 2 / u + 2 / (1 - u) + 2 * z / (1 - z * u)
    if order == 1:
        return s * log_d1
    log_d2 = -2 / u**2 + 2 / (1 - u) ** 2 + 2 * z**2 / (1 - z * u) ** 2
    return s * (log_d1 * log_d1 + log_d2)


# -- column DP ----------------------------------------------------------------

def _transitions(h: int, h2: int):
    """(half-perimeter increment, multiplicity) pairs for placing a column
    of height h2 against one of height h, over all contact offsets.

    Increment is 1 + (top overhang) + (bottom overhang); the h + h2 - 1
    offsets group into: full-contact placements at increment 1, two
    single-overhang placements per overhang size, and |h2-h|-1 placements
    protruding both ways at the minimal increment when h2 > h.
    """
    if h2 <= h:
        yield (1, h - h2 + 1)
        for t in range(1, h2):
            yield (1 + t, 2)
    else:
        d = h2 - h
        yield (1 + d, d + 1)
        for t in range(d + 1, h2):
            yield (1 + t, 2)


def cc_enumerate(hp_max: int, memory_budget: int | None = None) -> dict:
    """Exact counts of column-convex polygons keyed (hp, area, last height)."""
    if hp_max < 0:
        raise ValueError("hp_max must be >= 0")
    cell_budget = (_CELL_BUDGET_DEFAULT if memory_budget is None
                   else max(memory_budget // 48, 1))
    states: dict[tuple[int, int], dict[int, int]] = {}
    cells = 0
    for h in range(1, hp_max):  # single column: hp = h + 1
        states[(h + 1, h)] = {h: 1}
        cells += 1
    for hp in range(2, hp_max + 1):
        for h in range(1, hp):
            cur = states.get((hp, h))
            if not cur:
                continue
            for h2 in range(1, hp_max):
                if h2 > h and hp + 1 + (h2 - h) > hp_max:
                    break
                for delta, mult in _transitions(h, h2):
                    hp2 = hp + delta
                    if hp2 > hp_max:
                        break
                    tgt = states.setdefault((hp2, h2), {})
                    for a, cnt in cur.items():
                        a2 = a + h2
                        prev = tgt.get(a2)
                        if prev is None:
                            tgt[a2] = mult * cnt
                            cells += 1
                        else:
                            tgt[a2] = prev + mult * cnt
                    if cells > cell_budget:
                        raise OutOfMemoryBudget(
                            f"column DP exceeded {cell_budget} cells"
                        )
    out: dict[tuple[int, int, int], int] = {}
    for (hp, h), areas in states.items():
        for a, cnt in areas.items():
            out[(hp, a, h)] = cnt
    return out


@dataclass
class CCMomentTable:
    """Exact raw area moments of the fixed-half-perimeter ensembles."""

    hp_max: int
    n_max: int
    totals: dict[int, int]
    sums: dict[int, list[int]]  # sums[hp][n] = sum over polygons of area^n

    def total(self, hp: int) -> int:
        return self.totals[hp]

    def raw_sum(self, hp: int, n: int) -> int:
        return self.sums[hp][n]

    def moment(self, hp: int, n: int) -> Fraction:
        return Fraction(self.sums[hp][n], self.totals[hp])

    def csv_rows(self):
        for hp in sorted(self.sums):
            for n in range(self.n_max + 1):
                yield (hp, n, self.sums[hp][n], self.totals[hp])


def cc_area_moments(hp_max: int, n_max: int,
                    memory_budget: int | None = None) -> CCMomentTable:
    """Raw area moment sums per half-perimeter, by moment-accumulator DP."""
    if hp_max < 0 or n_max < 0:
        raise ValueError("bounds must be >= 0")
    cell_budget = (_CELL_BUDGET_DEFAULT if memory_budget is None
                   else max(memory_budget // 48, 1))
    width = n_max + 1
    binom = [[comb(j, r) for r in range(j + 1)] for j in range(width)]
    states: dict[tuple[int, int], list[int]] = {}
    for h in range(1, hp_max):
        states[(h + 1, h)] = [h**j for j in range(width)]
    if len(states) * width > cell_budget:
        raise OutOfMemoryBudget("moment DP over budget at init")
    trans = {h: [(h2, list(_transitions(h, h2))) for h2 in range(1, hp_max)]
             for h in range(1, hp_max)}
    for hp in range(2, hp_max + 1):
        for h in range(1, hp):
            cur = states.get((hp, h))
            if not cur:
                continue
            for h2, tlist in trans[h]:
                if h2 > h and hp + 1 + (h2 - h) > hp_max:
                    break
                pw = [1] * width
                for j in range(1, width):
                    pw[j] = pw[j - 1] * h2
                shifted = [
                    cur[j] + sum(binom[j][r] * pw[j - r] * cur[r]
                                 for r in range(j))
                    for j in range(width)
                ]
                for delta, mult in tlist:
                    hp2 = hp + delta
                    if hp2 > hp_max:
                        break
                    tgt = states.get((hp2, h2))
                    if tgt is None:
                        tgt = states[(hp2, h2)] = [0] * width
                        if len(states) * width > cell_budget:
                            raise OutOfMemoryBudget(
                                f"moment DP exceeded {cell_budget} cells"
                            )
                    for j in range(width):
                        tgt[j] += mult * shifted[j]
    totals: dict[int, int] = {}
    sums: dict[int, list[int]] = {}
    for hp in range(2, hp_max + 1):
        row = [0] * width
        for h in range(1, hp):
            vec = states.get((hp, h))
            if vec:
                for j in range(width):
                    row[j] += vec[j]
        if row[0]:
            sums[hp] = row
            totals[hp] = row[0]
    return CCMomentTable(hp_max, n_max, totals, sums)


# -- brute-force oracle -------------------------------------------------------

def cc_brute_oracle(area_max: int = 12) -> dict[tuple[int, int], int]:
    """Counts of column-convex fixed polyominoes keyed (half-perimeter, area).

    Enumerates every fixed polyomino up to area_max cells exactly once by
    canonical growth (each new cell must be a so-far-unreached neighbor, and
    cells below/left of the origin are out of bounds), computes the perimeter
    from shared edges, and keeps the polyominoes whose every column is a
    contiguous cell interval. Valid for comparisons at every half-perimeter
    hp with floor(hp/2) * ceil(hp/2) <= area_max.
    """
    if area_max < 1:
        raise ValueError("area_max must be >= 1")
    counts: dict[tuple[int, int], int] = {}
    cellset: set[tuple[int, int]] = set()
    cols: dict[int, set[int]] = {}
    edges = 0

    def visit() -> None:
        for ys in cols.values():
            if ys and max(ys) - min(ys) + 1 != len(ys):
                return
        n = len(cellset)
        key = (2 * n - edges, n)
        counts[key] = counts.get(key, 0) + 1

    def grow(untried: list, reached: set) -> None:
        nonlocal edges
        while untried:
            cell = untried.pop()
            x, y = cell
            nbrs = ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))
            shared = sum(1 for d in nbrs if d in cellset)
            cellset.add(cell)
            cols.setdefault(x, set()).add(y)
            edges += shared
            visit()
            if len(cellset) < area_max:
                fresh = [
                    d for d in nbrs
                    if d not in reached and (d[1] > 0 or (d[1] == 0 and d[0] >= 0))
                ]
                reached.update(fresh)
                grow(untried + fresh, reached)
                reached.difference_update(fresh)
            edges -= shared
            cols[x].remove(y)
            cellset.remove(cell)

    grow([(0, 0)], {(0, 0)})
    return counts


# -- functional-equation route ------------------------------------------------

def _sub_uq(p: dict) -> dict:
    """Substitute u -> uq in a (q_deg, u_deg)-keyed polynomial."""
    return {(a + b, b): c for (a, b), c in p.items()}


def _qu_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i, j), ca in a.items():
        for (k, l), cb in b.items():
            key = (i + k, j + l)
            v = out.get(key, 0) + ca * cb
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return out


def _qu_add(target: dict, p: dict, scale: int = 1) -> None:
    for key, c in p.items():
        v = target.get(key, 0) + scale * c
        if v:
            target[key] = v
        elif key in target:
            del target[key]


def _div_one_minus_uq(p: dict) -> dict:
    """Exact division by (1 - uq); raises if the division leaves a remainder."""
    if not p:
        return {}
    bmax = max(b for _, b in p)
    amax = max(a for a, _ in p)
    if bmax == 0:
        raise InternalInconsistency("division by (1 - uq) of a u-free polynomial")
    quot: dict = {}
    for b in range(bmax):
        for a in range(amax + 1):
            v = p.get((a, b), 0) + quot.get((a - 1, b - 1), 0)
            if v:
                quot[(a, b)] = v
    for a in range(amax + 2):
        if p.get((a, bmax), 0) + quot.get((a - 1, bmax - 1), 0) != 0:
            raise InternalInconsistency("(1 - uq) division left a remainder")
    return quot


_ONE_QU = {(0, 0): 1}


def _graded_product(*graded_polys: dict[int, dict]) -> dict[int, dict]:
    acc: dict[int, dict] = {0: dict(_ONE_QU)}
    for gp in graded_polys:
        new: dict[int, dict] = {}
        for zo1, p1 in acc.items():
            for zo2, p2 in gp.items():
                tgt = new.setdefault(zo1 + zo2, {})
                _qu_add(tgt, _qu_mul(p1, p2))
        acc = {zo: p for zo, p in new.items() if p}
    return acc


def cc_functional_equation(hp_max: int) -> dict[tuple[int, int, int], int]:
    """Series solution of the model's functional equation, counts keyed
    (hp, area, last height). Independent of the column DP.

    The equation (with v = uq and the boundary terms entering with the signs
    that reproduce the column construction) is
        F(z,q,u) = W(z,v) + z S(z,v) F(z,q,v) + r_0(z,v) G_0 + r_1(z,v) G_1,
    G_0 = F(z,q,1), G_1 = dF/du at u = 1. Clearing denominators with Q(z,v)
    and grading by powers of z determines each z-order of F from lower ones
    up to an exact polynomial division by (1 - uq)^2.
    """
    v = {(1, 1): 1}          # uq as a (q,u) monomial
    one = dict(_ONE_QU)
    one_m_v = {(0, 0): 1, (1, 1): -1}
    v2 = _qu_mul(v, v)

    # z-graded coefficient polynomials, all with v = uq already substituted
    g_1mzv = {0: one, 1: {k: -c for k, c in v.items()}}                # 1 - zv
    g_q = _graded_product(
        {0: _qu_mul(one_m_v, one_m_v)}, g_1mzv, g_1mzv
    )                                                                  # Q(z,v)
    g_zs = _graded_product(
        {1: v2}, {0: one, 1: {(0, 0): -2}, 2: {(0, 0): 1}}
    )                                                                  # z QS = z v^2 (1-z)^2
    g_p0 = _graded_product(
        {1: v2},
        {0: {(0, 0): -1}, 1: {(0, 0): 2, (1, 1): -1}},
        g_1mzv,
    )                                                                  # Q r_0 = z v^2 (2z - zv - 1)(1 - zv)
    g_p1 = _graded_product({1: _qu_mul(v, one_m_v)}, g_1mzv, g_1mzv)   # Q r_1
    g_w = _graded_product(
        {2: _qu_mul(v, _qu_mul(one_m_v, one_m_v))}, g_1mzv
    )                                                                  # Q W = z^2 v (1-v)^2 (1-zv)

    f: list[dict] = []
    g0: list[dict] = []
    g1: list[dict] = []
    for n in range(hp_max + 1):
        rhs: dict = {}
        _qu_add(rhs, g_w.get(n, {}))
        for zo, poly in g_zs.items():
            m = n - zo
            if 0 <= m < n:
                _qu_add(rhs, _qu_mul(poly, _sub_uq(f[m])))
        for zo, poly in g_p0.items():
            m = n - zo
            if 0 <= m < n:
                _qu_add(rhs, _qu_mul(poly, g0[m]))
        for zo, poly in g_p1.items():
            m = n - zo
            if 0 <= m < n:
                _qu_add(rhs, _qu_mul(poly, g1[m]))
        for zo, poly in g_q.items():
            m = n - zo
            if zo >= 1 and 0 <= m < n:
                _qu_add(rhs, _qu_mul(poly, f[m]), scale=-1)
        fn = _div_one_minus_uq(_div_one_minus_uq(rhs))
        f.append(fn)
        g0.append(_eval_u_one(fn))
        g1.append(_du_at_one(fn))

    out: dict[tuple[int, int, int], int] = {}
    for n, fn in enumerate(f):
        for (a, b), c in fn.items():
            if c:
                out[(n, a, b)] = c
    return out


def _eval_u_one(p: dict) -> dict:
    out: dict = {}
    for (a, b), c in p.items():
        v = out.get((a, 0), 0) + c
        if v:
            out[(a, 0)] = v
        elif (a, 0) in out:
            del out[(a, 0)]
    return out


def _du_at_one(p: dict) -> dict:
    out: dict = {}
    for (a, b), c in p.items():
        if b:
            v = out.get((a, 0), 0) + b * c
            if v:
                out[(a, 0)] = v
            elif (a, 0) in out:
                del out[(a, 0)]
    return out


# -- structural constants -----------------------------------------------------

def cc_structural_constants() -> KernelProfile:
    """(rho, tau, beta) of the polygon model from 1 - z S = dS/du = 0.

    For each z the interior minimum u*(z) of S(z, .) on (1, 1/z) is bracketed
    (S blows up at both ends), then rho is the root of 1 - z S(z, u*(z));
    a final 2-d Newton polish tightens both coordinates.
    """

    def u_star(z: float) -> float:
        lo, hi = 1.0 + 1e-9, 1.0 / z - 1e-9
        if cc_s_eval(z, lo, 1) >= 0 or cc_s_eval(z, hi, 1) <= 0:
            raise RootFindFailure(f"no interior S minimum bracketed at z={z}")
        return brentq(lambda u: cc_s_eval(z, u, 1), lo, hi,
                      xtol=1e-15, rtol=8.9e-16, maxiter=200)

    def gap(z: float) -> float:
        return 1.0 - z * cc_s_eval(z, u_star(z), 0)

    lo, hi = 0.01, 0.2
    if gap(lo) <= 0 or gap(hi) >= 0:
        raise RootFindFailure("failed to bracket the structural radius")
    rho = brentq(gap, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    tau = u_star(rho)

    # Newton polish on (1 - zS, S_u) = 0
    for _ in range(3):
        s = cc_s_eval(rho, tau, 0)
        s_u = cc_s_eval(rho, tau, 1)
        s_uu = cc_s_eval(rho, tau, 2)
        log_dz = -2.0 / (1.0 - rho) + 2.0 * tau / (1.0 - rho * tau)
        s_z = s * log_dz
        s_uz = s_u * log_dz + s * (2.0 / (1.0 - rho * tau) ** 2)
        f1 = 1.0 - rho * s
        f2 = s_u
        j11 = -s - rho * s_z
        j12 = -rho * s_u
        j21 = s_uz
        j22 = s_uu
        det = j11 * j22 - j12 * j21
        if det == 0:
            break
        rho -= (f1 * j22 - f2 * j12) / det
        tau -= (j11 * f2 - j21 * f1) / det

    s = cc_s_eval(rho, tau, 0)
    s_uu = cc_s_eval(rho, tau, 2)
    if abs(1.0 - rho * s) > 1e-10 or abs(cc_s_eval(rho, tau, 1)) > 1e-10:
        raise RootFindFailure("structural system residual above 1e-10")
    if s_uu <= 0:
        raise RootFindFailure("S_uu must be positive at (rho, tau)")
    beta = (2.0 * s / s_uu) ** 0.5
    # Phi(rho, 1) != 0: the polygon ensemble follows the excursion-type law
    return KernelProfile(
        tau=tau, rho=rho, beta=beta, drift=None,
        regime=Regime.NEGATIVE, period=1, warnings=(),
    )
