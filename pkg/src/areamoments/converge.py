"""Empirical verification of the limit laws at desk scale.

Exact finite-length moments from the enumeration DPs are rescaled with the
structural constants and compared to the exact limiting moments; the
dispatch on the drift sign selects which law applies. Reports carry raw
relative errors plus per-order monotone-trend flags; tolerance thresholds
live in a config file, not in code.
"""

from __future__ import annotations

import importlib.resources
import math
from dataclasses import dataclass
from fractions import Fraction

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python 3.10
    import tomli as tomllib

from .enumeration import PathClass, moment_dp, signed_moment_dp
from .kernel import KernelProfile, Regime, structural_constants
from .limits import limiting_moment
from .steps import StepSet, characteristics

TREND_FLOOR = 1e-12  # errors below this are treated as exactly converged
_SQRT2 = math.sqrt(2.0)


def load_tolerances(path: str | None = None) -> dict[str, float]:
    """Relative-error thresholds; package defaults, optionally overridden."""
    data = importlib.resources.files("areamoments").joinpath(
        "data/default_tolerances.toml"
    ).read_bytes()
    tol = dict(tomllib.loads(data.decode())["tolerances"])
    if path is not None:
        with open(path, "rb") as fh:
            user = tomllib.load(fh)
        tol.update(user.get("tolerances", {}))
    return tol


@dataclass(frozen=True)
class ReportRow:
    m: int
    orders: tuple[int, ...]
    rescaled: float
    limit: float
    rel_error: float


@dataclass
class ConvergenceReport:
    step_spec: str
    path_class: str
    regime: str
    rows: list[ReportRow]
    trend: dict[tuple[int, ...], bool]

    def rows_for(self, orders: tuple[int, ...]) -> list[ReportRow]:
        return [r for r in self.rows if r.orders == orders]

    def final_error(self, orders: tuple[int, ...]) -> float:
        return self.rows_for(orders)[-1].rel_error

    def csv_rows(self):
        for row in self.rows:
            n = row.orders[0]
            t = row.orders[-1] if len(row.orders) > 1 else 0
            mid = row.orders[1] if len(row.orders) == 3 else ""
            yield (self.step_spec, self.path_class, self.regime, row.m,
                   n, mid, t, f"{row.rescaled:.12g}", f"{row.limit:.12g}",
                   f"{row.rel_error:.6g}", self.trend[row.orders])


def _trend_flags(rows_by_order: dict) -> dict:
    flags = {}
    for orders, errs in rows_by_order.items():
        ok = True
        for a, b in zip(errs, errs[1:]):
            if not (b < a or (a < TREND_FLOOR and b < TREND_FLOOR)):
                ok = False
                break
        flags[orders] = ok
    return flags


@dataclass(frozen=True)
class RegimeDispatch:
    regime: Regime
    profile: KernelProfile
    meander_law: str
    excursion_law: str


def regime_dispatch(s: StepSet) -> RegimeDispatch:
    """Which limit law the meander/excursion areas of this step set follow."""
    profile = structural_constants(s)
    if profile.regime is Regime.NEGATIVE:
        meander = ("excursion-area law at scale beta/(sqrt(2) tau m^(3/2))")
    elif profile.regime is Regime.ZERO:
        meander = ("joint meander-area/endpoint law at scales "
                   "beta/(sqrt(2) m^(3/2)) and beta/(sqrt(2) m^(1/2)) "
                   "(tau = 1)")
    else:
        meander = ("concentration: area/(drift m^2/2) -> 1, Gaussian "
                   "fluctuations at scale sigma m^(3/2) with variance 1/3")
    excursion = ("excursion-area law at scale beta/(sqrt(2) tau m^(3/2)), "
                 "independent of the drift sign")
    return RegimeDispatch(profile.regime, profile, meander, excursion)


def limit_report(
    s: StepSet,
    path_class: PathClass,
    m_list,
    orders,
    profile: KernelProfile | None = None,
    memory_budget: int | None = None,
) -> ConvergenceReport:
    """Rescaled finite-m moments against the exact limits, per order and m.

    orders is a list of (n, t) pairs; t > 0 is only meaningful for meanders
    at zero drift (joint law with the endpoint). For a positive-drift
    meander the rows are the concentration ratios: (1, 0) is
    E[Z_m]/(drift m^2/2) with limit 1, (2, 0) is the centered ratio
    E[(Z_m - drift m^2/2)^2]/(sigma^2 m^3) with limit 1/3.
    """
    path_class = PathClass(path_class)
    if profile is None:
        profile = structural_constants(s)
    m_list = sorted(set(int(m) for m in m_list))
    if not m_list or m_list[0] < 1:
        raise ValueError("m_list must contain positive lengths")
    orders = [tuple(o) for o in orders]
    n_max = max(n for n, _ in orders)
    t_max = max(t for _, t in orders)

    if path_class in (PathClass.WALK, PathClass.BRIDGE):
        raise ValueError(
            "limit_report covers meanders and excursions; use signed_report "
            "for unconstrained walks"
        )
    if path_class is PathClass.EXCURSION and t_max > 0:
        raise ValueError("excursions end at altitude 0; use t = 0 orders")

    concentrated = (
        path_class is PathClass.MEANDER and profile.regime is Regime.POSITIVE
    )
    if concentrated and any(o not in ((1, 0), (2, 0)) for o in orders):
        raise ValueError(
            "positive-drift meander rows are the concentration orders "
            "(1, 0) and (2, 0)"
        )
    if (path_class is PathClass.MEANDER and profile.regime is Regime.NEGATIVE
            and t_max > 0):
        raise ValueError("negative-drift meander area law has no endpoint "
                         "component; use t = 0 orders")

    table = moment_dp(s, path_class, m_list[-1], n_max, t_max,
                      lengths=m_list, memory_budget=memory_budget)
    # Area amplitude: tilting the weights by tau^step kills the drift without
    # changing the excursion measure, so the area inherits the zero-drift
    # scale of the tilted walk, sigma~ = tau*sqrt(2)/beta. At zero drift
    # tau = 1 and this is the familiar beta/sqrt(2).
    scale_area = profile.beta / (_SQRT2 * profile.tau)
    scale_alt = profile.beta / _SQRT2
    ch = characteristics(s)

    rows = []
    errs: dict[tuple, list] = {o: [] for o in orders}
    for m in m_list:
        if table.total(m) == 0:
            raise ValueError(
                f"no {path_class.value} paths of length {m} for this step "
                "set (periodic alphabet?); choose admissible lengths"
            )
        for n, t in orders:
            if concentrated:
                mean_target = ch.drift * m * m / 2
                if n == 1:
                    rescaled = float(table.moment(m, 1) / mean_target)
                    limit = 1.0
                else:
                    centered = (table.moment(m, 2)
                                - 2 * mean_target * table.moment(m, 1)
                                + mean_target * mean_target)
                    rescaled = float(centered / (ch.variance * m**3))
                    limit = 1.0 / 3.0
            else:
                rescaled = (float(table.moment(m, n, t))
                            * scale_area**n * scale_alt**t
                            / m ** ((3 * n + t) / 2))
                if path_class is PathClass.EXCURSION or (
                    profile.regime is Regime.NEGATIVE
                ):
                    limit = float(limiting_moment("bea", n))
                else:
                    limit = float(limiting_moment("meander_joint", n, t))
            if limit == 0.0:
                raise ValueError(f"order {(n, t)} has zero limiting moment")
            err = abs(rescaled - limit) / abs(limit)
            rows.append(ReportRow(m, (n, t), rescaled, limit, err))
            errs[(n, t)].append(err)
    return ConvergenceReport(
        s.spec_string(), path_class.value, profile.regime.value,
        rows, _trend_flags(errs),
    )


def default_signed_orders(k_total_max: int, t_max: int):
    """All (k, l, t) with k + l <= k_total_max, t <= t_max whose limiting
    moment is nonzero, excluding the trivial (0, 0, 0)."""
    out = []
    for k in range(k_total_max + 1):
        for l in range(k_total_max + 1 - k):
            for t in range(t_max + 1):
                if (k, l, t) == (0, 0, 0):
                    continue
                if float(limiting_moment("walk_signed", k, l, t)) != 0.0:
                    out.append((k, l, t))
    return out


def signed_report(
    s: StepSet,
    m_list,
    signed_orders,
    abs_orders=(),
    memory_budget: int | None = None,
) -> ConvergenceReport:
    """Rescaled signed-area walk moments against the Brownian-motion limits.

    The decomposition behind the limit statement is specific to the
    symmetric two-step walk, so s must be {-1: w, 1: w}.
    """
    if s.steps != (-1, 1) or s.items[0][1] != s.items[1][1]:
        raise ValueError(
            "signed_report needs the symmetric Bernoulli step set -1:w,1:w"
        )
    m_list = sorted(set(int(m) for m in m_list))
    signed_orders = [tuple(o) for o in signed_orders]
    abs_orders = [tuple(o) for o in abs_orders]
    k_total = max(
        [k + l for k, l, _ in signed_orders] + [n for n, _ in abs_orders]
    )
    t_max = max(
        [t for _, _, t in signed_orders] + [t for _, t in abs_orders]
    )
    table = signed_moment_dp(s, m_list[-1], k_total, t_max,
                             lengths=m_list, memory_budget=memory_budget)
    rows = []
    errs: dict[tuple, list] = {}
    for m in m_list:
        for k, l, t in signed_orders:
            rescaled = (float(table.moment(m, k, l, t))
                        / m ** ((3 * (k + l) + t) / 2))
            limit = float(limiting_moment("walk_signed", k, l, t))
            if limit == 0.0:
                raise ValueError(f"order {(k, l, t)} has zero limiting moment")
            err = abs(rescaled - limit) / abs(limit)
            rows.append(ReportRow(m, (k, l, t), rescaled, limit, err))
            errs.setdefault((k, l, t), []).append(err)
        for n, t in abs_orders:
            rescaled = (float(table.abs_moment(m, n, t))
                        / m ** ((3 * n + t) / 2))
            limit = float(limiting_moment("walk_abs", n, t))
            if limit == 0.0:
                raise ValueError(f"abs order {(n, t)} has zero limiting moment")
            err = abs(rescaled - limit) / abs(limit)
            rows.append(ReportRow(m, (n, t), rescaled, limit, err))
            errs.setdefault((n, t), []).append(err)
    profile = structural_constants(s)
    return ConvergenceReport(
        s.spec_string(), PathClass.WALK.value, profile.regime.value,
        rows, _trend_flags(errs),
    )


# -- factorial/raw moment conversion -----------------------------------------

def stirling2_row(n: int) -> list[int]:
    """Stirling numbers of the second kind S(n, k), k = 0..n."""
    row = [1]
    for m in range(1, n + 1):
        prev = row
        row = [0] * (m + 1)
        for k in range(1, m + 1):
            row[k] = prev[k - 1] + (k * prev[k] if k <= m - 1 else 0)
    return row


def stirling1_signed_row(n: int) -> list[int]:
    """Signed Stirling numbers of the first kind s(n, k), k = 0..n."""
    row = [1]
    for m in range(1, n + 1):
        prev = row
        row = [0] * (m + 1)
        for k in range(m + 1):
            upper = prev[k - 1] if k >= 1 else 0
            lower = prev[k] if k <= m - 1 else 0
            row[k] = upper - (m - 1) * lower
    return row


def raw_from_factorial(factorial_moments) -> list[Fraction]:
    """E[X^n] = sum_k S(n, k) E[(X)_k] for n = 0..len-1."""
    fm = [Fraction(x) for x in factorial_moments]
    out = []
    for n in range(len(fm)):
        s2 = stirling2_row(n)
        out.append(sum(s2[k] * fm[k] for k in range(n + 1)))
    return out


def factorial_from_raw(raw_moments) -> list[Fraction]:
    """E[(X)_n] = sum_k s(n, k) E[X^k] for n = 0..len-1."""
    rm = [Fraction(x) for x in raw_moments]
    out = []
    for n in range(len(rm)):
        s1 = stirling1_signed_row(n)
        out.append(sum(s1[k] * rm[k] for k in range(n + 1)))
    return out
