"""Exact enumeration of walk area statistics by dynamic programming.

Two engines: a full-distribution DP over (altitude, accumulated area) that
serves as the in-package oracle, and moment-accumulator DPs that scale to
lengths in the hundreds. Weights stay exact throughout: Python big integers
when every step weight is an integer, Fractions otherwise.

The area of a path w_0..w_m is the plain height sum a(w) = sum_i w_i with
w_0 = 0; it can be negative for unconstrained walks and bridges.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

from .errors import OutOfMemoryBudget
from .steps import StepSet

DEFAULT_MEMORY_BUDGET = 1 << 31  # bytes, nominal
_BYTES_PER_CELL = 48             # deterministic per-cell cost estimate


class PathClass(str, Enum):
    EXCURSION = "excursion"
    MEANDER = "meander"
    BRIDGE = "bridge"
    WALK = "walk"

    @property
    def constrained(self) -> bool:
        """Altitude must stay >= 0 at every time."""
        return self in (PathClass.EXCURSION, PathClass.MEANDER)

    @property
    def ends_at_zero(self) -> bool:
        return self in (PathClass.EXCURSION, PathClass.BRIDGE)


def _cell_budget(memory_budget: int | None) -> int:
    budget = DEFAULT_MEMORY_BUDGET if memory_budget is None else memory_budget
    return max(budget // _BYTES_PER_CELL, 1)


def _step_items(s: StepSet):
    """(step, weight) pairs, weights as int when the whole set is integral."""
    if s.all_integer_weights():
        return [(step, int(w)) for step, w in s.items]
    return list(s.items)


@dataclass
class AreaDistribution:
    """Exact joint (area, final altitude) weight table for one length."""

    length: int
    path_class: PathClass
    table: dict[tuple[int, int], int | Fraction]

    def total(self):
        return sum(self.table.values())

    def raw_sum(self, n: int, t: int = 0):
        return sum(w * a**n * h**t for (a, h), w in self.table.items())

    def moment(self, n: int, t: int = 0) -> Fraction:
        return Fraction(self.raw_sum(n, t)) / Fraction(self.total())

    def max_area(self) -> int:
        return max(a for a, _ in self.table)

    def csv_rows(self):
        for (a, h), w in sorted(self.table.items()):
            yield (self.path_class.value, self.length, a, h, w)


@dataclass
class MomentTable:
    """Per-length raw joint moment sums sum_w wt(w) a(w)^n h(w)^t."""

    path_class: PathClass
    n_max: int
    t_max: int
    lengths: list[int]
    totals: dict[int, int | Fraction]
    sums: dict[int, list[list[int | Fraction]]]  # sums[m][n][t]

    def total(self, m: int):
        return self.totals[m]

    def raw_sum(self, m: int, n: int, t: int = 0):
        return self.sums[m][n][t]

    def moment(self, m: int, n: int, t: int = 0) -> Fraction:
        return Fraction(self.sums[m][n][t]) / Fraction(self.totals[m])

    def csv_rows(self):
        for m in self.lengths:
            for n in range(self.n_max + 1):
                for t in range(self.t_max + 1):
                    yield (self.path_class.value, m, n, t,
                           self.sums[m][n][t], self.totals[m])


@dataclass
class SignedMomentTable:
    """Raw joint moment sums of (positive area, negative area, endpoint)
    for unconstrained walks: sums[m][(k,l,t)] = sum wt (A+)^k (A-)^l h^t."""

    k_total_max: int
    t_max: int
    lengths: list[int]
    totals: dict[int, int | Fraction]
    sums: dict[int, dict[tuple[int, int, int], int | Fraction]]

    def raw_sum(self, m: int, k: int, l: int, t: int = 0):
        return self.sums[m][(k, l, t)]

    def moment(self, m: int, k: int, l: int, t: int = 0) -> Fraction:
        return Fraction(self.sums[m][(k, l, t)]) / Fraction(self.totals[m])

    def abs_raw_sum(self, m: int, n: int, t: int = 0):
        """Moment sum of the absolute area (A+ + A-)^n h^t via binomials."""
        return sum(comb(n, j) * self.sums[m][(j, n - j, t)]
                   for j in range(n + 1))

    def abs_moment(self, m: int, n: int, t: int = 0) -> Fraction:
        return Fraction(self.abs_raw_sum(m, n, t)) / Fraction(self.totals[m])

    def csv_rows(self):
        for m in self.lengths:
            for key in sorted(self.sums[m]):
                k, l, t = key
                yield (PathClass.WALK.value, m, k, l, t,
                       self.sums[m][key], self.totals[m])


def _distribution_layers(s, constrained, m_max, cell_budget):
    """Yield, for m = 0..m_max, the dict (altitude, area) -> weight."""
    items = _step_items(s)
    one = 1 if s.all_integer_weights() else Fraction(1)
    layer = {(0, 0): one}
    yield layer
    for _ in range(m_max):
        new: dict = {}
        get = new.get
        for (h, a), w in layer.items():
            for step, sw in items:
                h2 = h + step
                if constrained and h2 < 0:
                    continue
                key = (h2, a + h2)
                prev = get(key)
                new[key] = w * sw if prev is None else prev + w * sw
        if len(new) > cell_budget:
            raise OutOfMemoryBudget(
                f"distribution layer needs {len(new)} cells, budget allows "
                f"{cell_budget}"
            )
        layer = new
        yield layer


def _filter_layer(layer, path_class):
    if path_class.ends_at_zero:
        return {(a, 0): w for (h, a), w in layer.items() if h == 0}
    return {(a, h): w for (h, a), w in layer.items()}


def exact_distribution(
    s: StepSet,
    path_class: PathClass,
    m: int,
    memory_budget: int | None = None,
) -> AreaDistribution:
    """Exact (area, final altitude) distribution of length-m paths."""
    path_class = PathClass(path_class)
    cell_budget = _cell_budget(memory_budget)
    layer = None
    for layer in _distribution_layers(s, path_class.constrained, m, cell_budget):
        pass
    return AreaDistribution(m, path_class, _filter_layer(layer, path_class))


def distributions_through(
    s: StepSet,
    path_class: PathClass,
    m_max: int,
    memory_budget: int | None = None,
) -> list[AreaDistribution]:
    """Exact distributions for every length 0..m_max in one DP pass."""
    path_class = PathClass(path_class)
    cell_budget = _cell_budget(memory_budget)
    out = []
    for m, layer in enumerate(
        _distribution_layers(s, path_class.constrained, m_max, cell_budget)
    ):
        out.append(AreaDistribution(m, path_class, _filter_layer(layer, path_class)))
    return out


def moment_dp(
    s: StepSet,
    path_class: PathClass,
    m_max: int,
    n_max: int,
    t_max: int = 0,
    lengths: list[int] | None = None,
    memory_budget: int | None = None,
) -> MomentTable:
    """Raw joint moments E-sums of (area, endpoint) up to orders (n_max, t_max).

    State per altitude is the vector M_j = sum wt * a^j over prefixes; a step
    to altitude h' updates it by the binomial shift a -> a + h'. Altitude
    moments are extracted per recorded length. Agrees exactly with moments of
    exact_distribution.
    """
    path_class = PathClass(path_class)
    if n_max < 0 or t_max < 0:
        raise ValueError("moment orders must be >= 0")
    record = sorted(set(range(m_max + 1) if lengths is None else lengths))
    if record and (record[0] < 0 or record[-1] > m_max):
        raise ValueError("recorded lengths must lie in [0, m_max]")
    record_set = set(record)
    cell_budget = _cell_budget(memory_budget)
    items = _step_items(s)
    zero = 0 if s.all_integer_weights() else Fraction(0)
    one = 1 if s.all_integer_weights() else Fraction(1)
    binom = [[comb(j, r) for r in range(j + 1)] for j in range(n_max + 1)]

    totals: dict[int, int | Fraction] = {}
    sums: dict[int, list[list[int | Fraction]]] = {}

    def snapshot(m, layer):
        row = [[zero] * (t_max + 1) for _ in range(n_max + 1)]
        for h, vec in layer.items():
            if path_class.ends_at_zero and h != 0:
                continue
            hp = 1
            for t in range(t_max + 1):
                for n in range(n_max + 1):
                    row[n][t] += vec[n] * hp
                hp *= h
        sums[m] = row
        totals[m] = row[0][0]

    layer = {0: [one] + [zero] * n_max}
    if 0 in record_set:
        snapshot(0, layer)
    constrained = path_class.constrained
    for i in range(1, m_max + 1):
        new: dict[int, list] = {}
        for h, vec in layer.items():
            for step, sw in items:
                h2 = h + step
                if constrained and h2 < 0:
                    continue
                tvec = new.get(h2)
                if tvec is None:
                    tvec = new[h2] = [zero] * (n_max + 1)
                pw = [1] * (n_max + 1)
                for j in range(1, n_max + 1):
                    pw[j] = pw[j - 1] * h2
                for j in range(n_max, -1, -1):
                    bj = binom[j]
                    acc = vec[j]
                    for r in range(j):
                        acc += bj[r] * pw[j - r] * vec[r]
                    tvec[j] += sw * acc
        if len(new) * (n_max + 1) > cell_budget:
            raise OutOfMemoryBudget(
                f"moment layer needs {len(new) * (n_max + 1)} cells"
            )
        layer = new
        if i in record_set:
            snapshot(i, layer)
    return MomentTable(path_class, n_max, t_max, record, totals, sums)


def signed_moment_dp(
    s: StepSet,
    m_max: int,
    k_total_max: int,
    t_max: int = 0,
    lengths: list[int] | None = None,
    memory_budget: int | None = None,
) -> SignedMomentTable:
    """Joint raw moments of (A+, A-, endpoint) for unconstrained walks,
    all orders (k, l) with k + l <= k_total_max.

    A+ accumulates max(w_i, 0) and A- accumulates max(-w_i, 0); a step to
    altitude h' increments exactly one of them, by |h'|.
    """
    if k_total_max < 0 or t_max < 0:
        raise ValueError("moment orders must be >= 0")
    record = sorted(set(range(m_max + 1) if lengths is None else lengths))
    if record and (record[0] < 0 or record[-1] > m_max):
        raise ValueError("recorded lengths must lie in [0, m_max]")
    record_set = set(record)
    cell_budget = _cell_budget(memory_budget)
    items = _step_items(s)
    zero = 0 if s.all_integer_weights() else Fraction(0)
    one = 1 if s.all_integer_weights() else Fraction(1)
    pairs = [(k, l) for k in range(k_total_max + 1)
             for l in range(k_total_max + 1 - k)]
    index = {p: i for i, p in enumerate(pairs)}
    npairs = len(pairs)
    binom = [[comb(j, r) for r in range(j + 1)] for j in range(k_total_max + 1)]

    totals: dict[int, int | Fraction] = {}
    sums: dict[int, dict[tuple[int, int, int], int | Fraction]] = {}

    def snapshot(m, layer):
        row = {(k, l, t): zero for (k, l) in pairs for t in range(t_max + 1)}
        for h, vec in layer.items():
            hp = 1
            for t in range(t_max + 1):
                for (k, l) in pairs:
                    row[(k, l, t)] += vec[index[(k, l)]] * hp
                hp *= h
        sums[m] = row
        totals[m] = row[(0, 0, 0)]

    layer = {0: [one] + [zero] * (npairs - 1)}
    if 0 in record_set:
        snapshot(0, layer)
    for i in range(1, m_max + 1):
        new: dict[int, list] = {}
        for h, vec in layer.items():
            for step, sw in items:
                h2 = h + step
                tvec = new.get(h2)
                if tvec is None:
                    tvec = new[h2] = [zero] * npairs
                if h2 > 0:
                    pw = [1] * (k_total_max + 1)
                    for j in range(1, k_total_max + 1):
                        pw[j] = pw[j - 1] * h2
                    for idx, (k, l) in enumerate(pairs):
                        bk = binom[k]
                        acc = vec[idx]
                        for r in range(k):
                            acc += bk[r] * pw[k - r] * vec[index[(r, l)]]
                        tvec[idx] += sw * acc
                elif h2 < 0:
                    pw = [1] * (k_total_max + 1)
                    for j in range(1, k_total_max + 1):
                        pw[j] = pw[j - 1] * (-h2)
                    for idx, (k, l) in enumerate(pairs):
                        bl = binom[l]
                        acc = vec[idx]
                        for r in range(l):
                            acc += bl[r] * pw[l - r] * vec[index[(k, r)]]
                        tvec[idx] += sw * acc
                else:
                    for idx in range(npairs):
                        tvec[idx] += sw * vec[idx]
        if len(new) * npairs > cell_budget:
            raise OutOfMemoryBudget(
                f"signed moment layer needs {len(new) * npairs} cells"
            )
        layer = new
        if i in record_set:
            snapshot(i, layer)
    return SignedMomentTable(k_total_max, t_max, record, totals, sums)


@dataclass
class BridgeSignedDistribution:
    """Exact (positive area, negative area) table of bridges of one length."""

    length: int
    table: dict[tuple[int, int], int | Fraction]

    def total(self):
        return sum(self.table.values())

    def csv_rows(self):
        for (ap, am), w in sorted(self.table.items()):
            yield (PathClass.BRIDGE.value, self.length, ap, am, w)


def bridge_distribution(
    s: StepSet, m: int, memory_budget: int | None = None
) -> BridgeSignedDistribution:
    """Exact signed-area distribution of bridges (w_m = 0) of length m."""
    cell_budget = _cell_budget(memory_budget)
    items = _step_items(s)
    one = 1 if s.all_integer_weights() else Fraction(1)
    layer = {(0, 0, 0): one}  # (altitude, A+, A-) -> weight
    for _ in range(m):
        new: dict = {}
        get = new.get
        for (h, ap, am), w in layer.items():
            for step, sw in items:
                h2 = h + step
                key = (h2, ap + h2, am) if h2 > 0 else (h2, ap, am - h2)
                prev = get(key)
                new[key] = w * sw if prev is None else prev + w * sw
        if len(new) > cell_budget:
            raise OutOfMemoryBudget(f"bridge layer needs {len(new)} cells")
        layer = new
    table = {(ap, am): w for (h, ap, am), w in layer.items() if h == 0}
    return BridgeSignedDistribution(m, table)


def meander_altitude_series(s: StepSet, m_max: int) -> list[dict[int, int | Fraction]]:
    """Weighted meander counts by final altitude, for every length 0..m_max.

    Length-m entry k is the z^m coefficient of the generating function of
    meanders ending at altitude k; entry 0 restricted over lengths is the
    excursion counting sequence.
    """
    items = _step_items(s)
    one = 1 if s.all_integer_weights() else Fraction(1)
    layer = {0: one}
    out = [dict(layer)]
    for _ in range(m_max):
        new: dict = {}
        get = new.get
        for h, w in layer.items():
            for step, sw in items:
                h2 = h + step
                if h2 < 0:
                    continue
                prev = get(h2)
                new[h2] = w * sw if prev is None else prev + w * sw
        layer = new
        out.append(dict(layer))
    return out


def bridge_series_from_excursions(excursion_counts, m_max: int) -> list:
    """Coefficients of E(z) / (2 - E(z)) from excursion coefficients E.

    Exact series division; with Bernoulli weights this reproduces the bridge
    counting sequence coefficient by coefficient.
    """
    e = list(excursion_counts[: m_max + 1])
    if not e or e[0] != 1:
        raise ValueError("excursion series must start with coefficient 1")
    b = [Fraction(0)] * (m_max + 1)
    b[0] = Fraction(1)  # e_0 / (2 - e_0) with e_0 = 1
    for m in range(1, m_max + 1):
        acc = Fraction(e[m])
        for j in range(1, m + 1):
            acc += e[j] * b[m - j]
        b[m] = acc
    return [x if isinstance(x, int) else
            (int(x) if x.denominator == 1 else x) for x in b]
