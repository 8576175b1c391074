"""Exact limiting-moment recursions and the radical scalar field they live in.

All tables are exact rationals. The limiting moments themselves are scalars
of the form r * 2^(a/2) * pi^(b/2) with r rational, closed under the
Gamma-factor formulas that convert recursion tables into moments of the
Brownian excursion/meander/motion area laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import InternalInconsistency, OrderOutOfRange, RadicalMismatch

_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ExactRadical:
    """Scalar r * 2^(pow2/2) * pi^(powpi/2), normalized so pow2 is 0 or 1.

    Addition is only defined between scalars with identical radical parts;
    the moment formulas never need anything else.
    """

    coeff: Fraction
    pow2: int = 0
    powpi: int = 0

    def __post_init__(self) -> None:
        coeff = Fraction(self.coeff)
        pow2, powpi = self.pow2, self.powpi
        if coeff == 0:
            pow2 = powpi = 0
        else:
            q, r = divmod(pow2, 2)
            coeff *= Fraction(2) ** q
            pow2 = r
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "pow2", pow2)
        object.__setattr__(self, "powpi", powpi)

    @classmethod
    def from_rational(cls, value) -> "ExactRadical":
        return cls(Fraction(value))

    def __mul__(self, other):
        if isinstance(other, ExactRadical):
            return ExactRadical(
                self.coeff * other.coeff,
                self.pow2 + other.pow2,
                self.powpi + other.powpi,
            )
        return ExactRadical(self.coeff * Fraction(other), self.pow2, self.powpi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExactRadical):
            return ExactRadical(
                self.coeff / other.coeff,
                self.pow2 - other.pow2,
                self.powpi - other.powpi,
            )
        return ExactRadical(self.coeff / Fraction(other), self.pow2, self.powpi)

    def __neg__(self):
        return ExactRadical(-self.coeff, self.pow2, self.powpi)

    def __add__(self, other):
        if not isinstance(other, ExactRadical):
            other = ExactRadical.from_rational(other)
        if self.coeff == 0:
            return other
        if other.coeff == 0:
            return self
        if (self.pow2, self.powpi) != (other.pow2, other.powpi):
            raise RadicalMismatch(
                f"cannot add {self} and {other}: different radical parts"
            )
        return ExactRadical(self.coeff + other.coeff, self.pow2, self.powpi)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ExactRadical)
                       else ExactRadical.from_rational(-Fraction(other)))

    def is_rational(self) -> bool:
        return self.pow2 == 0 and self.powpi == 0

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise RadicalMismatch(f"{self} is not rational")
        return self.coeff

    def __float__(self) -> float:
        val = float(self.coeff)
        if self.pow2:
            val *= math.sqrt(2.0) ** self.pow2
        if self.powpi:
            val *= math.pi ** (self.powpi / 2.0)
        return val

    def __str__(self) -> str:
        parts = [str(self.coeff)]
        if self.pow2:
            parts.append(f"2^({self.pow2}/2)")
        if self.powpi:
            parts.append(f"pi^({self.powpi}/2)")
        return " * ".join(parts)


def gamma_half(arg) -> ExactRadical:
    """Gamma at a positive integer or half-integer argument, or at -1/2.

    Gamma(k+1/2) = (2k)! sqrt(pi) / (4^k k!), Gamma(-1/2) = -2 sqrt(pi).
    """
    a = Fraction(arg)
    if a.denominator == 1:
        n = a.numerator
        if n < 1:
            raise ValueError(f"gamma_half: nonpositive integer argument {a}")
        return ExactRadical(Fraction(math.factorial(n - 1)))
    if a.denominator != 2:
        raise ValueError(f"gamma_half: argument {a} is not a half-integer")
    if a == Fraction(-1, 2):
        return ExactRadical(Fraction(-2), 0, 1)
    if a < 0:
        raise ValueError(f"gamma_half: unsupported argument {a}")
    k = int(a - _HALF)
    coeff = Fraction(math.factorial(2 * k), 4**k * math.factorial(k))
    return ExactRadical(coeff, 0, 1)


@dataclass(frozen=True)
class RecursionTable:
    """Dense exact table of one recursion family; negative indices read as 0.

    kind is one of K, Q, C, Qnt, Dk, Dpm, Lpm, Labs; entries are nested
    tuples with one level per index.
    """

    kind: str
    entries: tuple

    def get(self, *idx):
        node = self.entries
        for i in idx:
            if i < 0:
                return Fraction(0)
            try:
                node = node[i]
            except IndexError:
                raise OrderOutOfRange(
                    f"{self.kind} table has no entry {idx}"
                ) from None
        return node


@lru_cache(maxsize=None)
def k_sequence(n_max: int) -> RecursionTable:
    """Excursion-area coefficients: K_0 = -1/2,
    K_n = (3n-4)/4 K_{n-1} + sum_{l=1}^{n-1} K_l K_{n-l}."""
    if n_max < 0:
        raise OrderOutOfRange("n_max must be >= 0")
    k = [Fraction(-1, 2)]
    for n in range(1, n_max + 1):
        val = Fraction(3 * n - 4, 4) * k[n - 1]
        val += sum(k[l] * k[n - l] for l in range(1, n))
        k.append(val)
    return RecursionTable("K", tuple(k))


@lru_cache(maxsize=None)
def q_sequence(n_max: int) -> RecursionTable:
    """Meander-area coefficients: Q_0 = 1,
    Q_n = (3n-2)/2 Q_{n-1} + 2 sum_{l=1}^{n} K_l Q_{n-l}."""
    if n_max < 0:
        raise OrderOutOfRange("n_max must be >= 0")
    k = k_sequence(n_max).entries
    q = [Fraction(1)]
    for n in range(1, n_max + 1):
        val = Fraction(3 * n - 2, 2) * q[n - 1]
        val += 2 * sum(k[l] * q[n - l] for l in range(1, n + 1))
        q.append(val)
    return RecursionTable("Q", tuple(q))


@lru_cache(maxsize=None)
def c_table(n_max: int, t_max: int) -> RecursionTable:
    """Joint excursion table C: C_{0,0}=1, C_{n,t}=C_{n,t-1}+(t+2)C_{n-1,t+2}.

    Row n is computed out to t_max + 2*(n_max - n) so that every entry with
    t <= t_max is exact despite the recursion reaching two columns right.
    """
    if n_max < 0 or t_max < 0:
        raise OrderOutOfRange("table bounds must be >= 0")
    width0 = t_max + 2 * n_max
    rows = [[1] * (width0 + 1)]  # C_{0,t} = 1 for all t
    for n in range(1, n_max + 1):
        width = t_max + 2 * (n_max - n)
        prev = rows[n - 1]
        row = []
        for t in range(width + 1):
            left = row[t - 1] if t >= 1 else 0
            row.append(left + (t + 2) * prev[t + 2])
        rows.append(row)
    return RecursionTable("C", tuple(tuple(r) for r in rows))


@lru_cache(maxsize=None)
def q_joint_table(n_max: int, t_max: int) -> RecursionTable:
    """Joint meander table Q_{n,t}: Q_{0,0}=Q_{0,1}=1,
    Q_{n,t} = Q_{n,t-2} + (t+1) Q_{n-1,t+1} for t >= 1, and at t = 0
    Q_{n,0} = Q_{n-1,1} - 2 * 8^{-n} C_{n-1,1} (corrected sign, so that
    Q_{n,0} equals Q_n)."""
    if n_max < 0 or t_max < 0:
        raise OrderOutOfRange("table bounds must be >= 0")
    c = c_table(max(n_max - 1, 0), 1)
    width0 = t_max + n_max
    rows = [[Fraction(1)] * (width0 + 1)]  # Q_{0,t} = 1 for all t
    for n in range(1, n_max + 1):
        width = t_max + (n_max - n)
        prev = rows[n - 1]
        row = [prev[1] - 2 * Fraction(1, 8**n) * c.get(n - 1, 1)]
        for t in range(1, width + 1):
            below = row[t - 2] if t >= 2 else Fraction(0)
            row.append(below + (t + 1) * prev[t + 1])
        rows.append(row)
    return RecursionTable("Qnt", tuple(tuple(r) for r in rows))


@lru_cache(maxsize=None)
def d_sequence(k_max: int) -> RecursionTable:
    """Bridge absolute-area coefficients D_k = [x^k] 1/(1 - 2 sum K_n x^n)."""
    if k_max < 0:
        raise OrderOutOfRange("k_max must be >= 0")
    kk = k_sequence(k_max).entries
    d = [Fraction(1)]
    for k in range(1, k_max + 1):
        d.append(2 * sum(kk[j] * d[k - j] for j in range(1, k + 1)))
    return RecursionTable("Dk", tuple(d))


@lru_cache(maxsize=None)
def d_signed_table(k_max: int) -> RecursionTable:
    """Bridge signed-area coefficients
    D+-_{k,l} = [x^k y^l] 1/(1 - sum K_n (x^n + y^n))."""
    if k_max < 0:
        raise OrderOutOfRange("k_max must be >= 0")
    kk = k_sequence(k_max).entries
    d = [[Fraction(0)] * (k_max + 1) for _ in range(k_max + 1)]
    d[0][0] = Fraction(1)
    for k in range(k_max + 1):
        for l in range(k_max + 1):
            if k == l == 0:
                continue
            val = sum(kk[i] * d[k - i][l] for i in range(1, k + 1))
            val += sum(kk[j] * d[k][l - j] for j in range(1, l + 1))
            d[k][l] = val
    return RecursionTable("Dpm", tuple(tuple(r) for r in d))


def _l_signed_recursion(kl_max: int, t_max: int) -> list:
    kk = k_sequence(kl_max).entries
    qt = q_joint_table(kl_max, t_max)
    cube = [
        [[Fraction(0)] * (t_max + 1) for _ in range(kl_max + 1)]
        for _ in range(kl_max + 1)
    ]
    for t in range(t_max + 1):
        cube[0][0][t] = Fraction(1 if t % 2 == 0 else 0)
    for k in range(kl_max + 1):
        for l in range(kl_max + 1):
            if k == l == 0:
                continue
            for t in range(t_max + 1):
                val = sum(kk[j] * cube[k - j][l][t] for j in range(1, k + 1))
                val += sum(kk[j] * cube[k][l - j][t] for j in range(1, l + 1))
                if l == 0:
                    val += _HALF * qt.get(k, t)
                if k == 0:
                    # the reflection parity factor (-1)^t on the second
                    # boundary term; without it the table cannot satisfy
                    # the odd-t swap antisymmetry of the signed areas
                    val += _HALF * Fraction(-1) ** t * qt.get(l, t)
                cube[k][l][t] = val
    return cube


def _l_signed_convolution(kl_max: int, t_max: int) -> list:
    qt = q_joint_table(kl_max, t_max)
    dpm = d_signed_table(kl_max)
    cube = []
    for k in range(kl_max + 1):
        plane = []
        for l in range(kl_max + 1):
            row = []
            for t in range(t_max + 1):
                val = _HALF * sum(
                    qt.get(k - i, t) * dpm.get(i, l) for i in range(k + 1)
                )
                sign = Fraction(-1) ** t
                val += sign * _HALF * sum(
                    qt.get(l - j, t) * dpm.get(k, j) for j in range(l + 1)
                )
                row.append(val)
            plane.append(row)
        cube.append(plane)
    return cube


@lru_cache(maxsize=None)
def l_signed_table(kl_max: int, t_max: int) -> RecursionTable:
    """Signed-areas/endpoint coefficients L+-_{k,l,t}.

    Two independent code paths (the direct recursion seeded by
    L_{0,0,2t}=1, L_{0,0,2t+1}=0, and the Q/D+- convolution) are computed
    and compared entry by entry.
    """
    if kl_max < 0 or t_max < 0:
        raise OrderOutOfRange("table bounds must be >= 0")
    rec = _l_signed_recursion(kl_max, t_max)
    conv = _l_signed_convolution(kl_max, t_max)
    if rec != conv:
        raise InternalInconsistency(
            "signed-area tables: recursion and convolution forms disagree"
        )
    return RecursionTable(
        "Lpm", tuple(tuple(tuple(r) for r in p) for p in rec)
    )


@lru_cache(maxsize=None)
def l_abs_table(n_max: int, t_max: int) -> RecursionTable:
    """Absolute-area/endpoint coefficients L_{n,t}; odd t entries are 0.

    L_{0,2t}=1 and L_{n,2t} = 2 sum_j K_j L_{n-j,2t} + Q_{n,2t}; checked
    against the convolution L_{n,2t} = sum_k Q_{n-k,2t} D_k.
    """
    if n_max < 0 or t_max < 0:
        raise OrderOutOfRange("table bounds must be >= 0")
    kk = k_sequence(n_max).entries
    qt = q_joint_table(n_max, t_max)
    dk = d_sequence(n_max)
    table = [[Fraction(0)] * (t_max + 1) for _ in range(n_max + 1)]
    for t in range(0, t_max + 1, 2):
        table[0][t] = Fraction(1)
        for n in range(1, n_max + 1):
            val = 2 * sum(kk[j] * table[n - j][t] for j in range(1, n + 1))
            val += qt.get(n, t)
            table[n][t] = val
            conv = sum(qt.get(n - k, t) * dk.get(k) for k in range(n + 1))
            if conv != val:
                raise InternalInconsistency(
                    f"absolute-area table at ({n},{t}): recursion {val} "
                    f"vs convolution {conv}"
                )
    return RecursionTable("Labs", tuple(tuple(r) for r in table))


_KINDS = ("bea", "bma", "meander_joint", "walk_signed", "walk_abs", "rayleigh")


def limiting_moment(kind: str, *orders: int) -> ExactRadical:
    """Exact limiting moment of the requested law at the given orders.

    kind / orders:
      bea n            -- E[excursion-area limit ^ n]
      bma n            -- E[meander-area limit ^ n]
      meander_joint n t -- joint meander area^n * endpoint^t
      walk_signed k l t -- positive-area^k * negative-area^l * endpoint^t
      walk_abs n t      -- absolute-area^n * endpoint^t
      rayleigh t        -- endpoint law at zero drift
    """
    kind = kind.replace("-", "_")
    if kind not in _KINDS:
        raise OrderOutOfRange(f"unknown moment kind {kind!r}")
    if any(o < 0 for o in orders):
        raise OrderOutOfRange(f"orders must be >= 0, got {orders}")
    arity = {"bea": 1, "bma": 1, "meander_joint": 2,
             "walk_signed": 3, "walk_abs": 2, "rayleigh": 1}[kind]
    if len(orders) != arity:
        raise OrderOutOfRange(f"{kind} takes {arity} order(s), got {orders}")

    fact = math.factorial
    if kind == "bea":
        (n,) = orders
        kk = k_sequence(n)
        num = ExactRadical(Fraction(fact(n)) * kk.get(n), -n, 0)
        num = num * gamma_half(Fraction(-1, 2))
        den = ExactRadical(kk.get(0)) * gamma_half(Fraction(3 * n - 1, 2))
        return num / den
    if kind == "bma":
        (n,) = orders
        qq = q_sequence(n)
        num = ExactRadical(Fraction(fact(n)) * qq.get(n), -n, 0)
        num = num * gamma_half(_HALF)
        den = ExactRadical(qq.get(0)) * gamma_half(Fraction(3 * n + 1, 2))
        return num / den
    if kind == "meander_joint":
        n, t = orders
        qt = q_joint_table(n, t)
        num = ExactRadical(Fraction(fact(n) * fact(t)) * qt.get(n, t), -(n + t), 0)
        num = num * gamma_half(_HALF)
        return num / gamma_half(Fraction(3 * n + t + 1, 2))
    if kind == "walk_signed":
        k, l, t = orders
        lpm = l_signed_table(max(k, l), t)
        num = ExactRadical(
            Fraction(fact(k) * fact(l) * fact(t)) * lpm.get(k, l, t),
            -(k + l + t),
            0,
        )
        return num / gamma_half(Fraction(3 * k + 3 * l + t + 2, 2))
    if kind == "walk_abs":
        n, t = orders
        lab = l_abs_table(n, t)
        num = ExactRadical(Fraction(fact(n) * fact(t)) * lab.get(n, t), -(n + t), 0)
        return num / gamma_half(Fraction(3 * n + t + 2, 2))
    # rayleigh: 2^(t/2) Gamma(1 + t/2)
    (t,) = orders
    return ExactRadical(Fraction(1), t, 0) * gamma_half(Fraction(t + 2, 2))
