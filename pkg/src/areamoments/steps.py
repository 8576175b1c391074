"""Weighted integer step sets and their elementary characteristics.

A step set is a finite alphabet of integer jumps with strictly positive
rational weights, containing at least one negative and one positive step.
Its generating Laurent polynomial is S(u) = sum_s w_s * u^s; drift, variance
and period are derived from it in exact rational arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    MalformedSpec,
    NoNegativeStep,
    NoPositiveStep,
    NonpositiveArgument,
    ZeroWeight,
)


@dataclass(frozen=True)
class StepSet:
    """Immutable weighted step alphabet, items sorted by step value."""

    items: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        if len(self.items) < 2:
            raise MalformedSpec("a step set needs at least two distinct steps")
        steps = [s for s, _ in self.items]
        if steps != sorted(set(steps)):
            raise MalformedSpec("steps must be distinct")
        for s, w in self.items:
            if w == 0:
                raise ZeroWeight(f"step {s} has weight zero")
            if w < 0:
                raise MalformedSpec(f"step {s} has negative weight {w}")
        if steps[0] >= 0:
            raise NoNegativeStep("step set has no negative step")
        if steps[-1] <= 0:
            raise NoPositiveStep("step set has no positive step")

    @classmethod
    def from_weights(cls, weights: dict[int, Fraction | int | str]) -> "StepSet":
        items = tuple(
            sorted((int(s), Fraction(w)) for s, w in weights.items())
        )
        return cls(items)

    @property
    def c(self) -> int:
        """Magnitude of the most negative step."""
        return -self.items[0][0]

    @property
    def d(self) -> int:
        """Largest step."""
        return self.items[-1][0]

    @property
    def steps(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.items)

    def weight(self, step: int) -> Fraction:
        for s, w in self.items:
            if s == step:
                return w
        return Fraction(0)

    def weight_map(self) -> dict[int, Fraction]:
        return dict(self.items)

    def all_integer_weights(self) -> bool:
        return all(w.denominator == 1 for _, w in self.items)

    def spec_string(self) -> str:
        """Canonical compact text form, re-parseable by parse_step_set."""
        return ",".join(f"{s}:{w}" for s, w in self.items)

    def __str__(self) -> str:
        return self.spec_string()


@dataclass(frozen=True)
class StepCharacteristics:
    drift: Fraction          # S'(1)/S(1)
    variance: Fraction       # [S''(1)+S'(1)]/S(1) - drift^2
    period: int              # gcd of pairwise step differences
    aperiodic: bool
    total_weight: Fraction   # S(1)


def parse_step_set(spec: str, fmt: str = "compact") -> StepSet:
    """Parse a step set from compact text ("-1:1,1:1/2") or a JSON map."""
    if not spec or not spec.strip():
        raise MalformedSpec("empty step-set spec")
    if fmt == "compact":
        weights: dict[int, Fraction] = {}
        for item in spec.split(","):
            item = item.strip()
            if not item:
                raise MalformedSpec(f"empty item in {spec!r}")
            step_txt, sep, weight_txt = item.partition(":")
            if not sep:
                raise MalformedSpec(f"missing ':' in item {item!r}")
            try:
                step = int(step_txt.strip())
                weight = Fraction(weight_txt.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise MalformedSpec(f"bad item {item!r}: {exc}") from None
            if step in weights:
                raise MalformedSpec(f"duplicate step {step}")
            weights[step] = weight
    elif fmt == "json":
        try:
            raw = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise MalformedSpec(f"bad JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise MalformedSpec("JSON spec must be an object mapping step to weight")
        weights = {}
        for key, val in raw.items():
            try:
                step = int(key)
                weight = Fraction(val) if not isinstance(val, float) else Fraction(str(val))
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise MalformedSpec(f"bad entry {key!r}: {exc}") from None
            if step in weights:
                raise MalformedSpec(f"duplicate step {step}")
            weights[step] = weight
    else:
        raise MalformedSpec(f"unknown format {fmt!r}")
    return StepSet.from_weights(weights)


def characteristics(s: StepSet) -> StepCharacteristics:
    """Drift, variance, period and total weight, all exact."""
    total = sum((w for _, w in s.items), Fraction(0))
    d1 = sum((w * step for step, w in s.items), Fraction(0))
    d2 = sum((w * step * (step - 1) for step, w in s.items), Fraction(0))
    drift = d1 / total
    variance = (d2 + d1) / total - drift * drift
    base = s.steps[0]
    period = 0
    for step in s.steps[1:]:
        period = math.gcd(period, step - base)
    return StepCharacteristics(
        drift=drift,
        variance=variance,
        period=period,
        aperiodic=(period == 1),
        total_weight=total,
    )


def eval_step_polynomial(s: StepSet, u, order: int = 0):
    """Evaluate S(u), S'(u) or S''(u); exact for rational u, float otherwise.

    Laurent terms require u > 0.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    if u <= 0:
        raise NonpositiveArgument(f"step polynomial needs u > 0, got {u}")
    if isinstance(u, int):
        u = Fraction(u)  # keep negative powers exact
    acc = None
    for step, w in s.items:
        if order == 0:
            term = w * u ** step
        elif order == 1:
            term = w * step * u ** (step - 1)
        else:
            term = w * step * (step - 1) * u ** (step - 2)
        acc = term if acc is None else acc + term
    return acc
