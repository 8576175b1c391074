"""Independent brute-force oracles used by the test suite.

Everything here enumerates objects directly, without touching the DP code
under test: paths as explicit step sequences, polyominoes as canonical cell
sets grown breadth-first with dedup by translation.
"""

from __future__ import annotations

import sys
from fractions import Fraction

from areamoments.enumeration import PathClass

sys.setrecursionlimit(100000)


def walk_tables(step_set, m_max):
    """Per-class, per-length (area, altitude) -> weight tables, by exhaustive
    DFS over all step sequences up to length m_max."""
    integer = step_set.all_integer_weights()
    items = [(step, int(w) if integer else w) for step, w in step_set.items]
    tabs = {c: [dict() for _ in range(m_max + 1)] for c in PathClass}

    def visit(depth, h, a, lowest, w):
        for pc in PathClass:
            if pc.constrained and lowest < 0:
                continue
            if pc.ends_at_zero and h != 0:
                continue
            key = (a, 0) if pc.ends_at_zero else (a, h)
            tab = tabs[pc][depth]
            tab[key] = tab.get(key, 0) + w
        if depth == m_max:
            return
        for step, sw in items:
            h2 = h + step
            visit(depth + 1, h2, a + h2, min(lowest, h2), w * sw)

    visit(0, 0, 0, 0, 1 if integer else Fraction(1))
    return tabs


def signed_sums(step_set, m, k, l, t):
    """Raw joint sum of (A+)^k (A-)^l h^t over all length-m walks."""
    integer = step_set.all_integer_weights()
    items = [(step, int(w) if integer else w) for step, w in step_set.items]
    acc = [0]

    def visit(depth, h, ap, am, w):
        if depth == m:
            acc[0] += w * ap**k * am**l * h**t
            return
        for step, sw in items:
            h2 = h + step
            visit(depth + 1, h2, ap + max(h2, 0), am + max(-h2, 0), w * sw)

    visit(0, 0, 0, 0, 1 if integer else Fraction(1))
    return acc[0]


def naive_fixed_polyominoes(n_max):
    """All fixed polyominoes up to n_max cells by canonical-translation BFS.

    Slower than the growth enumeration in the package but entirely
    independent of it; used to validate that enumeration on small sizes.
    """
    def canon(cells):
        minx = min(x for x, _ in cells)
        miny = min(y for _, y in cells)
        return frozenset((x - minx, y - miny) for x, y in cells)

    levels = [set(), {canon([(0, 0)])}]
    for n in range(2, n_max + 1):
        new = set()
        for poly in levels[n - 1]:
            for (x, y) in poly:
                for d in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    cell = (x + d[0], y + d[1])
                    if cell not in poly:
                        new.add(canon(list(poly) + [cell]))
        levels.append(new)
    return levels


def polyomino_stats(cells):
    """(half-perimeter, area, is_column_convex) of a cell set."""
    cells = set(cells)
    edges = sum(
        1 for (x, y) in cells for d in ((1, 0), (0, 1))
        if (x + d[0], y + d[1]) in cells
    )
    cols: dict[int, list[int]] = {}
    for x, y in cells:
        cols.setdefault(x, []).append(y)
    convex = all(max(ys) - min(ys) + 1 == len(ys) for ys in cols.values())
    return 2 * len(cells) - edges, len(cells), convex
