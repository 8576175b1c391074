"""Command-line front end: stable text/CSV/JSON contracts for scripting.

Every run echoes its fully resolved configuration into the report header so
results are reproducible from the output alone. Output is deterministic:
no clocks, no randomness, keys and rows always sorted the same way.
Warnings (e.g. periodic step sets) go to stderr only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python 3.10
    import tomli as tomllib

from . import converge as cv
from . import enumeration as en
from . import kernel as kn
from . import limits as lm
from . import polyomino as po
from .errors import AreaMomentsError, OutOfMemoryBudget
from .steps import parse_step_set

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3


def _fmt_exact(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator > 1 else str(x.numerator)
    return str(x)


def _fmt_float(x: float) -> str:
    return f"{x:.12g}"


def _parse_int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]


def _parse_orders(text: str) -> list[tuple[int, ...]]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if item:
            out.append(tuple(int(p) for p in item.split(":")))
    return out


def _parse_grid(text: str) -> list[float]:
    a, b, n = text.split(":")
    a, b, n = float(a), float(b), int(n)
    if n < 2:
        return [a]
    return [a + (b - a) * i / (n - 1) for i in range(n)]


class Report:
    """Config header plus a column-named row table, in three formats."""

    def __init__(self, config: dict, columns: list[str], rows: list[tuple]):
        self.config = config
        self.columns = columns
        self.rows = rows

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(
                {
                    "config": self.config,
                    "columns": self.columns,
                    "rows": [list(map(str, r)) for r in self.rows],
                },
                indent=2,
                sort_keys=True,
            ) + "\n"
        buf = io.StringIO()
        cfg = " ".join(f"{k}={self.config[k]}" for k in sorted(self.config))
        if fmt == "csv":
            buf.write(f"# {cfg}\n")
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([str(c) for c in row])
        else:  # table
            for k in sorted(self.config):
                buf.write(f"# {k} = {self.config[k]}\n")
            widths = [
                max(len(self.columns[i]), max((len(str(r[i])) for r in self.rows), default=0))
                for i in range(len(self.columns))
            ]
            buf.write("  ".join(c.ljust(w) for c, w in zip(self.columns, widths)).rstrip() + "\n")
            for row in self.rows:
                buf.write("  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")
        return buf.getvalue()


def _warn(messages) -> None:
    for msg in messages:
        print(f"warning: {msg}", file=sys.stderr)


# -- subcommand handlers -------------------------------------------------------

def _cmd_analyze(opts) -> Report:
    s = parse_step_set(opts["steps"], opts["steps_format"])
    profile = kn.structural_constants(s)
    _warn(profile.warnings)
    cols = ["tau", "rho", "beta", "regime", "drift", "period"]
    row = (
        _fmt_float(profile.tau), _fmt_float(profile.rho),
        _fmt_float(profile.beta), profile.regime.value,
        _fmt_exact(profile.drift), profile.period,
    )
    return Report(opts, cols, [row])


def _cmd_enumerate(opts) -> Report:
    s = parse_step_set(opts["steps"], opts["steps_format"])
    path_class = en.PathClass(opts["path_class"])
    if opts["signed_areas"]:
        if path_class is not en.PathClass.BRIDGE:
            raise ValueError("--signed-areas applies to --class bridge only")
        dist = en.bridge_distribution(s, opts["m"], opts["memory_budget"])
        rows = [(path_class.value, dist.length, ap, am, _fmt_exact(w))
                for (ap, am), w in sorted(dist.table.items())]
        return Report(opts, ["class", "m", "area_pos", "area_neg", "weight"], rows)
    dist = en.exact_distribution(s, path_class, opts["m"], opts["memory_budget"])
    rows = [(c, m, a, h, _fmt_exact(w)) for c, m, a, h, w in dist.csv_rows()]
    return Report(opts, ["class", "m", "area", "altitude", "weight"], rows)


def _cmd_moments(opts) -> Report:
    s = parse_step_set(opts["steps"], opts["steps_format"])
    path_class = en.PathClass(opts["path_class"])
    lengths = _parse_int_list(opts["lengths"]) if opts["lengths"] else None
    table = en.moment_dp(
        s, path_class, opts["m_max"], opts["n_max"], opts["t_max"],
        lengths=lengths, memory_budget=opts["memory_budget"],
    )
    rows = [(c, m, n, t, _fmt_exact(rs), _fmt_exact(tot))
            for c, m, n, t, rs, tot in table.csv_rows()]
    return Report(opts, ["class", "m", "n", "t", "raw_sum", "total"], rows)


def _limit_rows(kind: str, grids: list[range]):
    import itertools
    for orders in itertools.product(*grids):
        val = lm.limiting_moment(kind, *orders)
        yield (*orders, str(val), _fmt_float(float(val)))


_TABLE_KINDS = {
    "k": (["n"], lambda n, t, k, l: (lm.k_sequence(n), [range(n + 1)])),
    "q": (["n"], lambda n, t, k, l: (lm.q_sequence(n), [range(n + 1)])),
    "c": (["n", "t"], lambda n, t, k, l: (
        lm.c_table(n, t or 0), [range(n + 1), range((t or 0) + 1)])),
    "qnt": (["n", "t"], lambda n, t, k, l: (
        lm.q_joint_table(n, t or 0), [range(n + 1), range((t or 0) + 1)])),
    "dk": (["k"], lambda n, t, k, l: (
        lm.d_sequence(k if k is not None else n), [range((k if k is not None else n) + 1)])),
    "dpm": (["k", "l"], lambda n, t, k, l: (
        lm.d_signed_table(max(k or 0, l or 0)),
        [range((k or 0) + 1), range((l or 0) + 1)])),
    "lpm": (["k", "l", "t"], lambda n, t, k, l: (
        lm.l_signed_table(max(k or 0, l or 0), t or 0),
        [range((k or 0) + 1), range((l or 0) + 1), range((t or 0) + 1)])),
    "labs": (["n", "t"], lambda n, t, k, l: (
        lm.l_abs_table(n, t or 0), [range(n + 1), range((t or 0) + 1)])),
}


def _cmd_limits(opts) -> Report:
    kind = opts["kind"].replace("-", "_")
    n, t, k, l = opts["n"], opts["t"], opts["k"], opts["l"]
    if kind in _TABLE_KINDS:
        import itertools
        cols, build = _TABLE_KINDS[kind]
        table, grids = build(n, t, k, l)
        rows = []
        for idx in itertools.product(*grids):
            val = table.get(*idx)
            rows.append((*idx, _fmt_exact(val), _fmt_float(float(val))))
        return Report(opts, cols + ["exact", "float"], rows)
    if kind in ("bea", "bma"):
        cols, grids = ["n"], [range(n + 1)]
    elif kind == "rayleigh":
        cols, grids = ["t"], [range((t if t is not None else n) + 1)]
    elif kind == "meander_joint":
        cols, grids = ["n", "t"], [range(n + 1), range((t or 0) + 1)]
    elif kind == "walk_abs":
        cols, grids = ["n", "t"], [range(n + 1), range((t or 0) + 1)]
    elif kind == "walk_signed":
        cols = ["k", "l", "t"]
        grids = [range((k or 0) + 1), range((l or 0) + 1), range((t or 0) + 1)]
    else:
        raise ValueError(f"unknown limits kind {opts['kind']!r}")
    rows = list(_limit_rows(kind, grids))
    return Report(opts, cols + ["exact", "float"], rows)


def _cmd_kernel(opts) -> Report:
    s = parse_step_set(opts["steps"], opts["steps_format"])
    if opts["z"] is not None:
        grid = [opts["z"]]
    elif opts["grid"]:
        grid = _parse_grid(opts["grid"])
    else:
        profile = kn.structural_constants(s)
        grid = [profile.rho * f for f in (0.25, 0.5, 0.75, 0.9)]
    report = kn.assumption_report(s, grid)
    _warn(report.warnings)
    p = report.profile
    for key, val in (("tau", p.tau), ("rho", p.rho), ("beta", p.beta)):
        opts[key] = _fmt_float(val)
    opts["regime"] = p.regime.value
    cols = ["z", "min_small_branch_gap", "small_large_modulus_gap",
            "det_proxy", "kernel_residual", "g0"]
    rows = []
    for row in report.rows:
        sol = kn.solve_meander_gf(s, row["z"])
        rows.append((
            _fmt_float(row["z"]),
            _fmt_float(row["min_small_branch_gap"]),
            _fmt_float(row["small_large_modulus_gap"]),
            _fmt_float(row["det_proxy"]),
            _fmt_float(row["kernel_residual"]),
            _fmt_float(sol.g_values[0]),
        ))
    return Report(opts, cols, rows)


def _cmd_polyomino(opts) -> Report:
    action = opts["action"]
    if action == "enumerate":
        counts = po.cc_enumerate(opts["hp_max"], opts["memory_budget"])
        agg: dict[tuple[int, int], int] = {}
        for (hp, a, _h), c in counts.items():
            agg[(hp, a)] = agg.get((hp, a), 0) + c
        rows = [(hp, a, c) for (hp, a), c in sorted(agg.items())]
        return Report(opts, ["hp", "area", "count"], rows)
    if action == "constants":
        p = po.cc_structural_constants()
        return Report(opts, ["tau", "rho", "beta"],
                      [(_fmt_float(p.tau), _fmt_float(p.rho), _fmt_float(p.beta))])
    if action == "converge":
        hp_list = _parse_int_list(opts["hp"])
        n_max = opts["n_max"]
        table = po.cc_area_moments(max(hp_list), n_max, opts["memory_budget"])
        profile = po.cc_structural_constants()
        import math
        bea = [float(lm.limiting_moment("bea", n)) for n in range(n_max + 1)]
        rows = []
        for hp in hp_list:
            for n in range(1, n_max + 1):
                resc = (float(table.moment(hp, n))
                        * (profile.beta / math.sqrt(2.0)) ** n / hp ** (1.5 * n))
                err = abs(resc - bea[n]) / bea[n]
                rows.append((hp, n, _fmt_float(resc), _fmt_float(bea[n]),
                             _fmt_float(err)))
        return Report(opts, ["hp", "n", "rescaled", "limit", "rel_error"], rows)
    if action == "moments":
        table = po.cc_area_moments(opts["hp_max"], opts["n_max"],
                                   opts["memory_budget"])
        rows = [(hp, n, _fmt_exact(rs), _fmt_exact(tot))
                for hp, n, rs, tot in table.csv_rows()]
        return Report(opts, ["hp", "n", "raw_sum", "total"], rows)
    raise ValueError(f"unknown polyomino action {action!r}")


def _cmd_converge(opts) -> Report:
    s = parse_step_set(opts["steps"], opts["steps_format"])
    path_class = en.PathClass(opts["path_class"])
    m_list = _parse_int_list(opts["m"])
    if path_class is en.PathClass.WALK:
        signed = _parse_orders(opts["orders"]) if opts["orders"] else \
            cv.default_signed_orders(2, 2)
        abs_orders = _parse_orders(opts["abs_orders"]) if opts["abs_orders"] else []
        report = cv.signed_report(s, m_list, signed, abs_orders,
                                  memory_budget=opts["memory_budget"])
    else:
        orders = _parse_orders(opts["orders"]) if opts["orders"] else [(1, 0)]
        report = cv.limit_report(s, path_class, m_list, orders,
                                 memory_budget=opts["memory_budget"])
    cols = ["step_set", "class", "regime", "m", "n", "l", "t",
            "rescaled", "limit", "rel_error", "trend"]
    rows = list(report.csv_rows())
    return Report(opts, cols, rows)


def _selftest_checks():
    from fractions import Fraction as F

    def limits_base():
        k = lm.k_sequence(3)
        q = lm.q_sequence(2)
        ok = ([k.get(i) for i in range(4)] ==
              [F(-1, 2), F(1, 8), F(5, 64), F(15, 128)])
        ok &= q.get(1) == F(3, 4) and q.get(2) == F(59, 32)
        ok &= lm.c_table(2, 1).get(1, 1) == 5 and lm.c_table(2, 1).get(2, 1) == 60
        ok &= lm.d_sequence(2).get(2) == F(7, 32)
        ok &= lm.l_signed_table(1, 0).get(1, 0, 0) == F(1, 2)
        return ok

    def limits_identities():
        kk, cc = lm.k_sequence(20), lm.c_table(20, 1)
        qq, qt = lm.q_sequence(20), lm.q_joint_table(20, 4)
        ok = all(cc.get(n - 1, 1) == 8**n * kk.get(n) for n in range(1, 21))
        ok &= all(qt.get(n, 0) == qq.get(n) for n in range(21))
        dk, dp = lm.d_sequence(12), lm.d_signed_table(12)
        ok &= all(dk.get(k) == sum(dp.get(k - i, i) for i in range(k + 1))
                  for k in range(13))
        lab = lm.l_abs_table(6, 6)
        ok &= all(lab.get(0, 2 * t) == 1 for t in range(4))
        ok &= all(lab.get(n, 2 * t + 1) == 0 for n in range(7) for t in range(3))
        return ok

    def oracle_small():
        from itertools import product
        s = parse_step_set("-2:1,-1:1,1:1")
        for m in range(7):
            brute: dict = {}
            for seq in product(s.items, repeat=m):
                h = a = mn = 0
                w = 1
                for step, sw in seq:
                    h += step
                    a += h
                    w *= int(sw)
                    mn = min(mn, h)
                if mn >= 0:
                    brute[(a, h)] = brute.get((a, h), 0) + w
            if en.exact_distribution(s, en.PathClass.MEANDER, m).table != brute:
                return False
        return True

    def kernel_bernoulli():
        import math
        s = parse_step_set("-1:1,1:1")
        p = kn.structural_constants(s)
        ok = abs(p.tau - 1) < 1e-10 and abs(p.rho - 0.5) < 1e-10
        ok &= abs(p.beta - math.sqrt(2)) < 1e-10
        u1 = kn.branches_at(s, 0.25).u1
        ok &= abs(u1 - (1 - math.sqrt(1 - 0.25)) / 0.5) < 1e-10
        return ok

    def polyomino_small():
        dp = po.cc_enumerate(8)
        fe = po.cc_functional_equation(8)
        if dp != fe:
            return False
        agg: dict = {}
        for (hp, a, _h), c in dp.items():
            agg[(hp, a)] = agg.get((hp, a), 0) + c
        oracle = po.cc_brute_oracle(6)
        dom = [k for k in set(agg) | set(oracle) if k[0] <= 5]
        return all(agg.get(k, 0) == oracle.get(k, 0) for k in dom)

    def bridge_identity():
        s = parse_step_set("-1:1,1:1")
        alt = en.meander_altitude_series(s, 24)
        exc = [alt[m].get(0, 0) for m in range(25)]
        ser = en.bridge_series_from_excursions(exc, 24)
        table = en.moment_dp(s, en.PathClass.BRIDGE, 24, 0)
        return all(ser[m] == table.total(m) for m in range(25))

    return [
        ("limits.base_values", limits_base),
        ("limits.identities", limits_identities),
        ("enumerate.brute_force_oracle", oracle_small),
        ("enumerate.bridge_series_identity", bridge_identity),
        ("kernel.bernoulli_closed_forms", kernel_bernoulli),
        ("polyomino.three_route_agreement", polyomino_small),
    ]


def _cmd_selftest(opts) -> Report:
    rows = []
    failures = 0
    for name, check in _selftest_checks():
        try:
            ok = bool(check())
        except Exception as exc:  # a crash is a failure, not an abort
            ok = False
            print(f"selftest {name} raised: {exc}", file=sys.stderr)
        rows.append((name, "PASS" if ok else "FAIL"))
        failures += 0 if ok else 1
    opts["failures"] = failures
    return Report(opts, ["check", "status"], rows)


# -- argument plumbing ---------------------------------------------------------

_GLOBAL_DEFAULTS = {
    "format": "table",
    "output": None,
    "config": None,
    "memory_budget": None,
    "threads": 1,
    "steps_format": "compact",
}


def _add_common(p: argparse.ArgumentParser, steps: bool = True) -> None:
    p.add_argument("--format", choices=["csv", "json", "table"], default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--memory-budget", type=int, dest="memory_budget", default=None)
    p.add_argument("--threads", type=int, default=None)
    if steps:
        p.add_argument("--steps", default=None)
        p.add_argument("--steps-format", choices=["compact", "json"],
                       dest="steps_format", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="areamoments",
        description="Exact lattice-path/polygon area statistics and their "
                    "Brownian-area limits",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("analyze", help="structural constants of a step set")
    _add_common(p)

    p = sub.add_parser("enumerate", help="exact area distribution at one length")
    _add_common(p)
    p.add_argument("--class", dest="path_class", default="excursion",
                   choices=[c.value for c in en.PathClass])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--signed-areas", dest="signed_areas", action="store_true")

    p = sub.add_parser("moments", help="exact raw joint moment table")
    _add_common(p)
    p.add_argument("--class", dest="path_class", default="meander",
                   choices=[c.value for c in en.PathClass])
    p.add_argument("--m-max", dest="m_max", type=int, required=True)
    p.add_argument("--n-max", dest="n_max", type=int, default=1)
    p.add_argument("--t-max", dest="t_max", type=int, default=0)
    p.add_argument("--lengths", default=None)

    p = sub.add_parser("limits", help="exact limiting moments")
    _add_common(p, steps=False)
    p.add_argument("--kind", required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--l", type=int, default=None)

    p = sub.add_parser("kernel", help="kernel-method analysis on a z grid")
    _add_common(p)
    p.add_argument("action", nargs="?", default="analyze", choices=["analyze"])
    p.add_argument("--z", type=float, default=None)
    p.add_argument("--grid", default=None, help="a:b:n")

    p = sub.add_parser("polyomino", help="column-convex polygon suites")
    _add_common(p, steps=False)
    p.add_argument("action", nargs="?", default="enumerate",
                   choices=["enumerate", "moments", "converge", "constants"])
    p.add_argument("--hp-max", dest="hp_max", type=int, default=12)
    p.add_argument("--hp", default="20,40,60")
    p.add_argument("--n-max", dest="n_max", type=int, default=1)

    p = sub.add_parser("converge", help="rescaled moments vs exact limits")
    _add_common(p)
    p.add_argument("--class", dest="path_class", default="meander",
                   choices=[c.value for c in en.PathClass])
    p.add_argument("--m", required=True)
    p.add_argument("--orders", default=None, help="n:t or k:l:t, comma separated")
    p.add_argument("--abs-orders", dest="abs_orders", default=None)

    p = sub.add_parser("selftest", help="run the invariant matrix")
    _add_common(p, steps=False)
    return parser


_HANDLERS = {
    "analyze": _cmd_analyze,
    "enumerate": _cmd_enumerate,
    "moments": _cmd_moments,
    "limits": _cmd_limits,
    "kernel": _cmd_kernel,
    "polyomino": _cmd_polyomino,
    "converge": _cmd_converge,
    "selftest": _cmd_selftest,
}


def _resolve_options(args: argparse.Namespace) -> dict:
    """Merge flags over the optional TOML config; flags win."""
    opts = vars(args).copy()
    cfg_path = opts.get("config")
    file_cfg: dict = {}
    if cfg_path:
        with open(cfg_path, "rb") as fh:
            loaded = tomllib.load(fh)
        file_cfg.update(loaded.get("global", {}))
        file_cfg.update(loaded.get(opts["subcommand"], {}))
    for key, val in opts.items():
        if val is None and key.replace("_", "-") in file_cfg:
            opts[key] = file_cfg[key.replace("_", "-")]
        elif val is None and key in file_cfg:
            opts[key] = file_cfg[key]
    for key, default in _GLOBAL_DEFAULTS.items():
        if opts.get(key) is None:
            opts[key] = default
    if opts.get("threads") is not None and opts["threads"] < 1:
        raise ValueError("--threads must be >= 1")
    return opts


def _join_steps_flag(argv: list[str]) -> list[str]:
    # step specs usually start with "-"; fold the value into --steps=... so
    # argparse does not mistake it for an option
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--steps" and i + 1 < len(argv):
            out.append(f"--steps={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_steps_flag(argv))
    sub = args.subcommand
    try:
        opts = _resolve_options(args)
        fmt = opts.pop("format")
        out_path = opts.pop("output")
        opts.pop("config", None)
        report = _HANDLERS[sub](opts)
        text = report.render(fmt)
        if out_path:
            with open(out_path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if sub == "selftest" and opts.get("failures"):
            return 1
        return EXIT_OK
    except OutOfMemoryBudget as exc:
        print(f"error[{sub}.OutOfMemoryBudget]: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (AreaMomentsError, ValueError, OSError) as exc:
        print(f"error[{sub}.{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
