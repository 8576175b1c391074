import math

import pytest

from areamoments.enumeration import meander_altitude_series
from areamoments.errors import ClassificationAmbiguity
from areamoments.kernel import (
    Regime,
    assumption_report,
    branches_at,
    solve_meander_gf,
    structural_constants,
    truncation_bound,
    verify_puiseux,
)
from areamoments.steps import parse_step_set

BERN = parse_step_set("-1:1,1:1")
MOTZ = parse_step_set("-1:1,0:1,1:1")
S211 = parse_step_set("-2:1,-1:1,1:1")


def bernoulli_u1(z):
    return (1 - math.sqrt(1 - 2 * z) * math.sqrt(1 + 2 * z)) / (2 * z)


def test_structural_constants_bernoulli():
    p = structural_constants(BERN)
    assert abs(p.tau - 1) < 1e-12
    assert abs(p.rho - 0.5) < 1e-12
    assert abs(p.beta - math.sqrt(2)) < 1e-12
    assert p.regime is Regime.ZERO
    assert p.period == 2 and p.warnings


def test_structural_constants_motzkin():
    p = structural_constants(MOTZ)
    assert abs(p.tau - 1) < 1e-12
    assert abs(p.rho - 1 / 3) < 1e-12
    assert abs(p.beta - math.sqrt(3)) < 1e-12
    assert p.period == 1 and not p.warnings


def test_structural_constants_residuals():
    from areamoments.steps import eval_step_polynomial
    for s in (S211, parse_step_set("-1:2,0:1,1:1"), parse_step_set("-1:1,0:1,1:2")):
        p = structural_constants(s)
        assert abs(float(eval_step_polynomial(s, p.tau, order=1))) < 1e-12
        s_tau = float(eval_step_polynomial(s, p.tau))
        s2_tau = float(eval_step_polynomial(s, p.tau, order=2))
        assert abs(p.rho * s_tau - 1) < 1e-12
        assert abs(p.beta**2 * s2_tau / (2 * s_tau) - 1) < 1e-10


def test_regimes():
    assert structural_constants(parse_step_set("-1:2,0:1,1:1")).regime is Regime.NEGATIVE
    assert structural_constants(parse_step_set("-1:1,0:1,1:2")).regime is Regime.POSITIVE


def test_bernoulli_branch_closed_form_grid():
    for i in range(1, 51):
        z = 0.5 * i / 51
        b = branches_at(BERN, z)
        assert abs(b.u1 - bernoulli_u1(z)) < 1e-10
        assert b.max_residual < 1e-10


def test_branch_at_origin_limit():
    b = branches_at(BERN, 1e-4)
    assert abs(b.u1 - 1e-4) < 1e-7
    assert abs(b.large[0]) > 1e3


def test_branch_counts_and_residuals_211():
    b = branches_at(S211, 0.2)
    assert len(b.small) == 2 and len(b.large) == 1
    assert b.max_residual < 1e-10


def test_complex_small_branches_conjugate():
    b = branches_at(S211, 0.2)
    others = [u for u in b.small[1:]]
    if others and abs(others[0].imag) > 1e-9:
        conj = [u.conjugate() for u in others]
        for u in others:
            assert any(abs(u - v) < 1e-9 for v in conj)


def test_u1_monotone_in_z():
    p = structural_constants(S211)
    grid = [p.rho * f for f in (0.1, 0.3, 0.5, 0.7, 0.9)]
    values = [branches_at(S211, z).u1 for z in grid]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert values[-1] <= p.tau


def test_branches_precondition():
    with pytest.raises(ValueError):
        branches_at(BERN, 0.7)
    with pytest.raises(ValueError):
        branches_at(BERN, 0.0)


def test_periodic_step_set_warning_period4():
    s = parse_step_set("-2:1,2:1")
    p = structural_constants(s)
    assert p.period == 4
    assert any("periodic" in w for w in p.warnings)
    b = branches_at(s, 0.35)  # well inside (0, rho = 0.5): split still clean
    assert len(b.small) == 2 and len(b.large) == 2


def test_classification_ambiguity_at_collapsing_gap():
    # small beta => the u1/v1 modulus gap ~ beta*sqrt(1 - z/rho) drops below
    # the 1e-8 guard one ulp away from rho
    s = parse_step_set("-1:1,1:100")
    p = structural_constants(s)
    with pytest.raises(ClassificationAmbiguity):
        branches_at(s, math.nextafter(p.rho, 0.0))


def test_puiseux_reports():
    rep = verify_puiseux(MOTZ, [0.30, 0.32, 0.333])
    assert rep.success and rep.decreasing
    # Bernoulli near rho: amplitude within 10 percent of sqrt(2)
    b = branches_at(BERN, 0.49)
    ratio = (1 - b.u1) / math.sqrt(1 - 2 * 0.49)
    assert abs(ratio - math.sqrt(2)) < 0.1 * math.sqrt(2)
    with pytest.raises(ValueError):
        verify_puiseux(MOTZ, [0.1, 0.2])  # outside (0.8 rho, rho)


def test_solver_matches_dyck_series():
    sol = solve_meander_gf(BERN, 0.25)
    alt = meander_altitude_series(BERN, 40)
    partial = sum(alt[m].get(0, 0) * 0.25**m for m in range(41))
    assert abs(sol.g_values[0] - partial) < 1e-10


def test_solver_matches_dp_for_c2():
    alt = meander_altitude_series(S211, 60)
    for z in (0.05, 0.10, 0.15):
        sol = solve_meander_gf(S211, z)
        bound = truncation_bound(S211, z, 60)
        for k in range(2):
            partial = sum(alt[m].get(k, 0) * z**m for m in range(61))
            assert abs(sol.g_values[k] - partial) <= max(bound, 1e-12)


def test_solver_empty_limit():
    for z in (1e-6, 1e-5):
        sol = solve_meander_gf(S211, z)
        assert abs(sol.g_values[0] - 1) < 1e-4
        assert abs(sol.g_values[1]) < 1e-4


def test_f_evaluation_matches_meander_series():
    sol = solve_meander_gf(BERN, 0.25, u_eval=[1.0])
    alt = meander_altitude_series(BERN, 40)
    partial = sum(sum(alt[m].values()) * 0.25**m for m in range(41))
    assert abs(sol.f_at[1.0] - partial) < 1e-9


def test_truncation_bound_is_a_true_bound():
    alt = meander_altitude_series(S211, 80)
    z = 0.12
    full = sum(alt[m].get(0, 0) * z**m for m in range(81))
    for trunc in (20, 30, 40):
        partial = sum(alt[m].get(0, 0) * z**m for m in range(trunc + 1))
        assert abs(full - partial) <= truncation_bound(S211, z, trunc)


def test_assumption_report_fields():
    rep = assumption_report(S211, [0.1, 0.2, 0.3])
    assert rep.aperiodic
    for row in rep.rows:
        assert row["min_small_branch_gap"] > 1e-8
        assert row["small_large_modulus_gap"] > 1e-8
        assert abs(row["det_proxy"] - 1.0) < 1e-6  # meander det M factorizes
        assert row["kernel_residual"] < 1e-10


def test_g_values_positive_on_grid():
    for s in (BERN, MOTZ, S211):
        p = structural_constants(s)
        for f in (0.2, 0.5, 0.8):
            sol = solve_meander_gf(s, p.rho * f)
            assert all(g > 0 for g in sol.g_values)


def test_puiseux_bernoulli_near_rho():
    rep = verify_puiseux(BERN, [0.45, 0.47, 0.49])
    assert rep.decreasing
    assert rep.rows[-1][1] < 0.1 * math.sqrt(2)


def test_solver_c3_and_rational_weights():
    for spec, zs in (
        ("-3:1,1:1", (0.05, 0.12)),
        ("-2:1/2,-1:1,0:2,1:1/3", (0.05, 0.1)),
    ):
        s = parse_step_set(spec)
        alt = meander_altitude_series(s, 70)
        for z in zs:
            sol = solve_meander_gf(s, z)
            bound = truncation_bound(s, z, 70)
            assert len(sol.g_values) == s.c
            for k in range(s.c):
                partial = sum(float(alt[m].get(k, 0)) * z**m for m in range(71))
                assert abs(sol.g_values[k] - partial) <= max(bound, 1e-9), (spec, z, k)


def test_assumption_report_periodic_warning():
    rep = assumption_report(BERN, [0.1, 0.2])
    assert not rep.aperiodic
    assert any("periodic" in w for w in rep.warnings)
