import pytest
from fractions import Fraction

from areamoments.errors import (
    MalformedSpec,
    NoNegativeStep,
    NoPositiveStep,
    NonpositiveArgument,
    ZeroWeight,
)
from areamoments.steps import (
    StepSet,
    characteristics,
    eval_step_polynomial,
    parse_step_set,
)


def test_parse_compact_bernoulli():
    s = parse_step_set("-1:1,1:1")
    assert s.weight_map() == {-1: Fraction(1), 1: Fraction(1)}
    assert (s.c, s.d) == (1, 1)


def test_parse_compact_two_negative():
    s = parse_step_set("-2:1,-1:1,1:1")
    assert (s.c, s.d) == (2, 1)


def test_parse_rational_weights_and_json():
    s = parse_step_set("-1:1/2, 1:3")
    assert s.weight(-1) == Fraction(1, 2)
    j = parse_step_set('{"-1": "1/2", "1": 3}', fmt="json")
    assert j == s


@pytest.mark.parametrize(
    "spec,err",
    [
        ("1:1,2:1", NoNegativeStep),
        ("-1:1,-2:1", NoPositiveStep),
        ("-1:0,1:1", ZeroWeight),
        ("-1:-1,1:1", MalformedSpec),
        ("-1:1,-1:2,1:1", MalformedSpec),
        ("", MalformedSpec),
        ("-1;1", MalformedSpec),
        ("-1:1", MalformedSpec),  # single step
    ],
)
def test_parse_rejections(spec, err):
    with pytest.raises(err):
        parse_step_set(spec)


def test_characteristics_bernoulli():
    ch = characteristics(parse_step_set("-1:1,1:1"))
    assert (ch.drift, ch.variance, ch.period, ch.aperiodic) == (0, 1, 2, False)
    assert ch.total_weight == 2


def test_characteristics_motzkin():
    ch = characteristics(parse_step_set("-1:1,0:1,1:1"))
    assert (ch.drift, ch.variance, ch.period) == (0, Fraction(2, 3), 1)


def test_characteristics_weighted_drift():
    ch = characteristics(parse_step_set("-1:2,0:1,1:1"))
    assert ch.drift == Fraction(-1, 4)
    assert ch.period == 1


def test_period_divides_step_differences():
    s = parse_step_set("-2:1,2:3")
    ch = characteristics(s)
    assert ch.period == 4
    base = s.steps[0]
    assert all((step - base) % ch.period == 0 for step in s.steps)


def test_eval_step_polynomial_values():
    bern = parse_step_set("-1:1,1:1")
    motz = parse_step_set("-1:1,0:1,1:1")
    assert eval_step_polynomial(bern, 1) == 2
    assert eval_step_polynomial(motz, 1, order=1) == 0
    assert eval_step_polynomial(bern, 2) == Fraction(5, 2)
    assert eval_step_polynomial(bern, Fraction(1, 2), order=2) == 16


def test_eval_step_polynomial_rejects_nonpositive():
    s = parse_step_set("-1:1,1:1")
    with pytest.raises(NonpositiveArgument):
        eval_step_polynomial(s, 0)
    with pytest.raises(NonpositiveArgument):
        eval_step_polynomial(s, -1.5)


def test_drift_sign_matches_s_prime():
    for spec in ("-1:1,1:1", "-1:2,0:1,1:1", "-1:1,0:1,1:2", "-2:1,-1:1,1:1"):
        s = parse_step_set(spec)
        ch = characteristics(s)
        sp1 = eval_step_polynomial(s, 1, order=1)
        assert (ch.drift > 0) == (sp1 > 0) and (ch.drift < 0) == (sp1 < 0)


def test_aperiodic_means_no_common_modulus():
    s = parse_step_set("-1:1,0:1,1:1")
    assert characteristics(s).period == 1
    base = s.steps[0]
    for g in range(2, 6):
        assert any((step - base) % g != 0 for step in s.steps[1:])


def test_spec_string_round_trip():
    s = parse_step_set("-2:1/3,1:2")
    assert parse_step_set(s.spec_string()) == s


def test_step_set_requires_validation_on_construction():
    with pytest.raises(NoNegativeStep):
        StepSet.from_weights({1: 1, 2: 1})
