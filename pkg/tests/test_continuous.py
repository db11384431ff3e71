from fractions import Fraction

import pytest

from delegation.continuous import (
    ContinuousFamily,
    FamilyError,
    discretize,
    grid_points,
    load_family,
    named_family,
    quadratic_family,
    solve_continuous,
    toy_family,
    value_bound_violations,
)
from delegation.exact import sqrt_bounds
from delegation.instance import make_instance
from delegation.pricing import solve_menu_k

F = Fraction
R = [[1, 0]]


def test_grid():
    assert grid_points(F(1, 4)) == [0, F(1, 4), F(1, 2), F(3, 4), 1]
    assert grid_points(1) == [0, 1]
    assert grid_points(F(2, 5)) == [0, F(2, 5), F(4, 5), 1]
    with pytest.raises(ValueError):
        grid_points(0)


def test_toy_bounds():
    prog = discretize(toy_family(), F(1, 4), R, [1])
    assert prog.upper[0] == (F(3, 4), F(7, 8), F(1), F(9, 8), F(5, 4))
    assert prog.lower[0] == (F(1, 4), F(3, 8), F(1, 2), F(5, 8), F(3, 4))
    assert prog.floor_eps == F(1, 4) * (1 + 4)
    assert value_bound_violations(prog) == []


def test_quadratic_bounds():
    prog = discretize(quadratic_family(), F(1, 8), R, [1])
    assert value_bound_violations(prog) == []


def test_smoothness_violation():
    fam = ContinuousFamily("flat", 2, lambda a: ((F(1), F(0)), a / 2), smoothness=F(1, 2))
    with pytest.raises(FamilyError, match="smoothness"):
        discretize(fam, F(1, 2), R, [1])


def test_bad_family_values():
    fam = ContinuousFamily("neg", 2, lambda a: ((F(2), F(-1)), 0), smoothness=F(1, 2))
    with pytest.raises(FamilyError):
        fam.at(0)
    with pytest.raises(FamilyError):
        named_family("nope")


def test_float_family_is_made_exact():
    fam = ContinuousFamily("f", 2, lambda a: ((0.25, 0.75), 0.5), smoothness=F(1, 4), precision=6)
    assert fam.at(0) == ((F(1, 4), F(3, 4)), F(1, 2))


def test_constant_family_matches_discrete():
    half = F(1, 2)
    fam = ContinuousFamily("const", 2, lambda a: ((half, half), F(1, 10)), smoothness=half, lipschitz_F=F(0), lipschitz_c=F(0))
    res = solve_continuous(fam, F(1, 4), [[1, 0], [0, 1]], [half, half])
    one = make_instance([half, half], [[half, half]], [[1, 0], [0, 1]], [F(1, 10)])
    assert res.program.floor_eps == 0
    assert res.program_value == solve_menu_k(one, 2).value == F(2, 5)


@pytest.mark.parametrize("delta", [F(1, 16), F(1, 64)])
def test_toy_pipeline(delta):
    res = solve_continuous(toy_family(), delta, R, [1])
    assert res.value >= res.guarantee
    up = lambda x: sqrt_bounds(x)[1]
    assert res.value >= F(1, 2) - 2 * up(2 * delta) - up(4 * delta) - delta
    assert res.value <= F(1, 2)
    c = F(1, 2)
    assert res.provider_slack <= 2 * delta * (1 + 2 / c) + up(2 * delta)


def test_tabulated_family():
    doc = {
        "name": "lin",
        "smoothness": "1/2",
        "points": [{"a": 0, "F": ["1/2", "1/2"], "c": 0}, {"a": 1, "F": [1, 0], "c": "1/2"}],
    }
    fam = load_family(doc)
    assert fam.at(F(1, 2)) == ((F(3, 4), F(1, 4)), F(1, 4))
    assert fam.at(F(1, 3)) == toy_family().at(F(1, 3))
    with pytest.raises(FamilyError):
        load_family({"points": [{"a": "1/2", "F": [1], "c": 0}], "smoothness": 1})
