from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from delegation.continuous import discretize, grid_points, quadratic_family, toy_family
from delegation.exact import dot
from delegation.floors import (
    InfeasibleError,
    check_q_shift,
    compute_floor,
    min_relaxation,
    provider_slack,
    reconstruct_payment,
)
from delegation.generators import gen_random
from delegation.instance import make_instance

F = Fraction


@pytest.fixture
def cost_inst():
    # F_a1 = (1, 0), F_a2 = (0, 1), c = (0, 3/10)
    return make_instance([1], [[1, 0], [0, 1]], [[1, 0]], [0, F(3, 10)])


def test_zero_cost_floors(diag2):
    assert [compute_floor(diag2, a, 0).floor for a in range(2)] == [0, 0]


def test_cost_floor_hand_values(cost_inst):
    # min p2 s.t. p2 - 3/10 >= p1 - eps
    assert compute_floor(cost_inst, 1, 0).floor == F(3, 10)
    assert compute_floor(cost_inst, 1, F(1, 10)).floor == F(1, 5)
    assert compute_floor(cost_inst, 0, 0).floor == 0


def test_singleton_action_set(cost_inst):
    assert compute_floor(cost_inst, 1, 0, action_set=[1]).floor == 0


def test_action_outside_set(cost_inst):
    with pytest.raises(ValueError):
        compute_floor(cost_inst, 1, 0, action_set=[0])


def test_uninducible_action():
    # a2 reaches the same outcome as a1 at a higher cost: no payment makes it a best response
    inst = make_instance([1], [[1, 0], [1, 0]], [[1, 0]], [0, F(1, 2)])
    fl = compute_floor(inst, 1, 0)
    assert fl.floor is None and not fl.inducible
    assert compute_floor(inst, 1, F(1, 2)).floor == 0


def test_reconstruct_diag2(diag2):
    assert reconstruct_payment(diag2, 0, 1) == (1, 0)


def test_reconstruct_at_floor_binds(cost_inst):
    p = reconstruct_payment(cost_inst, 1, F(3, 10))
    assert dot(cost_inst.F[1], p) == F(3, 10)
    assert p[1] - F(3, 10) == p[0]  # binding IC row


def test_reconstruct_below_floor(cost_inst):
    with pytest.raises(InfeasibleError):
        reconstruct_payment(cost_inst, 1, F(1, 5))


def test_q_shift_examples(diag2, cost_inst):
    assert check_q_shift(diag2, 0, 1, 0, F(1, 2))
    assert check_q_shift(cost_inst, 1, F(3, 10), 0, F(1, 10))
    with pytest.raises(ValueError):
        check_q_shift(diag2, 0, F(1, 2), 0, 1)


def test_min_relaxation(cost_inst):
    assert min_relaxation(cost_inst, 1, F(1, 5)) == F(1, 10)
    assert min_relaxation(cost_inst, 1, F(1, 2)) == 0
    assert min_relaxation(cost_inst, 1, -1) is None


def test_provider_slack(cost_inst):
    assert provider_slack(cost_inst, 1, (0, F(1, 5))) == F(1, 10)
    assert provider_slack(cost_inst, 1, (0, 1)) == 0


instances = st.builds(
    gen_random, st.integers(1, 3), st.integers(1, 3), st.integers(2, 3), st.integers(0, 10**6)
)
rationals01 = st.fractions(min_value=0, max_value=1, max_denominator=20)


@given(instances, st.data(), rationals01, rationals01)
def test_floor_monotone_in_eps(inst, data, e1, e2):
    a = data.draw(st.integers(0, inst.ell - 1))
    lo, hi = sorted((e1, e2))
    f_lo, f_hi = compute_floor(inst, a, lo).floor, compute_floor(inst, a, hi).floor
    if f_lo is not None:
        assert f_hi is not None and f_hi <= f_lo


@given(instances, st.data())
def test_floor_monotone_in_action_set(inst, data):
    a = data.draw(st.integers(0, inst.ell - 1))
    sub = data.draw(st.sets(st.integers(0, inst.ell - 1))) | {a}
    full, part = compute_floor(inst, a, 0).floor, compute_floor(inst, a, 0, sub).floor
    if full is not None:
        assert part is not None and part <= full


@given(instances, st.data(), rationals01, rationals01)
def test_reconstruct_postconditions(inst, data, extra, eps):
    a = data.draw(st.integers(0, inst.ell - 1))
    fl = compute_floor(inst, a, eps).floor
    assume(fl is not None)
    q = fl + extra
    p = reconstruct_payment(inst, a, q, eps)
    assert all(x >= 0 for x in p)
    assert dot(inst.F[a], p) == q
    assert provider_slack(inst, a, p) <= eps


@given(instances, st.data(), rationals01, rationals01, st.fractions(min_value=0, max_value=1, max_denominator=20))
def test_q_shift_property(inst, data, extra, eps, frac_shift):
    a = data.draw(st.integers(0, inst.ell - 1))
    fl = compute_floor(inst, a, eps).floor
    assume(fl is not None)
    q = fl + extra
    assert check_q_shift(inst, a, q, eps, q * frac_shift)


@given(instances, st.data(), rationals01)
def test_payment_norm_on_smooth_instances(inst, data, t):
    c = inst.smoothness
    assume(c > 0)
    a = data.draw(st.integers(0, inst.ell - 1))
    fl = compute_floor(inst, a, 0).floor
    assume(fl is not None and fl <= 1)
    q = fl + t * (1 - fl)
    p = reconstruct_payment(inst, a, q)
    assert max(p) <= (1 + q) / c


@pytest.mark.parametrize("family", [toy_family(), quadratic_family()], ids=["toy", "quadratic"])
@pytest.mark.parametrize("delta", [F(1, 4), F(1, 8)])
def test_grid_floor_inclusions(family, delta):
    # the continuum is stood in for by a grid four times finer
    R, dist = [[1, 0]], [1]
    coarse = discretize(family, delta, R, dist)
    fine = discretize(family, delta / 4, R, dist).instance
    level = delta * (1 + 2 / family.smoothness)
    fine_grid = grid_points(delta / 4)
    for j, a in enumerate(fine_grid):
        fa = compute_floor(fine, j, 0).floor
        for g, b in enumerate(coarse.grid):
            if abs(a - b) > delta:
                continue
            relaxed = coarse.floors[g]
            assert coarse.floor_eps == level
            if fa is not None and fa <= 1:
                assert relaxed is not None and relaxed <= max(fa, 0)
            jb = fine_grid.index(b)
            wide = compute_floor(fine, jb, 2 * level).floor
            if relaxed is not None and relaxed <= 1:
                assert wide is not None and wide <= relaxed
