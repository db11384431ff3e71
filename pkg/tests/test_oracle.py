from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from delegation.floors import compute_floor
from delegation.generators import gen_random, gen_single_bad, suite_sizes
from delegation.instance import DeterministicMenu, PaymentScheme, make_instance
from delegation.oracle import SizeGuardError, brute_force_opt_k, verify_menu
from delegation.pricing import evaluate

F = Fraction

# (seed, OPT_1, OPT_2, OPT_3) on gen_random(*suite_sizes(seed), seed), computed by the oracle and frozen
FROZEN = [
    (4, F(38, 315), F(38, 315), F(38, 315)),
    (13, F(23, 120), F(23, 120), F(23, 120)),
    (17, F(25, 462), F(25, 462), F(25, 462)),
    (26, F(671, 1350), F(5983, 11475), F(5983, 11475)),
    (40, F(32, 85), F(32, 85), F(32, 85)),
    (53, F(9, 35), F(9, 35), F(9, 35)),
    (80, F(9, 32), F(9, 32), F(9, 32)),
    (161, F(117, 550), F(603, 2200), F(603, 2200)),
]


@pytest.mark.parametrize("seed,v1,v2,v3", FROZEN)
def test_frozen_values(seed, v1, v2, v3):
    inst = gen_random(*suite_sizes(seed), seed=seed)
    assert [brute_force_opt_k(inst, k).value for k in (1, 2)] == [v1, v2]
    if seed in (26, 161):
        assert brute_force_opt_k(inst, 3).value == v3


def test_single_bad():
    inst = gen_single_bad(3)
    assert brute_force_opt_k(inst, 2).value == F(2, 3)
    assert brute_force_opt_k(inst, 3).value == 1


def test_size_guard():
    inst = gen_single_bad(5)
    with pytest.raises(SizeGuardError):
        brute_force_opt_k(inst, 5, limit=1000)
    with pytest.raises(ValueError):
        brute_force_opt_k(inst, 0)


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_witness_is_consistent(seed):
    inst = gen_random(2, 2, 2, seed)
    res = brute_force_opt_k(inst, 2)
    sol = res.solution()
    for (a, q) in sol.items:
        assert q >= compute_floor(inst, a).floor and q >= inst.costs[a]
    # the witness prices, under the selection rule, earn at least the witness assignment
    assert evaluate(inst, sol) >= res.value
    for t, i in enumerate(res.assignment):
        u = [inst.values[t][a] - q for a, q in sol.items]
        if i is None:
            assert all(x <= 0 for x in u)
        else:
            assert u[i] == max(u) >= 0


def test_verify_menu_valid(diag2):
    menu = DeterministicMenu([PaymentScheme(0, [1, 0]), PaymentScheme(1, [0, 1])], direct=True)
    rep = verify_menu(diag2, menu)
    assert rep.ok and rep.value == 1 and rep.selection == [0, 1]


def test_verify_menu_below_floor():
    inst = make_instance([1], [[1, 0], [0, 1]], [[1, 0]], [F(1, 2), 0])
    menu = DeterministicMenu([PaymentScheme(0, [F(2, 5), 0])], direct=True)
    rep = verify_menu(inst, menu)
    assert not rep.ok
    assert rep.provider_ic == [(0, 1, F(1, 10))]
    assert any("provider IC" in s for s in rep.failures())


def test_verify_menu_user_violations(diag2):
    # type 0 is charged more than its value
    menu = DeterministicMenu([PaymentScheme(0, [2, 0]), PaymentScheme(1, [0, 1])], direct=True)
    rep = verify_menu(diag2, menu)
    assert rep.user_ir == [(0, F(-1))]
    assert not rep.ok
