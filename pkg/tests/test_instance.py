import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from delegation.generators import gen_random, gen_single_bad
from delegation.instance import (
    DeterministicMenu,
    FormatError,
    PaymentScheme,
    instance_to_dict,
    load_instance,
    load_menu,
    make_instance,
    save_instance,
    save_menu,
    validate_instance,
)


def test_diag2_is_valid(diag2):
    assert validate_instance(diag2).ok
    assert diag2.values == ((1, 0), (0, 1))


def test_column_sum_reported():
    inst = make_instance([1], [["9/10", 0]], [[0, 0]], [0])
    issues = validate_instance(inst).issues
    assert any("column-stochastic" in s for s in issues)


def test_reward_range_reported():
    inst = make_instance([1], [[1, 0]], [["3/2", 0]], [0])
    assert any("reward" in s and "range" in s for s in validate_instance(inst).issues)


def test_negative_cost_and_unit_cost_flag():
    inst = make_instance([1], [[1]], [[0]], [-1])
    assert not validate_instance(inst).ok
    inst = make_instance([1], [[1]], [[0]], [2])
    assert validate_instance(inst).ok
    assert not validate_instance(inst, require_unit_costs=True).ok


def test_type_dist_must_sum_to_one():
    inst = make_instance(["1/3", "1/3"], [[1]], [[0], [0]], [0])
    assert any("type_dist" in s for s in validate_instance(inst).issues)


def test_roundtrip_diag2(diag2):
    assert load_instance(save_instance(diag2)) == diag2


def test_bad_rational_is_parse_error(diag2):
    doc = instance_to_dict(diag2)
    doc["type_dist"][0] = "1/0"
    with pytest.raises(FormatError) as exc:
        load_instance(json.dumps(doc))
    assert "type_dist[0]" in str(exc.value)


def test_missing_field_named(diag2):
    doc = instance_to_dict(diag2)
    del doc["costs"]
    with pytest.raises(FormatError) as exc:
        load_instance(json.dumps(doc))
    assert exc.value.location == "costs"


def test_version_mismatch(diag2):
    doc = instance_to_dict(diag2)
    doc["version"] = 2
    with pytest.raises(FormatError):
        load_instance(json.dumps(doc))


def test_json_syntax_error_has_line():
    with pytest.raises(FormatError) as exc:
        load_instance(b'{\n "version": 1,\n oops}')
    assert "line 3" in str(exc.value)


def test_float_rejected_in_json(diag2):
    doc = instance_to_dict(diag2)
    doc["costs"][0] = 0.5
    with pytest.raises(FormatError):
        load_instance(json.dumps(doc))


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 10**6))
def test_roundtrip_random(n, m, ell, seed):
    inst = gen_random(n, m, ell, seed)
    assert validate_instance(inst).ok
    assert load_instance(save_instance(inst)) == inst


def test_menu_roundtrip(diag2):
    menu = DeterministicMenu([PaymentScheme(0, [1, 0]), PaymentScheme(None, [0, 0])], direct=True)
    assert load_menu(diag2, save_menu(diag2, menu)) == menu


def test_negative_payment_rejected():
    with pytest.raises(ValueError):
        PaymentScheme(0, [-1])


def test_restrict_types(diag2):
    sub = diag2.restrict_types([0])
    assert sub.n == 1 and sub.type_dist == (1,)
    assert validate_instance(sub).ok


def test_smoothness():
    assert gen_single_bad(3).smoothness == 1
    inst = make_instance([1], [["1/2", "1/2"], [1, 0]], [[0, 0]], [0, 0])
    assert inst.smoothness == Fraction(1, 2)
