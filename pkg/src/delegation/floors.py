"""Price floors: the smallest expected payment that makes an action a best response.

For action ``a`` and slack ``eps`` the feasible expected payments form an interval
``[floor, inf)``; the floor is the optimum of a small LP over payment vectors.
When no payment vector makes ``a`` an (eps-)best response the floor is ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact import ZERO, as_fraction, dot
from .instance import DelegationInstance
from .solvers import GE, EQ, LE, LinearProgram, solve_lp


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class PriceFloor:
    action: int
    epsilon: Fraction
    action_set: tuple[int, ...]
    floor: Optional[Fraction]  # None: the action cannot be induced

    @property
    def inducible(self) -> bool:
        return self.floor is not None

    def admits(self, q: Fraction) -> bool:
        return self.floor is not None and q >= self.floor


def _norm_set(inst: DelegationInstance, action_set) -> tuple[int, ...]:
    if action_set is None:
        return tuple(range(inst.ell))
    return tuple(sorted(set(action_set)))


def _ic_rows(inst: DelegationInstance, a: int, eps: Fraction, action_set, extra: int = 0):
    """Rows ``(F_a - F_b) . p >= c_a - c_b - eps`` over ``b`` in the action set."""
    for b in action_set:
        if b == a:
            continue
        row = [x - y for x, y in zip(inst.F[a], inst.F[b])] + [ZERO] * extra
        yield row, inst.costs[a] - inst.costs[b] - eps


def compute_floor(inst: DelegationInstance, a: int, eps=0, action_set: Sequence[int] | None = None) -> PriceFloor:
    eps = as_fraction(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    aset = _norm_set(inst, action_set)
    if a not in aset:
        raise ValueError(f"action {a} is not in the action set")
    key = (a, eps, aset)
    cache = inst._floor_cache
    with inst._floor_lock:
        hit = cache.get(key)
    if hit is not None:
        return hit
    if len(aset) == 1:
        result = PriceFloor(a, eps, aset, ZERO)
    else:
        lp = LinearProgram(objective=[-x for x in inst.F[a]])
        for row, b in _ic_rows(inst, a, eps, aset):
            lp.add(row, GE, b)
        out = solve_lp(lp)
        if not out.optimal:
            result = PriceFloor(a, eps, aset, None)
        else:
            result = PriceFloor(a, eps, aset, -out.value)
    with inst._floor_lock:
        cache[key] = result
    return result


def floor_value(inst, a, eps=0, action_set=None) -> Optional[Fraction]:
    return compute_floor(inst, a, eps, action_set).floor


def reconstruct_payment(inst: DelegationInstance, a: int, q, eps=0, action_set=None) -> tuple[Fraction, ...]:
    """A payment vector with expected payment exactly ``q`` that eps-induces ``a``.

    Among all such vectors the largest entry is minimized, then the total.
    """
    q, eps = as_fraction(q), as_fraction(eps)
    aset = _norm_set(inst, action_set)
    m = inst.m
    # variables: p_0..p_{m-1}, t
    lp = LinearProgram(objective=[ZERO] * m + [Fraction(-1)])
    for w in range(m):
        row = {w: 1, m: -1}
        lp.add(row, LE, 0)
    lp.add(list(inst.F[a]) + [ZERO], EQ, q)
    for row, b in _ic_rows(inst, a, eps, aset, extra=1):
        lp.add(row, GE, b)
    first = solve_lp(lp)
    if not first.optimal:
        raise InfeasibleError(f"expected payment {q} cannot induce action {inst.actions[a]} at slack {eps}")
    t = -first.value
    lp.objective = [Fraction(-1)] * m + [ZERO]
    lp.add({m: 1}, EQ, t)
    second = solve_lp(lp)
    p = tuple(second.x[:m])
    assert dot(inst.F[a], p) == q
    return p


def provider_slack(inst: DelegationInstance, a: int, p: Sequence[Fraction], action_set=None) -> Fraction:
    """How much better off the provider is deviating from ``a`` under payments ``p``."""
    aset = _norm_set(inst, action_set)
    own = dot(inst.F[a], p) - inst.costs[a]
    best = max(dot(inst.F[b], p) - inst.costs[b] for b in aset)
    return max(ZERO, best - own)


def check_q_shift(inst: DelegationInstance, a: int, q, eps, eps_shift, action_set=None) -> bool:
    """Whether lowering an admissible price by ``eps_shift`` stays admissible at slack ``eps + eps_shift``."""
    q, eps, eps_shift = as_fraction(q), as_fraction(eps), as_fraction(eps_shift)
    fl = compute_floor(inst, a, eps, action_set).floor
    if fl is None or q < fl:
        raise ValueError(f"price {q} is below the floor at slack {eps}")
    if not ZERO <= eps_shift <= q:
        raise ValueError("shift must lie in [0, q]")
    shifted = compute_floor(inst, a, eps + eps_shift, action_set).floor
    return shifted is not None and q - eps_shift >= shifted


def min_relaxation(inst: DelegationInstance, a: int, q, action_set=None) -> Optional[Fraction]:
    """Smallest eps >= 0 at which expected payment ``q`` eps-induces ``a`` (None if q < 0)."""
    q = as_fraction(q)
    aset = _norm_set(inst, action_set)
    m = inst.m
    if q < 0:
        return None
    # variables: p, eps
    lp = LinearProgram(objective=[ZERO] * m + [Fraction(-1)])
    lp.add(list(inst.F[a]) + [ZERO], EQ, q)
    for b in aset:
        if b == a:
            continue
        row = [x - y for x, y in zip(inst.F[a], inst.F[b])] + [Fraction(1)]
        lp.add(row, GE, inst.costs[a] - inst.costs[b])
    out = solve_lp(lp)
    if not out.optimal:
        return None
    return -out.value
