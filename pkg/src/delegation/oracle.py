"""Brute-force optimum over explicit type-to-item assignments, and a menu checker.

This deliberately shares no enumeration logic with ``pricing.solve_menu_k``:
it loops over every action tuple and every assignment of types to items (or to
opting out) and solves one LP per pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

from .exact import ZERO, dot
from .floors import compute_floor
from .instance import DelegationInstance, DeterministicMenu
from .pricing import PricingSolution, menu_value, select
from .solvers import GE, LE, LinearProgram, solve_lp

DEFAULT_LIMIT = 10**6


class SizeGuardError(RuntimeError):
    pass


@dataclass
class OracleResult:
    value: Fraction
    actions: tuple[int, ...]
    assignment: tuple[Optional[int], ...]
    prices: tuple[Fraction, ...]
    pairs: int

    def solution(self) -> PricingSolution:
        return PricingSolution(tuple(zip(self.actions, self.prices)))


def _assignment_lp(inst, tup, f, floors) -> LinearProgram:
    k = len(tup)
    vals = inst.values
    obj = [ZERO] * k
    lp = LinearProgram(objective=obj, lower=list(floors))
    for i, a in enumerate(tup):
        row = [0] * k
        row[i] = 1
        lp.add(row, GE, inst.costs[a])
    for t, i in enumerate(f):
        if i is None:
            for j, b in enumerate(tup):
                row = [0] * k
                row[j] = 1
                lp.add(row, GE, vals[t][b])
            continue
        obj[i] += inst.type_dist[t]
        row = [0] * k
        row[i] = 1
        lp.add(row, LE, vals[t][tup[i]])
        for j, b in enumerate(tup):
            if j == i:
                continue
            row = [0] * k
            row[i], row[j] = 1, -1
            lp.add(row, LE, vals[t][tup[i]] - vals[t][b])
    return lp


def brute_force_opt_k(inst: DelegationInstance, k: int, *, limit: int = DEFAULT_LIMIT) -> OracleResult:
    if k < 1:
        raise ValueError("k must be at least 1")
    size = inst.ell**k * (k + 1) ** inst.n
    if size > limit:
        raise SizeGuardError(f"{size} assignment LPs exceed the limit of {limit}")
    floors = [compute_floor(inst, a).floor for a in range(inst.ell)]
    choices = [None] + list(range(k))
    best: Optional[tuple] = None
    pairs = 0
    for tup in product(range(inst.ell), repeat=k):
        if any(floors[a] is None for a in tup):
            continue
        tfl = [floors[a] for a in tup]
        for f in product(choices, repeat=inst.n):
            pairs += 1
            lp = _assignment_lp(inst, tup, f, tfl)
            out = solve_lp(lp)
            if not out.optimal:
                continue
            const = sum((inst.type_dist[t] * inst.costs[tup[i]] for t, i in enumerate(f) if i is not None), ZERO)
            v = out.value - const
            if best is None or v > best[0]:
                best = (v, tup, f, tuple(out.x))
    if best is None:
        raise RuntimeError("no feasible assignment; every instance admits opting out")
    v, tup, f, q = best
    return OracleResult(v, tup, f, q, pairs)


@dataclass
class MenuReport:
    value: Fraction
    provider_ic: list[tuple[int, int, Fraction]] = field(default_factory=list)  # (scheme, action, gain)
    provider_ir: list[tuple[int, Fraction]] = field(default_factory=list)  # (scheme, margin)
    user_ic: list[tuple[int, int, Fraction]] = field(default_factory=list)  # (type, scheme, gain)
    user_ir: list[tuple[int, Fraction]] = field(default_factory=list)  # (type, utility)
    selection: list[Optional[int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.provider_ic or self.provider_ir or self.user_ic or self.user_ir)

    def failures(self) -> list[str]:
        out = [f"scheme {i}: action {b} gains {g} (provider IC)" for i, b, g in self.provider_ic]
        out += [f"scheme {i}: margin {g} < 0 (provider IR)" for i, g in self.provider_ir]
        out += [f"type {t}: scheme {j} gains {g} (user IC)" for t, j, g in self.user_ic]
        out += [f"type {t}: utility {u} < 0 (user IR)" for t, u in self.user_ir]
        return out


def verify_menu(inst: DelegationInstance, menu: DeterministicMenu) -> MenuReport:
    """Exact check of every constraint a valid menu must satisfy."""
    items = []
    rep = MenuReport(value=ZERO)
    for i, s in enumerate(menu.schemes):
        if s.action is None:
            items.append((None, ZERO))
            continue
        p = s.payments
        own = dot(inst.F[s.action], p) - inst.costs[s.action]
        worst = max(range(inst.ell), key=lambda b: (dot(inst.F[b], p) - inst.costs[b], -b))
        gain = dot(inst.F[worst], p) - inst.costs[worst] - own
        if gain > 0:
            rep.provider_ic.append((i, worst, gain))
        items.append((s.action, dot(inst.F[s.action], p)))
    sol = PricingSolution(tuple(items))
    vals = inst.values
    if menu.direct:
        if len(menu) != inst.n:
            raise ValueError("a direct menu needs one scheme per type")
        rep.selection = list(range(inst.n))
        for t, (a, q) in enumerate(items):
            mine = vals[t][a] - q if a is not None else ZERO
            if mine < 0:
                rep.user_ir.append((t, mine))
            for j, (b, r) in enumerate(items):
                if b is not None and vals[t][b] - r > mine:
                    rep.user_ic.append((t, j, vals[t][b] - r - mine))
    else:
        rep.selection = [select(inst, sol, t).index for t in range(inst.n)]
    for t, i in enumerate(rep.selection):
        a, q = items[i] if i is not None else (None, ZERO)
        if a is not None and q - inst.costs[a] < 0 and (i, q - inst.costs[a]) not in rep.provider_ir:
            rep.provider_ir.append((i, q - inst.costs[a]))
    rep.value = menu_value(inst, menu)
    return rep
