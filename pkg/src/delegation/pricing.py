"""Menus in pricing form: items are (action, expected payment) pairs.

A buyer type picks the item maximizing value minus price, breaking ties toward
the larger seller margin and then the lower index, and opts out only when every
item leaves it strictly worse off. ``solve_menu_k`` finds an optimal k-item
menu by enumerating vertices of the arrangement of hyperplanes on which some
user or provider constraint is tight.
"""

from __future__ import annotations

import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Optional, Sequence

from .exact import ZERO, as_fraction, dot, format_rational
from .floors import compute_floor, reconstruct_payment
from .instance import DelegationInstance, DeterministicMenu, FormatError, PaymentScheme, FORMAT_VERSION
from .solvers import intersect_hyperplanes

Matrix = tuple[tuple[Fraction, ...], ...]


class NotIncentiveCompatible(ValueError):
    def __init__(self, scheme: int, deviation: int, gain: Fraction):
        self.scheme, self.deviation, self.gain = scheme, deviation, gain
        super().__init__(f"scheme {scheme} is not provider-IC: action {deviation} gains {gain}")


@dataclass(frozen=True)
class PricingSolution:
    items: tuple[tuple[Optional[int], Fraction], ...]
    eps: Fraction = ZERO
    own_values: Optional[Matrix] = None  # [type][action]
    other_values: Optional[Matrix] = None
    action_set: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        items = tuple((a, as_fraction(q)) for a, q in self.items)
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "eps", as_fraction(self.eps))

    @property
    def k(self) -> int:
        return len(self.items)

    def own(self, inst: DelegationInstance) -> Matrix:
        return self.own_values if self.own_values is not None else inst.values

    def other(self, inst: DelegationInstance) -> Matrix:
        if self.other_values is not None:
            return self.other_values
        return self.own(inst)

    def replace_items(self, items) -> "PricingSolution":
        return PricingSolution(tuple(items), self.eps, self.own_values, self.other_values, self.action_set)


@dataclass(frozen=True)
class Selection:
    index: Optional[int]  # None is opt-out
    utility: Fraction
    margin: Fraction


def select(inst: DelegationInstance, sol: PricingSolution, t: int) -> Selection:
    own = sol.own(inst)[t]
    best = None
    for i, (a, q) in enumerate(sol.items):
        if a is None:
            continue
        u = own[a] - q
        if u < 0:
            continue
        key = (u, q - inst.costs[a])
        if best is None or key > best[0]:
            best = (key, i)
    if best is None:
        return Selection(None, ZERO, ZERO)
    (u, margin), i = best
    return Selection(i, u, margin)


def selections(inst, sol) -> list[Selection]:
    return [select(inst, sol, t) for t in range(inst.n)]


def evaluate(inst: DelegationInstance, sol: PricingSolution) -> Fraction:
    return sum((inst.type_dist[t] * s.margin for t, s in enumerate(selections(inst, sol))), ZERO)


def direct_choice(inst: DelegationInstance, sol: PricingSolution, t: int) -> Optional[Selection]:
    """Best-margin option that type ``t`` may be assigned when its own value and the
    value it attaches to other items differ (upper/lower reward bounds).

    Item i is admissible when its own surplus is nonnegative and at least the
    other-value surplus of every other item; opting out is admissible when no
    other-value surplus is positive. Returns None when nothing is admissible.
    """
    own, other = sol.own(inst)[t], sol.other(inst)[t]
    live = [(i, a, q) for i, (a, q) in enumerate(sol.items) if a is not None]
    best = None
    for i, a, q in live:
        u = own[a] - q
        if u < 0:
            continue
        if any(other[b] - r > u for j, b, r in live if j != i):
            continue
        margin = q - inst.costs[a]
        if best is None or margin > best.margin:
            best = Selection(i, u, margin)
    if all(other[b] - r <= 0 for _, b, r in live):
        if best is None or best.margin < 0:
            best = Selection(None, ZERO, ZERO)
    return best


def relaxed_value(inst: DelegationInstance, sol: PricingSolution) -> Optional[Fraction]:
    total = ZERO
    for t in range(inst.n):
        s = direct_choice(inst, sol, t)
        if s is None:
            return None
        total += inst.type_dist[t] * s.margin
    return total


# vertex enumeration


@dataclass(frozen=True)
class Hyperplane:
    """``q_i - q_j = rhs`` when ``j`` is set, else ``q_i = rhs``."""

    i: int
    j: Optional[int]
    rhs: Fraction
    origin: str

    def coefficients(self, k: int) -> list[int]:
        row = [0] * k
        row[self.i] = 1
        if self.j is not None:
            row[self.j] = -1
        return row


def hyperplanes(inst, tup: Sequence[int], floors: Sequence[Fraction], own: Matrix, other: Matrix) -> list[Hyperplane]:
    k = len(tup)
    out: list[Hyperplane] = []
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            for t in range(inst.n):
                out.append(Hyperplane(i, j, own[t][tup[i]] - other[t][tup[j]], "user-ic"))
    for i in range(k):
        a = tup[i]
        out.append(Hyperplane(i, None, floors[i], "floor"))
        out.append(Hyperplane(i, None, inst.costs[a], "provider-ir"))
        for t in range(inst.n):
            out.append(Hyperplane(i, None, own[t][a], "user-ir"))
            out.append(Hyperplane(i, None, other[t][a], "opt-out"))
    return out


def literal_vertices(inst, tup, floors, own, other) -> set[tuple[Fraction, ...]]:
    """All k-wise intersections of the hyperplane set that respect q >= floor.

    Exponential in the plane count; kept as a reference for the fast enumeration.
    """
    k = len(tup)
    planes = hyperplanes(inst, tup, floors, own, other)
    uniq = sorted({(tuple(h.coefficients(k)), h.rhs) for h in planes})
    found = set()
    for combo in combinations(uniq, k):
        q = intersect_hyperplanes(combo)
        if q is None:
            continue
        if all(x >= 0 for x in q) and all(q[i] >= floors[i] for i in range(k)):
            found.add(tuple(q))
    return found


def _box(inst, tup, floors, own, other) -> tuple[list[Fraction], list[Fraction]]:
    lo, hi = [], []
    for i, a in enumerate(tup):
        lo.append(max(floors[i], ZERO))
        vals = [floors[i], inst.costs[a]]
        vals += [own[t][a] for t in range(inst.n)] + [other[t][a] for t in range(inst.n)]
        hi.append(max(vals))
    return lo, hi


def vertices(inst, tup, floors, own, other) -> set[tuple[Fraction, ...]]:
    """Arrangement vertices inside the box ``[floor_i, cap_i]``.

    A nonsingular choice of k planes of the form ``q_i = v`` / ``q_i - q_j = d``
    is a spanning forest where each tree hangs off one absolute plane, so every
    vertex arises by fixing items one at a time, each either to an absolute
    value or to an already fixed item plus a difference.
    """
    k = len(tup)
    absolute: list[set[Fraction]] = [set() for _ in range(k)]
    diff: dict[tuple[int, int], set[Fraction]] = {(i, j): set() for i in range(k) for j in range(k) if i != j}
    for h in hyperplanes(inst, tup, floors, own, other):
        if h.j is None:
            absolute[h.i].add(h.rhs)
        else:
            diff[(h.i, h.j)].add(h.rhs)
            diff[(h.j, h.i)].add(-h.rhs)
    lo, hi = _box(inst, tup, floors, own, other)
    found: set[tuple[Fraction, ...]] = set()
    seen: set[tuple] = set()
    stack = [tuple([None] * k)]
    while stack:
        cur = stack.pop()
        free = [i for i in range(k) if cur[i] is None]
        if not free:
            found.add(cur)
            continue
        for i in free:
            vals = set(absolute[i])
            for j in range(k):
                if cur[j] is not None:
                    vals.update(cur[j] + d for d in diff[(i, j)])
            for v in vals:
                if lo[i] <= v <= hi[i]:
                    nxt = cur[:i] + (v,) + cur[i + 1 :]
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
    return found


@dataclass
class TupleStats:
    actions: tuple[int, ...]
    bound: Fraction
    pruned: bool = False
    candidates: int = 0
    best: Optional[Fraction] = None


@dataclass
class SolveReport:
    solution: PricingSolution
    value: Fraction
    candidates: int
    tuple_stats: list[TupleStats] = field(default_factory=list)


def _value_fn(inst, own, other, costs_of, relaxed: bool):
    n, xi = inst.n, inst.type_dist

    def standard(tup, q):
        total = ZERO
        for t in range(n):
            row = own[t]
            best = None
            for i, a in enumerate(tup):
                u = row[a] - q[i]
                if u < 0:
                    continue
                key = (u, q[i] - costs_of[a])
                if best is None or key > best:
                    best = key
            if best is not None:
                total += xi[t] * best[1]
        return total

    def relaxed_fn(tup, q):
        sol = PricingSolution(tuple(zip(tup, q)), own_values=own, other_values=other)
        return relaxed_value(inst, sol)

    return relaxed_fn if relaxed else standard


def solve_menu_k(
    inst: DelegationInstance,
    k: int,
    *,
    eps=0,
    action_set: Sequence[int] | None = None,
    own_values: Matrix | None = None,
    other_values: Matrix | None = None,
    relaxed: bool | None = None,
    threads: int = 1,
) -> SolveReport:
    """Optimal k-item pricing with price floors at slack ``eps`` over ``action_set``.

    With ``relaxed`` each type takes its best-margin admissible option (see
    ``direct_choice``); it defaults to on whenever the two value matrices differ.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    eps = as_fraction(eps)
    aset = tuple(sorted(set(action_set))) if action_set is not None else tuple(range(inst.ell))
    own = own_values if own_values is not None else inst.values
    other = other_values if other_values is not None else own
    if relaxed is None:
        relaxed = other is not own and tuple(map(tuple, other)) != tuple(map(tuple, own))
    floor_of = {a: compute_floor(inst, a, eps, aset).floor for a in aset}
    usable = [a for a in aset if floor_of[a] is not None]
    value_of = _value_fn(inst, own, other, inst.costs, relaxed)

    tuples = list(combinations_with_replacement(usable, k))
    stats = []
    for tup in tuples:
        bound = ZERO
        for t in range(inst.n):
            gain = max(own[t][a] - inst.costs[a] for a in tup)
            if gain > 0:
                bound += inst.type_dist[t] * gain
        stats.append(TupleStats(tup, bound))
    order = sorted(range(len(tuples)), key=lambda x: (-stats[x].bound, x))

    lock = threading.Lock()
    best_val = [ZERO]
    results: dict[int, tuple] = {}

    def opt_out_prices(tup):
        out = []
        for a in tup:
            top = max([own[t][a] for t in range(inst.n)] + [other[t][a] for t in range(inst.n)] + [ZERO])
            out.append(max(floor_of[a], top + 1))
        return tuple(out)

    def work(idx: int):
        st = stats[idx]
        tup = tuples[idx]
        with lock:
            if st.bound < best_val[0]:
                st.pruned = True
                return
        floors = [floor_of[a] for a in tup]
        local = None
        count = 0
        for q in vertices(inst, tup, floors, own, other):
            count += 1
            v = value_of(tup, q)
            if v is None:
                continue
            if local is None or v > local[0] or (v == local[0] and q < local[1]):
                local = (v, q)
        st.candidates = count
        # the all-opt-out candidate ranks first among value-0 points of this tuple
        if local is None or local[0] < 0 or (local[0] == 0):
            local = (ZERO, ())
        st.best = local[0]
        results[idx] = local
        with lock:
            if local[0] > best_val[0]:
                best_val[0] = local[0]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, order))
    else:
        for idx in order:
            work(idx)

    best_key = None
    for idx, (v, q) in results.items():
        key = (-v, idx, q)
        if best_key is None or key < best_key:
            best_key = key
    v, idx, q = -best_key[0], best_key[1], best_key[2]
    tup = tuples[idx]
    if q == ():
        q = opt_out_prices(tup)
    sol = PricingSolution(tuple(zip(tup, q)), eps, own_values, other_values, aset if action_set is not None else None)
    return SolveReport(sol, v, sum(s.candidates for s in stats), stats)


# conversion between pricing form and payment menus


def pricing_to_menu(inst: DelegationInstance, sol: PricingSolution) -> DeterministicMenu:
    schemes = []
    for a, q in sol.items:
        if a is None:
            schemes.append(PaymentScheme(None, (ZERO,) * inst.m))
        else:
            schemes.append(PaymentScheme(a, reconstruct_payment(inst, a, q, sol.eps, sol.action_set)))
    return DeterministicMenu(schemes, direct=False)


def to_direct_menu(inst: DelegationInstance, sol: PricingSolution) -> DeterministicMenu:
    """One scheme per type: the item it selects, or opt-out."""
    menu = pricing_to_menu(inst, sol)
    schemes = []
    for t in range(inst.n):
        s = select(inst, sol, t)
        schemes.append(menu.schemes[s.index] if s.index is not None else PaymentScheme(None, (ZERO,) * inst.m))
    return DeterministicMenu(schemes, direct=True)


def menu_to_pricing(inst: DelegationInstance, menu: DeterministicMenu, eps=0) -> PricingSolution:
    eps = as_fraction(eps)
    items = []
    for i, s in enumerate(menu.schemes):
        if s.action is None:
            items.append((None, ZERO))
            continue
        p = s.payments
        own = dot(inst.F[s.action], p) - inst.costs[s.action]
        for b in range(inst.ell):
            gain = dot(inst.F[b], p) - inst.costs[b] - own
            if gain > eps:
                raise NotIncentiveCompatible(i, b, gain)
        items.append((s.action, dot(inst.F[s.action], p)))
    return PricingSolution(tuple(items), eps)


def menu_value(inst: DelegationInstance, menu: DeterministicMenu) -> Fraction:
    """Provider utility: assigned schemes for direct menus, buyer choice otherwise."""
    if menu.direct:
        total = ZERO
        for t, s in enumerate(menu.schemes):
            if s.action is not None:
                total += inst.type_dist[t] * (dot(inst.F[s.action], s.payments) - inst.costs[s.action])
        return total
    items = tuple((s.action, dot(inst.F[s.action], s.payments) if s.action is not None else ZERO) for s in menu.schemes)
    return evaluate(inst, PricingSolution(items))


def compress_menu(inst: DelegationInstance, direct_menu: DeterministicMenu) -> DeterministicMenu:
    """Collapse a direct menu to one scheme per used action, the cheapest in expectation."""
    if not direct_menu.direct or len(direct_menu) != inst.n:
        raise ValueError("compress_menu needs a direct menu with one scheme per type")
    sol = menu_to_pricing(inst, direct_menu)
    vals = inst.values
    for t, (a, q) in enumerate(sol.items):
        mine = vals[t][a] - q if a is not None else ZERO
        if mine < 0:
            raise ValueError(f"type {inst.types[t]} violates user IR")
        for b, r in sol.items:
            if b is not None and vals[t][b] - r > mine:
                raise ValueError(f"type {inst.types[t]} prefers another type's scheme (user IC)")
    chosen: dict[int, tuple[Fraction, int]] = {}
    for t, (a, q) in enumerate(sol.items):
        if a is not None and (a not in chosen or q < chosen[a][0]):
            chosen[a] = (q, t)
    if not chosen:
        return DeterministicMenu([PaymentScheme(None, (ZERO,) * inst.m)])
    return DeterministicMenu([direct_menu.schemes[chosen[a][1]] for a in sorted(chosen)])


# JSON


def solution_to_dict(inst: DelegationInstance, sol: PricingSolution, value: Fraction | None = None) -> dict:
    sel = selections(inst, sol)
    doc = {
        "version": FORMAT_VERSION,
        "kind": "pricing",
        "eps": format_rational(sol.eps),
        "items": [
            {"action": None if a is None else inst.actions[a], "q": format_rational(q)} for a, q in sol.items
        ],
        "selection": [None if s.index is None else s.index for s in sel],
        "value": format_rational(evaluate(inst, sol) if value is None else value),
    }
    return doc


def solution_from_dict(inst: DelegationInstance, doc: dict) -> PricingSolution:
    if doc.get("kind") != "pricing":
        raise FormatError(f"expected kind 'pricing', got {doc.get('kind')!r}", "kind")
    index = {name: a for a, name in enumerate(inst.actions)}
    items = []
    for i, it in enumerate(doc.get("items", [])):
        name = it.get("action")
        if name is not None and name not in index:
            raise FormatError(f"unknown action {name!r}", f"items[{i}].action")
        try:
            items.append((None if name is None else index[name], as_fraction(it["q"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(str(exc), f"items[{i}].q") from None
    return PricingSolution(tuple(items), as_fraction(doc.get("eps", "0")))


def dumps(doc: dict) -> bytes:
    return json.dumps(doc, indent=1).encode("utf-8")
