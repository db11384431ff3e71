"""Optimal menus of randomized payment schemes.

Each type draws an action (or opting out) from its own distribution and pays
an action-contingent vector. Substituting ``x = phi * p`` turns the bilinear
program into an LP; an LP optimum is then made regular (no payment mass on
actions drawn with probability zero) so that ``p = x / phi`` recovers a menu of
the same value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import ZERO, ONE, as_fraction, dot, format_rational
from .instance import DelegationInstance, FORMAT_VERSION, FormatError
from .solvers import EQ, GE, LinearProgram, solve_lp

Phi = tuple[tuple[Fraction, ...], ...]  # [type][action], last entry is opt-out
X = tuple[tuple[tuple[Fraction, ...], ...], ...]  # [type][action][outcome]


@dataclass(frozen=True)
class RelaxedSolution:
    phi: Phi
    x: X
    value: Fraction

    def irregular(self) -> list[tuple[int, int, int]]:
        return [
            (t, a, w)
            for t, row in enumerate(self.x)
            for a, xs in enumerate(row)
            for w, v in enumerate(xs)
            if self.phi[t][a] == 0 and v != 0
        ]

    @property
    def regular(self) -> bool:
        return not self.irregular()


@dataclass(frozen=True)
class RandomizedMenu:
    phi: Phi
    payments: X  # p[type][action][outcome]

    def __post_init__(self):
        for t, dist in enumerate(self.phi):
            if any(v < 0 for v in dist) or sum(dist, ZERO) != ONE:
                raise ValueError(f"phi for type {t} is not a distribution")
        if any(v < 0 for row in self.payments for ps in row for v in ps):
            raise ValueError("payments must be nonnegative")


def objective_value(inst: DelegationInstance, phi: Phi, x: X) -> Fraction:
    total = ZERO
    for t in range(inst.n):
        inner = ZERO
        for a in range(inst.ell):
            inner += dot(inst.F[a], x[t][a]) - phi[t][a] * inst.costs[a]
        total += inst.type_dist[t] * inner
    return total


def expected_payment(inst: DelegationInstance, x: X, t: int) -> Fraction:
    return sum((dot(inst.F[a], x[t][a]) for a in range(inst.ell)), ZERO)


def solve_randomized_lp(inst: DelegationInstance) -> RelaxedSolution:
    n, m, ell = inst.n, inst.m, inst.ell
    F, c, R = inst.F, inst.costs, inst.R
    # x entries on outcomes an action never reaches only tighten provider IC; fix them at 0
    idx: dict[tuple, int] = {}
    for t in range(n):
        for a in range(ell + 1):
            idx[("phi", t, a)] = len(idx)
        for a in range(ell):
            for w in range(m):
                if F[a][w] > 0:
                    idx[("x", t, a, w)] = len(idx)
    obj = [ZERO] * len(idx)
    for t in range(n):
        for a in range(ell):
            obj[idx[("phi", t, a)]] -= inst.type_dist[t] * c[a]
            for w in range(m):
                if F[a][w] > 0:
                    obj[idx[("x", t, a, w)]] += inst.type_dist[t] * F[a][w]
    lp = LinearProgram(objective=obj)

    for t in range(n):
        lp.add({idx[("phi", t, a)]: 1 for a in range(ell + 1)}, EQ, 1)

    # provider IC
    for t in range(n):
        for a in range(ell):
            for b in range(ell):
                if a == b:
                    continue
                row = {}
                for w in range(m):
                    if F[a][w] > 0 and F[a][w] != F[b][w]:
                        row[idx[("x", t, a, w)]] = F[a][w] - F[b][w]
                dc = c[a] - c[b]
                if dc:
                    row[idx[("phi", t, a)]] = -dc
                if all(v >= 0 for v in row.values()):
                    continue
                lp.add(row, GE, 0)

    def utility_row(t: int, s: int, sign: int, row: dict):
        # sign * (utility of type t taking type s's scheme)
        for a in range(ell):
            j = idx[("phi", s, a)]
            row[j] = row.get(j, ZERO) + sign * dot(F[a], R[t])
            for w in range(m):
                if F[a][w] > 0:
                    j = idx[("x", s, a, w)]
                    row[j] = row.get(j, ZERO) - sign * F[a][w]

    for t in range(n):
        row: dict = {}
        utility_row(t, t, 1, row)
        lp.add(row, GE, 0)
        for s in range(n):
            if s != t:
                row = {}
                utility_row(t, t, 1, row)
                utility_row(t, s, -1, row)
                lp.add({j: v for j, v in row.items() if v}, GE, 0)

    out = solve_lp(lp)
    if not out.optimal:
        raise RuntimeError(f"randomized LP returned {out.status}; opting out is always feasible")
    xv = out.x
    phi = tuple(tuple(xv[idx[("phi", t, a)]] for a in range(ell + 1)) for t in range(n))
    x = tuple(
        tuple(tuple(xv[idx[("x", t, a, w)]] if F[a][w] > 0 else ZERO for w in range(m)) for a in range(ell))
        for t in range(n)
    )
    return RelaxedSolution(phi, x, out.value)


def regularize(inst: DelegationInstance, sol: RelaxedSolution) -> RelaxedSolution:
    """Move payment mass off zero-probability actions onto a drawn action.

    For each type the F-weighted mass of the offending entries is added to
    every outcome of the lowest-index action drawn with positive probability,
    which keeps the type's expected payment and every constraint intact.
    """
    ell, m = inst.ell, inst.m
    new_x = []
    for t in range(inst.n):
        rows = [list(xs) for xs in sol.x[t]]
        bad = [a for a in range(ell) if sol.phi[t][a] == 0 and any(rows[a])]
        if not bad:
            new_x.append(sol.x[t])
            continue
        moved = sum((dot(inst.F[a], rows[a]) for a in bad), ZERO)
        hat = next((a for a in range(ell) if sol.phi[t][a] > 0), None)
        if hat is None:
            # the type opts out for sure; user IR forces the moved mass to be zero
            if moved != 0:
                raise ValueError(f"type {t} opts out but carries expected payment {moved}")
        else:
            rows[hat] = [v + moved for v in rows[hat]]
        for a in bad:
            rows[a] = [ZERO] * m
        new_x.append(tuple(tuple(r) for r in rows))
    x = tuple(new_x)
    return RelaxedSolution(sol.phi, x, objective_value(inst, sol.phi, x))


def recover_menu(inst: DelegationInstance, sol: RelaxedSolution) -> RandomizedMenu:
    if not sol.regular:
        raise ValueError("solution is irregular; call regularize first")
    pay = tuple(
        tuple(
            tuple(v / sol.phi[t][a] for v in sol.x[t][a]) if sol.phi[t][a] > 0 else (ZERO,) * inst.m
            for a in range(inst.ell)
        )
        for t in range(inst.n)
    )
    return RandomizedMenu(sol.phi, pay)


def solve_randomized(inst: DelegationInstance) -> tuple[RandomizedMenu, Fraction]:
    sol = solve_randomized_lp(inst)
    return recover_menu(inst, regularize(inst, sol)), sol.value


@dataclass
class RandomizedReport:
    value: Fraction
    provider_ic: Fraction = ZERO
    user_ic: Fraction = ZERO
    user_ir: Fraction = ZERO
    details: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.provider_ic == 0 and self.user_ic == 0 and self.user_ir == 0


def user_utility(inst: DelegationInstance, menu: RandomizedMenu, t: int, s: int) -> Fraction:
    """Utility of type ``t`` when it takes the scheme offered to type ``s``."""
    return sum(
        (menu.phi[s][a] * (inst.values[t][a] - dot(inst.F[a], menu.payments[s][a])) for a in range(inst.ell)),
        ZERO,
    )


def randomized_value(inst: DelegationInstance, menu: RandomizedMenu) -> Fraction:
    total = ZERO
    for t in range(inst.n):
        for a in range(inst.ell):
            total += inst.type_dist[t] * menu.phi[t][a] * (dot(inst.F[a], menu.payments[t][a]) - inst.costs[a])
    return total


def verify_randomized(inst: DelegationInstance, menu: RandomizedMenu) -> RandomizedReport:
    rep = RandomizedReport(value=randomized_value(inst, menu))
    for t in range(inst.n):
        for a in range(inst.ell):
            phi = menu.phi[t][a]
            if phi == 0:
                continue
            p = menu.payments[t][a]
            own = dot(inst.F[a], p) - inst.costs[a]
            for b in range(inst.ell):
                gap = phi * (dot(inst.F[b], p) - inst.costs[b] - own)
                if gap > rep.provider_ic:
                    rep.provider_ic = gap
                    rep.details.append(f"type {t}: action {a} loses {gap} to action {b}")
        mine = user_utility(inst, menu, t, t)
        if -mine > rep.user_ir:
            rep.user_ir = -mine
            rep.details.append(f"type {t}: utility {mine} < 0")
        for s in range(inst.n):
            gap = user_utility(inst, menu, t, s) - mine
            if gap > rep.user_ic:
                rep.user_ic = gap
                rep.details.append(f"type {t}: prefers scheme of type {s} by {gap}")
    return rep


def menu_to_dict(inst: DelegationInstance, menu: RandomizedMenu, value: Fraction | None = None) -> dict:
    fmt = format_rational
    doc = {
        "version": FORMAT_VERSION,
        "kind": "randomized",
        "phi": [[fmt(v) for v in row] for row in menu.phi],
        "payments": [[[fmt(v) for v in ps] for ps in row] for row in menu.payments],
    }
    doc["value"] = fmt(randomized_value(inst, menu) if value is None else value)
    return doc


def menu_from_dict(inst: DelegationInstance, doc: dict) -> RandomizedMenu:
    if doc.get("kind") != "randomized":
        raise FormatError(f"expected kind 'randomized', got {doc.get('kind')!r}", "kind")
    try:
        phi = tuple(tuple(as_fraction(v) for v in row) for row in doc["phi"])
        pay = tuple(tuple(tuple(as_fraction(v) for v in ps) for ps in row) for row in doc["payments"])
    except KeyError as exc:
        raise FormatError("missing required field", exc.args[0]) from None
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), "randomized menu") from None
    if len(phi) != inst.n or any(len(r) != inst.ell + 1 for r in phi):
        raise FormatError(f"phi must be {inst.n} rows of {inst.ell + 1} entries", "phi")
    if len(pay) != inst.n or any(len(r) != inst.ell or any(len(p) != inst.m for p in r) for r in pay):
        raise FormatError("payments have the wrong shape", "payments")
    try:
        return RandomizedMenu(phi, pay)
    except ValueError as exc:
        raise FormatError(str(exc), "randomized menu") from None
