"""Continuous action spaces A = [0, 1]: discretize, solve a relaxed grid program, robustify.

The grid program prices items with an optimistic value for the item a type
takes and a pessimistic value for the items it passes over, so any menu that is
feasible for the continuum maps onto the grid at a loss of at most delta. The
result is then robustified against the remaining 2 delta of user slack.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .exact import ZERO, ONE, as_fraction, dot
from .floors import compute_floor
from .instance import DelegationInstance, make_instance
from .pricing import PricingSolution, relaxed_value, solve_menu_k
from .robust import RobustnessParams, robustify, true_response_value

Evaluator = Callable[[Fraction], tuple[Sequence, object]]


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class ContinuousFamily:
    """``evaluate(a)`` returns ``(F_a, c_a)`` for a in [0, 1]; constants are declared, not derived."""

    name: str
    num_outcomes: int
    evaluate: Evaluator
    smoothness: Fraction
    lipschitz_F: Fraction = ONE
    lipschitz_c: Fraction = ONE
    precision: int = 12  # decimal digits kept when the evaluator returns floats

    def at(self, a) -> tuple[tuple[Fraction, ...], Fraction]:
        a = as_fraction(a)
        try:
            F, c = self.evaluate(a)
        except Exception as exc:
            raise FamilyError(f"family {self.name!r} failed at a = {a}: {exc}") from exc
        F = tuple(self._exact(v) for v in F)
        c = self._exact(c)
        if len(F) != self.num_outcomes:
            raise FamilyError(f"F at a = {a} has {len(F)} entries, expected {self.num_outcomes}")
        total = sum(F, ZERO)
        if any(v < 0 for v in F) or total <= 0:
            raise FamilyError(f"F at a = {a} is not a distribution")
        if total != 1:
            F = tuple(v / total for v in F)
        if not ZERO <= c <= ONE:
            raise FamilyError(f"cost at a = {a} is outside [0, 1]")
        return F, c

    def _exact(self, v) -> Fraction:
        if isinstance(v, float):
            return Fraction(f"{v:.{self.precision}f}")
        return as_fraction(v)


def toy_family() -> ContinuousFamily:
    half = Fraction(1, 2)
    return ContinuousFamily("toy", 2, lambda a: ((half + a / 2, half - a / 2), a / 2), smoothness=half)


def quadratic_family() -> ContinuousFamily:
    half = Fraction(1, 2)
    return ContinuousFamily(
        "quadratic", 2, lambda a: ((half + a * a / 4, half - a * a / 4), a * a / 2), smoothness=half
    )


def tabulated_family(doc: dict) -> ContinuousFamily:
    """Piecewise-linear family from ``{"points": [{"a", "F", "c"}, ...], "smoothness", ...}``."""
    try:
        pts = sorted(
            ((as_fraction(p["a"]), tuple(as_fraction(v) for v in p["F"]), as_fraction(p["c"])) for p in doc["points"]),
            key=lambda p: p[0],
        )
        smooth = as_fraction(doc["smoothness"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FamilyError(f"bad tabulated family: {exc}") from None
    if not pts or pts[0][0] != 0 or pts[-1][0] != 1:
        raise FamilyError("tabulated points must cover a = 0 and a = 1")

    def ev(a: Fraction):
        for (a0, F0, c0), (a1, F1, c1) in zip(pts, pts[1:]):
            if a0 <= a <= a1:
                w = (a - a0) / (a1 - a0) if a1 != a0 else ZERO
                return tuple(x + w * (y - x) for x, y in zip(F0, F1)), c0 + w * (c1 - c0)
        return pts[-1][1], pts[-1][2]

    return ContinuousFamily(
        doc.get("name", "tabulated"),
        len(pts[0][1]),
        ev,
        smoothness=smooth,
        lipschitz_F=as_fraction(doc.get("lipschitz_F", 1)),
        lipschitz_c=as_fraction(doc.get("lipschitz_c", 1)),
    )


FAMILIES = {"toy": toy_family, "quadratic": quadratic_family}


def named_family(name: str) -> ContinuousFamily:
    if name not in FAMILIES:
        raise FamilyError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    return FAMILIES[name]()


def grid_points(delta) -> list[Fraction]:
    delta = as_fraction(delta)
    if not ZERO < delta <= ONE:
        raise ValueError("delta must lie in (0, 1]")
    steps = int(1 / delta)
    pts = [delta * i for i in range(steps + 1)]
    if pts[-1] != 1:
        pts.append(ONE)
    return pts


@dataclass
class DiscretizedProgram:
    family: ContinuousFamily
    delta: Fraction
    grid: list[Fraction]
    instance: DelegationInstance  # actions are grid points
    upper: tuple[tuple[Fraction, ...], ...]  # [type][grid action]
    lower: tuple[tuple[Fraction, ...], ...]
    floor_eps: Fraction
    floors: tuple[Optional[Fraction], ...]

    @property
    def action_set(self) -> tuple[int, ...]:
        return tuple(range(len(self.grid)))


def check_family(family: ContinuousFamily, grid: Sequence[Fraction]) -> list[str]:
    """Spot-check the declared constants on the grid and at midpoints."""
    issues = []
    pts = sorted(set(grid) | {(a + b) / 2 for a, b in zip(grid, grid[1:])})
    evals = {a: family.at(a) for a in pts}
    for w in range(family.num_outcomes):
        top = max(evals[a][0][w] for a in grid)
        if top < family.smoothness:
            issues.append(f"outcome {w} reaches at most probability {top} < declared smoothness {family.smoothness}")
    for a, b in zip(pts, pts[1:]):
        (Fa, ca), (Fb, cb) = evals[a], evals[b]
        dist = sum((abs(x - y) for x, y in zip(Fa, Fb)), ZERO)
        if dist > family.lipschitz_F * (b - a):
            issues.append(f"F moves by {dist} between {a} and {b}, above the declared Lipschitz constant")
        if abs(ca - cb) > family.lipschitz_c * (b - a):
            issues.append(f"cost moves by {abs(ca - cb)} between {a} and {b}, above the declared Lipschitz constant")
    return issues


def discretize(family: ContinuousFamily, delta, R: Sequence[Sequence], type_dist: Sequence) -> DiscretizedProgram:
    delta = as_fraction(delta)
    grid = grid_points(delta)
    issues = check_family(family, grid)
    if issues:
        raise FamilyError("; ".join(issues))
    cols = [family.at(a) for a in grid]
    inst = make_instance(
        type_dist,
        [F for F, _ in cols],
        R,
        [c for _, c in cols],
        outcomes=[f"w{i + 1}" for i in range(family.num_outcomes)],
        actions=[f"a={a}" for a in grid],
    )
    spread = family.lipschitz_F * delta
    upper = tuple(tuple(v + spread for v in row) for row in inst.values)
    lower = tuple(tuple(v - spread for v in row) for row in inst.values)
    floor_eps = delta * (family.lipschitz_c + 2 * family.lipschitz_F / family.smoothness)
    floors = tuple(compute_floor(inst, a, floor_eps).floor for a in range(len(grid)))
    return DiscretizedProgram(family, delta, grid, inst, upper, lower, floor_eps, floors)


def value_bound_violations(prog: DiscretizedProgram) -> list[str]:
    """Rewards of actions within delta of a grid point must lie between its lower and upper values."""
    out = []
    R = prog.instance.R
    for g, a in enumerate(prog.grid):
        probes = [x for x in (a - prog.delta / 2, a + prog.delta / 2, a - prog.delta, a + prog.delta) if 0 <= x <= 1]
        for x in probes:
            F, _ = prog.family.at(x)
            for t in range(prog.instance.n):
                v = dot(F, R[t])
                if not prog.lower[t][g] <= v <= prog.upper[t][g]:
                    out.append(f"type {t}, grid action {a}: value {v} at a = {x} outside bounds")
    return out


@dataclass
class ContinuousResult:
    program: DiscretizedProgram
    program_solution: PricingSolution
    program_value: Fraction
    solution: PricingSolution  # robustified, over the grid actions
    value: Fraction  # provider utility with buyers responding to true grid values
    provider_slack: Fraction
    guarantee: Fraction
    notes: list[str] = field(default_factory=list)


def solve_continuous(
    family: ContinuousFamily, delta, R: Sequence[Sequence], type_dist: Sequence, *, threads: int = 1
) -> ContinuousResult:
    delta = as_fraction(delta)
    prog = discretize(family, delta, R, type_dist)
    inst = prog.instance
    rep = solve_menu_k(
        inst,
        inst.n,
        eps=prog.floor_eps,
        own_values=prog.upper,
        other_values=prog.lower,
        relaxed=True,
        threads=threads,
    )
    program_value = relaxed_value(inst, rep.solution)
    assert program_value == rep.value
    # the grid program tolerates 2 delta of user slack; its floors give the provider slack
    params = RobustnessParams(2 * delta, 2 * prog.floor_eps)
    base = PricingSolution(rep.solution.items, params.eps)
    robust = robustify(inst, base, params)
    value = true_response_value(inst, robust)
    guarantee = program_value - params.loss_bound()
    return ContinuousResult(
        program=prog,
        program_solution=rep.solution,
        program_value=program_value,
        solution=robust,
        value=value,
        provider_slack=params.provider_eps,
        guarantee=guarantee,
    )


def load_family(data) -> ContinuousFamily:
    if isinstance(data, (bytes, str)):
        data = json.loads(data)
    return tabulated_family(data)
