"""Robustifying menus against misspecified rewards.

Given a menu priced on estimated rewards within ``delta`` of the truth, drop
every item whose seller margin is below ``sqrt(2 delta)`` and rebate each kept
item a ``sqrt(delta)`` share of its margin. Higher-margin items get larger
rebates, which pulls buyers toward them even under the true rewards.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .exact import ZERO, as_fraction, dot, sqrt_bounds
from .floors import min_relaxation, provider_slack
from .instance import DelegationInstance, DeterministicMenu
from .pricing import PricingSolution, evaluate, select


@dataclass(frozen=True)
class RobustnessParams:
    delta: Fraction
    eps: Fraction = ZERO

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if self.delta < 0 or self.eps < 0:
            raise ValueError("delta and eps must be nonnegative")

    @property
    def alpha(self) -> Fraction:
        """Rebate rate: sqrt(delta), rounded down when irrational."""
        return sqrt_bounds(self.delta)[0]

    @property
    def threshold(self) -> Fraction:
        """Minimum margin to keep an item: sqrt(2 delta), rounded up when irrational."""
        return sqrt_bounds(2 * self.delta)[1]

    @property
    def provider_eps(self) -> Fraction:
        return self.eps + self.alpha

    def loss_bound(self) -> Fraction:
        """Upper bound on 2 sqrt(delta) + sqrt(2 delta)."""
        return 2 * sqrt_bounds(self.delta)[1] + sqrt_bounds(2 * self.delta)[1]


def robustify(inst_estimated: DelegationInstance, sol: PricingSolution, params: RobustnessParams) -> PricingSolution:
    """Drop low-margin items and rebate the rest. Reads costs only, never rewards."""
    alpha, keep = params.alpha, params.threshold
    items = []
    for a, q in sol.items:
        if a is None:
            continue
        margin = q - inst_estimated.costs[a]
        if margin >= keep:
            items.append((a, q - alpha * margin))
    if not items:
        items = [(None, ZERO)]
    for t in range(inst_estimated.n):
        s = select(inst_estimated, sol, t)
        if s.index is not None and sol.items[s.index][1] > 1:
            warnings.warn(f"selected price {sol.items[s.index][1]} exceeds 1; the rebate may exceed sqrt(delta)")
            break
    return PricingSolution(tuple(items), sol.eps + alpha, action_set=sol.action_set)


@dataclass
class ApproxICReport:
    user_ic: Fraction = ZERO
    user_ir: Fraction = ZERO
    provider_ic: Fraction = ZERO
    details: list[str] = field(default_factory=list)

    def within(self, user: Fraction, provider: Fraction) -> bool:
        return self.user_ic <= user and self.user_ir <= user and self.provider_ic <= provider


def verify_approx(
    inst_true: DelegationInstance,
    menu: Union[PricingSolution, DeterministicMenu],
    assumed_selection: Optional[Sequence[Optional[int]]] = None,
) -> ApproxICReport:
    """Exact worst violations of user IC/IR and provider IC against ``inst_true``.

    Provider slack of an item is the smallest eps at which its expected payment
    eps-induces its action (for payment menus, the best deviation gain).
    Users are held to ``assumed_selection`` if given, to their own scheme for
    direct menus, and to their best response otherwise.
    """
    rep = ApproxICReport()
    if isinstance(menu, DeterministicMenu):
        items = []
        for i, s in enumerate(menu.schemes):
            if s.action is None:
                items.append((None, ZERO))
                continue
            gap = provider_slack(inst_true, s.action, s.payments)
            if gap > rep.provider_ic:
                rep.provider_ic = gap
                rep.details.append(f"scheme {i}: provider deviation gains {gap}")
            items.append((s.action, dot(inst_true.F[s.action], s.payments)))
        sol = PricingSolution(tuple(items))
        if assumed_selection is None and menu.direct:
            assumed_selection = [i if items[i][0] is not None else None for i in range(len(items))]
    else:
        sol = menu
        for i, (a, q) in enumerate(sol.items):
            if a is None:
                continue
            gap = min_relaxation(inst_true, a, q, sol.action_set)
            if gap is None:
                raise ValueError(f"item {i} has a negative price")
            if gap > rep.provider_ic:
                rep.provider_ic = gap
                rep.details.append(f"item {i}: needs provider slack {gap}")
    if assumed_selection is None:
        assumed_selection = [select(inst_true, sol, t).index for t in range(inst_true.n)]
    vals = inst_true.values
    for t, i in enumerate(assumed_selection):
        mine = ZERO
        if i is not None:
            a, q = sol.items[i]
            mine = vals[t][a] - q
        if -mine > rep.user_ir:
            rep.user_ir = -mine
            rep.details.append(f"type {t}: utility {mine}")
        for j, (b, r) in enumerate(sol.items):
            if b is None:
                continue
            gap = vals[t][b] - r - mine
            if gap > rep.user_ic:
                rep.user_ic = gap
                rep.details.append(f"type {t}: item {j} better by {gap}")
    return rep


def true_response_value(inst_true: DelegationInstance, menu: PricingSolution) -> Fraction:
    """Provider utility when buyers respond to their true rewards."""
    return evaluate(inst_true, PricingSolution(menu.items, menu.eps, action_set=menu.action_set))


def perturb_rewards(inst: DelegationInstance, delta, seed: int, steps: int = 4) -> DelegationInstance:
    """Rewards moved entrywise by a random multiple of delta/steps in [-delta, delta], clipped to [0, 1]."""
    delta = as_fraction(delta)
    rng = random.Random(seed)
    R = [
        [min(max(x + delta * Fraction(rng.randint(-steps, steps), steps), ZERO), Fraction(1)) for x in col]
        for col in inst.R
    ]
    return inst.with_rewards(R)
