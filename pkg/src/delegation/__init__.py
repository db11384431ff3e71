"""Exact solvers for delegation menus: deterministic, randomized, robust and continuous-action."""

from .instance import (
    OPT_OUT,
    DelegationInstance,
    DeterministicMenu,
    PaymentScheme,
    load_instance,
    make_instance,
    save_instance,
    validate_instance,
)
from .pricing import PricingSolution, evaluate, pricing_to_menu, select, solve_menu_k
from .oracle import brute_force_opt_k, verify_menu

__all__ = [
    "OPT_OUT",
    "DelegationInstance",
    "DeterministicMenu",
    "PaymentScheme",
    "PricingSolution",
    "brute_force_opt_k",
    "evaluate",
    "load_instance",
    "make_instance",
    "pricing_to_menu",
    "save_instance",
    "select",
    "solve_menu_k",
    "validate_instance",
    "verify_menu",
]
