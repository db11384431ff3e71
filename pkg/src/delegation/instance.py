"""Delegation instances, payment menus, validation and JSON I/O.

Matrices are stored by column: ``F[a]`` is the outcome distribution of action
``a`` and ``R[t]`` is the reward vector of type ``t``. All entries are Fractions.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .exact import ZERO, ONE, as_fraction, dot, format_rational

FORMAT_VERSION = 1
OPT_OUT = None


class FormatError(ValueError):
    """Malformed instance or menu document; ``location`` names the offending field."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


def _matrix(rows) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(as_fraction(v) for v in row) for row in rows)


@dataclass(frozen=True, eq=True)
class DelegationInstance:
    types: tuple[str, ...]
    type_dist: tuple[Fraction, ...]
    outcomes: tuple[str, ...]
    actions: tuple[str, ...]
    F: tuple[tuple[Fraction, ...], ...]  # F[a][w]
    R: tuple[tuple[Fraction, ...], ...]  # R[t][w]
    costs: tuple[Fraction, ...]
    _floor_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)
    _floor_lock: threading.Lock = field(
        default_factory=threading.Lock, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(str(t) for t in self.types))
        object.__setattr__(self, "outcomes", tuple(str(w) for w in self.outcomes))
        object.__setattr__(self, "actions", tuple(str(a) for a in self.actions))
        object.__setattr__(self, "type_dist", tuple(as_fraction(x) for x in self.type_dist))
        object.__setattr__(self, "costs", tuple(as_fraction(x) for x in self.costs))
        object.__setattr__(self, "F", _matrix(self.F))
        object.__setattr__(self, "R", _matrix(self.R))
        n, m, ell = len(self.types), len(self.outcomes), len(self.actions)
        if len(self.type_dist) != n:
            raise ValueError(f"type_dist has length {len(self.type_dist)}, expected {n}")
        if len(self.costs) != ell:
            raise ValueError(f"costs has length {len(self.costs)}, expected {ell}")
        if len(self.F) != ell or any(len(col) != m for col in self.F):
            raise ValueError(f"F must be {ell} columns of length {m}")
        if len(self.R) != n or any(len(col) != m for col in self.R):
            raise ValueError(f"R must be {n} columns of length {m}")

    def __hash__(self):
        return hash((self.types, self.type_dist, self.outcomes, self.actions, self.F, self.R, self.costs))

    @property
    def n(self) -> int:
        return len(self.types)

    @property
    def m(self) -> int:
        return len(self.outcomes)

    @property
    def ell(self) -> int:
        return len(self.actions)

    @cached_property
    def values(self) -> tuple[tuple[Fraction, ...], ...]:
        """``values[t][a] = F_a . R_t``, the expected reward of type t under action a."""
        return tuple(tuple(dot(self.F[a], self.R[t]) for a in range(self.ell)) for t in range(self.n))

    @cached_property
    def smoothness(self) -> Fraction:
        """Largest c such that every outcome is reached with probability >= c by some action."""
        if self.m == 0 or self.ell == 0:
            return ZERO
        return min(max(self.F[a][w] for a in range(self.ell)) for w in range(self.m))

    def expected_payment(self, a: int, p: Sequence[Fraction]) -> Fraction:
        return dot(self.F[a], p)

    def restrict_types(self, keep: Sequence[int]) -> "DelegationInstance":
        """Sub-instance on the listed types with the distribution renormalized."""
        total = sum((self.type_dist[t] for t in keep), ZERO)
        dist = [self.type_dist[t] / total if total else Fraction(1, len(keep)) for t in keep]
        return DelegationInstance(
            types=[self.types[t] for t in keep],
            type_dist=dist,
            outcomes=self.outcomes,
            actions=self.actions,
            F=self.F,
            R=[self.R[t] for t in keep],
            costs=self.costs,
        )

    def with_rewards(self, R) -> "DelegationInstance":
        return DelegationInstance(self.types, self.type_dist, self.outcomes, self.actions, self.F, R, self.costs)


def make_instance(type_dist, F, R, costs, *, types=None, outcomes=None, actions=None) -> DelegationInstance:
    """Build an instance with default identifiers ``t1.., w1.., a1..``."""
    n, ell = len(type_dist), len(costs)
    m = len(F[0]) if F else 0
    return DelegationInstance(
        types=types or [f"t{i + 1}" for i in range(n)],
        type_dist=type_dist,
        outcomes=outcomes or [f"w{i + 1}" for i in range(m)],
        actions=actions or [f"a{i + 1}" for i in range(ell)],
        F=F,
        R=R,
        costs=costs,
    )


@dataclass(frozen=True)
class PaymentScheme:
    action: Optional[int]  # None is opt-out
    payments: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "payments", tuple(as_fraction(x) for x in self.payments))
        if any(x < 0 for x in self.payments):
            raise ValueError("payments must be nonnegative")

    @property
    def is_opt_out(self) -> bool:
        return self.action is None


@dataclass(frozen=True)
class DeterministicMenu:
    schemes: tuple[PaymentScheme, ...]
    direct: bool = False

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if not self.schemes:
            raise ValueError("a menu needs at least one scheme")

    def __len__(self):
        return len(self.schemes)


@dataclass
class ValidationReport:
    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.ok


def validate_instance(inst: DelegationInstance, *, require_unit_costs: bool = False) -> ValidationReport:
    rep = ValidationReport()
    for a, col in enumerate(inst.F):
        if any(x < 0 for x in col):
            rep.issues.append(f"F column {inst.actions[a]} has a negative entry")
        s = sum(col, ZERO)
        if s != ONE:
            rep.issues.append(f"F column {inst.actions[a]} is not column-stochastic (sums to {s})")
    if any(x < 0 for x in inst.type_dist):
        rep.issues.append("type_dist has a negative entry")
    s = sum(inst.type_dist, ZERO)
    if s != ONE:
        rep.issues.append(f"type_dist sums to {s}, not 1")
    for t, col in enumerate(inst.R):
        for w, x in enumerate(col):
            if not ZERO <= x <= ONE:
                rep.issues.append(f"reward R[{inst.outcomes[w]}, {inst.types[t]}] = {x} outside the range [0, 1]")
    for a, c in enumerate(inst.costs):
        if c < 0:
            rep.issues.append(f"cost of {inst.actions[a]} is negative")
        elif require_unit_costs and c > 1:
            rep.issues.append(f"cost of {inst.actions[a]} exceeds 1")
    return rep


# JSON

_INSTANCE_KEYS = ("types", "type_dist", "outcomes", "actions", "F", "R", "costs")


def _rat(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise FormatError("floats are not accepted, write rationals as \"num/den\" strings", where)
    try:
        return as_fraction(value)
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), where) from None


def _rat_list(value, where: str) -> list[Fraction]:
    if not isinstance(value, list):
        raise FormatError("expected a list", where)
    return [_rat(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _parse_json(data) -> dict:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            return json.loads(data)
        except json.JSONDecodeError as exc:
            raise FormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if isinstance(data, dict):
        return data
    raise FormatError("expected a JSON document")


def _check_version(doc: dict):
    if doc.get("version") != FORMAT_VERSION:
        raise FormatError(f"unsupported schema version {doc.get('version')!r}", "version")


def instance_from_dict(doc: dict) -> DelegationInstance:
    _check_version(doc)
    for key in _INSTANCE_KEYS:
        if key not in doc:
            raise FormatError("missing required field", key)
    try:
        return DelegationInstance(
            types=doc["types"],
            type_dist=_rat_list(doc["type_dist"], "type_dist"),
            outcomes=doc["outcomes"],
            actions=doc["actions"],
            F=[_rat_list(col, f"F[{a}]") for a, col in enumerate(doc["F"])],
            R=[_rat_list(col, f"R[{t}]") for t, col in enumerate(doc["R"])],
            costs=_rat_list(doc["costs"], "costs"),
        )
    except FormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), "instance") from None


def instance_to_dict(inst: DelegationInstance) -> dict:
    fmt = format_rational
    return {
        "version": FORMAT_VERSION,
        "types": list(inst.types),
        "type_dist": [fmt(x) for x in inst.type_dist],
        "outcomes": list(inst.outcomes),
        "actions": list(inst.actions),
        "F": [[fmt(x) for x in col] for col in inst.F],
        "R": [[fmt(x) for x in col] for col in inst.R],
        "costs": [fmt(x) for x in inst.costs],
    }


def load_instance(data) -> DelegationInstance:
    return instance_from_dict(_parse_json(data))


def save_instance(inst: DelegationInstance) -> bytes:
    return json.dumps(instance_to_dict(inst), indent=1).encode("utf-8")


def menu_to_dict(inst: DelegationInstance, menu: DeterministicMenu, value: Fraction | None = None) -> dict:
    doc = {
        "version": FORMAT_VERSION,
        "kind": "deterministic",
        "direct": menu.direct,
        "schemes": [
            {
                "action": None if s.action is None else inst.actions[s.action],
                "payments": [format_rational(x) for x in (s.payments or (ZERO,) * inst.m)],
            }
            for s in menu.schemes
        ],
    }
    if value is not None:
        doc["value"] = format_rational(value)
    return doc


def menu_from_dict(inst: DelegationInstance, doc: dict) -> DeterministicMenu:
    _check_version(doc)
    if doc.get("kind") != "deterministic":
        raise FormatError(f"expected kind 'deterministic', got {doc.get('kind')!r}", "kind")
    if "schemes" not in doc:
        raise FormatError("missing required field", "schemes")
    index = {name: a for a, name in enumerate(inst.actions)}
    schemes = []
    for i, s in enumerate(doc["schemes"]):
        name = s.get("action")
        if name is not None and name not in index:
            raise FormatError(f"unknown action {name!r}", f"schemes[{i}].action")
        pay = _rat_list(s.get("payments", []), f"schemes[{i}].payments")
        if name is not None and len(pay) != inst.m:
            raise FormatError(f"expected {inst.m} payments", f"schemes[{i}].payments")
        try:
            schemes.append(PaymentScheme(None if name is None else index[name], pay))
        except ValueError as exc:
            raise FormatError(str(exc), f"schemes[{i}].payments") from None
    return DeterministicMenu(schemes, direct=bool(doc.get("direct", False)))


def load_menu(inst: DelegationInstance, data) -> DeterministicMenu:
    return menu_from_dict(inst, _parse_json(data))


def save_menu(inst: DelegationInstance, menu: DeterministicMenu, value: Fraction | None = None) -> bytes:
    return json.dumps(menu_to_dict(inst, menu, value), indent=1).encode("utf-8")
