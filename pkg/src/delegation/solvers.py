"""Exact LP solver (two-phase simplex on an integer tableau) and exact linear systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .exact import ZERO, as_fraction

LE, EQ, GE = "<=", "==", ">="


class LpStatus(str, Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


@dataclass
class LinearProgram:
    """maximize ``objective . x`` subject to ``rows[i] . x  relations[i]  rhs[i]``.

    ``lower[j]`` is the lower bound of x_j; ``None`` marks a free variable.
    Rows may be dense lists or sparse ``{column: coefficient}`` dicts.
    """

    objective: Sequence
    rows: list = field(default_factory=list)
    relations: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    lower: Optional[list] = None

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add(self, row, relation: str, rhs) -> None:
        self.rows.append(row)
        self.relations.append(relation)
        self.rhs.append(rhs)

    def dense_row(self, i: int) -> list[Fraction]:
        row = self.rows[i]
        if isinstance(row, dict):
            out = [ZERO] * self.num_vars
            for j, v in row.items():
                out[j] = as_fraction(v)
            return out
        return [as_fraction(v) for v in row]

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        lower = self.lower if self.lower is not None else [ZERO] * self.num_vars
        for xj, lj in zip(x, lower):
            if lj is not None and xj < lj:
                return False
        for i in range(len(self.rows)):
            lhs = sum((a * b for a, b in zip(self.dense_row(i), x)), ZERO)
            b, rel = as_fraction(self.rhs[i]), self.relations[i]
            if (rel == LE and lhs > b) or (rel == GE and lhs < b) or (rel == EQ and lhs != b):
                return False
        return True


@dataclass
class LpOutcome:
    status: LpStatus
    value: Optional[Fraction] = None
    x: Optional[list[Fraction]] = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _check(lp: LinearProgram) -> None:
    n = lp.num_vars
    if not (len(lp.rows) == len(lp.relations) == len(lp.rhs)):
        raise ValueError("rows, relations and rhs must have equal length")
    if lp.lower is not None and len(lp.lower) != n:
        raise ValueError(f"lower has length {len(lp.lower)}, expected {n}")
    for i, row in enumerate(lp.rows):
        if isinstance(row, dict):
            if any(not 0 <= j < n for j in row):
                raise ValueError(f"row {i} references a column outside 0..{n - 1}")
        elif len(row) != n:
            raise ValueError(f"row {i} has length {len(row)}, expected {n}")
        if lp.relations[i] not in (LE, EQ, GE):
            raise ValueError(f"row {i} has unknown relation {lp.relations[i]!r}")


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        d = v.denominator
        out = out * d // gcd(out, d)
    return out


class _Tableau:
    """Fraction-free tableau: stored integers are ``D`` times the true entries.

    Pivots use Edmonds' update ``(p * a_ij - a_is * a_rj) / D``, which divides
    exactly, so everything stays in machine-independent integer arithmetic.
    Row 0 is the objective row (reduced costs, scaled by an extra positive factor).
    """

    DEGENERATE_LIMIT = 50

    def __init__(self, rows: list[list[int]], basis: list[int], ncols: int):
        self.rows = rows  # constraint rows: ncols coefficients followed by rhs
        self.basis = basis
        self.ncols = ncols
        self.D = 1
        self.obj: list[int] = []

    def set_objective(self, c: Sequence[Fraction]) -> None:
        """Install reduced costs of ``maximize c . x`` for the current basis."""
        K = _lcm_den(c)
        ci = [int(v * K) for v in c] + [0]
        obj = [v * self.D for v in ci]
        for i, b in enumerate(self.basis):
            cb = ci[b]
            if cb:
                for j, v in enumerate(self.rows[i]):
                    if v:
                        obj[j] -= cb * v
        self.obj = obj

    def pivot(self, r: int, s: int) -> None:
        row = self.rows[r]
        p = row[s]
        if p < 0:
            # an equation row may be negated freely; keeps the common denominator positive
            row = [-v for v in row]
            self.rows[r] = row
            p = -p
        D = self.D
        nz = [(j, v) for j, v in enumerate(row) if v]

        def update(other: list[int]) -> list[int]:
            f = other[s]
            if p == D:
                if not f:
                    return other
                new = list(other)
            else:
                new = [(p * a) // D if a else 0 for a in other]
            if f:
                for j, v in nz:
                    new[j] = (p * other[j] - f * v) // D
            return new

        for i, other in enumerate(self.rows):
            if i != r:
                self.rows[i] = update(other)
        self.obj = update(self.obj)
        self.D = p
        self.basis[r] = s

    def value_sign(self) -> int:
        v = -self.obj[-1]
        return (v > 0) - (v < 0)

    def run(self, allowed: Sequence[bool]) -> bool:
        """Maximize the installed objective; False on unboundedness.

        Largest reduced cost enters; after a run of degenerate pivots the rule
        switches to lowest index (Bland) until progress resumes, which rules out cycling.
        """
        stall = 0
        while True:
            obj = self.obj
            if stall >= self.DEGENERATE_LIMIT:
                s = next((j for j in range(self.ncols) if allowed[j] and obj[j] > 0), None)
            else:
                s, top = None, 0
                for j in range(self.ncols):
                    if allowed[j] and obj[j] > top:
                        s, top = j, obj[j]
            if s is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[s]
                if a > 0:
                    b = row[-1]
                    if best is None:
                        best = (b, a, i)
                        continue
                    bb, ba, bi = best
                    lhs, rhs = b * ba, bb * a
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[bi]):
                        best = (b, a, i)
            if best is None:
                return False
            stall = stall + 1 if best[0] == 0 else 0
            self.pivot(best[2], s)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve exactly. The pivot rule is fixed, so repeated calls return the same vertex."""
    _check(lp)
    n = lp.num_vars
    lower = list(lp.lower) if lp.lower is not None else [ZERO] * n
    lower = [None if l is None else as_fraction(l) for l in lower]

    # column map: each original variable -> list of (internal column, sign)
    cols: list[list[tuple[int, int]]] = []
    nint = 0
    for j in range(n):
        if lower[j] is None:
            cols.append([(nint, 1), (nint + 1, -1)])
            nint += 2
        else:
            cols.append([(nint, 1)])
            nint += 1

    shift = [ZERO if l is None else l for l in lower]
    body: list[list[int]] = []
    rels: list[str] = []
    for i in range(len(lp.rows)):
        dense = lp.dense_row(i)
        b = as_fraction(lp.rhs[i]) - sum((a * s for a, s in zip(dense, shift) if a and s), ZERO)
        row = [ZERO] * nint
        for j, a in enumerate(dense):
            if a:
                for c, sg in cols[j]:
                    row[c] = a * sg
        rel = lp.relations[i]
        if b < 0 or (b == 0 and rel == GE):
            row = [-v for v in row]
            b = -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        # scale to integers; slack and artificial columns absorb the scale
        K = _lcm_den(row + [b])
        body.append([int(v * K) for v in row] + [int(b * K)])
        rels.append(rel)

    nrows = len(body)
    n_slack = sum(1 for r in rels if r != EQ)
    n_art = sum(1 for r in rels if r != LE)
    ncols = nint + n_slack + n_art
    art_start = nint + n_slack
    rows: list[list[int]] = []
    basis: list[int] = []
    si, ai = nint, art_start
    for i in range(nrows):
        row = body[i][:-1] + [0] * (n_slack + n_art) + [body[i][-1]]
        if rels[i] == LE:
            row[si] = 1
            basis.append(si)
            si += 1
        elif rels[i] == GE:
            row[si] = -1
            row[ai] = 1
            basis.append(ai)
            si += 1
            ai += 1
        else:
            row[ai] = 1
            basis.append(ai)
            ai += 1
        rows.append(row)

    tab = _Tableau(rows, basis, ncols)
    if n_art:
        c1 = [ZERO] * art_start + [Fraction(-1)] * n_art
        tab.set_objective(c1)
        tab.run([True] * ncols)
        if tab.value_sign() < 0:
            return LpOutcome(LpStatus.INFEASIBLE)
        # drive artificial variables out of the basis, dropping redundant rows
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= art_start:
                row = tab.rows[i]
                s = next((j for j in range(art_start) if row[j]), None)
                if s is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, s)
            i += 1

    c2 = [ZERO] * ncols
    for j in range(n):
        cj = as_fraction(lp.objective[j])
        for c, sg in cols[j]:
            c2[c] = cj * sg
    tab.set_objective(c2)
    allowed = [j < art_start for j in range(ncols)]
    if not tab.run(allowed):
        return LpOutcome(LpStatus.UNBOUNDED)

    xi = [ZERO] * ncols
    for i, b in enumerate(tab.basis):
        xi[b] = Fraction(tab.rows[i][-1], tab.D)
    x = []
    for j in range(n):
        v = sum((xi[c] * sg for c, sg in cols[j]), ZERO) + shift[j]
        x.append(v)
    value = sum((as_fraction(cj) * xj for cj, xj in zip(lp.objective, x)), ZERO)
    return LpOutcome(LpStatus.OPTIMAL, value, x)


def intersect_hyperplanes(planes: Sequence[tuple[Sequence, object]]) -> Optional[list[Fraction]]:
    """Solve the square system ``coeffs . q = rhs``; None when the matrix is singular."""
    k = len(planes)
    if any(len(coeffs) != k for coeffs, _ in planes):
        raise ValueError("intersect_hyperplanes needs k equations in k unknowns")
    a = [[as_fraction(v) for v in coeffs] + [as_fraction(b)] for coeffs, b in planes]
    for col in range(k):
        piv = next((r for r in range(col, k) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(k):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][k] for r in range(k)]
