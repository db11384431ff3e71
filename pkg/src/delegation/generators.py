"""Instance families: identity-outcome instances, the randomized-gap family, the
independent-set reduction with its canonical menu, and seeded random instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import ZERO
from .instance import DelegationInstance, DeterministicMenu, PaymentScheme, make_instance


@dataclass(frozen=True)
class GraphSpec:
    vertices: int  # labeled 1..vertices
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.vertices and 1 <= v <= self.vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    def adjacent(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def is_independent(self, vs: Iterable[int]) -> bool:
        vs = sorted(set(vs))
        return all(not self.adjacent(u, v) for i, u in enumerate(vs) for v in vs[i + 1 :])

    def max_independent_set(self) -> tuple[int, ...]:
        best: tuple[int, ...] = ()
        for mask in range(1 << self.vertices):
            vs = tuple(v + 1 for v in range(self.vertices) if mask >> v & 1)
            if len(vs) > len(best) and self.is_independent(vs):
                best = vs
        return best


def _identity(n: int) -> list[list[int]]:
    return [[1 if w == a else 0 for w in range(n)] for a in range(n)]


def gen_single_bad(n: int) -> DelegationInstance:
    """n actions each reaching its own outcome; type i values only outcome i."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return make_instance([Fraction(1, n)] * n, _identity(n), _identity(n), [0] * n)


def gen_randomized_gap(n: int) -> DelegationInstance:
    """Types, actions and outcomes indexed by (i, j), i in 1..n/2, j in 1..2.

    Type (i, j) gets reward 2^-i on outcome (k, z) whenever k = i or z = j, else 0.
    """
    if n < 2 or n % 2:
        raise ValueError("n must be even and at least 2")
    half = n // 2
    idx = [(i, j) for i in range(1, half + 1) for j in (1, 2)]
    total = sum(2 ** (k + 1) for k in range(1, half + 1))
    dist = [Fraction(2**i, total) for i, _ in idx]
    R = [[Fraction(1, 2**i) if (k == i or z == j) else ZERO for k, z in idx] for i, j in idx]
    names = [f"{i}.{j}" for i, j in idx]
    return make_instance(
        dist, _identity(n), R, [0] * n,
        types=[f"t{s}" for s in names], outcomes=[f"w{s}" for s in names], actions=[f"a{s}" for s in names],
    )


def _vi(graph: GraphSpec) -> list[tuple[int, int]]:
    N = graph.vertices
    return [(v, i) for v in range(1, graph.vertices + 1) for i in range(1, N + 1)]


def gen_hardness(graph: GraphSpec) -> tuple[DelegationInstance, Fraction]:
    """Reduction instance on pairs (v, i), v a vertex and i in 1..N with N = M.

    Type (v, i) values outcome (w, j) at M^-(Mv+i) when w = v and j = i, or when
    {v, w} is an edge with w < v; zero elsewhere. Returns the instance and beta.
    """
    M = graph.vertices
    if not 1 <= M <= 4:
        raise ValueError("gen_hardness supports 1 <= M <= 4")
    pairs = _vi(graph)
    weight = {(v, i): M ** (M * v + i) for v, i in pairs}
    beta = Fraction(1, sum(weight.values()))
    R = []
    for v, i in pairs:
        r = Fraction(1, weight[(v, i)])
        col = []
        for w, j in pairs:
            hit = (w == v and j == i) or (w < v and graph.adjacent(v, w))
            col.append(r if hit else ZERO)
        R.append(col)
    names = [f"{v}.{i}" for v, i in pairs]
    inst = make_instance(
        [beta * weight[p] for p in pairs], _identity(len(pairs)), R, [0] * len(pairs),
        types=[f"t{s}" for s in names], outcomes=[f"w{s}" for s in names], actions=[f"a{s}" for s in names],
    )
    return inst, beta


def gen_soundness_menu(inst: DelegationInstance, independent_set: Sequence[int]) -> DeterministicMenu:
    """Direct menu extracting full surplus from the types of an independent set.

    Types (v, i) with v in the set pay their own reward on their own outcome.
    Every other type is shown its best offer among those schemes, or opts out
    when that offer is worth less than nothing (ties go to opting out).
    """
    n = inst.n
    side = int(round(n**0.5))
    if side * side != n:
        raise ValueError("instance is not a reduction instance")
    pairs = [(v, i) for v in range(1, side + 1) for i in range(1, side + 1)]
    chosen = set(independent_set)
    # adjacency as encoded by the rewards
    for u in chosen:
        for v in chosen:
            if u < v and inst.R[pairs.index((v, 1))][pairs.index((u, 1))] > 0:
                raise ValueError(f"vertices {u} and {v} are adjacent")
    schemes: list[PaymentScheme] = []
    offered = []
    for t, (v, i) in enumerate(pairs):
        if v in chosen:
            p = [ZERO] * inst.m
            p[t] = inst.R[t][t]
            s = PaymentScheme(t, p)
            offered.append(s)
    vals = inst.values
    for t, (v, i) in enumerate(pairs):
        if v in chosen:
            schemes.append(next(s for s in offered if s.action == t))
            continue
        best, best_u = None, ZERO
        for s in offered:
            u = vals[t][s.action] - sum(inst.F[s.action][w] * s.payments[w] for w in range(inst.m))
            if u > best_u:
                best, best_u = s, u
        schemes.append(best if best is not None else PaymentScheme(None, [ZERO] * inst.m))
    return DeterministicMenu(schemes, direct=True)


def gen_random(n: int, m: int, ell: int, seed: int, grid: int = 10) -> DelegationInstance:
    """Seeded instance: F columns are normalized integer weights, R and c lie on a 1/grid lattice."""
    if min(n, m, ell, grid) < 1:
        raise ValueError("sizes must be positive")
    rng = random.Random(seed)
    weights = [rng.randint(1, 9) for _ in range(n)]
    dist = [Fraction(w, sum(weights)) for w in weights]
    F = []
    for _ in range(ell):
        col = [rng.randint(0, grid) for _ in range(m)]
        if not any(col):
            col[rng.randrange(m)] = 1
        F.append([Fraction(x, sum(col)) for x in col])
    R = [[Fraction(rng.randint(0, grid), grid) for _ in range(m)] for _ in range(n)]
    costs = [Fraction(rng.randint(0, grid // 2), grid) for _ in range(ell)]
    return make_instance(dist, F, R, costs)


def suite_sizes(seed: int) -> tuple[int, int, int]:
    """(n, m, ell) for the random acceptance suite, cycling through 1..3 each."""
    return 1 + seed % 3, 1 + (seed // 3) % 3, 1 + (seed // 9) % 3


def random_suite(count: int = 200) -> list[DelegationInstance]:
    return [gen_random(*suite_sizes(s), seed=s) for s in range(count)]
