"""Partial permutations of N and finite permutation groups.

A partial permutation is a tuple ``s`` of distinct naturals with ``s[i]`` the
image of ``i``.  Finite groups of degree ``N`` act on ``{0, .., N-1}`` and are
taken to fix every point ``>= N``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

Perm = tuple


def check_partial(s: Sequence[int]) -> tuple:
    s = tuple(int(v) for v in s)
    if any(v < 0 for v in s) or len(set(s)) != len(s):
        raise ValueError(f"{s!r} is not injective on naturals")
    return s


def partial_compose(s: Sequence[int], t: Sequence[int]) -> tuple:
    """``s o t`` on the longest initial segment where it is defined."""
    out = []
    for v in t:
        if v >= len(s):
            break
        out.append(s[v])
    return tuple(out)


def partial_inverse(s: Sequence[int]) -> tuple:
    """``s^-1`` on the longest initial segment where it is defined."""
    where = {v: i for i, v in enumerate(s)}
    out = []
    while len(out) in where:
        out.append(where[len(out)])
    return tuple(out)


def sigma(n: int) -> tuple:
    return tuple(range(n))


def compose(a: Perm, b: Perm) -> Perm:
    """``(a o b)(i) = a(b(i))`` for full permutations of one degree."""
    return tuple(a[i] for i in b)


def invert(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, v in enumerate(a):
        out[v] = i
    return tuple(out)


def extend(a: Perm, length: int) -> tuple:
    """``a`` as a sequence of the given length, fixing points beyond its degree."""
    return tuple(a[i] if i < len(a) else i for i in range(length))


@dataclass(frozen=True)
class FinitePermGroup:
    """A permutation group of degree ``degree``, checked closed on construction."""

    degree: int
    elements: frozenset

    def __post_init__(self):
        els = frozenset(tuple(g) for g in self.elements)
        object.__setattr__(self, "elements", els)
        ident = sigma(self.degree)
        if ident not in els:
            raise ValueError("group must contain the identity")
        for g in els:
            if sorted(g) != list(ident):
                raise ValueError(f"{g!r} is not a permutation of degree {self.degree}")
            if invert(g) not in els:
                raise ValueError(f"{g!r} has no inverse in the set")
        for g in els:
            for h in els:
                if compose(g, h) not in els:
                    raise ValueError("set is not closed under composition")

    @classmethod
    def generate(cls, gens: Iterable[Sequence[int]], degree: int) -> FinitePermGroup:
        return cls(degree, closure(gens, degree))

    @classmethod
    def symmetric(cls, degree: int) -> FinitePermGroup:
        return cls(degree, frozenset(itertools.permutations(range(degree))))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def is_abelian(self) -> bool:
        return all(compose(g, h) == compose(h, g) for g in self.elements for h in self.elements)

    def to_json(self) -> list:
        return [list(g) for g in sorted(self.elements)]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> FinitePermGroup:
        degree = len(data[0]) if data else 0
        return cls(degree, frozenset(tuple(g) for g in data))


def closure(gens: Iterable[Sequence[int]], degree: int, start: Iterable[Perm] = ()) -> frozenset:
    gens = [tuple(g) for g in gens]
    seen = set(start) | {sigma(degree)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                u = compose(g, h)
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return frozenset(seen)


def all_subgroups(degree: int) -> list[FinitePermGroup]:
    """Every subgroup of the symmetric group of the given degree."""
    S = sorted(itertools.permutations(range(degree)))
    found = {frozenset([sigma(degree)])}
    frontier = list(found)
    while frontier:
        nxt = []
        for H in frontier:
            for g in S:
                if g in H:
                    continue
                K = closure(list(H) + [g], degree)
                if K not in found:
                    found.add(K)
                    nxt.append(K)
        frontier = nxt
    return [FinitePermGroup(degree, H) for H in sorted(found, key=lambda H: (len(H), sorted(H)))]


def cylinder_members(G: FinitePermGroup, s: Sequence[int]) -> frozenset:
    """``[s]_G``: elements of ``G`` extending ``s``."""
    s = tuple(s)
    return frozenset(g for g in G.elements if extend(g, len(s)) == s)


def is_subgroup(H: Iterable[Perm], degree: int) -> bool:
    H = set(H)
    if sigma(degree) not in H:
        return False
    return all(compose(g, invert(h)) in H for g in H for h in H)


def restrictions(G: FinitePermGroup, max_len: int) -> frozenset:
    """All ``g | L`` for ``g`` in ``G`` and ``L <= max_len``."""
    out = set()
    for g in G.elements:
        full = extend(g, max_len)
        out.update(full[:L] for L in range(max_len + 1))
    return frozenset(out)


def check_borel_conditions(G: FinitePermGroup, n: int, k: int) -> tuple[bool, bool]:
    """Evaluate ``x^-1 [sigma_k]_G x <= [sigma_n]_G`` for all ``x`` (cond1) and
    ``[s^-1 o (t o s)]_G`` meets ``[sigma_n]_G`` for all restrictions ``s`` and
    ``t`` extending ``sigma_k`` (cond2).

    Restrictions run up to length ``max(degree, k, n)``, so long ones pin down
    group elements exactly.
    """
    if k < n:
        raise ValueError("need n <= k")
    N = G.degree
    L = max(N, k, n)
    small = cylinder_members(G, sigma(k))
    target = cylinder_members(G, sigma(n))
    cond1 = all(compose(invert(x), compose(y, x)) in target for x in G.elements for y in small)

    prefixes = restrictions(G, L)
    ts = [t for t in prefixes if len(t) >= k and t[:k] == sigma(k)]

    def meets_sigma_n(u):
        if any(u[i] != i for i in range(min(n, len(u)))):
            return False
        w = u + tuple(range(len(u), n))
        return w in prefixes

    cond2 = all(meets_sigma_n(partial_compose(partial_inverse(s), partial_compose(t, s)))
                for s in prefixes for t in ts)
    return cond1, cond2


def cantor_pair(i: int, n: int) -> int:
    """``<i, n> = (i + n)(i + n + 1)/2 + n``."""
    return (i + n) * (i + n + 1) // 2 + n


def cantor_unpair(z: int) -> tuple[int, int]:
    w = 0
    while (w + 1) * (w + 2) // 2 <= z:
        w += 1
    n = z - w * (w + 1) // 2
    return w - n, n


def check_table(table: Sequence[Sequence[int]]) -> int:
    """Validate a multiplication table and return the index of the identity."""
    m = len(table)
    if m == 0 or any(len(row) != m for row in table):
        raise ValueError("table must be square and nonempty")
    if any(not 0 <= v < m for row in table for v in row):
        raise ValueError("table entries out of range")
    ids = [e for e in range(m) if all(table[e][a] == a and table[a][e] == a for a in range(m))]
    if not ids:
        raise ValueError("no identity element")
    e = ids[0]
    for a in range(m):
        if not any(table[a][b] == e for b in range(m)):
            raise ValueError(f"element {a} has no inverse")
    for a, b, c in itertools.product(range(m), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise ValueError("table is not associative")
    return e


def cyclic_table(m: int) -> list[list[int]]:
    return [[(a + b) % m for b in range(m)] for a in range(m)]


def embed_product(tables: Sequence[Sequence[Sequence[int]]]) -> FinitePermGroup:
    """Direct product of the given groups, each acting by left multiplication on
    its own domain ``{<i, j>: i < |G_j|}``."""
    for t in tables:
        check_table(t)
    domains = [[cantor_pair(i, j) for i in range(len(t))] for j, t in enumerate(tables)]
    degree = max((max(d) for d in domains), default=-1) + 1
    per_level = []
    for j, t in enumerate(tables):
        perms = []
        for g in range(len(t)):
            img = list(range(degree))
            for i in range(len(t)):
                img[cantor_pair(i, j)] = cantor_pair(t[g][i], j)
            perms.append(tuple(img))
        per_level.append(perms)
    elements = set()
    for combo in itertools.product(*per_level):
        u = sigma(degree)
        for g in combo:
            u = compose(g, u)
        elements.add(u)
    return FinitePermGroup(degree, frozenset(elements))


def support(g: Perm) -> frozenset:
    return frozenset(i for i, v in enumerate(g) if v != i)
