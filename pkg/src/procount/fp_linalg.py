"""Exact arithmetic over a prime field F_p and sparse vectors over it.

Scalars are plain ints kept in ``range(p)``.  A :class:`SparseVector` maps
sortable keys (generator indices, labelled generators, index pairs) to
nonzero scalars; its entries are stored sorted so that equal vectors compare
and hash equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Hashable, Iterable, Iterator, Mapping

DEFAULT_P = 3


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_odd_prime(p):
        raise ValueError(f"p must be an odd prime, got {p!r}")
    return p


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, -1, p)


@dataclass(frozen=True)
class SparseVector:
    """Finite-support vector over F_p with canonical sorted storage."""

    entries: tuple[tuple[Any, int], ...]
    p: int = DEFAULT_P

    @classmethod
    def from_mapping(cls, mapping: Mapping[Hashable, int] | Iterable[tuple[Hashable, int]],
                     p: int = DEFAULT_P) -> SparseVector:
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        acc: dict = {}
        for k, v in items:
            acc[k] = (acc.get(k, 0) + v) % p
        return cls(tuple(sorted((k, v) for k, v in acc.items() if v)), p)

    @classmethod
    def zero(cls, p: int = DEFAULT_P) -> SparseVector:
        return cls((), p)

    @classmethod
    def unit(cls, key, p: int = DEFAULT_P, value: int = 1) -> SparseVector:
        return cls.from_mapping({key: value}, p)

    @cached_property
    def as_dict(self) -> dict:
        return dict(self.entries)

    def __getitem__(self, key) -> int:
        return self.as_dict.get(key, 0)

    def __contains__(self, key) -> bool:
        return key in self.as_dict

    def __iter__(self) -> Iterator:
        return (k for k, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def items(self):
        return self.entries

    @property
    def support(self) -> tuple:
        return tuple(k for k, _ in self.entries)

    def __add__(self, other: SparseVector) -> SparseVector:
        return vec_add(self, other)

    def __neg__(self) -> SparseVector:
        return scale(self, -1)

    def __sub__(self, other: SparseVector) -> SparseVector:
        return vec_add(self, scale(other, -1))

    def __repr__(self) -> str:
        body = ", ".join(f"{k!r}: {v}" for k, v in self.entries)
        return f"SparseVector({{{body}}}, p={self.p})"


def _same_p(*vectors: SparseVector) -> int:
    p = vectors[0].p
    for v in vectors[1:]:
        if v.p != p:
            raise ValueError(f"mixed characteristics {p} and {v.p}")
    return p


def vec_add(u: SparseVector, v: SparseVector) -> SparseVector:
    p = _same_p(u, v)
    if not v.entries:
        return u
    if not u.entries:
        return v
    acc = dict(u.entries)
    for k, x in v.entries:
        s = (acc.get(k, 0) + x) % p
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)
    return SparseVector(tuple(sorted(acc.items())), p)


def scale(u: SparseVector, c: int) -> SparseVector:
    c %= u.p
    if c == 0:
        return SparseVector.zero(u.p)
    if c == 1:
        return u
    return SparseVector(tuple((k, (x * c) % u.p) for k, x in u.entries), u.p)


def rank(vectors: Iterable[SparseVector]) -> int:
    """Rank over F_p of the rows ``vectors`` by sparse Gaussian elimination."""
    vectors = list(vectors)
    rows = [dict(v.entries) for v in vectors if v.entries]
    if not rows:
        return 0
    p = _same_p(*vectors)
    pivots: list[tuple[Any, dict]] = []
    for row in rows:
        row = dict(row)
        for key, prow in pivots:
            c = row.get(key, 0)
            if c:
                for k, x in prow.items():
                    s = (row.get(k, 0) - c * x) % p
                    if s:
                        row[k] = s
                    else:
                        row.pop(k, None)
        if row:
            key = min(row)
            inv = inv_mod(row[key], p)
            pivots.append((key, {k: (x * inv) % p for k, x in row.items()}))
    return len(pivots)


def rank2(u: SparseVector, v: SparseVector) -> int:
    """Rank of the 2-row matrix ``[u; v]``."""
    p = _same_p(u, v)
    if not u.entries:
        return 1 if v.entries else 0
    if not v.entries:
        return 1
    key, x = u.entries[0]
    lam = (v[key] * inv_mod(x, p)) % p
    return 1 if scale(u, lam) == v else 2


def same_span2(u: SparseVector, v: SparseVector, s: SparseVector, t: SparseVector) -> bool:
    """True iff ``span{u, v} == span{s, t}``."""
    r = rank2(u, v)
    if r != rank2(s, t):
        return False
    return rank([u, v, s, t]) == r


def span(vectors: Iterable[SparseVector]) -> frozenset[SparseVector]:
    """All F_p-linear combinations of ``vectors`` (exponential; oracle use only)."""
    vectors = list(vectors)
    if not vectors:
        raise ValueError("span of an empty family needs a characteristic")
    p = _same_p(*vectors)
    out = {SparseVector.zero(p)}
    for v in vectors:
        out = {vec_add(w, scale(v, c)) for w in out for c in range(p)}
    return frozenset(out)
