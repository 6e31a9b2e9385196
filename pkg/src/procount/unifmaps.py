"""Uniform homeomorphisms between path spaces, stored as level prefix maps.

A :class:`PrefixMapFamily` from ``T`` to ``U`` holds an index function ``phi``
and maps ``r_n`` from level ``phi(n)`` of ``T`` onto level ``n`` of ``U`` with
``Phi(x) | n = r_n(x | phi(n))``.  Everything is tabulated on finite
truncations (:class:`procount.trees.FiniteTree`).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .trees import FiniteTree, Node, RK, SequenceSpec, Tx, expand, linf_distance


class FamilyError(ValueError):
    pass


class UndeterminedOutput(ValueError):
    pass


class PrefixMapFamily:
    """Level maps ``r_n: T_{phi(n)} -> U_n`` for ``n = 0 .. depth``."""

    __slots__ = ("source", "target", "phi", "maps")

    def __init__(self, source: FiniteTree, target: FiniteTree, phi: Sequence[int],
                 maps: Sequence[Mapping[Node, Node]], check: bool = True):
        self.source = source
        self.target = target
        self.phi = tuple(int(v) for v in phi)
        self.maps = tuple(dict(m) for m in maps)
        if len(self.phi) != len(self.maps):
            raise FamilyError("phi and maps must have the same length")
        if check:
            problems = self.problems()
            if problems:
                raise FamilyError("; ".join(problems[:5]))

    @property
    def depth(self) -> int:
        return len(self.phi) - 1

    @classmethod
    def from_prefix_function(cls, source: FiniteTree, target: FiniteTree,
                             fn: Callable[[Node], Node], depth: int | None = None) -> PrefixMapFamily:
        """Tabulate the family of a prefix function.

        ``fn(s)`` is the part of the image determined by the source node ``s``.
        ``phi(n)`` is the least level at which every node determines ``n``
        output symbols; tabulation stops when the source runs out of levels.
        """
        cache: dict = {}

        def out(s):
            r = cache.get(s)
            if r is None:
                r = cache[s] = tuple(fn(s))
            return r

        det = [min(len(out(s)) for s in source.level(L)) for L in range(source.depth + 1)]
        phi, maps = [], []
        L = 0
        n = 0
        limit = target.depth if depth is None else min(depth, target.depth)
        while n <= limit:
            while L <= source.depth and det[L] < n:
                L += 1
            if L > source.depth:
                break
            phi.append(L)
            maps.append({s: out(s)[:n] for s in source.level(L)})
            n += 1
        if not phi:
            raise FamilyError("source too shallow to determine any output")
        return cls(source, target, phi, maps)

    @classmethod
    def identity(cls, T: FiniteTree, depth: int | None = None) -> PrefixMapFamily:
        d = T.depth if depth is None else depth
        return cls(T, T, range(d + 1), [{s: s for s in T.level(n)} for n in range(d + 1)])

    def apply(self, x: Sequence[int], n: int) -> Node:
        if not 0 <= n <= self.depth:
            raise FamilyError(f"level {n} outside the tabulated range 0..{self.depth}")
        m = self.phi[n]
        x = tuple(x)
        if len(x) < m:
            raise FamilyError(f"prefix of length {len(x)} too short, need {m}")
        try:
            return self.maps[n][x[:m]]
        except KeyError:
            raise FamilyError(f"{x[:m]!r} is not a level-{m} node of the source") from None

    def __call__(self, x, n):
        return self.apply(x, n)

    def compose(self, then: PrefixMapFamily) -> PrefixMapFamily:
        """``then o self`` (first ``self``, then ``then``)."""
        phi, maps = [], []
        for n in range(then.depth + 1):
            k = then.phi[n]
            if k > self.depth:
                break
            phi.append(self.phi[k])
            rk, sn = self.maps[k], then.maps[n]
            maps.append({t: sn[rk[t]] for t in rk})
        return PrefixMapFamily(self.source, then.target, phi, maps)

    def problems(self) -> list[str]:
        """Violations of well-formedness, onto-ness and consistency."""
        out = []
        for n, (m, r) in enumerate(zip(self.phi, self.maps)):
            if n and m < self.phi[n - 1]:
                out.append(f"phi not monotone at {n}")
            if m > self.source.depth or n > self.target.depth:
                out.append(f"level {n}: outside the trees")
                continue
            if set(r) != set(self.source.level(m)):
                out.append(f"level {n}: domain is not level {m} of the source")
            tgt = set(self.target.level(n))
            img = set(r.values())
            if not img <= tgt:
                out.append(f"level {n}: image leaves the target level")
            elif img != tgt:
                out.append(f"level {n}: not onto the target level")
        for n in range(self.depth):
            m, m1 = self.phi[n], self.phi[n + 1]
            r, r1 = self.maps[n], self.maps[n + 1]
            for t, v in r1.items():
                if r.get(t[:m]) != v[:n]:
                    out.append(f"level {n}: r_n(t|phi(n)) != r_(n+1)(t)|n at {t!r}")
                    break
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrefixMapFamily):
            return NotImplemented
        return self.phi == other.phi and self.maps == other.maps

    __hash__ = None

    def __repr__(self) -> str:
        return f"PrefixMapFamily(depth={self.depth}, phi={list(self.phi)})"

    def to_json(self) -> dict:
        return {"phi": list(self.phi),
                "maps": [{"n": n, "pairs": [[list(s), list(r[s])] for s in sorted(r)]}
                         for n, r in enumerate(self.maps)]}

    @classmethod
    def from_json(cls, data: Mapping, source: FiniteTree, target: FiniteTree) -> PrefixMapFamily:
        maps = [None] * len(data["phi"])
        for entry in data["maps"]:
            maps[entry["n"]] = {tuple(a): tuple(b) for a, b in entry["pairs"]}
        return cls(source, target, data["phi"], maps)


def compute_modulus(F: PrefixMapFamily, n: int) -> int:
    """Least ``m`` such that agreement on level ``m`` forces agreement of the
    length-``n`` images."""
    if not 0 <= n <= F.depth:
        raise FamilyError(f"modulus at {n} needs the family tabulated to depth {n}")
    r = F.maps[n]
    for m in range(F.phi[n] + 1):
        seen: dict = {}
        for t, v in r.items():
            if seen.setdefault(t[:m], v) != v:
                break
        else:
            return m
    raise AssertionError("unreachable: m = phi(n) always works")


def moduli(F: PrefixMapFamily) -> list[int]:
    return [compute_modulus(F, n) for n in range(F.depth + 1)]


# ---------------------------------------------------------------------------
# Phi_{k,l}: regroup the bit stream of R_k as a branch of R_l


def _bits(k: int, s: Node) -> list[int]:
    if not s:
        return []
    a = s[0]
    if not 0 <= a < 2 ** k or any(v not in (0, 1) for v in s[1:]):
        raise FamilyError(f"{s!r} is not a node of R_{k}")
    return [(a >> (k - 1 - i)) & 1 for i in range(k)] + list(s[1:])


def phi_kl(k: int, l: int, prefix: Sequence[int], length: int | None = None) -> Node:
    """Image under ``Phi_{k,l}`` of the part of a branch fixed by ``prefix``.

    The branch's first symbol is read as ``k`` bits and the rest as bits; the
    stream is regrouped as one ``l``-bit symbol followed by bits.
    """
    if k < 0 or l < 0:
        raise ValueError("k, l >= 0")
    bits = _bits(k, tuple(prefix))
    if len(bits) < l:
        out: Node = ()
    else:
        head = 0
        for b in bits[:l]:
            head = 2 * head + b
        out = (head,) + tuple(bits[l:])
    if length is not None:
        if len(out) < length:
            raise UndeterminedOutput(f"only {len(out)} output symbols determined, {length} requested")
        out = out[:length]
    return out


def phi_kl_family(k: int, l: int, depth: int) -> PrefixMapFamily:
    """``Phi_{k,l}`` tabulated on the depth-``depth`` truncation of ``R_k``."""
    src, tgt = expand(RK(k), depth), expand(RK(l), depth + max(0, k - l))
    return PrefixMapFamily.from_prefix_function(src, tgt, lambda s: phi_kl(k, l, s))


def phi_kl_lipschitz(k: int, l: int) -> Fraction:
    """The exact Lipschitz constant of ``Phi_{k,l}`` on ``[R_k]`` (``l >= 1``).

    Branches that differ in their first bit stay at distance 1, so it never
    drops below 1.
    """
    return Fraction(2) ** (l - k) if l >= k else Fraction(1)


# ---------------------------------------------------------------------------
# the map Psi between T_x and T_y


def _relabel(out: Node) -> Node:
    return (2 * out[0] + 1,) + out[1:] if out else ()


def psi_prefix(x: SequenceSpec, y: SequenceSpec) -> Callable[[Node], Node]:
    """Prefix function of ``Psi``: identity on ``S_omega``, ``Phi_{x(k),y(k)}``
    inside each copy ``R_{x(k),m}``."""
    tx = Tx(x)

    def fn(s):
        where = tx.copy_of(s)
        if where[0] != "R":
            return s
        _, k, _, t, inner = where
        return t + _relabel(phi_kl(x(k), y(k), inner))
    return fn


def build_psi(x: SequenceSpec, y: SequenceSpec, M: int, depth: int,
              width: int = 8) -> tuple[PrefixMapFamily, PrefixMapFamily]:
    """``Psi: [T_x] -> [T_y]`` and its inverse on depth-``depth`` truncations."""
    bound = linf_distance(x, y)
    if bound is None or bound >= M:
        raise FamilyError(f"need |x(k) - y(k)| < {M} for all k, sup is {bound}")
    Tx_, Ty_ = expand(Tx(x), depth, width), expand(Tx(y), depth, width)
    psi = PrefixMapFamily.from_prefix_function(Tx_, Ty_, psi_prefix(x, y))
    inv = PrefixMapFamily.from_prefix_function(Ty_, Tx_, psi_prefix(y, x))
    return psi, inv


# ---------------------------------------------------------------------------
# Lipschitz estimates


@dataclass(frozen=True)
class LipschitzEstimate:
    value: Fraction
    exhaustive: bool
    pairs: int
    undetermined_groups: int = 0


def _lcp(a: Node, b: Node) -> int:
    n = 0
    for u, v in zip(a, b):
        if u != v:
            break
        n += 1
    return n


def _min_cross_lcp(items: list[tuple[Node, int]]) -> int | None:
    """Min lcp of images over pairs from different groups (``None`` if one group)."""
    items.sort()
    first, last = items[0], items[-1]
    if first[1] != last[1]:
        return _lcp(first[0], last[0])
    g = first[1]
    others = [img for img, grp in items if grp != g]
    if not others:
        return None
    return min(_lcp(first[0], others[-1]), _lcp(others[0], last[0]))


def empirical_lipschitz(F: PrefixMapFamily, samples: int | None = None,
                        seed: int = 0) -> LipschitzEstimate:
    """Largest ``d(F x, F x') / d(x, x')`` over branches cut at the deepest
    tabulated level.

    With ``samples=None`` all pairs are covered: for each split node the pair
    with the least common image prefix is found from the sorted images.  Pairs
    whose images agree on the whole tabulated length have undetermined image
    distance; if such pairs could matter the result is flagged non-exhaustive.
    """
    N = F.depth
    D = F.phi[N]
    r = F.maps[N]
    nodes = sorted(r)
    best = Fraction(0)
    if samples is not None:
        rng = random.Random(seed)
        count = 0
        for _ in range(samples):
            a, b = rng.choice(nodes), rng.choice(nodes)
            if a == b:
                continue
            i, j = _lcp(a, b), _lcp(r[a], r[b])
            count += 1
            if j < N:
                best = max(best, Fraction(2) ** (i - j))
        return LipschitzEstimate(best, False, count)
    undetermined = []
    pairs = len(nodes) * (len(nodes) - 1) // 2
    for i in range(D):
        groups: dict = {}
        for s in nodes:
            groups.setdefault(s[:i], []).append((r[s], s[i]))
        for items in groups.values():
            j = _min_cross_lcp(items)
            if j is None:
                continue
            if j >= N:
                undetermined.append(Fraction(2) ** (i - N))
            else:
                best = max(best, Fraction(2) ** (i - j))
    exhaustive = all(u <= best for u in undetermined)
    return LipschitzEstimate(best, exhaustive, pairs, len(undetermined))


def bi_lipschitz(F: PrefixMapFamily, G: PrefixMapFamily) -> LipschitzEstimate:
    a, b = empirical_lipschitz(F), empirical_lipschitz(G)
    return LipschitzEstimate(max(a.value, b.value), a.exhaustive and b.exhaustive,
                             a.pairs + b.pairs, a.undetermined_groups + b.undetermined_groups)


# ---------------------------------------------------------------------------
# l_infinity on reals to l_infinity on N^N


def reduce_linfty_to_naturals(x: Iterable, length: int | None = None) -> list[int]:
    """Interleave the floors of the positive and negative parts of ``x``.

    Entries must be exact (ints, Fractions or decimal strings); floats are
    rejected because the floor has to be exact.
    """
    xs = list(x)
    if length is not None:
        if len(xs) < length:
            raise ValueError(f"need {length} entries, got {len(xs)}")
        xs = xs[:length]
    out = []
    for v in xs:
        if isinstance(v, float):
            raise TypeError("use exact rationals, not floats")
        q = Fraction(v)
        f = math.floor(q)
        if q >= 0:
            out += [f, 0]
        else:
            out += [0, -f]
    return out
