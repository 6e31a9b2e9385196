"""Inverse systems of type omega, pre-morphisms between them and the functor P
on truncated inverse limits.

Levels are finite L(X) groups (:class:`procount.mekler.LabeledUniverse`) and
all maps are :class:`procount.mekler.Morphism` values, so equality of maps is
equality on generators.  Every statement about "all n" is checked up to the
truncation depth only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .fp_linalg import DEFAULT_P
from .mekler import (GroupElement, LabeledUniverse, Morphism, format_element, format_generator,
                     parse_element, parse_generator)
from .trees import FiniteTree
from .unifmaps import PrefixMapFamily


class InverseSystemError(ValueError):
    pass


class CoherenceError(ValueError):
    def __init__(self, level: int, detail: str = ""):
        super().__init__(f"coherence fails at level {level}" + (f": {detail}" if detail else ""))
        self.level = level


class InverseSystem:
    """Groups ``A_0 .. A_d`` with onto bindings ``p_n: A_{n+1} -> A_n``."""

    def __init__(self, universes: Sequence[LabeledUniverse], bindings: Sequence[Morphism],
                 label_maps: Sequence[Mapping] | None = None, tree: FiniteTree | None = None):
        if len(bindings) != len(universes) - 1:
            raise InverseSystemError("need one binding map per consecutive pair of levels")
        for n, p in enumerate(bindings):
            if p.source is not universes[n + 1] or p.target is not universes[n]:
                raise InverseSystemError(f"binding {n} has the wrong endpoints")
        self.universes = tuple(universes)
        self.bindings = tuple(bindings)
        self.label_maps = None if label_maps is None else tuple(dict(m) for m in label_maps)
        self.tree = tree
        self._intervals: dict = {}

    @classmethod
    def from_tree(cls, T: FiniteTree, p: int = DEFAULT_P) -> InverseSystem:
        """``A_n = L(T_n)`` with bindings induced by the predecessor maps."""
        universes = [LabeledUniverse.over(T.level(n), p) for n in range(T.depth + 1)]
        label_maps = [{t: t[:-1] for t in T.level(n + 1)} for n in range(T.depth)]
        bindings = [Morphism.induced(label_maps[n], universes[n + 1], universes[n])
                    for n in range(T.depth)]
        return cls(universes, bindings, label_maps, T)

    @property
    def depth(self) -> int:
        return len(self.universes) - 1

    def level(self, n: int) -> LabeledUniverse:
        if not 0 <= n <= self.depth:
            raise InverseSystemError(f"level {n} outside 0..{self.depth}")
        return self.universes[n]

    def interval_map(self, k: int, n: int) -> Morphism:
        """``p_{k,n} = p_n o ... o p_{k-1}: A_k -> A_n``."""
        if not 0 <= n <= k <= self.depth:
            raise InverseSystemError(f"interval map needs 0 <= n <= k <= {self.depth}, got k={k}, n={n}")
        key = (k, n)
        got = self._intervals.get(key)
        if got is None:
            if k == n:
                got = Morphism.identity(self.universes[n])
            else:
                got = self.interval_map(k - 1, n).compose(self.bindings[k - 1])
            self._intervals[key] = got
        return got

    def onto_problems(self) -> list[str]:
        """Bindings whose images miss a generator of the level below."""
        out = []
        for n, p in enumerate(self.bindings):
            hit = {u.base.entries[0][0] for u in p.images.values()
                   if not u.central and len(u.base) == 1 and u.base.entries[0][1] == 1}
            missing = set(self.universes[n].generators()) - hit
            if missing:
                out.append(f"binding {n} misses {len(missing)} generators")
        return out

    def section(self, n: int) -> Morphism:
        """A homomorphism ``A_n -> A_{n+1}`` right inverse to ``p_n``.

        Each generator goes to the least generator mapped onto it; this is a
        homomorphism when the bindings come from set maps.
        """
        p = self.bindings[n]
        pre: dict = {}
        for key in self.universes[n + 1].generators():
            u = p.images[key]
            if not u.central and len(u.base) == 1 and u.base.entries[0][1] == 1:
                pre.setdefault(u.base.entries[0][0], key)
        tgt = self.universes[n + 1]
        try:
            images = {key: tgt.gen(pre[key]) for key in self.universes[n].generators()}
        except KeyError as exc:
            raise InverseSystemError(f"generator {exc.args[0]!r} has no generator preimage") from None
        return Morphism(self.universes[n], tgt, images)

    def to_json(self) -> dict:
        levels = [[format_generator(U, g) for g in U.generators()] for U in self.universes]
        bindings = [{"n": n, "gen_images": _images_json(p)} for n, p in enumerate(self.bindings)]
        return {"p": self.universes[0].p, "levels": levels, "bindings": bindings}


def _images_json(f: Morphism) -> dict:
    return {format_generator(f.source, k): format_element(f.images[k]) for k in f.source.generators()}


def _images_from_json(data: Mapping, source: LabeledUniverse, target: LabeledUniverse) -> Morphism:
    return Morphism(source, target,
                    {parse_generator(k, source): parse_element(v, target) for k, v in data.items()})


# ---------------------------------------------------------------------------
# pre-morphisms


class PreMorphism:
    """``(f, phi)`` with ``f_n: A_{phi(n)} -> B_n`` for ``n = 0 .. depth``."""

    def __init__(self, source: InverseSystem, target: InverseSystem, phi: Sequence[int],
                 components: Sequence[Morphism]):
        self.source = source
        self.target = target
        self.phi = tuple(int(v) for v in phi)
        self.components = tuple(components)
        if len(self.phi) != len(self.components):
            raise InverseSystemError("phi and components must have the same length")
        for n, (m, f) in enumerate(zip(self.phi, self.components)):
            if n and m < self.phi[n - 1]:
                raise InverseSystemError(f"phi is not monotone at {n}")
            if f.source is not source.level(m) or f.target is not target.level(n):
                raise InverseSystemError(f"component {n} has the wrong endpoints")

    @property
    def depth(self) -> int:
        return len(self.phi) - 1

    @classmethod
    def induced(cls, family: PrefixMapFamily, source: InverseSystem, target: InverseSystem) -> PreMorphism:
        """``f_n = r_n^`` for the level maps ``r_n`` of a prefix-map family."""
        comps = [Morphism.induced(family.maps[n], source.level(m), target.level(n))
                 for n, m in enumerate(family.phi)]
        return cls(source, target, family.phi, comps)

    def with_component(self, n: int, f: Morphism) -> PreMorphism:
        comps = list(self.components)
        comps[n] = f
        return PreMorphism(self.source, self.target, self.phi, comps)

    def __repr__(self) -> str:
        return f"PreMorphism(phi={list(self.phi)})"

    def to_json(self) -> dict:
        return {"phi": list(self.phi),
                "components": [{"n": n, "gen_images": _images_json(f)}
                               for n, f in enumerate(self.components)]}

    @classmethod
    def from_json(cls, data: Mapping, source: InverseSystem, target: InverseSystem) -> PreMorphism:
        phi = list(data["phi"])
        comps = [None] * len(phi)
        for entry in data["components"]:
            n = entry["n"]
            comps[n] = _images_from_json(entry["gen_images"], source.level(phi[n]), target.level(n))
        return cls(source, target, phi, comps)


def identity_premorphism(sys: InverseSystem, depth: int | None = None) -> PreMorphism:
    d = sys.depth if depth is None else depth
    return PreMorphism(sys, sys, range(d + 1), [Morphism.identity(sys.level(n)) for n in range(d + 1)])


def premorphism_failures(F: PreMorphism, upTo: int | None = None) -> list[tuple[int, int]]:
    """Pairs ``(n, k)``, ``n < k``, whose square fails to commute."""
    top = F.depth if upTo is None else min(upTo, F.depth)
    bad = []
    for k in range(1, top + 1):
        for n in range(k):
            left = F.components[n].compose(F.source.interval_map(F.phi[k], F.phi[n]))
            right = F.target.interval_map(k, n).compose(F.components[k])
            if left.images != right.images:
                bad.append((n, k))
    return bad


def check_premorphism(F: PreMorphism, upTo: int | None = None) -> bool:
    return not premorphism_failures(F, upTo)


def compose(F: PreMorphism, G: PreMorphism) -> PreMorphism:
    """``G o F`` for ``F: A -> B`` and ``G: B -> C``."""
    if G.source is not F.target:
        raise InverseSystemError("systems do not match")
    phi, comps = [], []
    for n in range(G.depth + 1):
        k = G.phi[n]
        if k > F.depth:
            break
        phi.append(F.phi[k])
        comps.append(G.components[n].compose(F.components[k]))
    if not phi:
        raise InverseSystemError("depth exhausted")
    return PreMorphism(F.source, G.target, phi, comps)


def equivalent(F: PreMorphism, G: PreMorphism, upTo: int | None = None) -> bool:
    """``F ~ G``: for each ``n`` some ``m`` with
    ``f_n o p_{m,phi(n)} = g_n o p_{m,phi'(n)}``."""
    if F.source is not G.source or F.target is not G.target:
        raise InverseSystemError("equivalence needs common endpoints")
    top = min(F.depth, G.depth) if upTo is None else min(upTo, F.depth, G.depth)
    A = F.source
    for n in range(top + 1):
        a, b = F.phi[n], G.phi[n]
        for m in range(max(a, b), A.depth + 1):
            lhs = F.components[n].compose(A.interval_map(m, a))
            rhs = G.components[n].compose(A.interval_map(m, b))
            if lhs.images == rhs.images:
                break
        else:
            return False
    return True


def is_interval_premorphism(F: PreMorphism) -> bool:
    """``f_n = p_{phi(n), n}`` for every tabulated ``n``."""
    return all(f.images == F.source.interval_map(m, n).images
               for n, (m, f) in enumerate(zip(F.phi, F.components)))


# ---------------------------------------------------------------------------
# coherent sequences and the functor P


def evaluate_limit(sys: InverseSystem, seq: Sequence[GroupElement]) -> tuple[GroupElement, ...]:
    """Return ``seq`` after checking ``p_n(g_{n+1}) = g_n`` at every level."""
    seq = tuple(seq)
    if len(seq) > sys.depth + 1:
        raise CoherenceError(sys.depth + 1, "sequence is longer than the system")
    for n, g in enumerate(seq):
        if g.universe != sys.level(n):
            raise CoherenceError(n, "element lives in the wrong group")
    for n in range(len(seq) - 1):
        if sys.bindings[n](seq[n + 1]) != seq[n]:
            raise CoherenceError(n, f"p_{n} of level {n + 1} differs from level {n}")
    return seq


def lift(sys: InverseSystem, g: GroupElement, n: int, depth: int | None = None) -> tuple[GroupElement, ...]:
    """A coherent sequence through ``g`` at level ``n``, lifted with sections."""
    top = sys.depth if depth is None else depth
    seq = [g]
    for m in range(n, top):
        seq.append(sys.section(m)(seq[-1]))
    below = [g]
    for m in range(n - 1, -1, -1):
        below.append(sys.bindings[m](below[-1]))
    return tuple(below[::-1][:-1]) + tuple(seq)


def random_coherent(sys: InverseSystem, rng: random.Random, length: int = 6) -> tuple[GroupElement, ...]:
    """Lift a random word on the top level down through the system."""
    U = sys.level(sys.depth)
    gens = U.generators()
    g = U.identity()
    for _ in range(length):
        g = g * U.gen(rng.choice(gens), rng.randrange(1, U.p))
    out = [g]
    for n in range(sys.depth - 1, -1, -1):
        out.append(sys.bindings[n](out[-1]))
    return tuple(out[::-1])


def apply_P(F: PreMorphism, seq: Sequence[GroupElement]) -> tuple[GroupElement, ...]:
    """Level ``n`` of the output is ``f_n`` of level ``phi(n)`` of the input."""
    out = []
    for n, m in enumerate(F.phi):
        if m >= len(seq):
            break
        out.append(F.components[n](seq[m]))
    if not out:
        raise InverseSystemError("input sequence too short for level 0")
    return tuple(out)


def derive_phi(source: InverseSystem, gammas: Sequence[Morphism]) -> list[int]:
    """Least monotone ``phi`` with ``ker p_{D,phi(n)}`` inside ``ker gamma_n``.

    ``gammas[n]: A_D -> B_n`` is the ``n``-th coordinate of a map on the
    truncated limit, ``D = source.depth``.  The kernel inclusion is tested on
    generators: ``gamma_n`` must agree on generators identified by
    ``p_{D,m}``.
    """
    D = source.depth
    phi = []
    for n, g in enumerate(gammas):
        if g.source is not source.level(D):
            raise InverseSystemError(f"gamma_{n} must be defined on level {D}")
        start = phi[-1] if phi else 0
        for m in range(start, D + 1):
            p = source.interval_map(D, m)
            seen: dict = {}
            if all(seen.setdefault(p.images[key], g.images[key]) == g.images[key]
                   for key in source.level(D).generators()):
                phi.append(m)
                break
        else:
            raise InverseSystemError(f"gamma_{n} factors through no level up to {D}")
    return phi
