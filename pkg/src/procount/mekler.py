"""Mekler's 2-nilpotent exponent-p groups G(A) and L(X).

An element is kept in the normal form ``c * v``: ``v`` is the ascending word
``prod x_i^alpha_i`` (the *base* vector) and ``c`` is the central part
``prod x_{r,s}^beta_{r,s}`` over pairs ``r < s`` that are not adjacent in the
coding graph.  Two universes are supported:

* :class:`PlainUniverse` -- generators ``x_0, x_1, ...`` with a graph on the
  indices (no edges, the matching graph ``r // 2 == s // 2``, or an explicit
  edge set);
* :class:`LabeledUniverse` -- generators ``a_v, b_v`` for labels ``v`` with
  ``[a_v, b_v] = e``.  Keys are ``(v, 0)`` for ``a_v`` and ``(v, 1)`` for
  ``b_v`` so the generator order is "labels ascending, ``a`` before ``b``".

Commutators use the convention ``[g, h] = g^-1 h^-1 g h``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from .fp_linalg import DEFAULT_P, SparseVector, check_prime, rank2, same_span2, scale, vec_add


class UniverseMismatch(ValueError):
    pass


class FunctorError(ValueError):
    """A generator-image map is not a morphism of the category of L(X) groups."""

    def __init__(self, label, reason: str):
        super().__init__(f"label {label!r}: {reason}")
        self.label = label
        self.reason = reason


# ---------------------------------------------------------------------------
# universes


@dataclass(frozen=True)
class PlainUniverse:
    """Generators ``x_i`` (``i >= 0``) of G(A) for a graph A on the indices."""

    p: int = DEFAULT_P
    graph: str = "free"
    edges: frozenset = frozenset()

    def __post_init__(self):
        check_prime(self.p)
        if self.graph not in ("free", "matching", "edges"):
            raise ValueError(f"unknown graph kind {self.graph!r}")
        if self.graph != "edges" and self.edges:
            raise ValueError("edges are only meaningful with graph='edges'")
        for e in self.edges:
            if len(e) != 2:
                raise ValueError(f"bad edge {set(e)!r}: graph must be irreflexive")

    @classmethod
    def matching(cls, p: int = DEFAULT_P) -> PlainUniverse:
        return cls(p, "matching")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], p: int = DEFAULT_P) -> PlainUniverse:
        return cls(p, "edges", frozenset(frozenset(e) for e in edges))

    def adjacent(self, r, s) -> bool:
        if r == s:
            return False
        if self.graph == "matching":
            return r // 2 == s // 2
        if self.graph == "edges":
            return frozenset((r, s)) in self.edges
        return False

    def check_key(self, key) -> None:
        if not isinstance(key, int) or isinstance(key, bool) or key < 0:
            raise UniverseMismatch(f"{key!r} is not a generator index")

    def generators(self) -> None:
        return None

    def identity(self) -> GroupElement:
        return GroupElement(self, SparseVector.zero(self.p), SparseVector.zero(self.p))

    def gen(self, key: int, exponent: int = 1) -> GroupElement:
        self.check_key(key)
        return GroupElement(self, SparseVector.unit(key, self.p, exponent), SparseVector.zero(self.p))

    def central_gen(self, r: int, s: int, exponent: int = 1) -> GroupElement:
        """``x_{r,s}^exponent`` where ``x_{r,s} = [x_r, x_s]``."""
        return GroupElement(self, SparseVector.zero(self.p),
                            normalize_central(self, {(r, s): exponent}))


@dataclass(frozen=True)
class LabeledUniverse:
    """Generators ``a_v, b_v`` of L(X); ``labels`` fixes X when finite."""

    p: int = DEFAULT_P
    labels: frozenset | None = field(default=None)

    def __post_init__(self):
        check_prime(self.p)
        if self.labels is not None and not isinstance(self.labels, frozenset):
            object.__setattr__(self, "labels", frozenset(self.labels))

    @classmethod
    def over(cls, labels: Iterable, p: int = DEFAULT_P) -> LabeledUniverse:
        return cls(p, frozenset(labels))

    def adjacent(self, r, s) -> bool:
        return r[0] == s[0] and r[1] != s[1]

    def check_key(self, key) -> None:
        if not (isinstance(key, tuple) and len(key) == 2 and key[1] in (0, 1)):
            raise UniverseMismatch(f"{key!r} is not a labelled generator key")
        if self.labels is not None and key[0] not in self.labels:
            raise UniverseMismatch(f"label {key[0]!r} is outside this universe")

    def sorted_labels(self) -> list:
        if self.labels is None:
            raise ValueError("universe has no fixed label set")
        return sorted(self.labels)

    def generators(self) -> list | None:
        if self.labels is None:
            return None
        return [(v, letter) for v in self.sorted_labels() for letter in (0, 1)]

    def identity(self) -> GroupElement:
        return GroupElement(self, SparseVector.zero(self.p), SparseVector.zero(self.p))

    def gen(self, key, exponent: int = 1) -> GroupElement:
        self.check_key(key)
        return GroupElement(self, SparseVector.unit(key, self.p, exponent), SparseVector.zero(self.p))

    def a(self, v, exponent: int = 1) -> GroupElement:
        return self.gen((v, 0), exponent)

    def b(self, v, exponent: int = 1) -> GroupElement:
        return self.gen((v, 1), exponent)

    def central_gen(self, r, s, exponent: int = 1) -> GroupElement:
        return GroupElement(self, SparseVector.zero(self.p),
                            normalize_central(self, {(r, s): exponent}))


Universe = PlainUniverse | LabeledUniverse


def normalize_central(universe: Universe, pairs: Mapping[tuple, int]) -> SparseVector:
    """Central vector from exponents on arbitrary ordered pairs.

    ``x_{s,r} = x_{r,s}^-1``; pairs on a graph edge or on a single generator
    are trivial and dropped.
    """
    acc: dict = {}
    for (r, s), c in pairs.items():
        if r == s or universe.adjacent(r, s):
            continue
        if r > s:
            r, s, c = s, r, -c
        acc[(r, s)] = acc.get((r, s), 0) + c
    return SparseVector.from_mapping(acc, universe.p)


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class GroupElement:
    universe: Universe
    base: SparseVector
    central: SparseVector

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    def __pow__(self, n: int) -> GroupElement:
        return power(self, n)

    def inverse(self) -> GroupElement:
        return inverse(self)

    def is_identity(self) -> bool:
        return not self.base and not self.central

    def __str__(self) -> str:
        return format_element(self)


def _same_universe(u: GroupElement, w: GroupElement) -> Universe:
    if u.universe is not w.universe and u.universe != w.universe:
        raise UniverseMismatch(f"{u.universe!r} vs {w.universe!r}")
    return u.universe


def multiply(u: GroupElement, w: GroupElement) -> GroupElement:
    U = _same_universe(u, w)
    if not w.base and not w.central:
        return u
    if not u.base and not u.central:
        return w
    # moving each x_r^b of w left past every x_s^a of u with s > r costs x_{r,s}^(-a b)
    kappa: dict = {}
    for r, b in w.base.entries:
        for s, a in reversed(u.base.entries):
            if s <= r:
                break
            if not U.adjacent(r, s):
                kappa[(r, s)] = kappa.get((r, s), 0) - a * b
    central = vec_add(u.central, w.central)
    if kappa:
        central = vec_add(central, SparseVector.from_mapping(kappa, U.p))
    return GroupElement(U, vec_add(u.base, w.base), central)


def inverse(u: GroupElement) -> GroupElement:
    U = u.universe
    corr: dict = {}
    entries = u.base.entries
    for i, (r, a) in enumerate(entries):
        for s, b in entries[i + 1:]:
            if not U.adjacent(r, s):
                corr[(r, s)] = -a * b
    central = scale(u.central, -1)
    if corr:
        central = vec_add(central, SparseVector.from_mapping(corr, U.p))
    return GroupElement(U, scale(u.base, -1), central)


def commutator(u: GroupElement, w: GroupElement) -> GroupElement:
    """``[u, w] = u^-1 w^-1 u w``, always central."""
    U = _same_universe(u, w)
    alpha, beta = u.base.as_dict, w.base.as_dict
    keys = sorted(set(alpha) | set(beta))
    acc: dict = {}
    for i, r in enumerate(keys):
        ar, br = alpha.get(r, 0), beta.get(r, 0)
        for s in keys[i + 1:]:
            if U.adjacent(r, s):
                continue
            c = ar * beta.get(s, 0) - alpha.get(s, 0) * br
            if c % U.p:
                acc[(r, s)] = c
    return GroupElement(U, SparseVector.zero(U.p), SparseVector.from_mapping(acc, U.p))


def power(u: GroupElement, n: int) -> GroupElement:
    if n < 0:
        return power(inverse(u), -n)
    result = u.universe.identity()
    sq = u
    while n:
        if n & 1:
            result = multiply(result, sq)
        n >>= 1
        if n:
            sq = multiply(sq, sq)
    return result


def is_central(u: GroupElement) -> bool:
    return not u.base


def central_image(u: GroupElement) -> SparseVector:
    """Coordinates of ``u Z`` in the central quotient (free abelian of exponent p)."""
    return u.base


def word_product(universe: Universe, word: Iterable[tuple[Hashable, int]]) -> GroupElement:
    """Fold :func:`multiply` over the letters ``x_key^exponent`` of ``word``."""
    out = universe.identity()
    for key, e in word:
        out = multiply(out, power(universe.gen(key), e))
    return out


def collection_oracle(universe: Universe, word: Iterable[tuple[Hashable, int]]) -> GroupElement:
    """Normal form of a word by naive collection.

    Every letter is expanded into single generators and adjacent inversions
    ``x_s x_r`` (``r < s``) are swapped one at a time, each swap leaving a
    central ``x_{r,s}^-1`` behind.  Independent of the closed formulas used by
    :func:`multiply`.
    """
    p = universe.p
    letters: list = []
    for key, e in word:
        universe.check_key(key)
        letters.extend([key] * (e % p))
    central: dict = {}
    changed = True
    while changed:
        changed = False
        for i in range(len(letters) - 1):
            s, r = letters[i], letters[i + 1]
            if s > r:
                letters[i], letters[i + 1] = r, s
                if not universe.adjacent(r, s):
                    central[(r, s)] = central.get((r, s), 0) - 1
                changed = True
    counts: dict = {}
    for key in letters:
        counts[key] = counts.get(key, 0) + 1
    return GroupElement(universe, SparseVector.from_mapping(counts, p),
                        SparseVector.from_mapping(central, p))


def enumerate_group(universe: LabeledUniverse | PlainUniverse, n_gens: int | None = None) -> Iterator[GroupElement]:
    """Every element of a finite L(X) (or of G(A) on ``x_0..x_{n_gens-1}``)."""
    p = universe.p
    if isinstance(universe, LabeledUniverse):
        gens = universe.generators()
        if gens is None:
            raise ValueError("enumeration needs a finite label set")
    else:
        if n_gens is None:
            raise ValueError("plain universes need n_gens")
        gens = list(range(n_gens))
    pairs = [(r, s) for i, r in enumerate(gens) for s in gens[i + 1:] if not universe.adjacent(r, s)]
    bases = [SparseVector.from_mapping(zip(gens, exps), p)
             for exps in itertools.product(range(p), repeat=len(gens))]
    centrals = [SparseVector.from_mapping(zip(pairs, exps), p)
                for exps in itertools.product(range(p), repeat=len(pairs))]
    for base in bases:
        for central in centrals:
            yield GroupElement(universe, base, central)


# ---------------------------------------------------------------------------
# homomorphisms given on generators


def apply_generator_images(image_of: Callable[[Any], GroupElement], u: GroupElement,
                           target: Universe) -> GroupElement:
    """Image of ``u`` under the homomorphism determined by ``image_of`` on generators."""
    base = u.base.entries
    if not u.central and len(base) == 1 and base[0][1] == 1:
        return image_of(base[0][0])
    out = target.identity()
    for key, a in base:
        out = multiply(out, power(image_of(key), a))
    if u.central:
        acc = SparseVector.zero(target.p)
        for (r, s), c in u.central.entries:
            acc = vec_add(acc, scale(commutator(image_of(r), image_of(s)).central, c))
        out = multiply(out, GroupElement(target, SparseVector.zero(target.p), acc))
    return out


def induced_epi(q: Mapping | Callable, u: GroupElement, target: LabeledUniverse | None = None) -> GroupElement:
    """Image of ``u`` in L(Y) under the map induced by ``q: X -> Y``."""
    if not isinstance(u.universe, LabeledUniverse):
        raise UniverseMismatch("induced_epi acts on L(X) universes")
    if target is None:
        target = LabeledUniverse(u.universe.p)
    lookup = q.__getitem__ if isinstance(q, Mapping) else q

    def image_of(key):
        try:
            y = lookup(key[0])
        except (KeyError, IndexError):
            raise ValueError(f"q is undefined on {key[0]!r}") from None
        return target.gen((y, key[1]))

    return apply_generator_images(image_of, u, target)


class Morphism:
    """Homomorphism between finite L(X) groups stored by its generator images.

    Equality is equality of images on every generator.
    """

    __slots__ = ("source", "target", "images")

    def __init__(self, source: LabeledUniverse, target: LabeledUniverse, images: Mapping):
        self.source = source
        self.target = target
        self.images = dict(images)

    @classmethod
    def induced(cls, q: Mapping, source: LabeledUniverse, target: LabeledUniverse) -> Morphism:
        images = {}
        for v in source.sorted_labels():
            y = q[v]
            images[(v, 0)] = target.gen((y, 0))
            images[(v, 1)] = target.gen((y, 1))
        return cls(source, target, images)

    @classmethod
    def identity(cls, universe: LabeledUniverse) -> Morphism:
        return cls(universe, universe, {k: universe.gen(k) for k in universe.generators()})

    def __call__(self, u: GroupElement) -> GroupElement:
        if u.universe is not self.source and u.universe != self.source:
            raise UniverseMismatch("element is not in the morphism's source")
        try:
            return apply_generator_images(self.images.__getitem__, u, self.target)
        except KeyError as exc:
            raise UniverseMismatch(f"no image for generator {exc.args[0]!r}") from None

    def compose(self, first: Morphism) -> Morphism:
        """``self o first``."""
        return Morphism(first.source, self.target, {k: self(g) for k, g in first.images.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.images == other.images)

    __hash__ = None

    def generator_pairs(self) -> dict:
        """``v -> (g(a_v), g(b_v))`` for every label of the source."""
        return {v: (self.images[(v, 0)], self.images[(v, 1)]) for v in self.source.sorted_labels()}

    def __repr__(self) -> str:
        return f"Morphism({len(self.images)} generator images)"


def functor_F(images: Mapping | Morphism) -> dict:
    """Recover the set map ``X -> Y`` from a morphism of the category of L(X) groups.

    ``images`` maps each label ``v`` to ``(g(a_v), g(b_v))``, or is a
    :class:`Morphism`.  ``p(v)`` is the unique ``y`` whose generator pair spans
    the same plane as ``g(a_v), g(b_v)`` in the central quotient.
    """
    if isinstance(images, Morphism):
        images = images.generator_pairs()
    out = {}
    for v, (ga, gb) in images.items():
        U = _same_universe(ga, gb)
        if not isinstance(U, LabeledUniverse):
            raise UniverseMismatch("functor F needs L(Y) targets")
        c, d = central_image(ga), central_image(gb)
        if rank2(c, d) < 2:
            raise FunctorError(v, "generator pair image has rank < 2")
        labels = {key[0] for key in itertools.chain(c.support, d.support)}
        if len(labels) != 1:
            raise FunctorError(v, f"image support spreads over labels {sorted(labels, key=repr)!r}")
        (y,) = labels
        ea = SparseVector.unit((y, 0), U.p)
        eb = SparseVector.unit((y, 1), U.p)
        if not same_span2(c, d, ea, eb):
            raise FunctorError(v, "inconsistent span")
        out[v] = y
    return out


# ---------------------------------------------------------------------------
# the commutation dichotomy


class Dichotomy(NamedTuple):
    kind: str  # "pair", "rank<=1" or "violation"
    pair: Any = None


def commuting_dichotomy_check(c: GroupElement, d: GroupElement) -> Dichotomy:
    """Classify a commuting pair of L (matching graph) or L(X).

    Either ``<c Z, d Z>`` equals ``<x_i Z, x_{i+1} Z>`` for an even ``i`` (resp.
    ``<a_v Z, b_v Z>``), or it has rank at most 1.  Anything else is reported as
    a violation.
    """
    U = _same_universe(c, d)
    if isinstance(U, PlainUniverse) and U.graph != "matching":
        raise ValueError("the dichotomy is stated for the matching graph")
    if not commutator(c, d).is_identity():
        raise ValueError("inputs do not commute")
    cb, db = central_image(c), central_image(d)
    if rank2(cb, db) <= 1:
        return Dichotomy("rank<=1")
    support = set(cb.support) | set(db.support)
    if isinstance(U, PlainUniverse):
        i = 2 * (min(support) // 2)
        if support <= {i, i + 1} and same_span2(cb, db, SparseVector.unit(i, U.p),
                                                 SparseVector.unit(i + 1, U.p)):
            return Dichotomy("pair", i)
    else:
        v = min(support)[0]
        if all(k[0] == v for k in support) and same_span2(
                cb, db, SparseVector.unit((v, 0), U.p), SparseVector.unit((v, 1), U.p)):
            return Dichotomy("pair", v)
    return Dichotomy("violation")


# ---------------------------------------------------------------------------
# canonical text format


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def format_label(v) -> str:
    if isinstance(v, bool):
        raise ValueError("boolean labels are not supported")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, tuple) and all(isinstance(i, int) for i in v):
        return "<" + ",".join(map(str, v)) + ">"
    if isinstance(v, str) and _IDENT.match(v):
        return v
    raise ValueError(f"label {v!r} has no text form")


def _format_key(universe: Universe, key) -> str:
    if isinstance(universe, PlainUniverse):
        return f"x{key}"
    return ("a" if key[1] == 0 else "b") + f"({format_label(key[0])})"


def _with_exp(text: str, e: int) -> str:
    return text if e == 1 else f"{text}^{e}"


def format_element(u: GroupElement) -> str:
    """Canonical string: base factors ascending, then central factors."""
    U = u.universe
    parts = [_with_exp(_format_key(U, k), e) for k, e in u.base.entries]
    for (r, s), e in u.central.entries:
        if isinstance(U, PlainUniverse):
            parts.append(_with_exp(f"x{r},{s}", e))
        else:
            parts.append(_with_exp(f"[{_format_key(U, r)},{_format_key(U, s)}]", e))
    return "*".join(parts) if parts else "e"


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[()\[\]<>,*^]))")


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        tokens.append(m.group(m.lastgroup))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


class _Parser:
    def __init__(self, text: str, universe: Universe):
        self.tokens = _tokenize(text)
        self.i = 0
        self.U = universe

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'a token'}, got {tok!r}")
        self.i += 1
        return tok

    def parse(self) -> GroupElement:
        out = self.product()
        if self.peek() is not None:
            raise ParseError(f"trailing input at {self.peek()!r}")
        return out

    def product(self) -> GroupElement:
        out = self.factor()
        while self.peek() == "*":
            self.take("*")
            out = multiply(out, self.factor())
        return out

    def factor(self) -> GroupElement:
        out = self.atom()
        if self.peek() == "^":
            self.take("^")
            tok = self.take()
            if not re.fullmatch(r"-?\d+", tok):
                raise ParseError(f"bad exponent {tok!r}")
            out = power(out, int(tok))
        return out

    def atom(self) -> GroupElement:
        tok = self.take()
        if tok == "(":
            out = self.product()
            self.take(")")
            return out
        if tok == "[":
            left = self.product()
            self.take(",")
            right = self.product()
            self.take("]")
            return commutator(left, right)
        if tok == "e":
            return self.U.identity()
        if isinstance(self.U, PlainUniverse):
            m = re.fullmatch(r"x(\d+)", tok)
            if not m:
                raise ParseError(f"unknown generator {tok!r} for a plain universe")
            r = int(m.group(1))
            if self.peek() == ",":
                # x_{r,s} is only read when the comma is followed by an index
                nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else None
                if nxt is not None and re.fullmatch(r"\d+", nxt):
                    self.take(",")
                    return self.U.central_gen(r, int(self.take()))
            return self.U.gen(r)
        if tok not in ("a", "b"):
            raise ParseError(f"unknown generator {tok!r} for a labelled universe")
        self.take("(")
        label = self.label()
        self.take(")")
        return self.U.gen((label, 0 if tok == "a" else 1))

    def label(self):
        tok = self.peek()
        if tok == ")":
            raise ParseError("empty label")
        if tok == "<":
            self.take("<")
            items = []
            while self.peek() != ">":
                items.append(int(self.take()))
                if self.peek() == ",":
                    self.take(",")
            self.take(">")
            return tuple(items)
        tok = self.take()
        if re.fullmatch(r"-?\d+", tok):
            return int(tok)
        return tok


def parse_element(text: str, universe: Universe) -> GroupElement:
    """Inverse of :func:`format_element`; also accepts products, powers,
    parentheses and commutators ``[g,h]`` of sub-expressions."""
    try:
        return _Parser(text, universe).parse()
    except TypeError:
        raise ParseError("labels of different kinds have no common order") from None


def looks_labelled(text: str) -> bool:
    return re.search(r"\b[ab]\s*\(", text) is not None


def format_generator(universe: Universe, key) -> str:
    return _format_key(universe, key)


def parse_generator(text: str, universe: Universe):
    u = parse_element(text, universe)
    if u.central or len(u.base) != 1 or u.base.entries[0][1] != 1:
        raise ParseError(f"{text!r} is not a single generator")
    return u.base.entries[0][0]

